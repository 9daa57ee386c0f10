// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "drforge/metrics.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

#include "drforge/error.hpp"
#include "drforge/rng.hpp"

namespace drforge {
namespace {

Image random_image(int w, int h, int c, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
  Image img(w, h, c);
  Pcg32 rng = Pcg32::keyed({seed});
  for (float& v : img.data) v = static_cast<float>(rng.uniform(lo, hi));
  return img;
}

Image scaled(const Image& img, double s) {
  Image out = img;
  for (float& v : out.data) v = static_cast<float>(v * s);
  return out;
}

// Direct 11x11 Gaussian (sigma 1.5) windows at every valid position.
double ssim_oracle(const Image& a, const Image& b) {
  double g[11], norm = 0;
  for (int i = 0; i < 11; ++i) norm += g[i] = std::exp(-sqr(i - 5.0) / (2 * 1.5 * 1.5));
  for (double& v : g) v /= norm;
  const double c1 = 1e-4, c2 = 9e-4;
  double total = 0;
  for (int c = 0; c < a.channels; ++c) {
    double sum = 0;
    int count = 0;
    for (int y = 0; y + 11 <= a.height; ++y)
      for (int x = 0; x + 11 <= a.width; ++x) {
        double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
        for (int j = 0; j < 11; ++j)
          for (int i = 0; i < 11; ++i) {
            const double w = g[i] * g[j], p = a.at(x + i, y + j, c), q = b.at(x + i, y + j, c);
            ma += w * p;
            mb += w * q;
            saa += w * p * p;
            sbb += w * q * q;
            sab += w * p * q;
          }
        const double va = saa - ma * ma, vb = sbb - mb * mb, cov = sab - ma * mb;
        sum += (2 * ma * mb + c1) * (2 * cov + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
        ++count;
      }
    total += sum / count;
  }
  return total / a.channels;
}

TEST(SolveScale, RecoversInverseOfUniformGain) {
  Image gt = random_image(16, 12, 3, 1, 0.1, 1.0);
  for (double s : solve_scale(scaled(gt, 2.0), gt)) EXPECT_NEAR(s, 0.5, 1e-6);
}

TEST(SolveScale, MinimizesSquaredErrorOnGrid) {
  Image pred = random_image(12, 12, 1, 2), gt = random_image(12, 12, 1, 3);
  const double s = solve_scale(pred, gt)[0];
  auto sse = [&](double k) {
    double e = 0;
    for (std::size_t i = 0; i < gt.data.size(); ++i) e += sqr(k * pred.data[i] - gt.data[i]);
    return e;
  };
  for (int i = 0; i <= 400; ++i) EXPECT_LE(sse(s), sse(i * 0.005) + 1e-9);
}

TEST(SolveScale, MaskRestrictsPixels) {
  Image gt(4, 1, 1), pred(4, 1, 1), mask(4, 1, 1, 0.0f);
  gt.data = {1, 1, 1, 1};
  pred.data = {2, 2, 5, 5};
  mask.data = {1, 1, 0, 0};
  EXPECT_NEAR(solve_scale(pred, gt, mask)[0], 0.5, 1e-12);
  EXPECT_THROW(solve_scale(pred, gt, Image(4, 1, 1, 0.0f)), DomainError);
}

TEST(Psnr, KnownMse) {
  Image gt(10, 10, 3, 0.5f), pred(10, 10, 3, 0.6f);
  EXPECT_NEAR(psnr(pred, gt), 20.0, 1e-4);
  EXPECT_EQ(psnr(gt, gt), kPsnrCap);
  EXPECT_THROW(psnr(Image(3, 3, 3), gt), DomainError);
}

TEST(Psnr, ScaleInvariantReachesCapForScaledPrediction) {
  Image gt = random_image(20, 20, 3, 4, 0.05, 1.0);
  std::vector<double> scale;
  EXPECT_NEAR(si_psnr(scaled(gt, 3.0), gt, {}, 1.0, &scale), kPsnrCap, 1e-9);
  ASSERT_EQ(scale.size(), 3u);
  EXPECT_NEAR(scale[1], 1.0 / 3.0, 1e-6);
  EXPECT_LT(psnr(scaled(gt, 3.0), gt), 20.0);
}

TEST(Ssim, MatchesDirectConvolution) {
  Image a = random_image(23, 17, 3, 5), b = random_image(23, 17, 3, 6);
  for (std::size_t i = 0; i < b.data.size(); ++i) b.data[i] = 0.7f * a.data[i] + 0.3f * b.data[i];
  EXPECT_NEAR(ssim(a, b), ssim_oracle(a, b), 1e-6);
  EXPECT_NEAR(ssim(a, a), 1.0, 1e-9);
}

TEST(Ssim, NegatedImageScoresBelowOne) {
  Image a = random_image(16, 16, 1, 7);
  EXPECT_LT(ssim(scaled(a, -1.0), a), 1.0);
  EXPECT_THROW(ssim(Image(8, 8, 1), Image(8, 8, 1)), DomainError);
}

TEST(AngularError, KnownAngles) {
  Image gt(3, 1, 3), pred(3, 1, 3);
  gt.data = {0, 0, 1, 0, 0, 1, 0, 0, 1};
  pred.data = {0, 0, 2, 1, 0, 0, 0, 0, -1};
  Image mask(3, 1, 1, 0.0f);
  for (int x = 0; x < 3; ++x) {
    mask.data.assign(3, 0.0f);
    mask.data[x] = 1.0f;
    EXPECT_NEAR(mean_angular_error(pred, gt, mask), x * 90.0, 1e-9);
  }
  EXPECT_NEAR(mean_angular_error(pred, gt), 90.0, 1e-9);
}

TEST(Rmse, MatchesNaiveSum) {
  Image a = random_image(9, 7, 1, 8), b = random_image(9, 7, 1, 9);
  double e = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i) e += sqr(static_cast<double>(a.data[i]) - b.data[i]);
  EXPECT_NEAR(rmse(a, b), std::sqrt(e / a.data.size()), 1e-9);
  Image c = a;
  for (float& v : c.data) v += 0.1f;
  EXPECT_NEAR(rmse(c, a), 0.1, 1e-6);
}

TEST(Report, JsonCarriesFramesAndAggregate) {
  MetricReport report;
  report.kind = EvalKind::render;
  Image gt = random_image(12, 12, 3, 10);
  for (int i = 0; i < 2; ++i) {
    FrameMetrics m = evaluate_frame(EvalKind::render, scaled(gt, 0.5 + 0.25 * i), gt, {});
    m.name = "frame_000" + std::to_string(i);
    report.frames.push_back(m);
  }
  finalize_report(report);
  auto j = nlohmann::json::parse(report_to_json(report));
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_EQ(j["kind"], "render");
  EXPECT_EQ(j["scale_policy"], "per_image");
  ASSERT_EQ(j["frames"].size(), 2u);
  EXPECT_EQ(j["frames"][1]["name"], "frame_0001");
  EXPECT_EQ(j["frames"][0]["si_scale"].size(), 3u);
  const double mean = (report.frames[0].values.at("psnr") + report.frames[1].values.at("psnr")) / 2;
  EXPECT_NEAR(j["aggregate"]["psnr"].get<double>(), mean, 1e-9);
  EXPECT_TRUE(j["aggregate"].contains("ssim"));
}

TEST(EvalKind, NamesRoundTrip) {
  for (EvalKind k : {EvalKind::render, EvalKind::albedo, EvalKind::roughness, EvalKind::metallic, EvalKind::normal})
    EXPECT_EQ(eval_kind_from_string(to_string(k)), k);
  EXPECT_THROW(eval_kind_from_string("depth"), FormatError);
}

}  // namespace
}  // namespace drforge

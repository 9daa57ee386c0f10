// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "drforge/metrics.hpp"

#include <json.hpp>

#include <cmath>

#include "drforge/error.hpp"
#include "drforge/math.hpp"

namespace drforge {

namespace {

void require_same_shape(const Image& a, const Image& b, const char* what) {
  if (!a.same_shape(b)) throw DomainError(std::string(what) + ": images differ in shape");
  if (a.empty()) throw DomainError(std::string(what) + ": empty image");
}

void require_mask(const Image& mask, const Image& ref, const char* what) {
  if (mask.empty()) return;
  if (mask.width != ref.width || mask.height != ref.height)
    throw DomainError(std::string(what) + ": mask resolution differs");
}

bool selected(const Image& mask, int x, int y) { return mask.empty() || mask.at(x, y, 0) > 0.5f; }

double psnr_from_mse(double mse, double peak) {
  if (mse <= 0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(peak * peak / mse));
}

std::vector<double> gaussian_window() {
  std::vector<double> w(11);
  double sum = 0;
  for (int i = 0; i < 11; ++i) {
    double d = i - 5;
    w[i] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
    sum += w[i];
  }
  for (double& v : w) v /= sum;
  return w;
}

// Valid-region separable filtering of a single-channel plane.
std::vector<double> filter_valid(const std::vector<double>& src, int w, int h, const std::vector<double>& k) {
  const int ow = w - 10, oh = h - 10;
  std::vector<double> tmp(static_cast<std::size_t>(ow) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < ow; ++x) {
      double s = 0;
      for (int i = 0; i < 11; ++i) s += k[i] * src[static_cast<std::size_t>(y) * w + x + i];
      tmp[static_cast<std::size_t>(y) * ow + x] = s;
    }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      double s = 0;
      for (int i = 0; i < 11; ++i) s += k[i] * tmp[static_cast<std::size_t>(y + i) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = s;
    }
  return out;
}

}  // namespace

std::vector<double> solve_scale(const Image& pred, const Image& gt, const Image& mask) {
  require_same_shape(pred, gt, "solve_scale");
  require_mask(mask, pred, "solve_scale");
  std::vector<double> num(pred.channels, 0.0), den(pred.channels, 0.0);
  std::size_t count = 0;
  for (int y = 0; y < pred.height; ++y)
    for (int x = 0; x < pred.width; ++x) {
      if (!selected(mask, x, y)) continue;
      ++count;
      for (int c = 0; c < pred.channels; ++c) {
        double p = pred.at(x, y, c);
        num[c] += p * gt.at(x, y, c);
        den[c] += p * p;
      }
    }
  if (count == 0) throw DomainError("solve_scale: mask selects no pixels");
  std::vector<double> scale(pred.channels);
  for (int c = 0; c < pred.channels; ++c) scale[c] = den[c] > 0 ? num[c] / den[c] : 1.0;
  return scale;
}

double psnr(const Image& pred, const Image& gt, double peak) {
  require_same_shape(pred, gt, "psnr");
  double sum = 0;
  for (std::size_t i = 0; i < pred.data.size(); ++i) sum += sqr(static_cast<double>(pred.data[i]) - gt.data[i]);
  return psnr_from_mse(sum / pred.data.size(), peak);
}

double si_psnr(const Image& pred, const Image& gt, const Image& mask, double peak, std::vector<double>* scale_out) {
  std::vector<double> scale = solve_scale(pred, gt, mask);
  double sum = 0;
  for (std::size_t i = 0; i < pred.data.size(); ++i)
    sum += sqr(scale[i % pred.channels] * pred.data[i] - gt.data[i]);
  if (scale_out) *scale_out = scale;
  return psnr_from_mse(sum / pred.data.size(), peak);
}

double ssim(const Image& pred, const Image& gt) {
  require_same_shape(pred, gt, "ssim");
  if (pred.width < 11 || pred.height < 11) throw DomainError("ssim: images must be at least 11x11");
  constexpr double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  const auto window = gaussian_window();
  const int w = pred.width, h = pred.height;
  const std::size_t n = pred.pixel_count();
  double total = 0;
  for (int c = 0; c < pred.channels; ++c) {
    std::vector<double> a(n), b(n), aa(n), bb(n), ab(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = pred.data[i * pred.channels + c];
      b[i] = gt.data[i * gt.channels + c];
      aa[i] = a[i] * a[i];
      bb[i] = b[i] * b[i];
      ab[i] = a[i] * b[i];
    }
    auto mu_a = filter_valid(a, w, h, window), mu_b = filter_valid(b, w, h, window);
    auto e_aa = filter_valid(aa, w, h, window), e_bb = filter_valid(bb, w, h, window);
    auto e_ab = filter_valid(ab, w, h, window);
    double sum = 0;
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
      double va = e_aa[i] - mu_a[i] * mu_a[i];
      double vb = e_bb[i] - mu_b[i] * mu_b[i];
      double cov = e_ab[i] - mu_a[i] * mu_b[i];
      sum += ((2 * mu_a[i] * mu_b[i] + c1) * (2 * cov + c2)) /
             ((mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + c1) * (va + vb + c2));
    }
    total += sum / mu_a.size();
  }
  return total / pred.channels;
}

double mean_angular_error(const Image& pred, const Image& gt, const Image& mask) {
  require_same_shape(pred, gt, "mean_angular_error");
  require_mask(mask, pred, "mean_angular_error");
  if (pred.channels != 3) throw DomainError("mean_angular_error: normals need 3 channels");
  double sum = 0;
  std::size_t count = 0;
  for (int y = 0; y < pred.height; ++y)
    for (int x = 0; x < pred.width; ++x) {
      if (!selected(mask, x, y)) continue;
      Vec3 p{pred.at(x, y, 0), pred.at(x, y, 1), pred.at(x, y, 2)};
      Vec3 g{gt.at(x, y, 0), gt.at(x, y, 1), gt.at(x, y, 2)};
      if (!(length(p) > 0) || !(length(g) > 0)) throw DomainError("mean_angular_error: zero normal inside the mask");
      sum += degrees(std::atan2(length(cross(p, g)), dot(p, g)));
      ++count;
    }
  if (count == 0) throw DomainError("mean_angular_error: mask selects no pixels");
  return sum / count;
}

double rmse(const Image& pred, const Image& gt, const Image& mask) {
  require_same_shape(pred, gt, "rmse");
  require_mask(mask, pred, "rmse");
  double sum = 0;
  std::size_t count = 0;
  for (int y = 0; y < pred.height; ++y)
    for (int x = 0; x < pred.width; ++x) {
      if (!selected(mask, x, y)) continue;
      for (int c = 0; c < pred.channels; ++c) sum += sqr(static_cast<double>(pred.at(x, y, c)) - gt.at(x, y, c));
      count += pred.channels;
    }
  if (count == 0) throw DomainError("rmse: mask selects no pixels");
  return std::sqrt(sum / count);
}

const char* to_string(EvalKind kind) {
  switch (kind) {
    case EvalKind::render: return "render";
    case EvalKind::albedo: return "albedo";
    case EvalKind::roughness: return "roughness";
    case EvalKind::metallic: return "metallic";
    case EvalKind::normal: return "normal";
  }
  return "render";
}

EvalKind eval_kind_from_string(const std::string& s) {
  for (auto k : {EvalKind::render, EvalKind::albedo, EvalKind::roughness, EvalKind::metallic, EvalKind::normal})
    if (s == to_string(k)) return k;
  throw FormatError("unknown eval kind '" + s + "'");
}

FrameMetrics evaluate_frame(EvalKind kind, const Image& pred, const Image& gt, const Image& mask) {
  FrameMetrics m;
  switch (kind) {
    case EvalKind::render:
    case EvalKind::albedo: {
      m.values["psnr"] = psnr(pred, gt);
      m.values["si_psnr"] = si_psnr(pred, gt, kind == EvalKind::albedo ? mask : Image{}, 1.0, &m.si_scale);
      if (pred.width >= 11 && pred.height >= 11) m.values["ssim"] = ssim(pred, gt);
      break;
    }
    case EvalKind::roughness:
    case EvalKind::metallic: m.values["rmse"] = rmse(pred, gt, mask); break;
    case EvalKind::normal: m.values["angular_error_deg"] = mean_angular_error(pred, gt, mask); break;
  }
  return m;
}

void finalize_report(MetricReport& report) {
  report.aggregate.clear();
  std::map<std::string, int> counts;
  for (const auto& f : report.frames)
    for (const auto& [key, value] : f.values) {
      report.aggregate[key] += value;
      ++counts[key];
    }
  for (auto& [key, value] : report.aggregate) value /= counts[key];
}

std::string report_to_json(const MetricReport& report) {
  nlohmann::json j;
  j["schema_version"] = MetricReport::kSchemaVersion;
  j["kind"] = to_string(report.kind);
  j["scale_policy"] = report.scale_policy;
  j["aggregate"] = report.aggregate;
  j["frames"] = nlohmann::json::array();
  for (const auto& f : report.frames) {
    nlohmann::json fj{{"name", f.name}, {"values", f.values}};
    if (!f.si_scale.empty()) fj["si_scale"] = f.si_scale;
    j["frames"].push_back(std::move(fj));
  }
  return j.dump(2);
}

}  // namespace drforge

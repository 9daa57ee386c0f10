// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any criterion fails. Tolerances are fixed constants.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "drforge/baselines.hpp"
#include "drforge/brdf.hpp"
#include "drforge/cli.hpp"
#include "drforge/compositor.hpp"
#include "drforge/dataset.hpp"
#include "drforge/error.hpp"
#include "drforge/demo_assets.hpp"
#include "drforge/metrics.hpp"
#include "drforge/pathtracer.hpp"
#include "drforge/radiometry.hpp"
#include "drforge/scenegen.hpp"
#include "stats.hpp"
#include "support.hpp"

using namespace drforge;
using namespace drforge::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

// ---------------------------------------------------------------------------
// 1. Furnace
// ---------------------------------------------------------------------------

Outcome furnace() {
  constexpr double kTolerance = 0.01;
  constexpr double kTimeLimit = 60.0;
  const Rgb c(0.7, 0.7, 0.7);
  Geometry g;
  add_mesh(g, make_sphere(1.0), Transform{}, constant_material(Rgb(1.0), 1.0, 0.0));
  const Camera camera = look_camera({0, 0, 3.2}, {0, 0, 0}, 45.0, 64, 64);
  RenderSettings s;
  s.width = s.height = 64;
  s.spp = 1024;
  s.threads = 1;
  s.seed = 11;
  auto start = std::chrono::steady_clock::now();
  Image img = render_image(g, EnvironmentMap::uniform(64, 32, c), camera, s, 0);
  const double elapsed = seconds_since(start);
  GBuffer gb = render_gbuffer_raw(g, camera, 1);
  double sum = 0, worst = 0;
  int count = 0;
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) {
      if (!gb.is_hit(x, y)) continue;
      double v = mean(img.rgb(x, y));
      sum += v;
      worst = std::max(worst, std::abs(v / c.r - 1.0));
      ++count;
    }
  const double rel = std::abs(sum / count / c.r - 1.0);
  return {count > 0 && rel <= kTolerance && elapsed < kTimeLimit,
          format("sphere pixels=%d mean rel err=%.5f (tol %.2f) worst pixel=%.4f time=%.1fs (limit %.0fs)", count, rel,
                 kTolerance, worst, elapsed, kTimeLimit)};
}

// ---------------------------------------------------------------------------
// 2. Albedo bound with a quadrature oracle
// ---------------------------------------------------------------------------

// Directional-hemispherical reflectance by deterministic 2D quadrature,
// independent of the BRDF table and samplers. The specular lobe is integrated
// over half vectors parameterized so that D(h) cos(theta_h) is uniform; the
// diffuse lobe over cosine-distributed directions.
Rgb quadrature_albedo(const MaterialSample& m, double mu_o, int n = 256) {
  const Vec3 normal{0, 0, 1};
  const Vec3 wo{std::sqrt(1 - mu_o * mu_o), 0, mu_o};
  const double alpha = ggx_alpha(m.roughness);
  Rgb spec, diff;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < 2 * n; ++j) {
      const double xi = (i + 0.5) / n, phi = kTwoPi * (j + 0.5) / (2 * n);
      // Half vector with tan^2 = alpha^2 xi / (1 - xi).
      const double t2 = alpha * alpha * xi / (1 - xi);
      const double cos_h = 1 / std::sqrt(1 + t2), sin_h = std::sqrt(t2) * cos_h;
      const Vec3 h{sin_h * std::cos(phi), sin_h * std::sin(phi), cos_h};
      const double oh = dot(wo, h);
      if (oh > 0) {
        const Vec3 wi = normalize(reflect(wo, h));
        if (wi.z > 0) {
          // dwi = 4 (wo.h) dwh and dwh = dxi dphi / (D cos_h); the cell
          // weight below already carries dxi dphi / (2 pi).
          const double jac = 4 * oh / (ggx_d(alpha, cos_h) * cos_h);
          spec += brdf_eval_lobes(m, normal, wo, wi).specular * (wi.z * jac);
        }
      }
      // Cosine-distributed direction: f cos dw = f pi dxi dphi / (2 pi).
      const double r = std::sqrt(xi);
      const Vec3 wd{r * std::cos(phi), r * std::sin(phi), std::sqrt(1 - xi)};
      if (wd.z > 0) diff += brdf_eval_lobes(m, normal, wo, wd).diffuse * kPi;
    }
  const double cell = 1.0 / (n * 2.0 * n);
  return (spec + diff) * cell;
}

Outcome albedo_bound() {
  constexpr double kBound = 1.0 + 1e-3;
  constexpr double kTableTolerance = 0.01;
  double worst = 0, worst_table = 0;
  std::string where;
  int cases = 0;
  for (double r : {0.01, 0.05, 0.1, 0.2, 0.35, 0.5, 0.75, 1.0})
    for (double metal : {0.0, 0.5, 1.0})
      for (double mu : {0.05, 0.2, 0.5, 0.8, 1.0}) {
        MaterialSample m = material_sample(Rgb(1.0), r, metal);
        Rgb a = quadrature_albedo(m, mu);
        double v = max_component(a);
        if (v > worst) {
          worst = v;
          where = format("r=%.2f m=%.1f mu=%.2f", r, metal, mu);
        }
        // The analytic albedo used for lobe selection must agree with the oracle.
        BrdfContext ctx(m, Vec3{std::sqrt(1 - mu * mu), 0, mu});
        Rgb predicted = ctx.specular_albedo() + ctx.diffuse_albedo();
        worst_table = std::max(worst_table, std::abs(max_component(predicted) - v));
        ++cases;
      }
  return {worst <= kBound && worst_table <= kTableTolerance,
          format("%d cases, max albedo=%.5f at %s (bound %.3f); max |table - oracle|=%.4f (tol %.2f)", cases, worst,
                 where.c_str(), kBound, worst_table, kTableTolerance)};
}

// ---------------------------------------------------------------------------
// 3. Sampling: chi-square and MIS variance
// ---------------------------------------------------------------------------

Outcome sampling() {
  constexpr double kMinP = 0.01;
  struct Config {
    const char* name;
    MaterialSample m;
    double mu_o;
  };
  const Config configs[] = {
      {"diffuse", material_sample(Rgb(0.9), 1.0, 0.0), 0.7},
      {"plastic r0.5", material_sample(Rgb(0.5, 0.3, 0.2), 0.5, 0.0), 0.4},
      {"gold r0.3", material_sample(Rgb(1.0, 0.78, 0.34), 0.3, 1.0), 0.6},
      {"metal r0.2", material_sample(Rgb(0.9), 0.2, 1.0), 0.85},
      {"half-metal r0.6", material_sample(Rgb(0.6, 0.7, 0.8), 0.6, 0.5), 0.25},
      {"dark plastic r0.25", material_sample(Rgb(0.05), 0.25, 0.0), 0.95},
  };
  bool pass = true;
  std::string detail;
  int index = 0;
  for (const auto& c : configs) {
    const Vec3 n{0, 0, 1};
    const Vec3 wo{std::sqrt(1 - c.mu_o * c.mu_o), 0, c.mu_o};
    auto sampler = [&](Pcg32& rng, Vec3& d) {
      auto s = sample_brdf(c.m, n, wo, rng);
      if (!s) return false;
      d = s->direction;
      return true;
    };
    auto pdf = [&](const Vec3& d) { return brdf_pdf(c.m, n, wo, normalize(d)); };
    ChiSquareResult r = chi_square_directions(sampler, pdf, 1000000, 100 + index++);
    pass = pass && r.p_value > kMinP;
    detail += format("%s p=%.3f; ", c.name, r.p_value);
  }

  // MIS vs BRDF-only variance on a diffuse plane under a one-hot environment.
  Image one_hot(64, 32, 3, 0.0f);
  one_hot.set_rgb(20, 9, Rgb(400.0));
  const EnvironmentMap env(one_hot);
  Geometry g;
  add_mesh(g, make_ground_quad(3.0, 1.0), Transform{}, constant_material(Rgb(0.7), 0.6, 0.0));
  const Camera camera = look_camera({0, 2, 3}, {0, 0, 0}, 45.0, 16, 16);
  auto variance = [&](Strategy strategy) {
    RenderSettings s;
    s.strategy = strategy;
    s.firefly_clamp = INFINITY;
    s.max_bounces = 2;
    PathIntegrator integrator(g, env, s);
    double total = 0;
    int pixels = 0;
    for (int y = 0; y < 16; y += 2)
      for (int x = 0; x < 16; x += 2) {
        const Ray ray = camera.generate_ray(x + 0.5, y + 0.5);
        double m1 = 0, m2 = 0;
        const int n = 512;
        for (int i = 0; i < n; ++i) {
          Pcg32 rng = sample_stream(5, 0, x, y, i);
          double v = mean(integrator.trace(ray, rng));
          m1 += v;
          m2 += v * v;
        }
        m1 /= n;
        total += m2 / n - m1 * m1;
        ++pixels;
      }
    return total / pixels;
  };
  const double v_mis = variance(Strategy::mis), v_brdf = variance(Strategy::brdf_only);
  pass = pass && v_mis < v_brdf;
  detail += format("(min p %.2f) MIS variance=%.4g < BRDF-only variance=%.4g", kMinP, v_mis, v_brdf);
  return {pass, detail};
}

// ---------------------------------------------------------------------------
// 4. SSRT self-consistency
// ---------------------------------------------------------------------------

Outcome ssrt_consistency() {
  constexpr double kMinPsnr = 30.0;
  constexpr int kRes = 128;
  Geometry g;
  // Back wall filling the view plus three panels, all facing the camera.
  add_mesh(g, make_panel(-4, 4, -4, 4, -6), Transform{}, constant_material(Rgb(0.6, 0.6, 0.55), 0.9, 0.0));
  add_mesh(g, make_panel(-1.6, -0.2, -1.0, 0.6, -3.0), Transform{}, constant_material(Rgb(0.8, 0.3, 0.2), 0.5, 0.0));
  add_mesh(g, make_panel(0.1, 1.5, -0.8, 0.9, -4.0), Transform{}, constant_material(Rgb(0.2, 0.5, 0.8), 0.3, 0.0));
  add_mesh(g, make_panel(-0.6, 0.8, 0.5, 1.5, -2.4), Transform{}, constant_material(Rgb(0.9, 0.8, 0.5), 0.35, 1.0));
  const Camera camera = look_camera({0, 0, 0}, {0, 0, -1}, 60.0, kRes, kRes);
  const EnvironmentMap env = demo_environment("studio", 128);
  RenderSettings s;
  s.width = s.height = kRes;
  s.spp = 512;
  s.seed = 3;
  const Image reference = render_image(g, env, camera, s, 0);
  std::vector<GBuffer> gb{render_gbuffer_raw(g, camera)};
  normalize_depth(gb);
  RenderSettings s2 = s;
  s2.seed = 4;
  const Image ssrt = ssrt_render(gb[0], camera, env, s2);
  const double value = psnr(tonemap_image(ssrt, s.tonemap), tonemap_image(reference, s.tonemap));
  return {value >= kMinPsnr, format("PSNR(SSRT, path traced) = %.2f dB (min %.0f dB) at %d spp, %dx%d", value,
                                    kMinPsnr, s.spp, kRes, kRes)};
}

// ---------------------------------------------------------------------------
// 5. Split-sum limits
// ---------------------------------------------------------------------------

Outcome splitsum_limits() {
  constexpr double kMirrorTolerance = 0.01;
  constexpr double kDiffuseTolerance = 0.02;
  constexpr int kRes = 64;
  const Camera camera = look_camera({0, 1.5, 2.5}, {0, 0, -0.5}, 50.0, kRes, kRes);

  // Mirror plane under a smooth sky.
  Image sky(256, 128, 3);
  for (int y = 0; y < 128; ++y)
    for (int x = 0; x < 256; ++x) {
      Vec3 d = texel_direction(x, y, 256, 128);
      sky.set_rgb(x, y, Rgb(0.3 + 0.7 * std::max(d.y, 0.0), 0.5 + 0.3 * d.x * d.x, 0.8 + 0.4 * std::max(-d.z, 0.0)));
    }
  const EnvironmentMap sky_env(sky);
  PrefilterOptions options;
  Geometry mirror;
  add_mesh(mirror, make_ground_quad(50.0, 1.0), Transform{}, constant_material(Rgb(1.0), 0.01, 1.0));
  std::vector<GBuffer> gb{render_gbuffer_raw(mirror, camera)};
  normalize_depth(gb);
  const PrefilteredEnv pre = prefilter_env(sky_env, options);
  const SplitSumImage lobes = splitsum_shade_lobes(gb[0], pre, camera);
  double rel_sum = 0;
  int count = 0;
  for (int y = 0; y < kRes; ++y)
    for (int x = 0; x < kRes; ++x) {
      if (!gb[0].is_hit(x, y)) continue;
      const Vec3 n = normalize(camera.pose.rotation *
                               Vec3{gb[0].normal.at(x, y, 0), gb[0].normal.at(x, y, 1), gb[0].normal.at(x, y, 2)});
      const Vec3 wo = -camera.generate_ray(x + 0.5, y + 0.5).direction;
      const Rgb expected = sample_env(sky_env, normalize(reflect(wo, n)));
      const Rgb got = lobes.specular.rgb(x, y);
      for (int c = 0; c < 3; ++c) rel_sum += std::abs(got[c] / expected[c] - 1.0);
      count += 3;
    }
  const double mirror_err = rel_sum / count;

  // Diffuse plane under a uniform environment.
  const Rgb c(0.8, 0.6, 0.4);
  const EnvironmentMap uniform = EnvironmentMap::uniform(128, 64, c);
  const PrefilteredEnv pre_uniform = prefilter_env(uniform, options);
  double worst_white = 0, worst_split = 0;
  for (double a : {1.0, 0.5, 0.25}) {
    Geometry plane;
    add_mesh(plane, make_ground_quad(50.0, 1.0), Transform{}, constant_material(Rgb(a), 1.0, 0.0));
    std::vector<GBuffer> pgb{render_gbuffer_raw(plane, camera)};
    normalize_depth(pgb);
    const SplitSumImage out = splitsum_shade_lobes(pgb[0], pre_uniform, camera);
    for (int y = 0; y < kRes; ++y)
      for (int x = 0; x < kRes; ++x) {
        if (!pgb[0].is_hit(x, y)) continue;
        const Vec3 wo = -camera.generate_ray(x + 0.5, y + 0.5).direction;
        const double mu = std::clamp(wo.y, 0.0, 1.0);
        const Rgb e = Rgb(0.04 * BrdfTable::instance().lookup(mu, 1.0).x + BrdfTable::instance().lookup(mu, 1.0).y);
        for (int ch = 0; ch < 3; ++ch) {
          const double total = out.total.rgb(x, y)[ch];
          if (a == 1.0) worst_white = std::max(worst_white, std::abs(total / (a * c[ch]) - 1.0));
          // Diffuse lobe a c (1 - E) and total c (E + a (1 - E)) for any albedo.
          const double diffuse = out.diffuse.rgb(x, y)[ch];
          worst_split = std::max(worst_split, std::abs(diffuse / (a * c[ch] * (1 - e[ch])) - 1.0));
          worst_split = std::max(worst_split, std::abs(total / (c[ch] * (e[ch] + a * (1 - e[ch]))) - 1.0));
        }
      }
  }
  const bool pass = mirror_err <= kMirrorTolerance && worst_white <= kDiffuseTolerance &&
                    worst_split <= kDiffuseTolerance;
  return {pass, format("mirror mean rel err=%.5f (tol %.2f); white plane max rel err vs a*c=%.5f (tol %.2f); "
                       "lobe split max rel err=%.5f (tol %.2f)",
                       mirror_err, kMirrorTolerance, worst_white, kDiffuseTolerance, worst_split, kDiffuseTolerance)};
}

// ---------------------------------------------------------------------------
// 6. Lighting encodings
// ---------------------------------------------------------------------------

Outcome encodings() {
  constexpr double kDirTolerance = 1e-5;
  std::vector<EnvironmentMap> probes;
  for (const auto& name : demo_environment_names()) probes.push_back(demo_environment(name, 128));
  Pcg32 rng = Pcg32::keyed({6});
  for (int i = 0; i < 4; ++i) {
    Image img(64, 32, 3);
    for (float& v : img.data) v = static_cast<float>(std::pow(rng.uniform(), 4.0) * 50.0);
    probes.emplace_back(img);
  }
  double worst_max = 0, worst_norm = 0;
  bool identity = true;
  double worst_roundtrip = 0;
  for (const auto& env : probes) {
    const Mat3 w2c = transpose(look_at_rotation({0, 0, 0}, {rng.uniform(-1, 1), rng.uniform(-0.5, 0.5), -1}));
    LightingEncoding enc = encode_lighting(env, w2c);
    float mx = *std::max_element(enc.e_log.data.begin(), enc.e_log.data.end());
    worst_max = std::max(worst_max, std::abs(mx - 1.0));
    for (std::size_t p = 0; p < enc.e_dir.pixel_count(); ++p) {
      double n = std::sqrt(sqr<double>(enc.e_dir.data[3 * p]) + sqr<double>(enc.e_dir.data[3 * p + 1]) +
                           sqr<double>(enc.e_dir.data[3 * p + 2]));
      worst_norm = std::max(worst_norm, std::abs(n - 1.0));
    }
    identity = identity && augment_env(env, kTwoPi, false, 1.0).pixels() == env.pixels();
    for (int y = 0; y < env.height(); ++y)
      for (int x = 0; x < env.width(); ++x) {
        const Rgb got = sample_env(env, texel_direction(x, y, env.width(), env.height()));
        const Rgb want = env.texel(x, y);
        for (int c = 0; c < 3; ++c)
          worst_roundtrip = std::max(worst_roundtrip, std::abs(got[c] - want[c]) / std::max(1e-30, std::abs(want[c])));
      }
  }
  // Exact up to float rounding of the stored texels.
  constexpr double kRoundTrip = 1e-6;
  const bool pass = worst_max == 0.0 && worst_norm <= kDirTolerance && identity && worst_roundtrip <= kRoundTrip;
  return {pass, format("%zu probes: max|max(E_log)-1|=%.3g; max|E_dir norm-1|=%.3g (tol %.0e); yaw 2pi identity=%s; "
                       "pixel-center round trip rel err=%.3g (tol %.0e)",
                       probes.size(), worst_max, worst_norm, kDirTolerance, identity ? "bit-exact" : "NO",
                       worst_roundtrip, kRoundTrip)};
}

// ---------------------------------------------------------------------------
// 7. Metrics
// ---------------------------------------------------------------------------

Outcome metrics() {
  Pcg32 rng = Pcg32::keyed({7});
  Image pred(32, 32, 3), gt(32, 32, 3);
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    gt.data[i] = static_cast<float>(rng.uniform());
    pred.data[i] = static_cast<float>(0.6 * gt.data[i] + 0.1 * rng.uniform());
  }
  // Scale invariance.
  const double base = si_psnr(pred, gt);
  double worst_inv = 0;
  for (double k : {0.1, 1.0, 10.0}) {
    Image scaled = pred;
    for (float& v : scaled.data) v = static_cast<float>(v * k);
    worst_inv = std::max(worst_inv, std::abs(si_psnr(scaled, gt) - base));
  }
  // Grid-search oracle for the scale on a random 8x8 pair.
  Image p8(8, 8, 3), g8(8, 8, 3);
  for (std::size_t i = 0; i < p8.data.size(); ++i) {
    p8.data[i] = static_cast<float>(rng.uniform());
    g8.data[i] = static_cast<float>(1.7 * p8.data[i] * (0.8 + 0.4 * rng.uniform()));
  }
  const auto scale = solve_scale(p8, g8);
  double worst_scale = 0;
  for (int c = 0; c < 3; ++c) {
    double best = 0, best_err = INFINITY;
    for (double s = 0; s <= 4.0; s += 1e-4) {
      double err = 0;
      for (std::size_t i = c; i < p8.data.size(); i += 3) err += sqr(s * p8.data[i] - g8.data[i]);
      if (err < best_err) {
        best_err = err;
        best = s;
      }
    }
    worst_scale = std::max(worst_scale, std::abs(best - scale[c]));
  }
  const double self = ssim(gt, gt);
  // Trivial cases.
  Image r0(8, 8, 1, 0.3f), r1(8, 8, 1, 0.4f);
  const bool rmse_ok = rmse(r0, r0) == 0.0 && std::abs(rmse(r0, r1) - 0.1) < 1e-7;
  Image nz(4, 4, 3), nx(4, 4, 3), nmz(4, 4, 3);
  for (std::size_t p = 0; p < 16; ++p) {
    nz.data[3 * p + 2] = 1;
    nx.data[3 * p] = 1;
    nmz.data[3 * p + 2] = -1;
  }
  const bool angle_ok = mean_angular_error(nz, nz) == 0.0 && std::abs(mean_angular_error(nz, nx) - 90.0) < 1e-9 &&
                        std::abs(mean_angular_error(nz, nmz) - 180.0) < 1e-9;
  const bool pass = worst_inv <= 1e-6 && worst_scale <= 1e-3 && self == 1.0 && rmse_ok && angle_ok;
  return {pass, format("si-PSNR drift over k=%.3g dB (tol 1e-6); |scale - grid|=%.2g (tol 1e-3); SSIM self=%.9f; "
                       "rmse trivial=%s; angular trivial=%s",
                       worst_inv, worst_scale, self, rmse_ok ? "exact" : "NO", angle_ok ? "exact" : "NO")};
}

// ---------------------------------------------------------------------------
// 8. Compositor
// ---------------------------------------------------------------------------

Outcome compositor() {
  Pcg32 rng = Pcg32::keyed({8});
  Image bg(16, 16, 3), star(16, 16, 3), other(16, 16, 3);
  for (std::size_t i = 0; i < bg.data.size(); ++i) {
    bg.data[i] = static_cast<float>(rng.uniform());
    star.data[i] = static_cast<float>(rng.uniform(0.01, 2.0));
    other.data[i] = static_cast<float>(rng.uniform(0.01, 2.0));
  }
  Image zero(16, 16, 1, 0.0f), one(16, 16, 1, 1.0f);
  const bool ex1 = composite_insertion(bg, star, star, zero) == bg;
  const bool ex2 = composite_insertion(bg, other, star, one) == other;
  Image b1(1, 1, 3, 0.4f), i1(1, 1, 3, 0.2f), s1(1, 1, 3, 0.4f), m1(1, 1, 1, 0.0f);
  const Image shadow = composite_insertion(b1, i1, s1, m1);
  const bool ex3 = std::abs(shadow.data[0] - 0.2f) <= 1e-7f && shadow.data[0] == shadow.data[2];
  // Outside a partial mask, agreeing renders leave the background untouched.
  Image mask(16, 16, 1, 0.0f), ins = star;
  for (int y = 4; y < 9; ++y)
    for (int x = 4; x < 9; ++x) {
      mask.at(x, y) = 0.7f;
      for (int c = 0; c < 3; ++c) ins.at(x, y, c) = 3.0f;
    }
  const Image out = composite_insertion(bg, ins, star, mask);
  bool preserved = true;
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x)
      if (mask.at(x, y) == 0.0f)
        for (int c = 0; c < 3; ++c) preserved = preserved && out.at(x, y, c) == bg.at(x, y, c);
  return {ex1 && ex2 && ex3 && preserved,
          format("equal renders M=0 -> bg: %s; M=1 -> ins*: %s; shadow 0.4*0.2/0.4=%.7f: %s; outside mask preserved: %s",
                 ex1 ? "exact" : "NO", ex2 ? "exact" : "NO", shadow.data[0], ex3 ? "ok" : "NO",
                 preserved ? "bit-exact" : "NO")};
}

// ---------------------------------------------------------------------------
// 9. Dataset pipeline
// ---------------------------------------------------------------------------

int cli(const std::vector<std::string>& args, std::string* out = nullptr) {
  std::ostringstream o, e;
  int rc = run(args, o, e);
  if (out) *out = o.str();
  if (rc != 0) std::fprintf(stderr, "command failed (%d): %s\n", rc, e.str().c_str());
  return rc;
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    files[fs::relative(entry.path(), root).generic_string()] =
        std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  return files;
}

Outcome dataset_pipeline() {
  constexpr double kTimeLimit = 30 * 60.0;
  const fs::path dir = temp_dir("acceptance_pipeline");
  const DemoPools pools = write_demo_assets(dir / "pools");
  auto make = [&](const std::string& name) {
    const std::string out = (dir / name).string();
    int rc = cli({"gen-scenes", "--count", "8", "--seed-base", "2026", "--out", out, "--asset-pool",
                  pools.assets.string(), "--texture-pool", pools.textures.string(), "--env-pool",
                  pools.envs.string(), "--threads", "8", "--log-level", "warn"});
    if (rc == 0) rc = cli({"render-dataset", "--dataset", out, "--threads", "8", "--log-level", "warn"});
    return rc;
  };
  auto start = std::chrono::steady_clock::now();
  int rc = make("run_a");
  const double elapsed = seconds_since(start);
  std::string report;
  int validate_rc = cli({"validate", "--dataset", (dir / "run_a").string(), "--log-level", "warn"}, &report);
  const DatasetManifest manifest = read_manifest(dir / "run_a" / "manifest.json");
  const auto findings = validate_dataset(manifest, dir / "run_a");
  int rc_b = make("run_b");
  const auto a = read_tree(dir / "run_a"), b = read_tree(dir / "run_b");
  int differing = 0;
  for (const auto& [name, bytes] : a) {
    auto it = b.find(name);
    if (it == b.end() || it->second != bytes) ++differing;
  }
  const bool identical = a.size() == b.size() && differing == 0;
  const bool pass = rc == 0 && rc_b == 0 && validate_rc == 0 && findings.empty() && manifest.clips.size() == 8 &&
                    elapsed < kTimeLimit && identical;
  fs::remove_all(dir);
  return {pass, format("8 clips in %.1fs (limit %.0fs); validate findings=%zu; rerun files=%zu differing=%d", elapsed,
                       kTimeLimit, findings.size(), a.size(), differing)};
}

// ---------------------------------------------------------------------------
// 10. Generator safety
// ---------------------------------------------------------------------------

Outcome generator_safety() {
  const fs::path dir = temp_dir("acceptance_generator");
  const DemoPools pools = write_demo_assets(dir, 64);
  GenConfig config;
  config.pools = scan_pools(pools.assets, pools.textures, pools.envs);
  config.frames = 24;
  MeshCache meshes;
  int unsafe = 0, failures = 0;
  std::map<std::string, int> kinds;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    try {
      SceneDescription scene = generate_clip(config, seed, meshes);
      if (!check_safety(scene, meshes).empty()) ++unsafe;
      ++kinds[to_string(scene.motion)];
    } catch (const Error&) {
      ++failures;
    }
  }
  fs::remove_all(dir);
  std::string counts;
  for (const auto& [k, v] : kinds) counts += format("%s=%d ", k.c_str(), v);
  int seen = 0;
  for (MotionKind k : kMotionKinds) seen += kinds.count(to_string(k)) ? 1 : 0;
  return {unsafe == 0 && failures == 0 && seen == kMotionKindCount,
          format("1000 seeds x 24 frames: unsafe scenes=%d, generation failures=%d; kinds: %s", unsafe, failures,
                 counts.c_str())};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"furnace", furnace},
      {"brdf albedo bound", albedo_bound},
      {"sampling chi-square and MIS", sampling},
      {"SSRT self-consistency", ssrt_consistency},
      {"split-sum limits", splitsum_limits},
      {"lighting encodings", encodings},
      {"metrics", metrics},
      {"compositor", compositor},
      {"dataset pipeline", dataset_pipeline},
      {"generator safety", generator_safety},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    auto start = std::chrono::steady_clock::now();
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %zu. %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str(),
                seconds_since(start));
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

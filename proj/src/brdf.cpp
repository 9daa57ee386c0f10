// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "drforge/brdf.hpp"

#include <cmath>

#include "drforge/error.hpp"

namespace drforge {

namespace {

constexpr int kTableSamples = 4096;
constexpr double kUnitTolerance = 1e-4;

void require_unit(const Vec3& v, const char* name) {
  if (!is_unit(v, kUnitTolerance)) throw DomainError(std::string("brdf: ") + name + " is not unit length");
}

// Index and weight of the lower node bracketing `x` on a quadratically
// spaced axis with nodes node(0..n-1) covering [node(0), 1].
template <class Node>
void quadratic_cell(double x, Node node, int& i, double& t) {
  constexpr int n = BrdfTable::kSize;
  x = std::clamp(x, node(0), 1.0);
  i = std::min(static_cast<int>(std::sqrt(x) * (n - 1)), n - 2);
  if (x < node(i)) --i;
  else if (i + 2 < n && x >= node(i + 1)) ++i;
  const double lo = node(i), hi = node(i + 1);
  t = std::clamp((x - lo) / (hi - lo), 0.0, 1.0);
}

void mu_cell(double mu, int& i, double& t) { quadratic_cell(mu, BrdfTable::node_mu, i, t); }

void roughness_cell(double r, int& j, double& t) { quadratic_cell(r, BrdfTable::node_roughness, j, t); }

Vec2 lerp2(const Vec2& a, const Vec2& b, double t) { return {a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t}; }

Rgb split_sum_albedo(const Rgb& f0, const Vec2& ab) {
  return {f0.r * ab.x + ab.y, f0.g * ab.x + ab.y, f0.b * ab.x + ab.y};
}

}  // namespace

// ---------------------------------------------------------------------------
// GGX pieces
// ---------------------------------------------------------------------------

double ggx_d(double alpha, double cos_h) {
  if (cos_h <= 0) return 0.0;
  double a2 = alpha * alpha;
  double d = cos_h * cos_h * (a2 - 1.0) + 1.0;
  return a2 / (kPi * d * d);
}

double smith_lambda(double alpha, double cos_theta) {
  if (cos_theta <= 0) return INFINITY;
  double c2 = cos_theta * cos_theta;
  double tan2 = std::max(0.0, 1.0 - c2) / c2;
  return 0.5 * (-1.0 + std::sqrt(1.0 + alpha * alpha * tan2));
}

double smith_g1(double alpha, double cos_theta) {
  if (cos_theta <= 0) return 0.0;
  return 1.0 / (1.0 + smith_lambda(alpha, cos_theta));
}

double smith_g2(double alpha, double cos_o, double cos_i) {
  if (cos_o <= 0 || cos_i <= 0) return 0.0;
  return 1.0 / (1.0 + smith_lambda(alpha, cos_o) + smith_lambda(alpha, cos_i));
}

double schlick_weight(double cos_d) {
  double m = std::clamp(1.0 - cos_d, 0.0, 1.0);
  double m2 = m * m;
  return m2 * m2 * m;
}

Vec3 sample_ggx_vndf(const Vec3& wo, double alpha, const Vec2& u) {
  Vec3 vh = normalize(Vec3{alpha * wo.x, alpha * wo.y, wo.z});
  double lensq = vh.x * vh.x + vh.y * vh.y;
  Vec3 t1 = lensq > 0 ? Vec3{-vh.y, vh.x, 0} / std::sqrt(lensq) : Vec3{1, 0, 0};
  Vec3 t2 = cross(vh, t1);
  double r = std::sqrt(u.x);
  double phi = kTwoPi * u.y;
  double p1 = r * std::cos(phi);
  double p2 = r * std::sin(phi);
  double s = 0.5 * (1.0 + vh.z);
  p2 = (1.0 - s) * safe_sqrt(1.0 - p1 * p1) + s * p2;
  Vec3 nh = t1 * p1 + t2 * p2 + vh * safe_sqrt(1.0 - p1 * p1 - p2 * p2);
  return normalize(Vec3{alpha * nh.x, alpha * nh.y, std::max(0.0, nh.z)});
}

Vec3 sample_ggx_ndf(double alpha, const Vec2& u) {
  double tan2 = alpha * alpha * u.x / std::max(1.0 - u.x, 1e-12);
  double cos_t = 1.0 / std::sqrt(1.0 + tan2);
  double sin_t = safe_sqrt(1.0 - cos_t * cos_t);
  double phi = kTwoPi * u.y;
  return {sin_t * std::cos(phi), sin_t * std::sin(phi), cos_t};
}

// ---------------------------------------------------------------------------
// Albedo table
// ---------------------------------------------------------------------------

Vec2 BrdfTable::integrate(double mu, double roughness, int samples) {
  const double alpha = ggx_alpha(roughness);
  const Vec3 wo{safe_sqrt(1.0 - mu * mu), 0.0, mu};
  const double g1 = smith_g1(alpha, mu);
  double a = 0, b = 0;
  for (int k = 0; k < samples; ++k) {
    Vec3 h = sample_ggx_vndf(wo, alpha, hammersley(k, samples));
    double oh = dot(wo, h);
    Vec3 wi = reflect(wo, h);
    if (wi.z <= 0 || oh <= 0) continue;
    double w = smith_g2(alpha, mu, wi.z) / g1;
    double fc = schlick_weight(oh);
    a += (1.0 - fc) * w;
    b += fc * w;
  }
  return {a / samples, b / samples};
}

BrdfTable::BrdfTable() : values_(kSize * kSize) {
  for (int j = 0; j < kSize; ++j)
    for (int i = 0; i < kSize; ++i) values_[j * kSize + i] = integrate(node_mu(i), node_roughness(j), kTableSamples);

  // Exact 2 * integral of (piecewise-linear A, B) * mu over [0,1]: constant
  // below the first node, then Simpson on each linear segment.
  for (int j = 0; j < kSize; ++j) {
    Vec2 first = node(0, j);
    double mu0 = node_mu(0);
    double sa = first.x * mu0 * mu0 * 0.5, sb = first.y * mu0 * mu0 * 0.5;
    for (int i = 0; i + 1 < kSize; ++i) {
      double m0 = node_mu(i), m1 = node_mu(i + 1), mm = 0.5 * (m0 + m1);
      Vec2 v0 = node(i, j), v1 = node(i + 1, j), vm = lerp2(v0, v1, 0.5);
      double h = (m1 - m0) / 6.0;
      sa += h * (v0.x * m0 + 4 * vm.x * mm + v1.x * m1);
      sb += h * (v0.y * m0 + 4 * vm.y * mm + v1.y * m1);
    }
    averages_[j] = {2.0 * sa, 2.0 * sb};
  }
}

const BrdfTable& BrdfTable::instance() {
  static const BrdfTable table;
  return table;
}

Vec2 BrdfTable::lookup(double mu, double roughness) const {
  int i, j;
  double tu, tr;
  mu_cell(mu, i, tu);
  roughness_cell(roughness, j, tr);
  Vec2 lo = lerp2(node(i, j), node(i + 1, j), tu);
  Vec2 hi = lerp2(node(i, j + 1), node(i + 1, j + 1), tu);
  return lerp2(lo, hi, tr);
}

Vec2 BrdfTable::average(double roughness) const {
  int j;
  double t;
  roughness_cell(roughness, j, t);
  return lerp2(averages_[j], averages_[j + 1], t);
}

// ---------------------------------------------------------------------------
// Evaluation and sampling
// ---------------------------------------------------------------------------

BrdfContext::BrdfContext(const MaterialSample& material, const Vec3& wo_local)
    : material_(material), wo_(wo_local), alpha_(ggx_alpha(material.roughness)), roughness_(material.roughness) {
  const BrdfTable& table = BrdfTable::instance();
  const double m = material.metallic;
  f0_ = lerp(Rgb(0.04), material.base_color, m);
  e_o_ = split_sum_albedo(f0_, table.lookup(wo_.z, roughness_));
  e_avg_ = split_sum_albedo(f0_, table.average(roughness_));
  diffuse_albedo_ = material.base_color * (1.0 - m) * (Rgb(1.0) - e_o_);
  for (int c = 0; c < 3; ++c) {
    double denom = kPi * (1.0 - e_avg_[c]);
    diffuse_scale_[c] = denom > 1e-9 ? diffuse_albedo_[c] / denom : 0.0;
  }
  double ls = luminance(e_o_), ld = luminance(diffuse_albedo_);
  p_spec_ = ls + ld > 0 ? ls / (ls + ld) : 1.0;
}

BrdfContext::Lobes BrdfContext::eval(const Vec3& wi) const {
  Lobes out;
  const double mu_o = wo_.z, mu_i = wi.z;
  if (mu_o <= 0 || mu_i <= 0) return out;
  Rgb e_i = split_sum_albedo(f0_, BrdfTable::instance().lookup(mu_i, roughness_));
  out.diffuse = diffuse_scale_ * (Rgb(1.0) - e_i);
  Vec3 h = normalize(wo_ + wi);
  double oh = dot(wo_, h);
  if (oh > 0) {
    double fc = schlick_weight(oh);
    Rgb f = f0_ + (Rgb(1.0) - f0_) * fc;
    double s = ggx_d(alpha_, h.z) * smith_g2(alpha_, mu_o, mu_i) / (4.0 * mu_o * mu_i);
    out.specular = f * s;
  }
  return out;
}

double BrdfContext::pdf(const Vec3& wi) const {
  const double mu_o = wo_.z;
  if (mu_o <= 0) return 0.0;
  double pdf = 0;
  if (p_spec_ > 0) {
    Vec3 sum = wo_ + wi;
    if (length_squared(sum) > 0) {
      Vec3 h = normalize(sum);
      if (h.z > 0 && dot(wo_, h) > 0)
        pdf += p_spec_ * smith_g1(alpha_, mu_o) * ggx_d(alpha_, h.z) / (4.0 * mu_o);
    }
  }
  if (p_spec_ < 1 && wi.z > 0) pdf += (1.0 - p_spec_) * wi.z * kInvPi;
  return pdf;
}

Vec3 BrdfContext::sample(double u_lobe, const Vec2& u) const {
  if (u_lobe < p_spec_) {
    Vec3 h = sample_ggx_vndf(wo_, alpha_, u);
    return normalize(reflect(wo_, h));
  }
  double r = std::sqrt(u.x);
  double phi = kTwoPi * u.y;
  return {r * std::cos(phi), r * std::sin(phi), safe_sqrt(1.0 - u.x)};
}

BrdfContext::Lobes brdf_eval_lobes(const MaterialSample& material, const Vec3& n, const Vec3& wo, const Vec3& wi) {
  require_unit(n, "normal");
  require_unit(wo, "wo");
  require_unit(wi, "wi");
  Frame frame = Frame::from_normal(n);
  Vec3 o = frame.to_local(wo);
  if (o.z <= 0) return {};
  return BrdfContext(material, o).eval(frame.to_local(wi));
}

Rgb brdf_eval(const MaterialSample& material, const Vec3& n, const Vec3& wo, const Vec3& wi) {
  return brdf_eval_lobes(material, n, wo, wi).total();
}

double brdf_pdf(const MaterialSample& material, const Vec3& n, const Vec3& wo, const Vec3& wi) {
  require_unit(n, "normal");
  require_unit(wo, "wo");
  require_unit(wi, "wi");
  Frame frame = Frame::from_normal(n);
  Vec3 o = frame.to_local(wo);
  if (o.z <= 0) return 0.0;
  return BrdfContext(material, o).pdf(frame.to_local(wi));
}

std::optional<BrdfSample> sample_brdf(const MaterialSample& material, const Vec3& n, const Vec3& wo, double u_lobe,
                                      const Vec2& u) {
  require_unit(n, "normal");
  require_unit(wo, "wo");
  Frame frame = Frame::from_normal(n);
  Vec3 o = frame.to_local(wo);
  if (o.z <= 0) return std::nullopt;
  BrdfContext ctx(material, o);
  Vec3 wi = ctx.sample(u_lobe, u);
  double pdf = ctx.pdf(wi);
  if (!(pdf > 0) || !std::isfinite(pdf)) return std::nullopt;
  BrdfSample s;
  s.direction = normalize(frame.from_local(wi));
  s.pdf = pdf;
  if (wi.z > 0) s.value = ctx.eval(wi).total() * wi.z;
  return s;
}

std::optional<BrdfSample> sample_brdf(const MaterialSample& material, const Vec3& n, const Vec3& wo, Pcg32& rng) {
  double u_lobe = rng.uniform();
  Vec2 u = rng.uniform2();
  return sample_brdf(material, n, wo, u_lobe, u);
}

}  // namespace drforge

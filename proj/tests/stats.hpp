// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

// Chi-square goodness-of-fit of a direction sampler against its density.

#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "drforge/math.hpp"
#include "drforge/rng.hpp"

namespace drforge::testing {

// Regularized upper incomplete gamma Q(a, x) (series below a + 1, Lentz
// continued fraction above).
inline double gamma_q(double a, double x) {
  if (x <= 0) return 1.0;
  const double log_prefix = -x + a * std::log(x) - std::lgamma(a);
  if (x < a + 1) {
    double term = 1.0 / a, sum = term;
    for (int n = 1; n < 1000; ++n) {
      term *= x / (a + n);
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-15) break;
    }
    return 1.0 - sum * std::exp(log_prefix);
  }
  const double tiny = 1e-300;
  double b = x + 1 - a, c = 1 / tiny, d = 1 / b, h = d;
  for (int i = 1; i < 1000; ++i) {
    double an = -i * (i - a);
    b += 2;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1 / d;
    double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1) < 1e-15) break;
  }
  return std::exp(log_prefix) * h;
}

struct ChiSquareResult {
  double statistic = 0;
  int dof = 0;
  double p_value = 0;
  double expected_mass = 0;  // integral of the pdf over the sphere
};

// Bins directions over (cos theta, phi) on the whole sphere, integrates `pdf`
// over every bin with a `sub` x `sub` midpoint rule, pools bins whose expected
// count is below 5 and returns the chi-square statistic and p-value.
// `sample` returns false for a rejected draw (counted as zero mass).
inline ChiSquareResult chi_square_directions(const std::function<bool(Pcg32&, Vec3&)>& sample,
                                             const std::function<double(const Vec3&)>& pdf, int samples,
                                             std::uint64_t seed, int theta_bins = 40, int phi_bins = 80,
                                             int sub = 24) {
  std::vector<double> observed(theta_bins * phi_bins, 0.0), expected(theta_bins * phi_bins, 0.0);
  Pcg32 rng = Pcg32::keyed({seed, 0xc415});
  for (int i = 0; i < samples; ++i) {
    Vec3 d;
    if (!sample(rng, d)) continue;
    double theta = safe_acos(d.z);
    double phi = std::atan2(d.y, d.x);
    if (phi < 0) phi += kTwoPi;
    int ti = std::min(theta_bins - 1, static_cast<int>(theta / kPi * theta_bins));
    int pi = std::min(phi_bins - 1, static_cast<int>(phi / kTwoPi * phi_bins));
    observed[ti * phi_bins + pi] += 1;
  }
  ChiSquareResult r;
  for (int ti = 0; ti < theta_bins; ++ti)
    for (int pi = 0; pi < phi_bins; ++pi) {
      const double t0 = kPi * ti / theta_bins, t1 = kPi * (ti + 1) / theta_bins;
      const double p0 = kTwoPi * pi / phi_bins, p1 = kTwoPi * (pi + 1) / phi_bins;
      double mass = 0;
      for (int a = 0; a < sub; ++a)
        for (int b = 0; b < sub; ++b) {
          double theta = t0 + (t1 - t0) * (a + 0.5) / sub;
          double phi = p0 + (p1 - p0) * (b + 0.5) / sub;
          Vec3 d{std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
          mass += pdf(d) * std::sin(theta);
        }
      mass *= (t1 - t0) * (p1 - p0) / (sub * sub);
      r.expected_mass += mass;
      expected[ti * phi_bins + pi] = mass * samples;
    }
  double pooled_obs = 0, pooled_exp = 0;
  int cells = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] < 5) {
      pooled_obs += observed[i];
      pooled_exp += expected[i];
      continue;
    }
    r.statistic += sqr(observed[i] - expected[i]) / expected[i];
    ++cells;
  }
  if (pooled_exp >= 5) {
    r.statistic += sqr(pooled_obs - pooled_exp) / pooled_exp;
    ++cells;
  } else if (pooled_obs > 5 * std::max(pooled_exp, 1.0)) {
    // Samples landing where the density claims (almost) no mass.
    r.statistic = std::numeric_limits<double>::infinity();
  }
  r.dof = cells - 1;
  r.p_value = std::isfinite(r.statistic) && r.dof > 0 ? gamma_q(0.5 * r.dof, 0.5 * r.statistic) : 0.0;
  return r;
}

}  // namespace drforge::testing

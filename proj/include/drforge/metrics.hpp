// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <vector>

#include "drforge/image.hpp"

namespace drforge {

inline constexpr double kPsnrCap = 99.0;

// Masks are single-channel images; a pixel counts when its value is > 0.5.
// An empty mask selects every pixel.

// Per-channel least-squares scale s_c = sum(p g) / sum(p^2) over masked
// pixels (1 where sum(p^2) = 0). Throws DomainError for an empty mask.
std::vector<double> solve_scale(const Image& pred, const Image& gt, const Image& mask = {});

// 10 log10(peak^2 / MSE), capped at kPsnrCap (also for MSE = 0).
double psnr(const Image& pred, const Image& gt, double peak = 1.0);
// PSNR after scaling pred by solve_scale(pred, gt, mask); the scale is
// reported through `scale` when non-null.
double si_psnr(const Image& pred, const Image& gt, const Image& mask = {}, double peak = 1.0,
               std::vector<double>* scale = nullptr);

// Mean SSIM over the valid region with an 11x11 Gaussian window (sigma 1.5),
// C1 = 0.01^2, C2 = 0.03^2, averaged over channels. Images must be at least
// 11x11.
double ssim(const Image& pred, const Image& gt);

// Mean angle in degrees between normalized normals over masked pixels.
double mean_angular_error(const Image& pred, const Image& gt, const Image& mask = {});
double rmse(const Image& pred, const Image& gt, const Image& mask = {});

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

enum class EvalKind { render, albedo, roughness, metallic, normal };
const char* to_string(EvalKind kind);
EvalKind eval_kind_from_string(const std::string& s);

struct FrameMetrics {
  std::string name;
  std::map<std::string, double> values;
  std::vector<double> si_scale;  // per channel, when si_psnr was computed
};

struct MetricReport {
  static constexpr int kSchemaVersion = 1;
  EvalKind kind = EvalKind::render;
  std::string scale_policy = "per_image";
  std::vector<FrameMetrics> frames;
  std::map<std::string, double> aggregate;  // mean of each value over frames
};

// Metrics of one frame. Render comparisons expect display-encoded LDR images;
// attribute comparisons use raw buffers restricted to `mask`.
FrameMetrics evaluate_frame(EvalKind kind, const Image& pred, const Image& gt, const Image& mask);
void finalize_report(MetricReport& report);
std::string report_to_json(const MetricReport& report);

}  // namespace drforge

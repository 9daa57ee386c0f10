// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "drforge/image.hpp"

namespace drforge {

struct CompositeOptions {
  double epsilon = 1e-4;
  double ratio_max = 8.0;
};

// Object insertion by shading ratio, per pixel and channel in linear HDR:
//   ratio = max(ins_star, eps) / max(bg_star, eps), clamped to [0, ratio_max]
//   out   = (1 - M) bg ratio + M ins_star
// `mask` has one channel (or more, of which the first is used) in [0,1]. All
// images must share the resolution; the three color images must have equal
// channel counts. Throws DomainError otherwise.
Image composite_insertion(const Image& bg, const Image& ins_star, const Image& bg_star, const Image& mask,
                          const CompositeOptions& options = {});

}  // namespace drforge

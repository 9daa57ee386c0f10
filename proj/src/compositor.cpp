// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "drforge/compositor.hpp"

#include <algorithm>
#include <cmath>

#include "drforge/error.hpp"

namespace drforge {

Image composite_insertion(const Image& bg, const Image& ins_star, const Image& bg_star, const Image& mask,
                          const CompositeOptions& options) {
  if (!(options.epsilon > 0)) throw DomainError("composite: epsilon must be > 0");
  if (!(options.ratio_max > 0)) throw DomainError("composite: ratio_max must be > 0");
  if (!bg.same_shape(ins_star) || !bg.same_shape(bg_star))
    throw DomainError("composite: background and renders must have the same resolution and channels");
  if (mask.width != bg.width || mask.height != bg.height || mask.channels < 1)
    throw DomainError("composite: mask resolution does not match the images");

  Image out(bg.width, bg.height, bg.channels);
  for (int y = 0; y < bg.height; ++y)
    for (int x = 0; x < bg.width; ++x) {
      const double m = mask.at(x, y, 0);
      if (!(m >= 0.0 && m <= 1.0)) throw DomainError("composite: mask values must lie in [0,1]");
      for (int c = 0; c < bg.channels; ++c) {
        const double ins = ins_star.at(x, y, c);
        const double ratio = std::clamp(std::max(ins, options.epsilon) / std::max<double>(bg_star.at(x, y, c), options.epsilon),
                                        0.0, options.ratio_max);
        const double value = m == 0.0 ? bg.at(x, y, c) * ratio
                                      : (1.0 - m) * bg.at(x, y, c) * ratio + m * ins;
        out.at(x, y, c) = static_cast<float>(value);
      }
    }
  return out;
}

}  // namespace drforge

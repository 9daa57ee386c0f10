// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

#include "drforge/color.hpp"

namespace drforge {

// Interleaved float image, row 0 at the top.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<float> data;

  Image() = default;
  Image(int w, int h, int c, float fill = 0.0f)
      : width(w), height(h), channels(c), data(static_cast<std::size_t>(w) * h * c, fill) {}

  bool empty() const { return data.empty(); }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
  bool same_shape(const Image& o) const {
    return width == o.width && height == o.height && channels == o.channels;
  }

  std::size_t index(int x, int y, int c = 0) const {
    assert(x >= 0 && x < width && y >= 0 && y < height && c >= 0 && c < channels);
    return (static_cast<std::size_t>(y) * width + x) * channels + c;
  }
  float& at(int x, int y, int c = 0) { return data[index(x, y, c)]; }
  float at(int x, int y, int c = 0) const { return data[index(x, y, c)]; }

  Rgb rgb(int x, int y) const {
    std::size_t i = index(x, y);
    return {data[i], data[i + 1], data[i + 2]};
  }
  void set_rgb(int x, int y, const Rgb& c) {
    std::size_t i = index(x, y);
    data[i] = static_cast<float>(c.r);
    data[i + 1] = static_cast<float>(c.g);
    data[i + 2] = static_cast<float>(c.b);
  }

  friend bool operator==(const Image&, const Image&) = default;
};

}  // namespace drforge

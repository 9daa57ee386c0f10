// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "drforge/compositor.hpp"

#include <gtest/gtest.h>

#include "drforge/error.hpp"

namespace drforge {
namespace {

Image filled(float v, int channels = 3) { return Image(4, 3, channels, v); }

TEST(Composite, UnchangedShadingKeepsBackground) {
  Image bg = filled(0.3f);
  bg.data[5] = 0.9f;
  Image out = composite_insertion(bg, filled(0.5f), filled(0.5f), filled(0.0f, 1));
  EXPECT_EQ(out, bg);
}

TEST(Composite, ShadowDarkensByShadingRatio) {
  Image out = composite_insertion(filled(0.5f), filled(0.25f), filled(0.5f), filled(0.0f, 1));
  for (float v : out.data) EXPECT_FLOAT_EQ(v, 0.25f);
}

TEST(Composite, MaskedPixelsTakeInsertedRender) {
  Image mask = filled(0.0f, 1);
  mask.data[0] = 1.0f;
  Image ins = filled(0.7f);
  Image out = composite_insertion(filled(0.2f), ins, filled(0.7f), mask);
  for (int c = 0; c < 3; ++c) {
    EXPECT_EQ(out.at(0, 0, c), 0.7f);
    EXPECT_FLOAT_EQ(out.at(1, 0, c), 0.2f);
  }
}

TEST(Composite, FractionalMaskBlends) {
  Image out = composite_insertion(filled(0.4f), filled(0.8f), filled(0.8f), filled(0.25f, 1));
  // 0.75 * 0.4 * 1 + 0.25 * 0.8
  for (float v : out.data) EXPECT_FLOAT_EQ(v, 0.5f);
}

TEST(Composite, RatioIsClampedAndDenominatorFloored) {
  Image out = composite_insertion(filled(1.0f), filled(100.0f), filled(1.0f), filled(0.0f, 1));
  for (float v : out.data) EXPECT_FLOAT_EQ(v, 8.0f);
  // Both renders black: ratio max(0, eps) / max(0, eps) = 1.
  out = composite_insertion(filled(0.6f), filled(0.0f), filled(0.0f), filled(0.0f, 1));
  for (float v : out.data) EXPECT_FLOAT_EQ(v, 0.6f);
}

TEST(Composite, ShapeMismatchIsDomainError) {
  EXPECT_THROW(composite_insertion(filled(0.1f), Image(5, 3, 3), filled(0.1f), filled(0.0f, 1)), DomainError);
  EXPECT_THROW(composite_insertion(filled(0.1f), filled(0.1f), filled(0.1f, 1), filled(0.0f, 1)), DomainError);
  EXPECT_THROW(composite_insertion(filled(0.1f), filled(0.1f), filled(0.1f), Image(2, 2, 1)), DomainError);
}

}  // namespace
}  // namespace drforge

// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <initializer_list>

#include "drforge/math.hpp"

namespace drforge {

inline std::uint64_t mix_bits(std::uint64_t v) {
  // splitmix64 finalizer
  v ^= v >> 30;
  v *= 0xbf58476d1ce4e5b9ULL;
  v ^= v >> 27;
  v *= 0x94d049bb133111ebULL;
  v ^= v >> 31;
  return v;
}

// Hash of an ordered tuple of integers; used to key independent random streams.
inline std::uint64_t hash_key(std::initializer_list<std::uint64_t> values) {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (std::uint64_t v : values) h = mix_bits(h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
  return h;
}

// PCG32 (O'Neill). Small state, good quality and cheap to seed per pixel sample.
class Pcg32 {
 public:
  Pcg32() : Pcg32(0x853c49e6748fea9bULL, 0xda3e39cb94b95bdbULL) {}
  Pcg32(std::uint64_t seed, std::uint64_t stream) { reseed(seed, stream); }

  // Stream keyed by the tuple; the same key always produces the same sequence.
  static Pcg32 keyed(std::initializer_list<std::uint64_t> key) {
    std::uint64_t h = hash_key(key);
    return Pcg32(h, mix_bits(h + 1));
  }

  void reseed(std::uint64_t seed, std::uint64_t stream) {
    state_ = 0;
    inc_ = (stream << 1u) | 1u;
    next_u32();
    state_ += seed;
    next_u32();
  }

  std::uint32_t next_u32() {
    std::uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    auto rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((~rot + 1u) & 31));
  }

  // Uniform double in [0, 1).
  double uniform() { return next_u32() * 0x1p-32; }
  Vec2 uniform2() {
    double a = uniform();
    return {a, uniform()};
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [lo, hi] inclusive.
  int uniform_int(int lo, int hi) {
    auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>((static_cast<std::uint64_t>(next_u32()) * span) >> 32);
  }
  bool coin(double p = 0.5) { return uniform() < p; }

 private:
  std::uint64_t state_ = 0;
  std::uint64_t inc_ = 1;
};

// Radical-inverse low-discrepancy point i of n (deterministic quadrature nodes).
inline Vec2 hammersley(std::uint32_t i, std::uint32_t n) {
  std::uint32_t bits = i;
  bits = (bits << 16u) | (bits >> 16u);
  bits = ((bits & 0x55555555u) << 1u) | ((bits & 0xAAAAAAAAu) >> 1u);
  bits = ((bits & 0x33333333u) << 2u) | ((bits & 0xCCCCCCCCu) >> 2u);
  bits = ((bits & 0x0F0F0F0Fu) << 4u) | ((bits & 0xF0F0F0F0u) >> 4u);
  bits = ((bits & 0x00FF00FFu) << 8u) | ((bits & 0xFF00FF00u) >> 8u);
  return {(i + 0.5) / n, bits * 0x1p-32};
}

}  // namespace drforge

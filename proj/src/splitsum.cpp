// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <vector>

#include "drforge/baselines.hpp"
#include "drforge/brdf.hpp"
#include "drforge/error.hpp"
#include "drforge/image_io.hpp"
#include "drforge/parallel.hpp"

namespace drforge {

namespace {

constexpr int kMinLevelWidth = 16;
constexpr int kIrradianceSourceWidth = 128;
// Share of the GGX half-vector distribution inside the convolution cone.
constexpr double kLobeMass = 0.99;

int wrap(int i, int n) {
  int r = i % n;
  return r < 0 ? r + n : r;
}

Rgb texel(const Image& img, int x, int y) { return img.rgb(x, y); }

// Halves an equirect image, weighting source texels by their solid angle so
// the integral over the sphere is kept.
Image downsample(const Image& src) {
  const int w = std::max(1, src.width / 2), h = std::max(1, src.height / 2);
  Image out(w, h, 3);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      Rgb sum;
      double wsum = 0;
      for (int dy = 0; dy < 2; ++dy)
        for (int dx = 0; dx < 2; ++dx) {
          int sx = std::min(2 * x + dx, src.width - 1), sy = std::min(2 * y + dy, src.height - 1);
          double weight = texel_solid_angle(sy, src.width, src.height);
          sum += texel(src, sx, sy) * weight;
          wsum += weight;
        }
      out.set_rgb(x, y, wsum > 0 ? sum / wsum : Rgb{});
    }
  return out;
}

// Cosine of the widest light angle kept by the GGX lobe: the half-vector cone
// holding kLobeMass of the distribution, tan^2(theta_h) = alpha^2 m / (1 - m).
double lobe_cos_cutoff(double alpha) {
  const double theta_h = std::atan(alpha * std::sqrt(kLobeMass / (1.0 - kLobeMass)));
  return std::cos(std::min(2.0 * theta_h, kPi / 2));
}

// Convolves an equirect image with the normalized kernel
// D(n.h) max(n.l, 0) dOmega(l), h the half vector of n and l, at the image's
// own resolution.
Image convolve_ggx(const Image& src, double alpha, int threads) {
  const int w = src.width, h = src.height;
  std::vector<double> cos_t(h), sin_t(h), omega(h), cos_p(w);
  for (int y = 0; y < h; ++y) {
    const double theta = kPi * (y + 0.5) / h;
    cos_t[y] = std::cos(theta);
    sin_t[y] = std::sin(theta);
    omega[y] = texel_solid_angle(y, w, h);
  }
  for (int k = 0; k < w; ++k) cos_p[k] = std::cos(kTwoPi * k / w);
  const double c_min = lobe_cos_cutoff(alpha);
  const double dphi = kTwoPi / w;
  Image out(w, h, 3);
  parallel_for(h, threads, [&](int yi) {
    for (int xi = 0; xi < w; ++xi) {
      Rgb sum;
      double wsum = 0;
      for (int yj = 0; yj < h; ++yj) {
        const double a = cos_t[yi] * cos_t[yj], b = sin_t[yi] * sin_t[yj];
        if (a + b < c_min) continue;  // the closest texel of the row is outside the cone
        const double q = b > 0 ? (c_min - a) / b : -1.0;
        const int reach = q <= -1.0 ? w / 2 : std::min(static_cast<int>(std::acos(q) / dphi), w / 2);
        const int first = -reach, last = (2 * reach + 1 > w) ? reach - 1 : reach;
        for (int k = first; k <= last; ++k) {
          const double nl = a + b * cos_p[wrap(k, w)];
          if (nl < c_min || nl <= 0) continue;
          const double weight = ggx_d(alpha, std::sqrt(0.5 * (1.0 + nl))) * nl * omega[yj];
          sum += texel(src, wrap(xi + k, w), yj) * weight;
          wsum += weight;
        }
      }
      out.set_rgb(xi, yi, wsum > 0 ? sum / wsum : Rgb{});
    }
  });
  return out;
}

Image source_image(const EnvironmentMap& env) {
  Image img(env.width(), env.height(), 3);
  for (int y = 0; y < env.height(); ++y)
    for (int x = 0; x < env.width(); ++x) img.set_rgb(x, y, env.texel(x, y));
  return img;
}

}  // namespace

Rgb sample_equirect(const Image& image, const Vec3& dir) {
  const int w = image.width, h = image.height;
  Vec2 uv = direction_to_equirect(normalize(dir));
  double fx = uv.x * w - 0.5, fy = uv.y * h - 0.5;
  int x0 = static_cast<int>(std::floor(fx)), y0 = static_cast<int>(std::floor(fy));
  double tx = fx - x0, ty = fy - y0;
  int y1 = std::clamp(y0 + 1, 0, h - 1);
  y0 = std::clamp(y0, 0, h - 1);
  int x1 = wrap(x0 + 1, w);
  x0 = wrap(x0, w);
  Rgb top = texel(image, x0, y0) * (1 - tx) + texel(image, x1, y0) * tx;
  Rgb bottom = texel(image, x0, y1) * (1 - tx) + texel(image, x1, y1) * tx;
  return top * (1 - ty) + bottom * ty;
}

double PrefilteredEnv::level_roughness(int level) const {
  int n = level_count();
  return n > 1 ? static_cast<double>(level) / (n - 1) : 0.0;
}

Rgb PrefilteredEnv::specular(const Vec3& dir, double roughness) const {
  const int n = level_count();
  if (n == 0) throw DomainError("prefiltered environment has no levels");
  const double r = std::max(roughness, kMinRoughness);
  if (n == 1) return sample_equirect(levels[0], dir);
  for (int l = 0; l + 1 < n; ++l) {
    double r0 = std::max(level_roughness(l), kMinRoughness);
    double r1 = std::max(level_roughness(l + 1), kMinRoughness);
    if (r <= r1 || l + 2 == n) {
      double t = std::clamp((r - r0) / (r1 - r0), 0.0, 1.0);
      Rgb a = sample_equirect(levels[l], dir);
      if (t == 0.0) return a;
      return a * (1 - t) + sample_equirect(levels[l + 1], dir) * t;
    }
  }
  return sample_equirect(levels.back(), dir);
}

Rgb PrefilteredEnv::diffuse(const Vec3& n) const { return sample_equirect(irradiance, n); }

PrefilteredEnv prefilter_env(const EnvironmentMap& env, const PrefilterOptions& options) {
  if (options.levels < 1) throw DomainError("prefilter_env: levels must be >= 1");
  if (options.irradiance_width < 2 || options.irradiance_width % 2)
    throw DomainError("prefilter_env: irradiance width must be even and >= 2");

  PrefilteredEnv out;
  std::vector<Image> mips{source_image(env)};
  while (mips.back().height > 1 && mips.back().width > 2) mips.push_back(downsample(mips.back()));
  out.levels.push_back(mips.front());

  // Level l convolves mip l, but no mip narrower than kMinLevelWidth.
  std::size_t floor_mip = 0;
  while (floor_mip + 1 < mips.size() && mips[floor_mip + 1].width >= kMinLevelWidth) ++floor_mip;
  for (int l = 1; l < options.levels; ++l) {
    const double roughness = static_cast<double>(l) / (options.levels - 1);
    const Image& src = mips[std::min(static_cast<std::size_t>(l), floor_mip)];
    out.levels.push_back(convolve_ggx(src, ggx_alpha(roughness), options.threads));
  }

  // Irradiance from a coarse mip: cosine-weighted mean radiance.
  std::size_t coarse = 0;
  while (coarse + 1 < mips.size() && mips[coarse].width > kIrradianceSourceWidth) ++coarse;
  const Image& low = mips[coarse];
  std::vector<Vec3> dirs;
  std::vector<double> angles;
  for (int y = 0; y < low.height; ++y)
    for (int x = 0; x < low.width; ++x) {
      dirs.push_back(texel_direction(x, y, low.width, low.height));
      angles.push_back(texel_solid_angle(y, low.width, low.height));
    }
  const int iw = options.irradiance_width, ih = iw / 2;
  out.irradiance = Image(iw, ih, 3);
  parallel_for(ih, options.threads, [&](int y) {
    for (int x = 0; x < iw; ++x) {
      Vec3 n = texel_direction(x, y, iw, ih);
      Rgb sum;
      double wsum = 0;
      for (std::size_t i = 0; i < dirs.size(); ++i) {
        double c = dot(n, dirs[i]);
        if (c <= 0) continue;
        double weight = c * angles[i];
        sum += low.rgb(static_cast<int>(i % low.width), static_cast<int>(i / low.width)) * weight;
        wsum += weight;
      }
      out.irradiance.set_rgb(x, y, wsum > 0 ? sum / wsum : Rgb{});
    }
  });
  return out;
}

SplitSumImage splitsum_shade_lobes(const GBuffer& gb, const PrefilteredEnv& env, const Camera& camera, int threads) {
  if (camera.width != gb.width || camera.height != gb.height)
    throw DomainError("splitsum_shade: camera resolution does not match the G-buffer");
  if (env.level_count() == 0) throw DomainError("splitsum_shade: empty prefiltered environment");
  const BrdfTable& table = BrdfTable::instance();
  SplitSumImage out{Image(gb.width, gb.height, 3), Image(gb.width, gb.height, 3), Image(gb.width, gb.height, 3)};
  parallel_for(gb.height, threads, [&](int y) {
    for (int x = 0; x < gb.width; ++x) {
      Ray ray = camera.generate_ray(x + 0.5, y + 0.5);
      if (!gb.is_hit(x, y)) {
        out.total.set_rgb(x, y, sample_equirect(env.levels[0], ray.direction));
        continue;
      }
      Vec3 nc{gb.normal.at(x, y, 0), gb.normal.at(x, y, 1), gb.normal.at(x, y, 2)};
      Vec3 n = normalize(camera.pose.rotation * nc);
      Vec3 wo = -ray.direction;
      double mu = std::max(dot(n, wo), 1e-4);
      MaterialSample m = gb.material(x, y);
      Rgb f0 = lerp(Rgb(0.04), m.base_color, m.metallic);
      Vec2 ab = table.lookup(mu, m.roughness);
      Rgb e = f0 * ab.x + Rgb(ab.y);
      Rgb diffuse = m.base_color * (1.0 - m.metallic) * (Rgb(1.0) - e) * env.diffuse(n);
      Rgb specular = env.specular(reflect(wo, n), m.roughness) * e;
      out.diffuse.set_rgb(x, y, diffuse);
      out.specular.set_rgb(x, y, specular);
      out.total.set_rgb(x, y, diffuse + specular);
    }
  });
  return out;
}

Image splitsum_shade(const GBuffer& gb, const PrefilteredEnv& env, const Camera& camera, int threads) {
  return splitsum_shade_lobes(gb, env, camera, threads).total;
}

void save_prefiltered(const std::filesystem::path& path, const PrefilteredEnv& env) {
  std::vector<ExrPart> parts;
  for (int l = 0; l < env.level_count(); ++l)
    parts.push_back({"level_" + std::to_string(l), {env.levels[l], {"R", "G", "B"}, {}}});
  parts.push_back({"irradiance", {env.irradiance, {"R", "G", "B"}, {}}});
  write_exr_multipart(path, parts);
}

PrefilteredEnv load_prefiltered(const std::filesystem::path& path) {
  PrefilteredEnv env;
  std::map<int, Image> levels;
  for (auto& part : read_exr_multipart(path)) {
    if (part.name == "irradiance") {
      env.irradiance = std::move(part.content.image);
    } else if (part.name.rfind("level_", 0) == 0) {
      levels[std::stoi(part.name.substr(6))] = std::move(part.content.image);
    } else {
      throw FormatError("unexpected part '" + part.name + "' in prefiltered cache " + path.string());
    }
  }
  int expected = 0;
  for (auto& [index, image] : levels) {
    if (index != expected++) throw FormatError("prefiltered cache has a gap in its levels: " + path.string());
    if (image.channels != 3) throw FormatError("prefiltered level must have 3 channels");
    env.levels.push_back(std::move(image));
  }
  if (env.levels.empty() || env.irradiance.empty()) throw FormatError("incomplete prefiltered cache " + path.string());
  return env;
}

}  // namespace drforge

// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "drforge/pathtracer.hpp"

#include <cmath>

#include "drforge/error.hpp"
#include "drforge/parallel.hpp"

namespace drforge {

namespace {

Vec3 offset_origin(const Vec3& p, const Vec3& ng) {
  double scale = std::max({1.0, std::abs(p.x), std::abs(p.y), std::abs(p.z)});
  return p + ng * (1e-4 * scale);
}

Rgb clamp_contribution(const Rgb& c, double ceiling) {
  double m = max_component(c);
  if (!std::isfinite(m)) return Rgb{};
  return m > ceiling ? c * (ceiling / m) : c;
}

}  // namespace

const char* to_string(Tonemap t) { return t == Tonemap::agx ? "agx" : "reinhard"; }

Tonemap tonemap_from_string(const std::string& s) {
  if (s == "agx") return Tonemap::agx;
  if (s == "reinhard") return Tonemap::reinhard;
  throw FormatError("unknown tonemap '" + s + "'");
}

Rgb display_tonemap(const Rgb& hdr, Tonemap tonemap) {
  if (tonemap == Tonemap::agx) return agx_tonemap(hdr);
  return srgb_encode(reinhard_tonemap(hdr));
}

Image tonemap_image(const Image& hdr, Tonemap tonemap) {
  if (hdr.channels != 3) throw DomainError("tonemap_image: expected 3 channels");
  Image out(hdr.width, hdr.height, 3);
  for (int y = 0; y < hdr.height; ++y)
    for (int x = 0; x < hdr.width; ++x) out.set_rgb(x, y, display_tonemap(hdr.rgb(x, y), tonemap));
  return out;
}

void RenderSettings::validate() const {
  if (width < 1 || height < 1) throw DomainError("render settings: resolution must be >= 1");
  if (spp < 1) throw DomainError("render settings: spp must be >= 1");
  if (max_bounces < 1) throw DomainError("render settings: max_bounces must be >= 1");
  if (!(firefly_clamp > 0)) throw DomainError("render settings: firefly_clamp must be > 0");
}

// ---------------------------------------------------------------------------
// Camera
// ---------------------------------------------------------------------------

Ray Camera::generate_ray(double px, double py) const {
  double t = std::tan(0.5 * vfov);
  double aspect = static_cast<double>(width) / height;
  Vec3 d{(2.0 * px / width - 1.0) * t * aspect, (1.0 - 2.0 * py / height) * t, -1.0};
  return {pose.position, normalize(pose.rotation * d)};
}

Vec2 Camera::project(const Vec3& p) const {
  double t = std::tan(0.5 * vfov);
  double aspect = static_cast<double>(width) / height;
  double depth = -p.z;
  return {(p.x / depth / (t * aspect) + 1.0) * 0.5 * width, (1.0 - p.y / depth / t) * 0.5 * height};
}

Vec3 Camera::unproject(double px, double py, double depth) const {
  double t = std::tan(0.5 * vfov);
  double aspect = static_cast<double>(width) / height;
  return {(2.0 * px / width - 1.0) * t * aspect * depth, (1.0 - 2.0 * py / height) * t * depth, -depth};
}

Camera camera_for(const SceneDescription& desc, int frame, int width, int height) {
  return {pose_at(desc.camera, frame), desc.camera.vfov, width, height};
}

Geometry build_geometry(const Scene& scene, int frame) {
  Geometry g;
  auto all = bodies(scene.desc);
  for (std::size_t i = 0; i < all.size(); ++i) {
    g.materials.push_back(scene.materials[i]);
    g.append(*scene.meshes[i], body_transform(*all[i], frame), static_cast<int>(i));
  }
  if (scene.desc.ground && scene.ground_material) {
    Transform t;
    t.translation = {0, scene.desc.ground->height, 0};
    g.materials.push_back(*scene.ground_material);
    g.append(make_ground_quad(scene.desc.ground->half_extent, 1.0), t, static_cast<int>(g.materials.size()) - 1);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Integrator
// ---------------------------------------------------------------------------

PathIntegrator::PathIntegrator(const Geometry& geometry, EnvironmentMap env, const RenderSettings& settings)
    : geometry_(&geometry), bvh_(geometry), env_(std::move(env)), sampler_(env_), settings_(settings) {
  settings_.validate();
}

Rgb PathIntegrator::trace(const Ray& ray, Pcg32& rng) const {
  Hit hit;
  if (!bvh_.intersect(ray, hit)) return sample_env(env_, ray.direction);
  return shade_surface(surface_point(*geometry_, ray, hit), -ray.direction, rng);
}

Rgb PathIntegrator::shade_surface(const SurfacePoint& start, const Vec3& start_wo, Pcg32& rng) const {
  const Strategy strategy = settings_.strategy;
  const double ceiling = settings_.firefly_clamp;
  Rgb radiance;
  Rgb beta(1.0);
  SurfacePoint sp = start;
  Vec3 wo = start_wo;

  for (int bounce = 0; bounce < settings_.max_bounces; ++bounce) {
    Vec3 ng = sp.geometric_normal;
    if (dot(ng, wo) < 0) ng = -ng;
    Vec3 ns = sp.shading_normal;
    if (dot(ns, wo) < 0) ns = -ns;
    const Frame frame = Frame::from_normal(ns);
    const Vec3 o = frame.to_local(wo);
    if (o.z <= 1e-9) break;
    const BrdfContext brdf(sp.material, o);
    const Vec3 origin = offset_origin(sp.position, ng);

    // Next-event estimation toward the environment.
    const double u_light_x = rng.uniform(), u_light_y = rng.uniform();
    if (strategy != Strategy::brdf_only) {
      EnvSampler::Sample ls = sampler_.sample({u_light_x, u_light_y});
      if (ls.pdf > 0) {
        Vec3 i = frame.to_local(ls.direction);
        if (i.z > 0 && dot(ng, ls.direction) > 0) {
          Rgb f = brdf.eval(i).total();
          if (!is_black(f) && !bvh_.occluded({origin, ls.direction})) {
            double weight = strategy == Strategy::mis ? ls.pdf / (ls.pdf + brdf.pdf(i)) : 1.0;
            Rgb le = sample_env(env_, ls.direction);
            radiance += clamp_contribution(beta * f * le * (i.z * weight / ls.pdf), ceiling);
          }
        }
      }
    }

    // Continue the path by sampling the BRDF.
    const double u_lobe = rng.uniform();
    const Vec2 u = rng.uniform2();
    Vec3 i = brdf.sample(u_lobe, u);
    double pdf = brdf.pdf(i);
    if (!(pdf > 0) || i.z <= 0) break;
    Vec3 dir = normalize(frame.from_local(i));
    if (dot(ng, dir) <= 0) break;
    beta *= brdf.eval(i).total() * (i.z / pdf);
    if (is_black(beta) || !is_finite(beta)) break;

    Ray ray{origin, dir};
    Hit hit;
    if (!bvh_.intersect(ray, hit)) {
      if (strategy != Strategy::light_only) {
        double weight = strategy == Strategy::mis ? pdf / (pdf + sampler_.pdf(dir)) : 1.0;
        radiance += clamp_contribution(beta * sample_env(env_, dir) * weight, ceiling);
      }
      break;
    }
    sp = surface_point(*geometry_, ray, hit);
    wo = -dir;
  }
  return radiance;
}

Image render_image(const Geometry& geometry, const EnvironmentMap& env, const Camera& camera,
                   const RenderSettings& settings, int frame) {
  settings.validate();
  PathIntegrator integrator(geometry, env, settings);
  Image out(camera.width, camera.height, 3);
  parallel_for(camera.height, settings.threads, [&](int y) {
    for (int x = 0; x < camera.width; ++x) {
      Rgb sum;
      for (int s = 0; s < settings.spp; ++s) {
        Pcg32 rng = sample_stream(settings.seed, frame, x, y, s);
        Vec2 jitter = rng.uniform2();
        sum += integrator.trace(camera.generate_ray(x + jitter.x, y + jitter.y), rng);
      }
      out.set_rgb(x, y, sum / settings.spp);
    }
  });
  return out;
}

Image render_frame(const Scene& scene, int frame, const RenderSettings& settings) {
  Geometry geometry = build_geometry(scene, frame);
  return render_image(geometry, env_at(scene, frame), camera_for(scene.desc, frame, settings.width, settings.height),
                      settings, frame);
}

std::vector<Image> render(const Scene& scene, const RenderSettings& settings) {
  std::vector<Image> frames;
  for (int f = 0; f < scene.desc.frame_count(); ++f) frames.push_back(render_frame(scene, f, settings));
  return frames;
}

// ---------------------------------------------------------------------------
// G-buffer
// ---------------------------------------------------------------------------

GBuffer::GBuffer(int w, int h)
    : width(w),
      height(h),
      normal(w, h, 3),
      depth(w, h, 1, 1.0f),
      base_color(w, h, 3),
      roughness(w, h, 1),
      metallic(w, h, 1),
      hit(w, h, 1) {}

MaterialSample GBuffer::material(int x, int y) const {
  MaterialSample m;
  m.base_color = base_color.rgb(x, y);
  m.roughness = roughness.at(x, y);
  m.metallic = metallic.at(x, y);
  return m;
}

GBuffer render_gbuffer_raw(const Geometry& geometry, const Camera& camera, int threads) {
  Bvh bvh(geometry);
  GBuffer gb(camera.width, camera.height);
  const Mat3 world_to_camera = transpose(camera.pose.rotation);
  parallel_for(camera.height, threads, [&](int y) {
    for (int x = 0; x < camera.width; ++x) {
      Ray ray = camera.generate_ray(x + 0.5, y + 0.5);
      Hit hit;
      if (!bvh.intersect(ray, hit)) continue;
      SurfacePoint sp = surface_point(geometry, ray, hit);
      Vec3 n = sp.shading_normal;
      if (dot(n, ray.direction) > 0) n = -n;
      Vec3 nc = normalize(world_to_camera * n);
      gb.normal.at(x, y, 0) = static_cast<float>(nc.x);
      gb.normal.at(x, y, 1) = static_cast<float>(nc.y);
      gb.normal.at(x, y, 2) = static_cast<float>(nc.z);
      gb.depth.at(x, y) = static_cast<float>(-camera.to_camera(sp.position).z);
      gb.base_color.set_rgb(x, y, sp.material.base_color);
      gb.roughness.at(x, y) = static_cast<float>(sp.material.roughness);
      gb.metallic.at(x, y) = static_cast<float>(sp.material.metallic);
      gb.hit.at(x, y) = 1.0f;
    }
  });
  return gb;
}

DepthRange normalize_depth(std::vector<GBuffer>& buffers) {
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& gb : buffers)
    for (int y = 0; y < gb.height; ++y)
      for (int x = 0; x < gb.width; ++x)
        if (gb.is_hit(x, y)) {
          lo = std::min(lo, static_cast<double>(gb.depth.at(x, y)));
          hi = std::max(hi, static_cast<double>(gb.depth.at(x, y)));
        }
  DepthRange range = lo <= hi ? DepthRange{lo, hi} : DepthRange{0, 0};
  const double span = range.z_max - range.z_min;
  for (auto& gb : buffers) {
    for (int y = 0; y < gb.height; ++y)
      for (int x = 0; x < gb.width; ++x) {
        float& d = gb.depth.at(x, y);
        if (!gb.is_hit(x, y))
          d = 1.0f;
        else if (span > 0)
          d = static_cast<float>(std::clamp(2.0 * (d - range.z_min) / span - 1.0, -1.0, 1.0));
        else
          d = -1.0f;
      }
    gb.depth_range = range;
  }
  return range;
}

double denormalize_depth(double d, const DepthRange& range) {
  return range.z_min + 0.5 * (d + 1.0) * (range.z_max - range.z_min);
}

GBuffer render_gbuffer(const Scene& scene, int frame, const RenderSettings& settings) {
  Geometry geometry = build_geometry(scene, frame);
  std::vector<GBuffer> one{
      render_gbuffer_raw(geometry, camera_for(scene.desc, frame, settings.width, settings.height), settings.threads)};
  normalize_depth(one);
  return std::move(one.front());
}

std::vector<GBuffer> render_gbuffer_clip(const Scene& scene, const RenderSettings& settings) {
  std::vector<GBuffer> buffers;
  for (int f = 0; f < scene.desc.frame_count(); ++f) {
    Geometry geometry = build_geometry(scene, f);
    buffers.push_back(
        render_gbuffer_raw(geometry, camera_for(scene.desc, f, settings.width, settings.height), settings.threads));
  }
  normalize_depth(buffers);
  return buffers;
}

}  // namespace drforge

// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "drforge/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <optional>
#include <ostream>

#include "drforge/baselines.hpp"
#include "drforge/compositor.hpp"
#include "drforge/config.hpp"
#include "drforge/dataset.hpp"
#include "drforge/error.hpp"
#include "drforge/image_io.hpp"
#include "drforge/metrics.hpp"
#include "drforge/parallel.hpp"
#include "drforge/radiometry.hpp"
#include "drforge/scenegen.hpp"

namespace drforge {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

// Options shared by the pipeline commands that resolve a PipelineConfig.
struct ConfigFlags {
  std::string config_file;
  bool full_scale = false;
  std::optional<int> frames;
  std::optional<int> resolution;
  std::optional<int> spp;
  std::optional<int> max_bounces;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> tonemap;
  std::optional<double> firefly_clamp;

  void add_to(CLI::App* app) {
    app->add_option("--config", config_file, "JSON config file layered over the defaults")->check(CLI::ExistingFile);
    app->add_flag("--paper-scale", full_scale, "256 spp, 512x512, 24 frames");
    app->add_option("--frames", frames, "frames per clip")->check(CLI::PositiveNumber);
    app->add_option("--res", resolution, "square resolution in pixels")->check(CLI::PositiveNumber);
    app->add_option("--spp", spp, "samples per pixel")->check(CLI::PositiveNumber);
    app->add_option("--max-bounces", max_bounces, "path length limit")->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "renderer seed");
    app->add_option("--tonemap", tonemap, "agx or reinhard")->check(CLI::IsMember({"agx", "reinhard"}));
    app->add_option("--firefly-clamp", firefly_clamp, "max channel of a single surface contribution");
  }

  // defaults <- base file <- full-scale preset <- --config <- flags
  PipelineConfig resolve(const std::optional<fs::path>& base_file = std::nullopt) const {
    PipelineConfig c = PipelineConfig::desk();
    if (base_file && fs::exists(*base_file)) apply_config_file(c, *base_file);
    if (full_scale) c.apply_full_scale();
    if (!config_file.empty()) apply_config_file(c, config_file);
    if (frames) c.gen.frames = *frames;
    if (resolution) c.gen.resolution = *resolution;
    if (spp) c.render.spp = *spp;
    if (max_bounces) c.render.max_bounces = *max_bounces;
    if (seed) c.render.seed = *seed;
    if (tonemap) c.render.tonemap = tonemap_from_string(*tonemap);
    if (firefly_clamp) c.render.firefly_clamp = *firefly_clamp;
    return c;
  }
};

std::string absolute_string(const std::string& p) {
  return p.empty() ? p : fs::weakly_canonical(fs::absolute(p)).string();
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------------------
// gen-scenes
// ---------------------------------------------------------------------------

struct GenScenesCommand {
  ConfigFlags flags;
  int count = 0;
  std::optional<std::uint64_t> seed_base;
  std::string out;
  std::optional<std::string> asset_pool, texture_pool, env_pool;

  void add_to(CLI::App* app) {
    flags.add_to(app);
    app->add_option("--count", count, "number of clips")->required()->check(CLI::PositiveNumber);
    app->add_option("--seed-base", seed_base, "clip i uses seed-base + i");
    app->add_option("--out", out, "dataset directory")->required();
    app->add_option("--asset-pool", asset_pool, "directory of OBJ meshes");
    app->add_option("--texture-pool", texture_pool, "directory of material directories");
    app->add_option("--env-pool", env_pool, "directory of equirectangular EXR maps");
  }

  int run(std::ostream& out_stream, spdlog::logger& log, int threads) {
    PipelineConfig config = flags.resolve();
    if (seed_base) config.seed_base = *seed_base;
    if (asset_pool) config.asset_pool = *asset_pool;
    if (texture_pool) config.texture_pool = *texture_pool;
    if (env_pool) config.env_pool = *env_pool;
    if (config.asset_pool.empty() || config.texture_pool.empty() || config.env_pool.empty())
      throw DomainError("gen-scenes: asset, texture and env pools must be configured");
    config.asset_pool = absolute_string(config.asset_pool);
    config.texture_pool = absolute_string(config.texture_pool);
    config.env_pool = absolute_string(config.env_pool);
    config.gen.pools = scan_pools(config.asset_pool, config.texture_pool, config.env_pool);
    config.validate();

    const fs::path root = out;
    fs::create_directories(root);
    DatasetManifest manifest;
    manifest.config_digest = config_digest(config);
    manifest.clips.resize(count);
    MeshCache meshes;
    auto start = std::chrono::steady_clock::now();
    parallel_for(count, threads, [&](int i) {
      const std::uint64_t seed = config.seed_base + static_cast<std::uint64_t>(i);
      SceneDescription scene = generate_clip(config.gen, seed, meshes);
      char id[32];
      std::snprintf(id, sizeof id, "clip_%04d", i);
      ClipRecord& r = manifest.clips[i];
      r.id = id;
      r.scene_file = std::string(id) + "/scene.json";
      r.frames = scene.frame_count();
      r.width = r.height = config.gen.resolution;
      r.env_source = scene.env.path;
      r.env_yaw = scene.env.yaw;
      r.env_flip = scene.env.flip;
      r.env_scale = scene.env.scale;
      r.seed = seed;
      r.motion = to_string(scene.motion);
      fs::create_directories(root / id);
      save_scene(root / r.scene_file, scene);
    });
    write_text_atomically(root / "config.json", config_to_json(config).dump(2) + "\n");
    write_manifest(manifest, root / "manifest.json");
    log.info("generated {} scenes in {:.2f}s", count, seconds_since(start));
    out_stream << json{{"clips", count}, {"manifest", (root / "manifest.json").string()},
                       {"config_digest", manifest.config_digest}}
                      .dump()
               << "\n";
    return kExitOk;
  }
};

// ---------------------------------------------------------------------------
// render-dataset
// ---------------------------------------------------------------------------

struct RenderDatasetCommand {
  ConfigFlags flags;
  std::string dataset;
  std::vector<std::string> clip_ids;

  void add_to(CLI::App* app) {
    flags.add_to(app);
    app->add_option("--dataset", dataset, "dataset directory written by gen-scenes")
        ->required()
        ->check(CLI::ExistingDirectory);
    app->add_option("--clip", clip_ids, "render only these clip ids");
  }

  int run(std::ostream& out_stream, spdlog::logger& log, int threads) {
    const fs::path root = dataset;
    PipelineConfig config = flags.resolve(root / "config.json");
    config.render.threads = threads;
    config.validate();
    DatasetManifest manifest = read_manifest(root / "manifest.json");
    for (const auto& id : clip_ids)
      if (std::none_of(manifest.clips.begin(), manifest.clips.end(), [&](const ClipRecord& c) { return c.id == id; }))
        throw IndexError("render-dataset: no clip '" + id + "' in the manifest");

    const RenderSettings settings = config.render_settings();
    const int frames = flags.frames ? *flags.frames : 0;
    auto total = std::chrono::steady_clock::now();
    int rendered = 0;
    for (auto& clip : manifest.clips) {
      if (!clip_ids.empty() && std::find(clip_ids.begin(), clip_ids.end(), clip.id) == clip_ids.end()) continue;
      auto start = std::chrono::steady_clock::now();
      clip = render_clip(clip, root, settings, frames);
      ++rendered;
      log.info("clip {} ({}, {} frames, {}x{}, {} spp) rendered in {:.2f}s", clip.id, clip.motion, clip.frames,
               clip.width, clip.height, settings.spp, seconds_since(start));
    }
    manifest.config_digest = config_digest(config);
    write_text_atomically(root / "config.json", config_to_json(config).dump(2) + "\n");
    write_manifest(manifest, root / "manifest.json");
    log.info("rendered {} clips in {:.2f}s", rendered, seconds_since(total));
    out_stream << json{{"rendered", rendered}, {"config_digest", manifest.config_digest}}.dump() << "\n";
    return kExitOk;
  }
};

// ---------------------------------------------------------------------------
// encode-env
// ---------------------------------------------------------------------------

struct EncodeEnvCommand {
  std::string env;
  std::string out;
  double yaw_deg = 0.0;
  bool flip = false;
  double scale = 1.0;
  double camera_yaw_deg = 0.0;
  double camera_pitch_deg = 0.0;

  void add_to(CLI::App* app) {
    app->add_option("--env", env, "equirectangular HDR map (EXR)")->required()->check(CLI::ExistingFile);
    app->add_option("--out", out, "output directory")->required();
    app->add_option("--yaw", yaw_deg, "environment rotation about +Y in degrees");
    app->add_flag("--flip", flip, "mirror the map horizontally");
    app->add_option("--scale", scale, "intensity multiplier")->check(CLI::PositiveNumber);
    app->add_option("--camera-yaw", camera_yaw_deg, "camera heading in degrees for the direction encoding");
    app->add_option("--camera-pitch", camera_pitch_deg, "camera pitch in degrees for the direction encoding");
  }

  int run(std::ostream& out_stream) {
    const EnvironmentMap source = load_environment(env);
    const EnvironmentMap augmented = augment_env(source, radians(yaw_deg), flip, scale);
    const Mat3 camera_to_world = rotation_y(radians(camera_yaw_deg)) * rotation_x(radians(camera_pitch_deg));
    const LightingEncoding enc = encode_lighting(augmented, transpose(camera_to_world));
    const fs::path dir = out;
    fs::create_directories(dir);
    save_environment(dir / "env.exr", augmented);
    Image ldr = enc.e_ldr;
    for (float& v : ldr.data) v = static_cast<float>(srgb_encode(v));
    write_png(dir / "e_ldr.png", ldr);
    write_exr(dir / "e_log.exr", enc.e_log, {"R", "G", "B"}, {{"e_max", enc.e_max}});
    write_exr(dir / "e_dir.exr", enc.e_dir, {"dir.x", "dir.y", "dir.z"});
    out_stream << json{{"e_max", enc.e_max}, {"width", augmented.width()}, {"height", augmented.height()}}.dump()
               << "\n";
    return kExitOk;
  }
};

// ---------------------------------------------------------------------------
// baseline
// ---------------------------------------------------------------------------

struct BaselineCommand {
  ConfigFlags flags;
  std::string method;
  std::string gbuffer;
  std::string env;
  std::string out;
  std::string cache;
  std::optional<double> edge_ratio;
  std::optional<int> levels;

  void add_to(CLI::App* app) {
    flags.add_to(app);
    app->add_option("method", method, "ssrt or splitsum")->required()->check(CLI::IsMember({"ssrt", "splitsum"}));
    app->add_option("--gbuffer", gbuffer, "rendered clip directory")->required()->check(CLI::ExistingDirectory);
    app->add_option("--env", env, "HDR environment for every frame; default: the clip's per-frame maps")
        ->check(CLI::ExistingFile);
    app->add_option("--out", out, "output directory")->required();
    app->add_option("--cache", cache, "prefiltered environment cache (multi-part EXR)");
    app->add_option("--edge-ratio", edge_ratio, "SSRT depth-discontinuity threshold");
    app->add_option("--levels", levels, "split-sum roughness levels")->check(CLI::PositiveNumber);
  }

  int run(std::ostream& out_stream, spdlog::logger& log, int threads) {
    PipelineConfig config = flags.resolve();
    if (edge_ratio) config.edge_ratio = *edge_ratio;
    if (levels) config.prefilter_levels = *levels;
    const fs::path clip = gbuffer;
    const ClipCamera camera = load_clip_camera(clip / "camera.json");
    RenderSettings settings = config.render;
    settings.width = camera.width;
    settings.height = camera.height;
    settings.threads = threads;
    config.validate();
    settings.validate();
    int frames = camera.track.frame_count();
    if (flags.frames) {
      if (*flags.frames > frames) throw DomainError("baseline: the clip has only " + std::to_string(frames) + " frames");
      frames = *flags.frames;
    }

    const fs::path dir = out;
    fs::create_directories(dir);
    PrefilterOptions options{config.prefilter_levels, 32, threads};
    std::optional<EnvironmentMap> fixed_env;
    std::optional<PrefilteredEnv> fixed_prefiltered;
    if (!env.empty()) fixed_env = load_environment(env);
    if (method == "splitsum" && fixed_env) {
      const fs::path cache_path = cache.empty() ? dir / "prefiltered_env.exr" : fs::path(cache);
      if (fs::exists(cache_path)) {
        fixed_prefiltered = load_prefiltered(cache_path);
        log.info("loaded prefiltered environment from {}", cache_path.string());
      } else {
        fixed_prefiltered = prefilter_env(*fixed_env, options);
        save_prefiltered(cache_path, *fixed_prefiltered);
      }
    }

    for (int f = 0; f < frames; ++f) {
      auto start = std::chrono::steady_clock::now();
      const GBuffer gb = load_gbuffer_frame(clip, f);
      const Camera cam = camera.at(f);
      EnvironmentMap frame_env =
          fixed_env ? *fixed_env : load_environment(clip / "env" / frame_file_name(f, "exr"));
      Image hdr;
      if (method == "ssrt") {
        hdr = ssrt_render(gb, cam, frame_env, settings, config.edge_ratio, f);
      } else {
        const PrefilteredEnv prefiltered = fixed_prefiltered ? *fixed_prefiltered : prefilter_env(frame_env, options);
        hdr = splitsum_shade(gb, prefiltered, cam, threads);
      }
      write_exr_rgb(dir / frame_file_name(f, "exr"), hdr);
      write_png(dir / frame_file_name(f, "png"), tonemap_image(hdr, settings.tonemap));
      log.info("{} frame {} in {:.2f}s", method, f, seconds_since(start));
    }
    out_stream << json{{"method", method}, {"frames", frames}, {"out", dir.string()}}.dump() << "\n";
    return kExitOk;
  }
};

// ---------------------------------------------------------------------------
// composite
// ---------------------------------------------------------------------------

Image read_rgb_any(const fs::path& path) {
  std::string ext = path.extension().string();
  if (ext == ".png") return read_png(path);
  return read_exr_rgb(path);
}

Image read_mask(const fs::path& path) {
  Image img = path.extension() == ".png" ? read_png(path) : read_exr(path).image;
  Image mask(img.width, img.height, 1);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) mask.data[i] = img.data[i * img.channels];
  return mask;
}

struct CompositeCommand {
  std::string bg, ins, bg_rerender, mask, out;
  CompositeOptions options;

  void add_to(CLI::App* app) {
    app->add_option("--bg", bg, "background photograph (linear EXR)")->required()->check(CLI::ExistingFile);
    app->add_option("--ins", ins, "render of the scene with the inserted object")->required()->check(CLI::ExistingFile);
    app->add_option("--bg-rerender", bg_rerender, "render of the scene without the object")
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("--mask", mask, "object mask (PNG or EXR, first channel)")->required()->check(CLI::ExistingFile);
    app->add_option("--out", out, "output EXR")->required();
    app->add_option("--epsilon", options.epsilon, "shading-ratio denominator floor");
    app->add_option("--ratio-max", options.ratio_max, "shading-ratio clamp");
  }

  int run(std::ostream& out_stream) {
    Image result = composite_insertion(read_rgb_any(bg), read_rgb_any(ins), read_rgb_any(bg_rerender),
                                       read_mask(mask), options);
    write_exr_rgb(out, result);
    out_stream << json{{"out", out}, {"width", result.width}, {"height", result.height}}.dump() << "\n";
    return kExitOk;
  }
};

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

const char* eval_channel(EvalKind kind) {
  switch (kind) {
    case EvalKind::render: return "rgb_ldr";
    case EvalKind::albedo: return "basecolor";
    case EvalKind::roughness: return "roughness";
    case EvalKind::metallic: return "metallic";
    case EvalKind::normal: return "normal";
  }
  return "rgb_ldr";
}

struct FrameFile {
  fs::path path;
  bool in_channel_dir = false;
};

// Frame files of `channel` under `dir`: the channel subdirectory of a clip
// when present, otherwise the matching files directly inside `dir`.
std::vector<FrameFile> list_frames(const fs::path& dir, const std::string& channel) {
  const ChannelInfo& info = channel_info(channel);
  fs::path source = dir;
  bool in_channel = fs::is_directory(dir / channel);
  if (in_channel) source = dir / channel;
  if (!fs::is_directory(source)) throw IoError("eval: '" + dir.string() + "' is not a directory");
  std::vector<FrameFile> files;
  for (const auto& entry : fs::directory_iterator(source)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.rfind("frame_", 0) != 0 || entry.path().extension() != std::string(".") + info.extension) continue;
    files.push_back({entry.path(), in_channel});
  }
  std::sort(files.begin(), files.end(), [](const FrameFile& a, const FrameFile& b) { return a.path < b.path; });
  if (files.empty()) throw IoError("eval: no " + channel + " frames in '" + dir.string() + "'");
  return files;
}

Image read_eval_image(const FrameFile& file, const std::string& channel) {
  if (file.in_channel_dir || file.path.extension() == ".png") return read_channel_file(file.path, channel);
  // Loose EXR files: the canonical channel names first, then RGB.
  try {
    return read_channel_file(file.path, channel);
  } catch (const FormatError&) {
    return read_exr_rgb(file.path);
  }
}

struct EvalCommand {
  std::string pred, gt, kind_name, out, mask_dir;

  void add_to(CLI::App* app) {
    app->add_option("--pred", pred, "prediction directory")->required()->check(CLI::ExistingDirectory);
    app->add_option("--gt", gt, "ground-truth clip directory")->required()->check(CLI::ExistingDirectory);
    app->add_option("--kind", kind_name, "render, albedo, roughness, metallic or normal")
        ->required()
        ->check(CLI::IsMember({"render", "albedo", "roughness", "metallic", "normal"}));
    app->add_option("--out", out, "report JSON")->required();
    app->add_option("--mask", mask_dir, "directory with hit/frame_*.exr masks; default: the ground truth's")
        ->check(CLI::ExistingDirectory);
  }

  int run(std::ostream& out_stream) {
    const EvalKind kind = eval_kind_from_string(kind_name);
    const std::string channel = eval_channel(kind);
    const auto pred_files = list_frames(pred, channel);
    const auto gt_files = list_frames(gt, channel);
    if (pred_files.size() != gt_files.size())
      throw DomainError("eval: " + std::to_string(pred_files.size()) + " predicted frames but " +
                        std::to_string(gt_files.size()) + " ground-truth frames");
    const fs::path mask_root = mask_dir.empty() ? fs::path(gt) : fs::path(mask_dir);
    const bool use_mask = kind != EvalKind::render && fs::is_directory(mask_root / "hit");

    MetricReport report;
    report.kind = kind;
    for (std::size_t i = 0; i < gt_files.size(); ++i) {
      Image p = read_eval_image(pred_files[i], channel);
      Image g = read_eval_image(gt_files[i], channel);
      Image mask;
      if (use_mask) mask = read_channel_file(mask_root / "hit" / gt_files[i].path.filename().replace_extension(".exr"), "hit");
      FrameMetrics m = evaluate_frame(kind, p, g, mask);
      m.name = gt_files[i].path.filename().string();
      report.frames.push_back(std::move(m));
    }
    finalize_report(report);
    write_text_atomically(out, report_to_json(report) + "\n");
    out_stream << json{{"kind", kind_name}, {"frames", report.frames.size()}, {"aggregate", report.aggregate}}.dump()
               << "\n";
    return kExitOk;
  }
};

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

struct ValidateCommand {
  std::string dataset;

  void add_to(CLI::App* app) {
    app->add_option("--dataset", dataset, "dataset directory")->required()->check(CLI::ExistingDirectory);
  }

  int run(std::ostream& out_stream, int threads) {
    const DatasetManifest manifest = read_manifest(fs::path(dataset) / "manifest.json");
    const auto findings = validate_dataset(manifest, dataset, threads);
    json list = json::array();
    for (const auto& f : findings) list.push_back({{"clip", f.clip}, {"file", f.file}, {"message", f.message}});
    out_stream << json{{"clips", manifest.clips.size()}, {"findings", list}}.dump(2) << "\n";
    if (!findings.empty())
      throw ValidationError("validate: " + std::to_string(findings.size()) + " finding(s) in '" + dataset + "'");
    return kExitOk;
  }
};

void report_error(std::ostream& err, const std::string& command, const char* category, const std::string& message) {
  err << json{{"error", category}, {"command", command}, {"message", message}}.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"drforge: synthetic inverse-rendering dataset pipeline", "drforge"};
  app.require_subcommand(1);
  int threads = 0;
  std::string log_level = "info";
  app.add_option("--threads", threads, "worker threads (0: DR_FORGE_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));
  // Subcommands inherit the global options so they may follow the command name.
  app.fallthrough();

  GenScenesCommand gen_scenes;
  RenderDatasetCommand render_dataset;
  EncodeEnvCommand encode_env;
  BaselineCommand baseline;
  CompositeCommand composite;
  EvalCommand eval;
  ValidateCommand validate;
  auto* gen_app = app.add_subcommand("gen-scenes", "generate scene descriptions and the dataset manifest");
  auto* render_app = app.add_subcommand("render-dataset", "path trace every clip of a dataset");
  auto* encode_app = app.add_subcommand("encode-env", "write the LDR, log and direction lighting encodings");
  auto* baseline_app = app.add_subcommand("baseline", "render a clip with the SSRT or split-sum baseline");
  auto* composite_app = app.add_subcommand("composite", "shading-ratio object insertion");
  auto* eval_app = app.add_subcommand("eval", "compare predictions with ground truth");
  auto* validate_app = app.add_subcommand("validate", "check a rendered dataset");
  gen_scenes.add_to(gen_app);
  render_dataset.add_to(render_app);
  encode_env.add_to(encode_app);
  baseline.add_to(baseline_app);
  composite.add_to(composite_app);
  eval.add_to(eval_app);
  validate.add_to(validate_app);

  std::string command = args.empty() ? "" : args.front();
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, command, "usage", e.what());
    return kExitUsage;
  }

  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err, true);
  spdlog::logger log("drforge", sink);
  log.set_pattern("[%Y-%m-%d %H:%M:%S.%e] [%l] %v");
  log.set_level(spdlog::level::from_str(log_level));

  try {
    const int resolved_threads = resolve_threads(threads);
    if (*gen_app) return gen_scenes.run(out, log, resolved_threads);
    if (*render_app) return render_dataset.run(out, log, resolved_threads);
    if (*encode_app) return encode_env.run(out);
    if (*baseline_app) return baseline.run(out, log, resolved_threads);
    if (*composite_app) return composite.run(out);
    if (*eval_app) return eval.run(out);
    if (*validate_app) return validate.run(out, resolved_threads);
    report_error(err, command, "usage", "no subcommand");
    return kExitUsage;
  } catch (const Error& e) {
    report_error(err, command, e.category(), e.what());
  } catch (const fs::filesystem_error& e) {
    report_error(err, command, "io", e.what());
  } catch (const std::exception& e) {
    report_error(err, command, "internal", e.what());
  }
  return kExitFailure;
}

}  // namespace drforge

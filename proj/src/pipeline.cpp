#include "sinksam/pipeline.hpp"

#include <atomic>
#include <iostream>
#include <memory>
#include <mutex>

#include "sinksam/ascii_grid.hpp"
#include "sinksam/fill.hpp"
#include "sinksam/parallel.hpp"
#include "sinksam/raster_ops.hpp"
#include "sinksam/segmenter.hpp"

namespace sinksam {

namespace fs = std::filesystem;

// --- logging ------------------------------------------------------------------

namespace {
std::atomic<int> g_log_level{static_cast<int>(LogLevel::Info)};
std::mutex g_log_mutex;
}  // namespace

void set_log_level(LogLevel level) { g_log_level = static_cast<int>(level); }

void log(LogLevel level, const std::string& message) {
  if (static_cast<int>(level) > g_log_level) return;
  static constexpr const char* kNames[] = {"error", "info", "debug"};
  std::lock_guard lock(g_log_mutex);
  std::cerr << "[" << kNames[static_cast<int>(level)] << "] " << message << "\n";
}

// --- config -------------------------------------------------------------------

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (detail::iequals(v, "true") || v == "1" || detail::iequals(v, "yes")) return true;
  if (detail::iequals(v, "false") || v == "0" || detail::iequals(v, "no")) return false;
  throw InputError("config: " + std::string(key) + " expects true/false, got '" + std::string(v) + "'");
}

template <typename T>
T parse_value(std::string_view key, std::string_view v) {
  try {
    return detail::parse_number<T>(v, 0);
  } catch (const ParseError&) {
    throw InputError("config: " + std::string(key) + " expects a number, got '" + std::string(v) + "'");
  }
}

fs::path resolve(std::string_view v, const fs::path& base) {
  fs::path p{std::string(v)};
  return p.is_absolute() || base.empty() ? p : base / p;
}

}  // namespace

void set_config_value(PipelineConfig& c, std::string_view key, std::string_view value,
                      const fs::path& base) {
  const std::string_view v = trim(value);
  if (key == "depth_raster") c.depth_raster = resolve(v, base);
  else if (key == "rgb_mosaic") c.rgb_mosaic = resolve(v, base);
  else if (key == "invert_depth") c.invert_depth = parse_bool(key, v);
  else if (key == "out_dir") c.out_dir = resolve(v, base);
  else if (key == "workers") c.workers = parse_value<int>(key, v);
  else if (key == "run_name") c.run_name = std::string(v);
  else if (key == "tile.patch") c.tile.patch = parse_value<Index>(key, v);
  else if (key == "tile.stride") c.tile.stride = parse_value<Index>(key, v);
  else if (key == "fill.mode") {
    if (detail::iequals(v, "patch")) c.fill_mode = FillMode::Patch;
    else if (detail::iequals(v, "mosaic")) c.fill_mode = FillMode::Mosaic;
    else throw InputError("config: fill.mode expects patch or mosaic");
  }
  else if (key == "filter.min_depth") c.filter.min_depth = parse_value<double>(key, v);
  else if (key == "filter.min_area_px") c.filter.min_area_px = parse_value<Index>(key, v);
  else if (key == "prompts.pad_px") c.pad_px = parse_value<Index>(key, v);
  else if (key == "backend.kind") {
    if (detail::iequals(v, "echo")) c.backend = BackendKind::Echo;
    else if (detail::iequals(v, "http")) c.backend = BackendKind::Http;
    else if (detail::iequals(v, "replay")) c.backend = BackendKind::Replay;
    else throw InputError("config: backend.kind expects echo, http or replay");
  }
  else if (key == "backend.endpoint") c.endpoint = std::string(v);
  else if (key == "backend.timeout") c.timeout_s = parse_value<double>(key, v);
  else if (key == "backend.max_inflight") c.max_inflight = parse_value<int>(key, v);
  else if (key == "backend.retries") c.retries = parse_value<int>(key, v);
  else if (key == "backend.replay_dir") c.replay_dir = resolve(v, base);
  else if (key == "segment.binarize_threshold") c.binarize_threshold = parse_value<double>(key, v);
  else if (key == "segment.merge") c.merge = parse_merge_rule(v);
  else if (key == "segment.export_patches") c.export_patches = parse_bool(key, v);
  else if (key == "eval.gt_mask") c.gt_mask = resolve(v, base);
  else if (key == "eval.ignore_mask") c.ignore_mask = resolve(v, base);
  else if (key == "eval.thresholds") {
    c.thresholds.clear();
    std::size_t start = 0;
    while (start <= v.size()) {
      auto end = v.find(',', start);
      if (end == std::string_view::npos) end = v.size();
      const auto item = trim(v.substr(start, end - start));
      if (!item.empty()) c.thresholds.push_back(parse_value<double>(key, item));
      start = end + 1;
    }
  }
  else throw InputError("config: unknown key '" + std::string(key) + "'");
}

PipelineConfig parse_config(std::string_view text, const fs::path& base_dir, PipelineConfig config) {
  const auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("config: expected 'key = value'", i + 1);
    try {
      set_config_value(config, trim(line.substr(0, eq)), line.substr(eq + 1), base_dir);
    } catch (const ParseError&) {
      throw;
    } catch (const InputError& e) {
      throw ParseError(e.what(), i + 1);
    }
  }
  return config;
}

PipelineConfig load_config(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw InputError("config file '" + path.string() + "' does not exist");
  return parse_config(detail::read_text_file(path), path.parent_path());
}

// --- stages -------------------------------------------------------------------

namespace {

void require_file(const fs::path& path, std::string_view what) {
  if (path.empty()) throw InputError(std::string(what) + " is not configured");
  if (!fs::is_regular_file(path)) {
    throw InputError(std::string(what) + " '" + path.string() + "' does not exist");
  }
}

fs::path stage_dir(const PipelineConfig& c, std::string_view name) {
  fs::path dir = c.out_dir / std::string(name);
  fs::create_directories(dir);
  return dir;
}

void check_tiling(const PipelineConfig& c, Index width, Index height) {
  if (c.tile.stride <= 0 || c.tile.stride > c.tile.patch) {
    throw InputError("tile spec requires 0 < tile.stride <= tile.patch");
  }
  if (width < c.tile.patch || height < c.tile.patch) {
    throw InputError("mosaic " + std::to_string(width) + "x" + std::to_string(height) +
                     " is smaller than tile.patch " + std::to_string(c.tile.patch));
  }
}

}  // namespace

void cmd_fill(const PipelineConfig& c) {
  require_file(c.depth_raster, "depth_raster");
  RasterD dem = read_ascii_grid<double>(c.depth_raster);
  if (c.invert_depth) dem = invert_depth(dem);
  log(LogLevel::Info, "fill: " + std::to_string(dem.width()) + "x" + std::to_string(dem.height()) +
                          (c.fill_mode == FillMode::Patch ? " per patch" : " whole mosaic"));

  RasterD depth;
  if (c.fill_mode == FillMode::Mosaic) {
    depth = depression_depth(dem);
  } else {
    check_tiling(c, dem.width(), dem.height());
    const auto windows = plan_tiles(dem.width(), dem.height(), c.tile);
    std::vector<RasterD> tiles(windows.size());
    parallel_for(windows.size(), c.workers, [&](std::size_t i) {
      tiles[i] = depression_depth(extract_tile(dem, windows[i]));
      log(LogLevel::Debug, "fill: tile " + tile_id(windows[i]) + " done");
    });
    Stitcher<double> stitcher(dem.width(), dem.height(), c.merge, dem.nodata(), dem.geo());
    for (std::size_t i = 0; i < windows.size(); ++i) stitcher.add(windows[i], tiles[i]);
    depth = stitcher.finish();
  }

  const auto valid = dem.valid_mask();
  RasterD filled(Grid<double>(valid.select(dem.values() + depth.values(), dem.nodata())),
                 dem.nodata(), dem.geo());
  const fs::path dir = stage_dir(c, "fill");
  write_ascii_grid(depth, dir / "depth.asc");
  write_ascii_grid(filled, dir / "filled.asc");
}

void cmd_prompts(const PipelineConfig& c) {
  const fs::path depth_path = c.out_dir / "fill" / "depth.asc";
  require_file(depth_path, "depth raster (run 'fill' first)");
  const RasterD depth = read_ascii_grid<double>(depth_path);
  check_tiling(c, depth.width(), depth.height());

  const auto kept = filter_components(label_components(depth), c.filter);
  const RasterD depressions = retain_components(depth, kept);
  const fs::path dir = stage_dir(c, "prompts");
  write_ascii_grid(depressions, dir / "depressions.asc");

  const auto windows = plan_tiles(depth.width(), depth.height(), c.tile);
  std::vector<std::size_t> counts(windows.size());
  parallel_for(windows.size(), c.workers, [&](std::size_t i) {
    const auto& w = windows[i];
    const auto comps = label_components(extract_tile(depressions, w));
    const auto doc = make_boxes_document(tile_id(w), comps, c.pad_px, w.patch, w.patch);
    write_boxes_json(doc, dir / (doc.patch_id + ".json"));
    write_window_json(w, dir / (doc.patch_id + ".window.json"));
    counts[i] = doc.boxes.size();
  });
  std::size_t total = 0;
  for (auto n : counts) total += n;
  log(LogLevel::Info, "prompts: " + std::to_string(kept.size()) + " depressions kept, " +
                          std::to_string(total) + " boxes over " + std::to_string(windows.size()) +
                          " patches");
}

void cmd_segment(const PipelineConfig& c) {
  require_file(c.rgb_mosaic, "rgb_mosaic");
  const fs::path prompts = c.out_dir / "prompts";
  require_file(prompts / "depressions.asc", "depression mosaic (run 'prompts' first)");
  if (!(c.binarize_threshold >= 0.0 && c.binarize_threshold <= 1.0)) {
    throw InputError("segment.binarize_threshold must lie in [0, 1]");
  }
  const RgbImage rgb = read_ppm(c.rgb_mosaic);
  const RasterD depressions = read_ascii_grid<double>(prompts / "depressions.asc");
  if (rgb.width() != depressions.width() || rgb.height() != depressions.height()) {
    throw ShapeError("rgb mosaic is " + std::to_string(rgb.width()) + "x" + std::to_string(rgb.height()) +
                     ", depth mosaic is " + std::to_string(depressions.width()) + "x" +
                     std::to_string(depressions.height()));
  }
  check_tiling(c, rgb.width(), rgb.height());

  std::unique_ptr<SegmenterBackend> shared;
  if (c.backend == BackendKind::Http) {
    shared = http_backend(c.endpoint, c.timeout_s, c.retries, c.max_inflight);
  } else if (c.backend == BackendKind::Replay) {
    shared = replay_backend(c.replay_dir);
  }

  const fs::path dir = stage_dir(c, "segment");
  if (c.export_patches) fs::create_directories(dir / "patches");
  const auto windows = plan_tiles(rgb.width(), rgb.height(), c.tile);
  std::vector<RasterD> probs(windows.size());
  parallel_for(windows.size(), c.workers, [&](std::size_t i) {
    const auto& w = windows[i];
    const std::string id = tile_id(w);
    const fs::path boxes_path = prompts / (id + ".json");
    require_file(boxes_path, "prompt file");
    const BoxesDocument doc = read_boxes_json(boxes_path);
    const RgbImage patch = extract_tile(rgb, w);
    if (c.export_patches) {
      write_ppm(patch, dir / "patches" / (id + ".ppm"));
      write_window_json(w, dir / "patches" / (id + ".window.json"));
    }
    std::unique_ptr<SegmenterBackend> local;
    if (c.backend == BackendKind::Echo) local = depression_echo_backend(extract_tile(depressions, w));
    SegmenterBackend& backend = local ? *local : *shared;
    const auto outcome = segment_patch(backend, id, patch, doc.boxes, c.binarize_threshold);
    probs[i] = RasterD(outcome.fused_probability.probs(), kDefaultNodata,
                       window_geo(depressions.geo(), depressions.height(), w));
    log(LogLevel::Debug, "segment: " + id + " " + std::to_string(doc.boxes.size()) + " boxes");
  });

  Stitcher<double> stitcher(rgb.width(), rgb.height(), c.merge, kDefaultNodata, depressions.geo());
  for (std::size_t i = 0; i < windows.size(); ++i) stitcher.add(windows[i], probs[i]);
  const RasterD probability = stitcher.finish();
  const BinaryMask mask(Grid<bool>(probability.values() > c.binarize_threshold));
  write_ascii_grid(probability, dir / "probability.asc");
  write_mask_ascii(mask, dir / "mask.asc", depressions.geo());
  log(LogLevel::Info, "segment: " + std::to_string(mask.count()) + " sinkhole pixels");
}

MetricsReport cmd_eval(const PipelineConfig& c) {
  require_file(c.gt_mask, "eval.gt_mask");
  const fs::path pred_path = c.out_dir / "segment" / "mask.asc";
  require_file(pred_path, "predicted mask (run 'segment' first)");
  const BinaryMask pred = read_mask_ascii(pred_path);
  const BinaryMask gt = read_mask_ascii(c.gt_mask);
  std::optional<BinaryMask> ignore;
  if (!c.ignore_mask.empty()) {
    require_file(c.ignore_mask, "eval.ignore_mask");
    ignore = read_mask_ascii(c.ignore_mask);
  }
  const MetricsReport report = evaluate(pred, gt, c.thresholds, ignore ? &*ignore : nullptr);
  const fs::path dir = stage_dir(c, "eval");
  detail::write_text_file(dir / "report.json", report_to_json(report));
  detail::write_text_file(dir / "report.csv", report_csv_header() + report_csv_row(c.run_name, report));
  log(LogLevel::Info, "eval: F1 " + detail::format_number(report.metrics.f1) + ", IoU " +
                          detail::format_number(report.metrics.iou));
  return report;
}

std::optional<MetricsReport> cmd_run(const PipelineConfig& c) {
  cmd_fill(c);
  cmd_prompts(c);
  cmd_segment(c);
  if (c.gt_mask.empty()) {
    log(LogLevel::Info, "run: no eval.gt_mask configured, skipping eval");
    return std::nullopt;
  }
  return cmd_eval(c);
}

SynthScene cmd_synth(const TerrainParams& params, const fs::path& out_dir) {
  SynthScene scene = gen_terrain(params);
  write_scene(scene, out_dir);
  detail::write_text_file(out_dir / "scene.cfg",
                          "# generated by 'sinksam synth'\n"
                          "depth_raster = dem.asc\n"
                          "rgb_mosaic = rgb.ppm\n"
                          "invert_depth = false\n"
                          "eval.gt_mask = gt_mask.asc\n"
                          "out_dir = out\n");
  log(LogLevel::Info, "synth: " + std::to_string(scene.sinkholes.size()) + " sinkholes written to " +
                          out_dir.string());
  return scene;
}

}  // namespace sinksam

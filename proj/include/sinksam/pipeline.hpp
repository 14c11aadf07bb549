#pragma once

// End-to-end orchestration: fill -> prompts -> segment -> eval.
//
// Output tree under out_dir:
//   fill/depth.asc, fill/filled.asc
//   prompts/depressions.asc, prompts/<tile>.json, prompts/<tile>.window.json
//   segment/probability.asc, segment/mask.asc [, segment/patches/<tile>.ppm]
//   eval/report.json, eval/report.csv

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sinksam/eval.hpp"
#include "sinksam/labeling.hpp"
#include "sinksam/synth.hpp"
#include "sinksam/tiling.hpp"

namespace sinksam {

enum class BackendKind { Echo, Http, Replay };
enum class FillMode { Patch, Mosaic };

struct PipelineConfig {
  std::filesystem::path depth_raster;
  std::filesystem::path rgb_mosaic;
  bool invert_depth = false;
  TileSpec tile;
  FillMode fill_mode = FillMode::Patch;
  FilterThresholds filter;
  Index pad_px = 0;

  BackendKind backend = BackendKind::Echo;
  std::string endpoint;
  double timeout_s = 30.0;
  int max_inflight = 4;
  int retries = 2;
  std::filesystem::path replay_dir;
  double binarize_threshold = 0.5;
  MergeRule merge = MergeRule::Max;
  bool export_patches = false;

  std::filesystem::path gt_mask;
  std::filesystem::path ignore_mask;
  std::vector<double> thresholds = default_iou_thresholds();
  std::string run_name = "sinksam";

  std::filesystem::path out_dir = "sinksam_out";
  int workers = 1;
};

/// Sets one dotted key (e.g. "tile.patch", "backend.kind"). Relative paths
/// are resolved against base_dir. Throws InputError for unknown keys or
/// unparsable values.
void set_config_value(PipelineConfig& config, std::string_view key, std::string_view value,
                      const std::filesystem::path& base_dir);

/// Parses "key = value" lines; '#' starts a comment.
PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir,
                            PipelineConfig config = {});
PipelineConfig load_config(const std::filesystem::path& path);

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };
void set_log_level(LogLevel level);
void log(LogLevel level, const std::string& message);

void cmd_fill(const PipelineConfig& config);
void cmd_prompts(const PipelineConfig& config);
void cmd_segment(const PipelineConfig& config);
MetricsReport cmd_eval(const PipelineConfig& config);
/// All four stages; eval is skipped when no ground truth is configured.
std::optional<MetricsReport> cmd_run(const PipelineConfig& config);

/// Generates a scene into out_dir and writes a scene.cfg that runs the
/// pipeline on it.
SynthScene cmd_synth(const TerrainParams& params, const std::filesystem::path& out_dir);

}  // namespace sinksam

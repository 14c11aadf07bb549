// sinksam: command-line driver for the sinkhole mapping pipeline.
//
//   sinksam fill     --config run.cfg
//   sinksam prompts  --config run.cfg
//   sinksam segment  --config run.cfg [--set backend.kind=http --set backend.endpoint=...]
//   sinksam eval     --config run.cfg
//   sinksam run      --config run.cfg --workers 8
//   sinksam synth    --seed 7 --size 1024 --n 12 --out scene/
//
// Exit codes: 0 success, 1 internal/backend error, 2 bad input or config.

#include <CLI11.hpp>

#include <iostream>

#include "sinksam/pipeline.hpp"
#include "sinksam/segmenter.hpp"

namespace {

using namespace sinksam;

struct CommonOptions {
  std::string config;
  std::vector<std::string> overrides;
  std::string out_dir;
  int workers = 0;
  int verbosity = 0;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("-c,--config", o.config, "Pipeline config file (key = value lines)");
  cmd->add_option("-s,--set", o.overrides, "Override a config key, e.g. --set tile.patch=256")
      ->type_name("KEY=VALUE");
  cmd->add_option("-o,--out", o.out_dir, "Output directory (overrides out_dir)");
  cmd->add_option("-j,--workers", o.workers, "Worker threads for per-patch stages")
      ->check(CLI::PositiveNumber);
}

PipelineConfig build_config(const CommonOptions& o) {
  PipelineConfig config = o.config.empty() ? PipelineConfig{} : load_config(o.config);
  for (const auto& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw InputError("--set expects KEY=VALUE, got '" + kv + "'");
    set_config_value(config, kv.substr(0, eq), kv.substr(eq + 1), {});
  }
  if (!o.out_dir.empty()) config.out_dir = o.out_dir;
  if (o.workers > 0) config.workers = o.workers;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sinkhole mapping from depression filling and prompt-based segmentation"};
  app.require_subcommand(1);
  CommonOptions opts;
  app.add_flag("-v,--verbose", opts.verbosity, "More logging (repeatable)");
  app.add_flag("-q,--quiet", opts.quiet, "Log errors only");

  auto* fill = app.add_subcommand("fill", "Fill closed depressions and write depth rasters");
  auto* prompts = app.add_subcommand("prompts", "Filter depressions and write per-patch prompt boxes");
  auto* segment = app.add_subcommand("segment", "Segment patches from prompt boxes and stitch masks");
  auto* eval = app.add_subcommand("eval", "Evaluate the stitched mask against ground truth");
  auto* run = app.add_subcommand("run", "Run fill, prompts, segment and eval in sequence");
  for (auto* cmd : {fill, prompts, segment, eval, run}) add_common(cmd, opts);

  auto* synth = app.add_subcommand("synth", "Generate a synthetic sinkhole scene");
  TerrainParams terrain;
  Index size = 1024;
  std::string synth_out;
  synth->add_option("--seed", terrain.seed, "Generator seed")->capture_default_str();
  synth->add_option("--size", size, "Scene side length in pixels")->capture_default_str();
  synth->add_option("-n,--n", terrain.n_sinkholes, "Number of sinkholes")->capture_default_str();
  synth->add_option("--depth-min", terrain.depth_min)->capture_default_str();
  synth->add_option("--depth-max", terrain.depth_max)->capture_default_str();
  synth->add_option("--radius-min", terrain.radius_min)->capture_default_str();
  synth->add_option("--radius-max", terrain.radius_max)->capture_default_str();
  synth->add_option("--noise", terrain.noise_amp, "Smooth-noise amplitude")->capture_default_str();
  synth->add_option("--slope", terrain.slope, "Base gradient per cell")->capture_default_str();
  synth->add_option("-o,--out", synth_out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  set_log_level(opts.quiet ? LogLevel::Error : opts.verbosity > 0 ? LogLevel::Debug : LogLevel::Info);

  try {
    if (synth->parsed()) {
      terrain.width = terrain.height = size;
      cmd_synth(terrain, synth_out);
      return 0;
    }
    const PipelineConfig config = build_config(opts);
    if (fill->parsed()) cmd_fill(config);
    if (prompts->parsed()) cmd_prompts(config);
    if (segment->parsed()) cmd_segment(config);
    if (eval->parsed()) std::cout << report_to_json(cmd_eval(config));
    if (run->parsed()) {
      if (auto report = cmd_run(config)) std::cout << report_to_json(*report);
    }
    return 0;
  } catch (const InputError& e) {
    log(LogLevel::Error, e.what());
    return 2;
  } catch (const IoError& e) {
    log(LogLevel::Error, e.what());
    return 2;
  } catch (const BackendError& e) {
    log(LogLevel::Error, std::string("backend (") + std::string(to_string(e.kind())) + "): " + e.what());
    return 1;
  } catch (const std::exception& e) {
    log(LogLevel::Error, std::string("internal error: ") + e.what());
    return 1;
  }
}

#include <doctest.h>

#include <fstream>
#include <map>

#include "../support/temp_dir.hpp"
#include "sinksam/ascii_grid.hpp"
#include "sinksam/mock_server.hpp"
#include "sinksam/pipeline.hpp"

using namespace sinksam;
namespace fs = std::filesystem;

namespace {

std::map<std::string, std::string> tree_contents(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).generic_string()] = detail::read_text_file(e.path());
  }
  return out;
}

/// Small scene and a config tiled 64/32 over it.
PipelineConfig small_scene(const fs::path& dir, std::uint64_t seed = 7) {
  TerrainParams p;
  p.seed = seed;
  p.width = 160;
  p.height = 128;
  p.n_sinkholes = 4;
  p.radius_min = 6.0;
  p.radius_max = 10.0;
  set_log_level(LogLevel::Error);
  cmd_synth(p, dir);
  PipelineConfig c = load_config(dir / "scene.cfg");
  c.tile = {64, 32};
  c.filter = {1.0, 20};
  return c;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = parse_config(
      "# comment\n"
      "depth_raster = d.asc   # trailing comment\n"
      "tile.patch=256\n"
      "tile.stride = 128\n"
      "fill.mode = mosaic\n"
      "filter.min_depth = 1.5\n"
      "filter.min_area_px = 10\n"
      "prompts.pad_px = 3\n"
      "backend.kind = http\n"
      "backend.endpoint = http://127.0.0.1:9000\n"
      "backend.timeout = 2.5\n"
      "backend.max_inflight = 3\n"
      "segment.merge = mean\n"
      "segment.export_patches = true\n"
      "eval.thresholds = 0.25, 0.5,0.75\n"
      "invert_depth = yes\n"
      "out_dir = /tmp/x\n",
      "/base");
  CHECK(c.depth_raster == fs::path("/base/d.asc"));
  CHECK(c.tile.patch == 256);
  CHECK(c.tile.stride == 128);
  CHECK(c.fill_mode == FillMode::Mosaic);
  CHECK(c.filter.min_depth == 1.5);
  CHECK(c.filter.min_area_px == 10);
  CHECK(c.pad_px == 3);
  CHECK(c.backend == BackendKind::Http);
  CHECK(c.endpoint == "http://127.0.0.1:9000");
  CHECK(c.timeout_s == 2.5);
  CHECK(c.max_inflight == 3);
  CHECK(c.merge == MergeRule::Mean);
  CHECK(c.export_patches);
  CHECK(c.thresholds == std::vector<double>{0.25, 0.5, 0.75});
  CHECK(c.invert_depth);
  CHECK(c.out_dir == fs::path("/tmp/x"));

  const PipelineConfig d;
  CHECK(d.tile.patch == 512);
  CHECK(d.tile.stride == 256);
  CHECK(d.filter.min_depth == 2.0);
  CHECK(d.filter.min_area_px == 50);
  CHECK(d.merge == MergeRule::Max);
  CHECK(d.thresholds.size() == 9);
}

TEST_CASE("config errors carry line numbers") {
  try {
    (void)parse_config("tile.patch = 64\nbogus.key = 1\n", "");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("unknown key") != std::string::npos);
  }
  CHECK_THROWS_AS((void)parse_config("tile.patch\n", ""), ParseError);
  CHECK_THROWS_AS((void)parse_config("tile.patch = big\n", ""), ParseError);
  CHECK_THROWS_AS((void)parse_config("backend.kind = magic\n", ""), ParseError);
  CHECK_THROWS_AS((void)load_config("/nonexistent/cfg"), InputError);
}

TEST_CASE("stages write the documented tree") {
  TempDir dir;
  PipelineConfig c = small_scene(dir.path());
  c.export_patches = true;
  const auto report = cmd_run(c);
  REQUIRE(report.has_value());
  for (const char* f : {"fill/depth.asc", "fill/filled.asc", "prompts/depressions.asc",
                        "prompts/r00000_c00000.json", "prompts/r00064_c00096.window.json",
                        "segment/probability.asc", "segment/mask.asc", "segment/patches/r00000_c00032.ppm",
                        "eval/report.json", "eval/report.csv"}) {
    CHECK_MESSAGE(fs::is_regular_file(c.out_dir / f), f);
  }
  // 160 wide: column origins 0, 32, 64, 96; 128 high: rows 0, 32, 64
  std::size_t json_files = 0;
  for (const auto& e : fs::directory_iterator(c.out_dir / "prompts"))
    json_files += e.path().string().ends_with(".window.json");
  CHECK(json_files == 12);

  CHECK(report->detection.size() == 9);
  CHECK(report->metrics.iou >= 0.9);
  CHECK(detail::read_text_file(c.out_dir / "eval/report.csv").starts_with("run,f1,iou"));

  const RasterD filled = read_ascii_grid(c.out_dir / "fill/filled.asc");
  const RasterD dem = read_ascii_grid(c.depth_raster);
  CHECK((filled.values() >= dem.values()).all());
}

TEST_CASE("run equals the stages in sequence") {
  TempDir a, b;
  PipelineConfig ca = small_scene(a.path());
  PipelineConfig cb = small_scene(b.path());
  (void)cmd_run(ca);
  cmd_fill(cb);
  cmd_prompts(cb);
  cmd_segment(cb);
  (void)cmd_eval(cb);
  CHECK(tree_contents(ca.out_dir) == tree_contents(cb.out_dir));
}

TEST_CASE("rerunning and worker count do not change outputs") {
  TempDir dir;
  PipelineConfig c = small_scene(dir.path());
  (void)cmd_run(c);
  const auto first = tree_contents(c.out_dir);
  (void)cmd_run(c);
  CHECK(tree_contents(c.out_dir) == first);
  c.workers = 4;
  (void)cmd_run(c);
  CHECK(tree_contents(c.out_dir) == first);
}

TEST_CASE("per-patch fill never exceeds whole-mosaic fill") {
  TempDir dir;
  PipelineConfig c = small_scene(dir.path());
  cmd_fill(c);
  const RasterD patch_depth = read_ascii_grid(c.out_dir / "fill/depth.asc");
  c.fill_mode = FillMode::Mosaic;
  cmd_fill(c);
  const RasterD mosaic_depth = read_ascii_grid(c.out_dir / "fill/depth.asc");
  // a tile edge can only add outlets
  CHECK((patch_depth.values() <= mosaic_depth.values() + 1e-9).all());
  // pits narrower than the overlap sit whole inside some window
  CHECK(positive_mask(patch_depth) == positive_mask(mosaic_depth));
}

TEST_CASE("inverted depth input") {
  TempDir dir;
  PipelineConfig c = small_scene(dir.path());
  cmd_fill(c);
  const RasterD plain = read_ascii_grid(c.out_dir / "fill/depth.asc");
  // a raster where larger means deeper, inverted back into an elevation
  const RasterD dem = read_ascii_grid(c.depth_raster);
  const double top = dem.values().maxCoeff();
  write_ascii_grid(RasterD(Grid<double>(top - dem.values()), dem.nodata(), dem.geo()), dir.path() / "deep.asc");
  c.depth_raster = dir.path() / "deep.asc";
  c.invert_depth = true;
  cmd_fill(c);
  const RasterD inv = read_ascii_grid(c.out_dir / "fill/depth.asc");
  CHECK(positive_mask(inv) == positive_mask(plain));
}

TEST_CASE("missing inputs and stage order") {
  TempDir dir;
  PipelineConfig c;
  c.out_dir = dir.path() / "out";
  CHECK_THROWS_AS(cmd_fill(c), InputError);
  c.depth_raster = dir.path() / "absent.asc";
  CHECK_THROWS_AS(cmd_fill(c), InputError);
  CHECK_THROWS_AS(cmd_prompts(c), InputError);
  CHECK_THROWS_AS(cmd_segment(c), InputError);
  CHECK_THROWS_AS(cmd_eval(c), InputError);

  write_ascii_grid(RasterD(32, 32, 1.0), dir.path() / "tiny.asc");
  c.depth_raster = dir.path() / "tiny.asc";
  CHECK_THROWS_AS(cmd_fill(c), InputError);  // smaller than a patch
}

TEST_CASE("segment through the http backend") {
  TempDir dir;
  PipelineConfig c = small_scene(dir.path());
  MockSegmentServer server({MockMode::Box, 255});
  server.start();
  c.backend = BackendKind::Http;
  c.endpoint = server.endpoint();
  c.workers = 3;
  cmd_fill(c);
  cmd_prompts(c);
  cmd_segment(c);
  CHECK(server.requests() > 0);
  // boxes filled solid: every prompt pixel is foreground
  const BinaryMask mask = read_mask_ascii(c.out_dir / "segment/mask.asc");
  const BinaryMask depressions = positive_mask(read_ascii_grid(c.out_dir / "prompts/depressions.asc"));
  for (Index i = 0; i < mask.size(); ++i)
    if (depressions[i]) CHECK(mask[i]);
}

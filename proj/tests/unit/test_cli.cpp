#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>

#include "../support/temp_dir.hpp"
#include "sinksam/ascii_grid.hpp"

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(SINKSAM_CLI_PATH) + " " + args + " > '" + log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("cli exit codes") {
  TempDir dir;
  const fs::path log = dir.path() / "log.txt";

  CHECK(run_cli("fill --set depth_raster=" + (dir.path() / "missing.asc").string(), log) == 2);
  CHECK(sinksam::detail::read_text_file(log).find("does not exist") != std::string::npos);

  CHECK(run_cli("run -c " + (dir.path() / "none.cfg").string(), log) == 2);
  CHECK(run_cli("fill --set no.such.key=1", log) == 2);
  CHECK(run_cli("frobnicate", log) != 0);

  sinksam::detail::write_text_file(dir.path() / "bad.cfg", "tile.patch = 64\ntile.stride 32\n");
  CHECK(run_cli("fill -c " + (dir.path() / "bad.cfg").string(), log) == 2);
  CHECK(sinksam::detail::read_text_file(log).find("line 2") != std::string::npos);
}

TEST_CASE("cli synth then run") {
  TempDir dir;
  const fs::path scene = dir.path() / "scene";
  const fs::path log = dir.path() / "log.txt";
  REQUIRE(run_cli("-q synth --seed 4 --size 128 -n 3 --radius-max 10 -o " + scene.string(), log) == 0);
  CHECK(fs::is_regular_file(scene / "scene.cfg"));
  CHECK(fs::is_regular_file(scene / "truths.json"));

  const std::string common = " -c " + (scene / "scene.cfg").string() +
                             " --set tile.patch=64 --set tile.stride=32 --set filter.min_area_px=20";
  REQUIRE(run_cli("-q run" + common + " -j 2", log) == 0);
  const std::string report = sinksam::detail::read_text_file(log);
  CHECK(report.find("\"f1\"") != std::string::npos);
  CHECK(report == sinksam::detail::read_text_file(scene / "out/eval/report.json"));

  // an unreachable backend is a runtime failure, not an input error
  CHECK(run_cli("-q segment" + common +
                    " --set backend.kind=http --set backend.endpoint=http://127.0.0.1:1"
                    " --set backend.retries=0 --set backend.timeout=1",
                log) == 1);
}

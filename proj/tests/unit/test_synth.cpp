#include <doctest.h>

#include <cmath>

#include "../support/temp_dir.hpp"
#include "sinksam/ascii_grid.hpp"
#include "sinksam/fill.hpp"
#include "sinksam/synth.hpp"

using namespace sinksam;

TEST_CASE("lcg is reproducible") {
  Lcg64 a(42), b(42), c(43);
  for (int k = 0; k < 100; ++k) {
    const auto x = a.next();
    CHECK(x == b.next());
    CHECK(x != c.next());
  }
  Lcg64 u(1);
  for (int k = 0; k < 1000; ++k) {
    const double v = u.uniform();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
    const auto i = u.uniform_int(-2, 2);
    CHECK(i >= -2);
    CHECK(i <= 2);
  }
}

TEST_CASE("same seed, same scene") {
  TerrainParams p;
  p.seed = 11;
  p.noise_amp = 0.5;
  const SynthScene a = gen_terrain(p);
  const SynthScene b = gen_terrain(p);
  CHECK(a.dem == b.dem);
  CHECK(a.rgb == b.rgb);
  CHECK(a.gt_mask == b.gt_mask);
  CHECK(truths_to_json(a) == truths_to_json(b));
  p.seed = 12;
  CHECK_FALSE(gen_terrain(p).dem == a.dem);
}

TEST_CASE("no sinkholes gives an empty truth") {
  TerrainParams p;
  p.n_sinkholes = 0;
  const SynthScene s = gen_terrain(p);
  CHECK(s.gt_mask.count() == 0);
  CHECK(s.truths.empty());
  CHECK((depression_depth(s.dem).values() == 0.0).all());
}

TEST_CASE("single pit on a flat plane") {
  TerrainParams p;
  p.width = p.height = 64;
  p.n_sinkholes = 1;
  p.depth_min = p.depth_max = 5.0;
  p.radius_min = p.radius_max = 10.0;
  p.slope = 0.0;
  const SynthScene s = gen_terrain(p);
  REQUIRE(s.sinkholes.size() == 1);
  const auto& pit = s.sinkholes[0];
  CHECK(s.dem(pit.center_row, pit.center_col) == 95.0);
  CHECK(s.truths[0].max_depth == 5.0);

  // the footprint is the open disc of radius 10 around an integer centre
  Index disc = 0;
  for (Index dr = -10; dr <= 10; ++dr)
    for (Index dc = -10; dc <= 10; ++dc) disc += dr * dr + dc * dc < 100;
  CHECK(s.gt_mask.count() == disc);
  CHECK(s.truths[0].area_px == disc);

  // on a flat plane the fill recovers the carved bowl exactly
  const RasterD depth = depression_depth(s.dem);
  CHECK(depth(pit.center_row, pit.center_col) == 5.0);
  CHECK(positive_mask(depth) == s.gt_mask);
}

TEST_CASE("placement keeps pits apart and inside the grid") {
  TerrainParams p;
  p.seed = 5;
  p.width = p.height = 300;
  p.n_sinkholes = 10;
  const SynthScene s = gen_terrain(p);
  REQUIRE(s.sinkholes.size() == 10);
  for (std::size_t i = 0; i < s.sinkholes.size(); ++i) {
    const auto& a = s.sinkholes[i];
    CHECK(a.bbox.valid_for(300, 300));
    CHECK(a.radius >= 6.0);
    CHECK(a.radius <= 16.0);
    for (std::size_t j = i + 1; j < s.sinkholes.size(); ++j) {
      const auto& b = s.sinkholes[j];
      CHECK(std::hypot(double(a.center_row - b.center_row), double(a.center_col - b.center_col)) >
            a.radius + b.radius + p.spacing);
    }
  }
  CHECK(label_components(s.gt_mask).size() == 10);
}

TEST_CASE("impossible placement and bad parameters are rejected") {
  TerrainParams p;
  p.width = p.height = 40;
  p.n_sinkholes = 50;
  p.max_attempts = 200;
  CHECK_THROWS_AS(gen_terrain(p), InputError);
  TerrainParams q;
  q.depth_min = 0.0;
  CHECK_THROWS_AS(gen_terrain(q), InputError);
  q = {};
  q.radius_min = 20.0;
  q.radius_max = 10.0;
  CHECK_THROWS_AS(gen_terrain(q), InputError);
}

TEST_CASE("priority flood equals the reference fill on noisy scenes") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    TerrainParams p;
    p.seed = seed;
    p.width = 96;
    p.height = 80;
    p.n_sinkholes = 3;
    p.noise_amp = 1.5;
    p.noise_cell = 12.0;
    const SynthScene s = gen_terrain(p);
    CHECK(fill_depressions(s.dem).filled == brute_force_fill(s.dem));
  }
}

TEST_CASE("write_scene lays out its files") {
  TerrainParams p;
  p.width = p.height = 32;
  p.n_sinkholes = 1;
  p.radius_min = p.radius_max = 5.0;
  const SynthScene s = gen_terrain(p);
  TempDir dir;
  write_scene(s, dir.path());
  CHECK(read_ascii_grid(dir.path() / "dem.asc") == s.dem);
  CHECK(read_ppm(dir.path() / "rgb.ppm") == s.rgb);
  CHECK(read_mask_ascii(dir.path() / "gt_mask.asc") == s.gt_mask);
  CHECK(detail::read_text_file(dir.path() / "truths.json") == truths_to_json(s));
}

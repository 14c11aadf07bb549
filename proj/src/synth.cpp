#include "sinksam/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <json.hpp>

#include "sinksam/ascii_grid.hpp"

namespace sinksam {

namespace {

Grid<double> value_noise(Lcg64& rng, Index rows, Index cols, double cell) {
  const Index lr = static_cast<Index>(std::floor(static_cast<double>(rows - 1) / cell)) + 2;
  const Index lc = static_cast<Index>(std::floor(static_cast<double>(cols - 1) / cell)) + 2;
  Grid<double> lattice(lr, lc);
  for (Index i = 0; i < lattice.size(); ++i) lattice.data()[i] = rng.uniform(-1.0, 1.0);

  Grid<double> out(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const double fy = static_cast<double>(r) / cell;
    const auto y0 = static_cast<Index>(fy);
    const double ty = fy - static_cast<double>(y0);
    for (Index c = 0; c < cols; ++c) {
      const double fx = static_cast<double>(c) / cell;
      const auto x0 = static_cast<Index>(fx);
      const double tx = fx - static_cast<double>(x0);
      const double top = lattice(y0, x0) * (1.0 - tx) + lattice(y0, x0 + 1) * tx;
      const double bottom = lattice(y0 + 1, x0) * (1.0 - tx) + lattice(y0 + 1, x0 + 1) * tx;
      out(r, c) = top * (1.0 - ty) + bottom * ty;
    }
  }
  return out;
}

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

}  // namespace

SynthScene gen_terrain(const TerrainParams& p) {
  if (p.width < 3 || p.height < 3) throw InputError("synth: grid must be at least 3x3");
  if (p.n_sinkholes < 0) throw InputError("synth: n_sinkholes must be >= 0");
  if (!(p.depth_min > 0.0 && p.depth_min <= p.depth_max)) throw InputError("synth: invalid depth range");
  if (!(p.radius_min > 0.0 && p.radius_min <= p.radius_max)) throw InputError("synth: invalid radius range");
  if (p.noise_amp < 0.0 || p.noise_cell <= 0.0) throw InputError("synth: invalid noise parameters");

  const Index rows = p.height;
  const Index cols = p.width;
  Lcg64 rng(p.seed);

  // Base surface: tilted plane plus smooth noise.
  const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double gx = p.slope * std::cos(angle);
  const double gy = p.slope * std::sin(angle);
  Grid<double> base(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      base(r, c) = p.base_level + gx * static_cast<double>(c) + gy * static_cast<double>(r);
    }
  }
  if (p.noise_amp > 0.0) base += p.noise_amp * value_noise(rng, rows, cols, p.noise_cell);

  SynthScene scene;
  scene.seed = p.seed;
  for (int k = 0; k < p.n_sinkholes; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < p.max_attempts && !placed; ++attempt) {
      SinkholeTruth s;
      s.radius = rng.uniform(p.radius_min, p.radius_max);
      s.depth = rng.uniform(p.depth_min, p.depth_max);
      const auto reach = static_cast<Index>(std::ceil(s.radius)) + 1;
      if (2 * reach >= rows || 2 * reach >= cols) continue;
      s.center_row = rng.uniform_int(reach, rows - 1 - reach);
      s.center_col = rng.uniform_int(reach, cols - 1 - reach);
      placed = std::all_of(scene.sinkholes.begin(), scene.sinkholes.end(), [&](const SinkholeTruth& o) {
        const double dr = static_cast<double>(s.center_row - o.center_row);
        const double dc = static_cast<double>(s.center_col - o.center_col);
        return std::hypot(dr, dc) > s.radius + o.radius + p.spacing;
      });
      if (placed) {
        s.id = k + 1;
        scene.sinkholes.push_back(s);
      }
    }
    if (!placed) {
      throw InputError("synth: could not place sinkhole " + std::to_string(k + 1) + " of " +
                       std::to_string(p.n_sinkholes) + " without overlap");
    }
  }

  Grid<double> dem = base;
  Grid<double> carve = Grid<double>::Zero(rows, cols);  // pit depth relative to its own maximum
  Grid<bool> gt = Grid<bool>::Constant(rows, cols, false);
  for (auto& s : scene.sinkholes) {
    DepressionComponent comp;
    comp.id = s.id;
    comp.max_depth = 0.0;
    comp.bbox = {cols, rows, 0, 0};
    const auto reach = static_cast<Index>(std::ceil(s.radius)) + 1;
    for (Index r = s.center_row - reach; r <= s.center_row + reach; ++r) {
      for (Index c = s.center_col - reach; c <= s.center_col + reach; ++c) {
        const double dist = std::hypot(static_cast<double>(r - s.center_row),
                                       static_cast<double>(c - s.center_col));
        if (dist >= s.radius) continue;
        const double profile = s.depth * (1.0 + std::cos(std::numbers::pi * dist / s.radius)) / 2.0;
        const double z = base(r, c) - profile;
        if (!(z < base(r, c))) continue;
        dem(r, c) = z;
        carve(r, c) = profile / s.depth;
        gt(r, c) = true;
        comp.pixels.push_back({r, c});
        comp.max_depth = std::max(comp.max_depth, base(r, c) - z);
        comp.bbox.x0 = std::min(comp.bbox.x0, c);
        comp.bbox.y0 = std::min(comp.bbox.y0, r);
        comp.bbox.x1 = std::max(comp.bbox.x1, c + 1);
        comp.bbox.y1 = std::max(comp.bbox.y1, r + 1);
      }
    }
    comp.area_px = static_cast<Index>(comp.pixels.size());
    s.bbox = comp.bbox;
    s.area_px = comp.area_px;
    scene.truths.push_back(std::move(comp));
  }

  // Hillshade from the north-west with pit interiors darkened.
  scene.rgb = RgbImage(rows, cols);
  const double relief = std::max(p.depth_max, 1e-9);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      const Index rn = std::max<Index>(r - 1, 0), rs = std::min(r + 1, rows - 1);
      const Index cw = std::max<Index>(c - 1, 0), ce = std::min(c + 1, cols - 1);
      const double dzdx = (dem(r, ce) - dem(r, cw)) / static_cast<double>(ce - cw);
      const double dzdy = (dem(rs, c) - dem(rn, c)) / static_cast<double>(rs - rn);
      const double shade = 150.0 - 40.0 * (dzdx + dzdy) / (relief / 8.0);
      const double v = shade * (1.0 - 0.45 * carve(r, c));
      const std::uint8_t g = to_byte(v);
      scene.rgb(r, c, 0) = g;
      scene.rgb(r, c, 1) = g;
      scene.rgb(r, c, 2) = to_byte(v * 0.92);
    }
  }

  scene.dem = RasterD(std::move(dem));
  scene.gt_mask = BinaryMask(std::move(gt));
  return scene;
}

RasterD brute_force_fill(const RasterD& dem) {
  const Index rows = dem.height();
  const Index cols = dem.width();
  const double inf = std::numeric_limits<double>::infinity();
  RasterD w = dem;
  std::vector<std::uint8_t> fixed(static_cast<std::size_t>(dem.size()), 0);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      if (dem.is_nodata(r, c)) continue;
      bool outlet = r == 0 || c == 0 || r == rows - 1 || c == cols - 1;
      for (Index dr = -1; dr <= 1 && !outlet; ++dr)
        for (Index dc = -1; dc <= 1 && !outlet; ++dc) outlet = dem.is_nodata(r + dr, c + dc);
      if (outlet) {
        fixed[r * cols + c] = 1;
      } else {
        w(r, c) = inf;
      }
    }
  }

  auto relax = [&](Index r, Index c) {
    const Index i = r * cols + c;
    if (fixed[i] || dem.is_nodata(i)) return false;
    double lowest = inf;
    for (Index dr = -1; dr <= 1; ++dr) {
      for (Index dc = -1; dc <= 1; ++dc) {
        if ((dr != 0 || dc != 0) && !dem.is_nodata(r + dr, c + dc)) lowest = std::min(lowest, w(r + dr, c + dc));
      }
    }
    const double v = std::max(dem[i], lowest);
    if (v < w[i]) {
      w[i] = v;
      return true;
    }
    return false;
  };

  bool changed = true;
  for (int sweep = 0; changed; ++sweep) {
    changed = false;
    if (sweep % 2 == 0) {
      for (Index r = 0; r < rows; ++r)
        for (Index c = 0; c < cols; ++c) changed |= relax(r, c);
    } else {
      for (Index r = rows - 1; r >= 0; --r)
        for (Index c = cols - 1; c >= 0; --c) changed |= relax(r, c);
    }
  }
  return w;
}

std::string truths_to_json(const SynthScene& scene) {
  nlohmann::ordered_json j;
  j["seed"] = scene.seed;
  j["width"] = scene.dem.width();
  j["height"] = scene.dem.height();
  j["sinkholes"] = nlohmann::ordered_json::array();
  for (const auto& s : scene.sinkholes) {
    j["sinkholes"].push_back({{"id", s.id},
                              {"center_row", s.center_row},
                              {"center_col", s.center_col},
                              {"radius", s.radius},
                              {"depth", s.depth},
                              {"bbox", {s.bbox.x0, s.bbox.y0, s.bbox.x1, s.bbox.y1}},
                              {"area_px", s.area_px}});
  }
  return j.dump(2) + "\n";
}

void write_scene(const SynthScene& scene, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_ascii_grid(scene.dem, dir / "dem.asc");
  write_ppm(scene.rgb, dir / "rgb.ppm");
  write_mask_ascii(scene.gt_mask, dir / "gt_mask.asc", scene.dem.geo());
  detail::write_text_file(dir / "truths.json", truths_to_json(scene));
}

}  // namespace sinksam

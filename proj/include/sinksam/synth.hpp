#pragma once

// Synthetic sinkhole terrains with known ground truth, and a slow
// relaxation-based reference fill for checking the priority-flood.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sinksam/image.hpp"
#include "sinksam/labeling.hpp"
#include "sinksam/raster.hpp"

namespace sinksam {

/// 64-bit LCG (Knuth MMIX constants). All synthetic sampling goes through
/// this generator so scenes are identical on every platform.
class Lcg64 {
 public:
  static constexpr std::uint64_t kMultiplier = 6364136223846793005ULL;
  static constexpr std::uint64_t kIncrement = 1442695040888963407ULL;

  explicit Lcg64(std::uint64_t seed) : state_(seed) { next(); }

  std::uint64_t next() noexcept {
    state_ = state_ * kMultiplier + kIncrement;
    return state_;
  }
  /// Uniform in [0, 1) from the top 53 bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) noexcept {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>((next() >> 11) % span);
  }

 private:
  std::uint64_t state_;
};

struct TerrainParams {
  std::uint64_t seed = 1;
  Index width = 256;
  Index height = 256;
  int n_sinkholes = 4;
  double depth_min = 3.0;
  double depth_max = 8.0;
  double radius_min = 6.0;
  double radius_max = 16.0;
  double noise_amp = 0.0;
  double slope = 1e-4;          ///< base gradient, elevation units per cell
  double noise_cell = 32.0;     ///< value-noise lattice spacing in cells
  double base_level = 100.0;
  double spacing = 3.0;         ///< minimum rim-to-rim gap between pits, in cells
  int max_attempts = 10000;     ///< placement tries per pit
};

struct SinkholeTruth {
  int id = 0;
  Index center_row = 0;
  Index center_col = 0;
  double radius = 0.0;
  double depth = 0.0;
  PromptBox bbox;
  Index area_px = 0;
};

struct SynthScene {
  RasterD dem;
  RgbImage rgb;
  BinaryMask gt_mask;
  std::vector<DepressionComponent> truths;  ///< pit footprints; max_depth is the carved depth
  std::vector<SinkholeTruth> sinkholes;
  std::uint64_t seed = 0;
};

/// Gentle plane plus bilinear value noise, with non-overlapping cosine-bowl
/// pits depth * (1 + cos(pi r / R)) / 2 carved into it. A pit's footprint is
/// the set of cells it actually lowers.
SynthScene gen_terrain(const TerrainParams& params);

/// Reference fill: outlets keep their value, every other valid cell starts at
/// +inf and is relaxed to max(dem, min of its 8 neighbours) until nothing
/// changes.
RasterD brute_force_fill(const RasterD& dem);

std::string truths_to_json(const SynthScene& scene);

/// Writes dem.asc, rgb.ppm, gt_mask.asc and truths.json into `dir`.
void write_scene(const SynthScene& scene, const std::filesystem::path& dir);

}  // namespace sinksam

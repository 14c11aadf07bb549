#pragma once

// 8-bit images and their binary Netpbm encodings (P6 RGB, P5 grayscale,
// maxval 255).

#include <cstdint>
#include <filesystem>
#include <string>

#include "sinksam/raster.hpp"

namespace sinksam {

using GrayImage = Grid<std::uint8_t>;

/// Interleaved 8-bit RGB; stored as a height x (3 * width) grid.
class RgbImage {
 public:
  RgbImage() = default;
  RgbImage(Index height, Index width, std::uint8_t fill = 0)
      : data_(Grid<std::uint8_t>::Constant(height, 3 * width, fill)) {}

  Index width() const noexcept { return data_.cols() / 3; }
  Index height() const noexcept { return data_.rows(); }

  std::uint8_t operator()(Index row, Index col, int channel) const {
    return data_(row, 3 * col + channel);
  }
  std::uint8_t& operator()(Index row, Index col, int channel) {
    return data_(row, 3 * col + channel);
  }

  const Grid<std::uint8_t>& interleaved() const noexcept { return data_; }
  Grid<std::uint8_t>& interleaved() noexcept { return data_; }

  friend bool operator==(const RgbImage& a, const RgbImage& b) {
    return a.data_.rows() == b.data_.rows() && a.data_.cols() == b.data_.cols() &&
           (a.data_ == b.data_).all();
  }

 private:
  Grid<std::uint8_t> data_;
};

std::string encode_ppm(const RgbImage& image);
RgbImage decode_ppm(const std::string& bytes);
std::string encode_pgm(const GrayImage& image);
GrayImage decode_pgm(const std::string& bytes);

void write_ppm(const RgbImage& image, const std::filesystem::path& path);
RgbImage read_ppm(const std::filesystem::path& path);
void write_pgm(const GrayImage& image, const std::filesystem::path& path);
GrayImage read_pgm(const std::filesystem::path& path);

}  // namespace sinksam

#include "sinksam/image.hpp"

#include <cctype>
#include <cstring>

#include "sinksam/ascii_grid.hpp"
#include "sinksam/error.hpp"

namespace sinksam {

namespace {

struct PnmHeader {
  Index width = 0;
  Index height = 0;
  std::size_t data_offset = 0;
};

// Header fields are separated by whitespace and may be interleaved with
// '#' comments; exactly one whitespace byte precedes the raster.
PnmHeader parse_pnm_header(const std::string& bytes, std::string_view magic) {
  if (bytes.compare(0, 2, magic) != 0) {
    throw InputError("netpbm: expected magic '" + std::string(magic) + "'");
  }
  std::size_t pos = 2;
  auto next_int = [&]() -> Index {
    while (pos < bytes.size()) {
      const auto ch = static_cast<unsigned char>(bytes[pos]);
      if (std::isspace(ch)) {
        ++pos;
      } else if (ch == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) ++pos;
    if (pos == start) throw InputError("netpbm: malformed header");
    return detail::parse_number<Index>(std::string_view(bytes).substr(start, pos - start), 1);
  };
  PnmHeader header;
  header.width = next_int();
  header.height = next_int();
  const Index maxval = next_int();
  if (maxval != 255) throw InputError("netpbm: maxval must be 255, got " + std::to_string(maxval));
  if (header.width <= 0 || header.height <= 0) throw InputError("netpbm: empty image");
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    throw InputError("netpbm: missing separator before pixel data");
  }
  header.data_offset = pos + 1;
  return header;
}

std::string pnm_header(std::string_view magic, Index width, Index height) {
  return std::string(magic) + "\n" + std::to_string(width) + " " + std::to_string(height) +
         "\n255\n";
}

}  // namespace

std::string encode_ppm(const RgbImage& image) {
  std::string out = pnm_header("P6", image.width(), image.height());
  const auto& data = image.interleaved();
  out.append(reinterpret_cast<const char*>(data.data()), static_cast<std::size_t>(data.size()));
  return out;
}

RgbImage decode_ppm(const std::string& bytes) {
  const auto header = parse_pnm_header(bytes, "P6");
  const auto n = static_cast<std::size_t>(header.width * header.height * 3);
  if (bytes.size() - header.data_offset != n) {
    throw InputError("ppm: pixel payload has " + std::to_string(bytes.size() - header.data_offset) +
                     " bytes, expected " + std::to_string(n));
  }
  RgbImage image(header.height, header.width);
  std::memcpy(image.interleaved().data(), bytes.data() + header.data_offset, n);
  return image;
}

std::string encode_pgm(const GrayImage& image) {
  std::string out = pnm_header("P5", image.cols(), image.rows());
  out.append(reinterpret_cast<const char*>(image.data()), static_cast<std::size_t>(image.size()));
  return out;
}

GrayImage decode_pgm(const std::string& bytes) {
  const auto header = parse_pnm_header(bytes, "P5");
  const auto n = static_cast<std::size_t>(header.width * header.height);
  if (bytes.size() - header.data_offset != n) {
    throw InputError("pgm: pixel payload has " + std::to_string(bytes.size() - header.data_offset) +
                     " bytes, expected " + std::to_string(n));
  }
  GrayImage image(header.height, header.width);
  std::memcpy(image.data(), bytes.data() + header.data_offset, n);
  return image;
}

void write_ppm(const RgbImage& image, const std::filesystem::path& path) {
  detail::write_text_file(path, encode_ppm(image));
}

RgbImage read_ppm(const std::filesystem::path& path) {
  try {
    return decode_ppm(detail::read_text_file(path));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_pgm(const GrayImage& image, const std::filesystem::path& path) {
  detail::write_text_file(path, encode_pgm(image));
}

GrayImage read_pgm(const std::filesystem::path& path) {
  try {
    return decode_pgm(detail::read_text_file(path));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace sinksam

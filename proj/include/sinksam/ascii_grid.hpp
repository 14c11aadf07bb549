#pragma once

// ESRI ASCII grid reader/writer.
//
// Layout: six header lines (ncols, nrows, xllcorner, yllcorner, cellsize,
// NODATA_value; keywords case-insensitive, in that order) followed by nrows
// lines of ncols whitespace-separated values, top row first. Values are
// written in shortest round-trip decimal form so read(write(r)) == r.

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "sinksam/error.hpp"
#include "sinksam/raster.hpp"

namespace sinksam {

namespace detail {

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

inline std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

inline bool iequals(std::string_view a, std::string_view b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(), [](char x, char y) {
    return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
  });
}

template <typename T>
T parse_number(std::string_view token, std::size_t line) {
  // from_chars rejects a leading '+', which some writers emit.
  if (token.size() > 1 && token.front() == '+') token.remove_prefix(1);
  T value{};
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ParseError("non-numeric token '" + std::string(token) + "'", line);
  }
  return value;
}

template <typename T>
std::string format_number(T value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw Error("number formatting failed");
  return std::string(buf.data(), ptr);
}

struct AsciiHeader {
  Index ncols = 0;
  Index nrows = 0;
  GeoTransform geo;
  std::string nodata_token;
};

inline AsciiHeader parse_ascii_header(const std::vector<std::string_view>& lines) {
  static constexpr std::array<std::string_view, 6> kKeys = {
      "ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "NODATA_value"};
  if (lines.size() < kKeys.size()) {
    throw ParseError("malformed header keyword: header truncated", lines.size() + 1);
  }
  AsciiHeader header;
  for (std::size_t k = 0; k < kKeys.size(); ++k) {
    auto tokens = split_tokens(lines[k]);
    if (tokens.size() != 2 || !iequals(tokens[0], kKeys[k])) {
      throw ParseError("malformed header keyword: expected '" + std::string(kKeys[k]) + "'", k + 1);
    }
    switch (k) {
      case 0: header.ncols = parse_number<Index>(tokens[1], k + 1); break;
      case 1: header.nrows = parse_number<Index>(tokens[1], k + 1); break;
      case 2: header.geo.origin_x = parse_number<double>(tokens[1], k + 1); break;
      case 3: header.geo.origin_y = parse_number<double>(tokens[1], k + 1); break;
      case 4: header.geo.cellsize = parse_number<double>(tokens[1], k + 1); break;
      case 5: header.nodata_token = std::string(tokens[1]); break;
    }
  }
  if (header.ncols <= 0 || header.nrows <= 0) {
    throw ParseError("grid dimensions must be positive", header.ncols <= 0 ? 1 : 2);
  }
  if (!(header.geo.cellsize > 0.0)) throw ParseError("cellsize must be positive", 5);
  return header;
}

/// Calls visit(row, col, token, line_no) for each body cell, enforcing the
/// declared cell count.
template <typename Visit>
void for_each_body_token(const std::vector<std::string_view>& lines, const AsciiHeader& header,
                         Visit&& visit) {
  Index row = 0;
  for (std::size_t l = 6; l < lines.size(); ++l) {
    auto tokens = split_tokens(lines[l]);
    if (tokens.empty()) continue;
    if (row >= header.nrows) throw ParseError("cell count mismatch: more rows than nrows", l + 1);
    if (static_cast<Index>(tokens.size()) != header.ncols) {
      throw ParseError("cell count mismatch: expected " + std::to_string(header.ncols) +
                           " values, found " + std::to_string(tokens.size()),
                       l + 1);
    }
    for (Index c = 0; c < header.ncols; ++c) visit(row, c, tokens[c], l + 1);
    ++row;
  }
  if (row != header.nrows) {
    throw ParseError("cell count mismatch: expected " + std::to_string(header.nrows) +
                         " rows, found " + std::to_string(row),
                     lines.size());
  }
}

template <typename T>
std::string format_ascii_grid(const Grid<T>& values, const GeoTransform& geo,
                              const std::string& nodata_token) {
  std::string out;
  out.reserve(static_cast<std::size_t>(values.size()) * 8 + 128);
  out += "ncols " + std::to_string(values.cols()) + "\n";
  out += "nrows " + std::to_string(values.rows()) + "\n";
  out += "xllcorner " + format_number(geo.origin_x) + "\n";
  out += "yllcorner " + format_number(geo.origin_y) + "\n";
  out += "cellsize " + format_number(geo.cellsize) + "\n";
  out += "NODATA_value " + nodata_token + "\n";
  for (Index r = 0; r < values.rows(); ++r) {
    for (Index c = 0; c < values.cols(); ++c) {
      if (c > 0) out += ' ';
      out += format_number(values(r, c));
    }
    out += '\n';
  }
  return out;
}

}  // namespace detail

/// Parses an ASCII grid. Errors carry the offending line number.
template <typename Scalar = double>
Raster<Scalar> read_ascii_grid(const std::filesystem::path& path) {
  const std::string text = detail::read_text_file(path);
  const auto lines = detail::split_lines(text);
  const auto header = detail::parse_ascii_header(lines);
  const Scalar nodata = detail::parse_number<Scalar>(header.nodata_token, 6);
  Grid<Scalar> values(header.nrows, header.ncols);
  detail::for_each_body_token(lines, header, [&](Index r, Index c, std::string_view tok, std::size_t line) {
    values(r, c) = detail::parse_number<Scalar>(tok, line);
  });
  return Raster<Scalar>(std::move(values), nodata, header.geo);
}

template <typename Scalar>
std::string format_ascii_grid(const Raster<Scalar>& raster) {
  return detail::format_ascii_grid(raster.values(), raster.geo(),
                                   detail::format_number(raster.nodata()));
}

template <typename Scalar>
void write_ascii_grid(const Raster<Scalar>& raster, const std::filesystem::path& path) {
  detail::write_text_file(path, format_ascii_grid(raster));
}

/// Reads a 0/1 mask in ASCII grid layout; any other value is rejected.
inline BinaryMask read_mask_ascii(const std::filesystem::path& path) {
  const std::string text = detail::read_text_file(path);
  const auto lines = detail::split_lines(text);
  const auto header = detail::parse_ascii_header(lines);
  BinaryMask mask(header.nrows, header.ncols);
  detail::for_each_body_token(lines, header, [&](Index r, Index c, std::string_view tok, std::size_t line) {
    const double v = detail::parse_number<double>(tok, line);
    if (v != 0.0 && v != 1.0) {
      throw ParseError("mask value '" + std::string(tok) + "' is not 0 or 1", line);
    }
    mask(r, c) = v == 1.0;
  });
  return mask;
}

inline void write_mask_ascii(const BinaryMask& mask, const std::filesystem::path& path,
                             const GeoTransform& geo = {}) {
  detail::write_text_file(
      path, detail::format_ascii_grid(Grid<int>(mask.bits().cast<int>()), geo,
                                      detail::format_number(static_cast<int>(kDefaultNodata))));
}

}  // namespace sinksam

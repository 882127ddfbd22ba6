#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "cfss/errors.hpp"

namespace cfss {

/// M x N 8-bit grid in row-major scan order.
struct GrayImage {
  std::size_t height = 0;  // M
  std::size_t width = 0;   // N
  std::vector<std::uint8_t> pixels;

  GrayImage() = default;
  GrayImage(std::size_t m, std::size_t n, std::uint8_t fill = 0) : height(m), width(n), pixels(m * n, fill) {}

  std::size_t size() const { return pixels.size(); }
  std::uint8_t& at(std::size_t i, std::size_t j) { return pixels[i * width + j]; }
  std::uint8_t at(std::size_t i, std::size_t j) const { return pixels[i * width + j]; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

namespace detail {

inline void skip_pgm_space(const std::string& data, std::size_t& pos) {
  while (pos < data.size()) {
    if (data[pos] == '#') {
      while (pos < data.size() && data[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(data[pos]))) {
      ++pos;
    } else {
      return;
    }
  }
}

inline std::size_t read_pgm_number(const std::string& data, std::size_t& pos) {
  skip_pgm_space(data, pos);
  if (pos >= data.size() || !std::isdigit(static_cast<unsigned char>(data[pos]))) {
    fail(ErrorKind::usage, "malformed PGM header");
  }
  std::size_t value = 0;
  while (pos < data.size() && std::isdigit(static_cast<unsigned char>(data[pos]))) {
    value = value * 10 + static_cast<std::size_t>(data[pos] - '0');
    if (value > (std::size_t{1} << 32)) fail(ErrorKind::usage, "PGM dimension too large");
    ++pos;
  }
  return value;
}

}  // namespace detail

/// Parses a binary graymap ("P5", maxval 255).
inline GrayImage decode_pgm(const std::string& data) {
  if (data.size() < 2 || data[0] != 'P' || data[1] != '5') fail(ErrorKind::usage, "not a binary PGM (P5) file");
  std::size_t pos = 2;
  const std::size_t width = detail::read_pgm_number(data, pos);
  const std::size_t height = detail::read_pgm_number(data, pos);
  const std::size_t maxval = detail::read_pgm_number(data, pos);
  if (maxval != 255) fail(ErrorKind::usage, "only maxval 255 PGM files are supported");
  if (width == 0 || height == 0) fail(ErrorKind::usage, "empty PGM image");
  if (pos >= data.size() || !std::isspace(static_cast<unsigned char>(data[pos]))) fail(ErrorKind::usage, "malformed PGM header");
  ++pos;
  if (data.size() - pos < width * height) fail(ErrorKind::usage, "truncated PGM pixel data");
  GrayImage img(height, width);
  std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(pos), width * height, img.pixels.begin());
  return img;
}

inline std::string encode_pgm(const GrayImage& img) {
  std::string out = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  out.append(img.pixels.begin(), img.pixels.end());
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::usage, "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::usage, "cannot write " + path);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) fail(ErrorKind::usage, "write failed for " + path);
}

inline GrayImage read_pgm(const std::string& path) { return decode_pgm(read_file(path)); }
inline void write_pgm(const std::string& path, const GrayImage& img) { write_file(path, encode_pgm(img)); }

}  // namespace cfss

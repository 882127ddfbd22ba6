#pragma once

#include <algorithm>
#include <cstdint>

#include "cfss/bits.hpp"
#include "cfss/errors.hpp"
#include "cfss/image.hpp"

namespace cfss {

/// Output of classify(): everything needed to rebuild the l-MSB plane.
struct PredictionRecord {
  unsigned level = 4;
  BitString location_map;  // 1 = unpredictable, scan order
  BitString lpes;          // codes 0 / 10 / 11 for errors 0 / -1 / +1
  BitString b_store;       // first pixel, then each unpredictable pixel, l bits each

  friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

/// Median edge detector. a = upper-left, b = upper, c = left.
inline std::uint8_t med(std::uint8_t a, std::uint8_t b, std::uint8_t c) {
  const auto lo = std::min(b, c);
  const auto hi = std::max(b, c);
  if (a >= hi) return lo;
  if (a <= lo) return hi;
  return static_cast<std::uint8_t>(b + c - a);
}

/// MED prediction at (i, j) from the causal neighbors in `img`. First row
/// predicts from the left neighbor, first column from the upper one.
inline std::uint8_t predict(const GrayImage& img, std::size_t i, std::size_t j) {
  if (i == 0 && j == 0) fail(ErrorKind::usage, "the first pixel has no causal neighbors");
  if (i == 0) return img.at(0, j - 1);
  if (j == 0) return img.at(i - 1, 0);
  return med(img.at(i - 1, j - 1), img.at(i - 1, j), img.at(i, j - 1));
}

inline double prediction_accuracy(const GrayImage& img) {
  if (img.size() < 2) fail(ErrorKind::usage, "prediction accuracy needs at least two pixels");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < img.height; ++i) {
    for (std::size_t j = 0; j < img.width; ++j) {
      if ((i != 0 || j != 0) && predict(img, i, j) == img.at(i, j)) ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(img.size());
}

inline unsigned optimal_level(double p_c) {
  if (p_c <= 0.063) return 4;
  if (p_c <= 0.102) return 5;
  return 6;
}

inline unsigned msb_value(unsigned pixel, unsigned l) { return pixel >> (8 - l); }

inline PredictionRecord classify(const GrayImage& img, unsigned l) {
  if (l < 1 || l > 8) fail(ErrorKind::usage, "level must be in [1, 8]");
  if (img.size() == 0) fail(ErrorKind::usage, "empty image");
  PredictionRecord rec;
  rec.level = l;
  rec.location_map.resize(img.size());
  rec.b_store.append(msb_value(img.pixels[0], l), l);
  for (std::size_t i = 0; i < img.height; ++i) {
    for (std::size_t j = 0; j < img.width; ++j) {
      if (i == 0 && j == 0) continue;
      const int actual = static_cast<int>(msb_value(img.at(i, j), l));
      const int predicted = static_cast<int>(msb_value(predict(img, i, j), l));
      switch (actual - predicted) {
        case 0: rec.lpes.push_back(false); break;
        case -1: rec.lpes.append(0b10, 2); break;
        case 1: rec.lpes.append(0b11, 2); break;
        default:
          rec.location_map.set(i * img.width + j, true);
          rec.b_store.append(static_cast<std::uint64_t>(actual), l);
      }
    }
  }
  return rec;
}

/// Rebuilds the full image from its (8-l)-LSB plane and a prediction record.
/// Only the low 8-l bits of `lsb_image` are used.
inline GrayImage recover_msbs(const GrayImage& lsb_image, const PredictionRecord& rec) {
  const unsigned l = rec.level;
  if (l < 1 || l > 8) fail(ErrorKind::corrupt_side_info, "level out of range");
  if (rec.location_map.size() != lsb_image.size()) fail(ErrorKind::corrupt_side_info, "location map size mismatch");
  const unsigned lsb_mask = (1U << (8 - l)) - 1;
  GrayImage out(lsb_image.height, lsb_image.width);
  BitReader b(rec.b_store);
  BitReader codes(rec.lpes);
  for (std::size_t i = 0; i < out.height; ++i) {
    for (std::size_t j = 0; j < out.width; ++j) {
      const std::size_t k = i * out.width + j;
      unsigned msb = 0;
      if (k == 0 || rec.location_map[k]) {
        msb = static_cast<unsigned>(b.read(l));
      } else {
        const int predicted = static_cast<int>(msb_value(predict(out, i, j), l));
        int error = 0;
        if (codes.read_bit()) error = codes.read_bit() ? 1 : -1;
        const int value = predicted + error;
        if (value < 0 || value >= (1 << l)) fail(ErrorKind::corrupt_side_info, "prediction error leaves the MSB range");
        msb = static_cast<unsigned>(value);
      }
      out.pixels[k] = static_cast<std::uint8_t>((msb << (8 - l)) | (lsb_image.pixels[k] & lsb_mask));
    }
  }
  if (b.remaining() != 0 || codes.remaining() != 0) fail(ErrorKind::corrupt_side_info, "unused prediction data");
  return out;
}

}  // namespace cfss

#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cfss/bits.hpp"
#include "cfss/errors.hpp"

namespace cfss {

/// Scan used before run-length coding the location map.
enum class MapScan : std::uint8_t { raw = 0, row = 1, column = 2, zigzag = 3 };

struct SideInfo {
  MapScan rearrangement = MapScan::raw;
  BitString lm;
  BitString lpes;
  BitString b_store;
  BitString t_ref;

  friend bool operator==(const SideInfo&, const SideInfo&) = default;
};

struct PackedSideInfo {
  std::vector<std::uint8_t> values;  // never 127
  BitString tsi;                     // escape record, stuffed

  /// SI values followed by the 7-bit groups of tsi.
  std::vector<std::uint8_t> flatten() const;
};

namespace detail {

/// Visiting order of an M x N bitmap for a scan type; raw and row coincide.
inline std::vector<std::uint32_t> scan_order(MapScan scan, std::size_t m, std::size_t n) {
  std::vector<std::uint32_t> order;
  order.reserve(m * n);
  switch (scan) {
    case MapScan::raw:
    case MapScan::row:
      for (std::size_t k = 0; k < m * n; ++k) order.push_back(static_cast<std::uint32_t>(k));
      break;
    case MapScan::column:
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < m; ++i) order.push_back(static_cast<std::uint32_t>(i * n + j));
      }
      break;
    case MapScan::zigzag:
      // Anti-diagonals i + j = d, alternating direction.
      for (std::size_t d = 0; d + 1 < m + n; ++d) {
        const std::size_t i_lo = d >= n ? d - n + 1 : 0;
        const std::size_t i_hi = std::min(d, m - 1);
        if (d % 2 == 0) {
          for (std::size_t i = i_hi + 1; i-- > i_lo;) order.push_back(static_cast<std::uint32_t>(i * n + (d - i)));
        } else {
          for (std::size_t i = i_lo; i <= i_hi; ++i) order.push_back(static_cast<std::uint32_t>(i * n + (d - i)));
        }
      }
      break;
  }
  return order;
}

inline void append_gamma(BitString& out, std::uint64_t v) {
  const unsigned w = bit_width_of(v);
  out.append(0, w - 1);
  out.append(v, w);
}

inline std::uint64_t read_gamma(BitReader& in) {
  unsigned zeros = 0;
  while (!in.read_bit()) {
    if (++zeros > 63) fail(ErrorKind::corrupt_side_info, "malformed gamma code");
  }
  std::uint64_t v = 1;
  for (unsigned i = 0; i < zeros; ++i) v = (v << 1) | (in.read_bit() ? 1U : 0U);
  return v;
}

// Each 1 is coded as gamma(zeros before it + 1); a trailing zero run t > 0 as gamma(t + 1).
inline BitString rle_encode(const BitString& bitmap, const std::vector<std::uint32_t>& order) {
  BitString out;
  std::uint64_t run = 0;
  for (auto k : order) {
    if (bitmap[k]) {
      append_gamma(out, run + 1);
      run = 0;
    } else {
      ++run;
    }
  }
  if (run > 0) append_gamma(out, run + 1);
  return out;
}

}  // namespace detail

/// Picks the shortest of the four encodings. Raw wins only when strictly shorter.
inline std::pair<MapScan, BitString> compress_map(const BitString& bitmap, std::size_t m, std::size_t n) {
  if (bitmap.size() != m * n) fail(ErrorKind::usage, "bitmap size does not match dimensions");
  std::optional<std::pair<MapScan, BitString>> best;
  for (auto scan : {MapScan::row, MapScan::column, MapScan::zigzag}) {
    BitString coded = detail::rle_encode(bitmap, detail::scan_order(scan, m, n));
    if (!best || coded.size() < best->second.size()) best.emplace(scan, std::move(coded));
  }
  if (bitmap.size() < best->second.size()) best.emplace(MapScan::raw, bitmap);
  return *best;
}

inline BitString decompress_map(MapScan scan, const BitString& lm, std::size_t m, std::size_t n) {
  const std::size_t total = m * n;
  if (scan == MapScan::raw) {
    if (lm.size() != total) fail(ErrorKind::corrupt_side_info, "raw location map has the wrong length");
    return lm;
  }
  const auto order = detail::scan_order(scan, m, n);
  BitString bitmap;
  bitmap.resize(total);
  BitReader in(lm);
  std::size_t pos = 0;
  while (pos < total) {
    const std::uint64_t zeros = detail::read_gamma(in) - 1;
    if (zeros > total - pos) fail(ErrorKind::corrupt_side_info, "location map run overflows the image");
    pos += zeros;
    if (pos == total) break;
    bitmap.set(order[pos], true);
    ++pos;
  }
  if (in.remaining() != 0) fail(ErrorKind::corrupt_side_info, "trailing bits after the location map");
  return bitmap;
}

/// Width of one T code: two bits when F = 61, three otherwise.
inline unsigned t_code_width(std::uint32_t field) { return field == 61 ? 2 : 3; }

/// Clamps every element >= F-1 to F-1 and records the excess in T.
inline std::pair<std::vector<std::uint32_t>, BitString> clamp_and_record(std::span<const std::uint32_t> values,
                                                                         std::uint32_t field) {
  const unsigned width = t_code_width(field);
  std::vector<std::uint32_t> clamped(values.begin(), values.end());
  BitString t_ref;
  for (auto& v : clamped) {
    if (v >= field - 1) {
      const std::uint32_t excess = v - (field - 1);
      if (excess >= (1U << width)) fail(ErrorKind::domain, "element too large to clamp for this field");
      t_ref.append(excess, width);
      v = field - 1;
    }
  }
  return {std::move(clamped), std::move(t_ref)};
}

inline std::vector<std::uint32_t> unclamp(std::span<const std::uint32_t> clamped, const BitString& t_ref,
                                          std::uint32_t field) {
  const unsigned width = t_code_width(field);
  std::vector<std::uint32_t> out(clamped.begin(), clamped.end());
  BitReader in(t_ref);
  for (auto& v : out) {
    if (v == field - 1) v += static_cast<std::uint32_t>(in.read(width));
  }
  if (in.remaining() != 0) fail(ErrorKind::corrupt_side_info, "unused reference codes");
  return out;
}

/// Widths of the four length fields that follow the 2-bit type.
struct SideInfoWidths {
  unsigned lm, lpes, b_store, t_ref;
  unsigned header() const { return 2 + lm + lpes + b_store + t_ref; }
};

inline SideInfoWidths side_info_widths(std::size_t m, std::size_t n, unsigned l) {
  const std::uint64_t mn = std::uint64_t{m} * n;
  // 3 * ceil(MN/2) + 1 instead of 3MN/2: T may hold 3 bits for every one of
  // ceil(MN/2) elements, and the raw length must also fit when it equals the bound.
  return {ceil_log2(mn), ceil_log2(2 * mn), ceil_log2(l * mn), ceil_log2(3 * ((mn + 1) / 2) + 1)};
}

/// 2-bit type, |LM|-1, |Lpes|, |B|-1, |T|, then the four components.
inline BitString assemble(const SideInfo& si, std::size_t m, std::size_t n, unsigned l) {
  const auto w = side_info_widths(m, n, l);
  auto put = [](BitString& out, std::uint64_t value, unsigned width) {
    if (width < 64 && value >= (std::uint64_t{1} << width)) fail(ErrorKind::internal, "side information length overflow");
    out.append(value, width);
  };
  if (si.lm.empty() || si.b_store.empty()) fail(ErrorKind::internal, "location map and MSB store must be nonempty");
  BitString out;
  out.append(static_cast<std::uint64_t>(si.rearrangement), 2);
  put(out, si.lm.size() - 1, w.lm);
  put(out, si.lpes.size(), w.lpes);
  put(out, si.b_store.size() - 1, w.b_store);
  put(out, si.t_ref.size(), w.t_ref);
  out.append(si.lm);
  out.append(si.lpes);
  out.append(si.b_store);
  out.append(si.t_ref);
  return out;
}

/// Total assembled length implied by the front fields of `bits`.
inline std::size_t assembled_length(const BitString& bits, std::size_t m, std::size_t n, unsigned l) {
  const auto w = side_info_widths(m, n, l);
  BitReader in(bits);
  in.read(2);
  const std::size_t lm = in.read(w.lm) + 1;
  const std::size_t lpes = in.read(w.lpes);
  const std::size_t b = in.read(w.b_store) + 1;
  const std::size_t t = in.read(w.t_ref);
  return w.header() + lm + lpes + b + t;
}

inline SideInfo parse(const BitString& bits, std::size_t m, std::size_t n, unsigned l) {
  const auto w = side_info_widths(m, n, l);
  BitReader in(bits);
  SideInfo si;
  si.rearrangement = static_cast<MapScan>(in.read(2));
  const std::size_t lm = in.read(w.lm) + 1;
  const std::size_t lpes = in.read(w.lpes);
  const std::size_t b = in.read(w.b_store) + 1;
  const std::size_t t = in.read(w.t_ref);
  si.lm = in.read_bits(lm);
  si.lpes = in.read_bits(lpes);
  si.b_store = in.read_bits(b);
  si.t_ref = in.read_bits(t);
  if (in.remaining() != 0) fail(ErrorKind::corrupt_side_info, "trailing bits after side information");
  return si;
}

namespace detail {

// 7-bit groups, first bit weighs 1, final group zero-padded.
inline std::vector<std::uint8_t> to_values7(const BitString& bits) {
  std::vector<std::uint8_t> out((bits.size() + 6) / 7, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) out[i / 7] = static_cast<std::uint8_t>(out[i / 7] | (1U << (i % 7)));
  }
  return out;
}

inline BitString from_values7(std::span<const std::uint8_t> values) {
  BitString out;
  out.reserve(values.size() * 7);
  for (auto v : values) {
    for (unsigned i = 0; i < 7; ++i) out.push_back(((v >> i) & 1U) != 0);
  }
  return out;
}

inline std::size_t stuffed_length(std::size_t escapes) { return escapes + escapes / 6; }

}  // namespace detail

inline std::vector<std::uint8_t> PackedSideInfo::flatten() const {
  std::vector<std::uint8_t> out = values;
  const auto tail = detail::to_values7(tsi);
  out.insert(out.end(), tail.begin(), tail.end());
  return out;
}

inline PackedSideInfo pack7(const BitString& bits) {
  PackedSideInfo packed;
  packed.values = detail::to_values7(bits);
  std::size_t run = 0;
  for (auto& v : packed.values) {
    if (v < 126) continue;
    packed.tsi.push_back(v == 127);
    v = 126;
    if (++run == 6) {
      packed.tsi.push_back(false);
      run = 0;
    }
  }
  return packed;
}

/// Inverse of pack7 given the flattened values and the SI bit length. Returns
/// the SI bits and the number of values consumed.
inline std::pair<BitString, std::size_t> unpack7(std::span<const std::uint8_t> flat, std::size_t si_bit_length) {
  const std::size_t si_values = (si_bit_length + 6) / 7;
  if (flat.size() < si_values) fail(ErrorKind::corrupt_side_info, "packed side information too short");
  std::size_t escapes = 0;
  for (std::size_t k = 0; k < si_values; ++k) {
    if (flat[k] > 126) fail(ErrorKind::corrupt_side_info, "packed value 127 in side information");
    if (flat[k] == 126) ++escapes;
  }
  const std::size_t tsi_bits = detail::stuffed_length(escapes);
  const std::size_t tsi_values = (tsi_bits + 6) / 7;
  if (flat.size() - si_values < tsi_values) fail(ErrorKind::corrupt_side_info, "escape record underrun");
  const BitString tsi = detail::from_values7(flat.subspan(si_values, tsi_values));
  for (std::size_t i = tsi_bits; i < tsi.size(); ++i) {
    if (tsi[i]) fail(ErrorKind::corrupt_side_info, "nonzero escape record padding");
  }

  std::vector<std::uint8_t> values(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(si_values));
  std::size_t pos = 0;
  std::size_t run = 0;
  for (auto& v : values) {
    if (v != 126) continue;
    if (tsi[pos++]) v = 127;
    if (++run == 6) {
      if (tsi[pos++]) fail(ErrorKind::corrupt_side_info, "escape record stuffing bit set");
      run = 0;
    }
  }
  BitString all = detail::from_values7(values);
  for (std::size_t i = si_bit_length; i < all.size(); ++i) {
    if (all[i]) fail(ErrorKind::corrupt_side_info, "nonzero side information padding");
  }
  all.resize(si_bit_length);
  return {std::move(all), si_values + tsi_values};
}

/// Structural check of a parsed SI against the image it describes: the map
/// decodes to M x N bits with the first pixel predictable, B holds l bits for
/// the first pixel and every unpredictable one, and Lpes holds exactly one
/// code per remaining pixel.
inline bool is_consistent(const SideInfo& si, std::size_t m, std::size_t n, unsigned l) {
  BitString map;
  try {
    map = decompress_map(si.rearrangement, si.lm, m, n);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::corrupt_side_info) throw;
    return false;
  }
  if (map.empty() || map[0]) return false;
  const std::size_t ones = map.count_ones();
  if (si.b_store.size() != l * (ones + 1)) return false;
  std::size_t symbols = 0;
  std::size_t pos = 0;
  while (pos < si.lpes.size()) {
    pos += si.lpes[pos] ? 2 : 1;
    ++symbols;
  }
  return pos == si.lpes.size() && symbols == m * n - 1 - ones;
}

/// Recovers the SI from the flattened values of a reverse sharing, which end
/// with between 0 and `max_padding` random padding values. The front length
/// fields are needed to find the SI length, but any 126 among them is itself
/// ambiguous until the escape record is read, so each reading of those values
/// is tried and only a fully self-consistent one is accepted.
/// With `structural` set, candidates must also pass is_consistent().
inline SideInfo recover_side_info(std::span<const std::uint8_t> flat, std::size_t m, std::size_t n, unsigned l,
                                  std::size_t max_padding, bool structural = true) {
  const unsigned header_bits = side_info_widths(m, n, l).header();
  const std::size_t header_values = (header_bits + 6) / 7;
  if (flat.size() < header_values) fail(ErrorKind::corrupt_side_info, "packed side information too short");
  std::vector<std::size_t> ambiguous;
  for (std::size_t k = 0; k < header_values; ++k) {
    if (flat[k] == 126) ambiguous.push_back(k);
  }
  if (ambiguous.size() > 12) fail(ErrorKind::corrupt_side_info, "too many escaped header values");

  std::optional<SideInfo> found;
  for (std::uint32_t mask = 0; mask < (1U << ambiguous.size()); ++mask) {
    std::vector<std::uint8_t> head(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(header_values));
    for (std::size_t t = 0; t < ambiguous.size(); ++t) head[ambiguous[t]] = static_cast<std::uint8_t>(126 + ((mask >> t) & 1U));
    const std::size_t length = assembled_length(detail::from_values7(head), m, n, l);
    std::optional<SideInfo> candidate;
    try {
      auto [bits, used] = unpack7(flat, length);
      if (flat.size() - used > max_padding) continue;
      // The header escapes are the first escapes, so unpack7 must have
      // resolved them the same way this candidate did.
      const auto check = detail::to_values7(bits);
      bool same = true;
      for (std::size_t t = 0; t < ambiguous.size(); ++t) same = same && check[ambiguous[t]] == head[ambiguous[t]];
      if (!same) continue;
      candidate = parse(bits, m, n, l);
      if (structural && !is_consistent(*candidate, m, n, l)) continue;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::corrupt_side_info) throw;
      continue;
    }
    if (found && !(*found == *candidate)) fail(ErrorKind::corrupt_side_info, "ambiguous side information");
    found = std::move(candidate);
  }
  if (!found) fail(ErrorKind::corrupt_side_info, "side information does not parse");
  return *found;
}

}  // namespace cfss

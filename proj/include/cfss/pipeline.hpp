#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "cfss/bits.hpp"
#include "cfss/entropy.hpp"
#include "cfss/errors.hpp"
#include "cfss/image.hpp"
#include "cfss/predictor.hpp"
#include "cfss/prng.hpp"
#include "cfss/sharing.hpp"
#include "cfss/sideinfo.hpp"

namespace cfss {

/// Side-information shares always live in GF(127).
inline constexpr std::uint32_t side_info_field = 127;

/// Pixel concatenation for one level: `group` LSB values of `lsb_bits` bits
/// form one element of GF(field).
struct LevelParams {
  unsigned level;
  unsigned lsb_bits;
  unsigned group;
  std::uint32_t field;

  std::uint32_t max_element() const { return (1U << (lsb_bits * group)) - 1; }
};

inline LevelParams level_params(unsigned l) {
  switch (l) {
    case 4: return {4, 4, 2, 251};
    case 5: return {5, 3, 2, 61};
    case 6: return {6, 2, 4, 251};
    default: fail(ErrorKind::domain, "level must be 4, 5 or 6");
  }
}

/// Joins consecutive LSB values MSB-first; the tail is zero-padded.
inline std::vector<std::uint32_t> concat_pixels(std::span<const std::uint8_t> lsb_plane, unsigned l) {
  const auto p = level_params(l);
  const std::uint32_t mask = (1U << p.lsb_bits) - 1;
  std::vector<std::uint32_t> out((lsb_plane.size() + p.group - 1) / p.group, 0);
  for (std::size_t e = 0; e < out.size(); ++e) {
    std::uint32_t v = 0;
    for (unsigned g = 0; g < p.group; ++g) {
      const std::size_t k = e * p.group + g;
      v = (v << p.lsb_bits) | (k < lsb_plane.size() ? (lsb_plane[k] & mask) : 0U);
    }
    out[e] = v;
  }
  return out;
}

inline std::vector<std::uint8_t> split_element(std::uint32_t value, unsigned l) {
  const auto p = level_params(l);
  if (value > p.max_element()) fail(ErrorKind::domain, "element out of range for the level");
  std::vector<std::uint8_t> out(p.group);
  for (unsigned g = p.group; g-- > 0;) {
    out[g] = static_cast<std::uint8_t>(value & ((1U << p.lsb_bits) - 1));
    value >>= p.lsb_bits;
  }
  return out;
}

/// Number of container pixels for an M x N image: ceil((MN/c)/(r-1)) * c.
inline std::size_t container_pixel_count(std::size_t m, std::size_t n, unsigned l, unsigned r) {
  const auto p = level_params(l);
  const std::size_t elements = (m * n + p.group - 1) / p.group;
  return (elements + r - 2) / (r - 1) * p.group;
}

/// One encrypted (and possibly marked) image.
struct ShareContainer {
  std::uint32_t identity = 1;
  unsigned level = 4;
  unsigned threshold = 2;
  std::uint32_t orig_height = 0;
  std::uint32_t orig_width = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> pixels;

  std::size_t pixel_count() const { return pixels.size(); }
  GrayImage as_image() const {
    GrayImage img(rows, cols);
    img.pixels = pixels;
    return img;
  }
  friend bool operator==(const ShareContainer&, const ShareContainer&) = default;
};

/// Fields of the overhead embedded at the start of the l-MSB plane.
struct ContainerHeader {
  unsigned level = 0;
  unsigned threshold = 0;
  std::uint32_t identity = 0;
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::size_t si_share_bits = 0;

  static constexpr unsigned fixed_bits = 3 + 8 + 8 + 20 + 20;
  unsigned length_field_bits() const { return ceil_log2(std::uint64_t{height} * width) + 4; }
  std::size_t overhead_bits() const { return fixed_bits + length_field_bits() + si_share_bits; }
};

namespace detail {

// Bit k of the l-MSB plane is bit (7 - k % l) of pixel k / l.
inline bool msb_plane_bit(const std::vector<std::uint8_t>& pixels, unsigned l, std::size_t k) {
  return ((pixels[k / l] >> (7 - k % l)) & 1U) != 0;
}

inline void set_msb_plane_bit(std::vector<std::uint8_t>& pixels, unsigned l, std::size_t k, bool bit) {
  const auto mask = static_cast<std::uint8_t>(1U << (7 - k % l));
  if (bit) {
    pixels[k / l] |= mask;
  } else {
    pixels[k / l] &= static_cast<std::uint8_t>(~mask);
  }
}

inline BitString read_msb_plane(const std::vector<std::uint8_t>& pixels, unsigned l, std::size_t start, std::size_t count) {
  if (start + count > pixels.size() * l) fail(ErrorKind::corrupt_side_info, "MSB plane read past the end");
  BitString out;
  out.reserve(count);
  for (std::size_t k = start; k < start + count; ++k) out.push_back(msb_plane_bit(pixels, l, k));
  return out;
}

inline void write_msb_plane(std::vector<std::uint8_t>& pixels, unsigned l, std::size_t start, const BitString& bits) {
  if (start + bits.size() > pixels.size() * l) fail(ErrorKind::capacity, "MSB plane write past the end");
  for (std::size_t i = 0; i < bits.size(); ++i) set_msb_plane_bit(pixels, l, start + i, bits[i]);
}

/// Replaces the top l bits of `pixel` with `msbs`, keeping the low 8-l bits.
inline std::uint8_t set_msbs(std::uint8_t pixel, unsigned msbs, unsigned l) {
  const unsigned low = 8 - l;
  return static_cast<std::uint8_t>((msbs << low) | (pixel & ((1U << low) - 1)));
}

inline std::uint64_t lsb_digest(const std::vector<std::uint8_t>& pixels, unsigned l, std::uint32_t identity) {
  const std::uint8_t mask = static_cast<std::uint8_t>((1U << (8 - l)) - 1);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (auto px : pixels) {
    const std::uint8_t low = px & mask;
    h = fnv1a64(&low, 1, h);
  }
  const std::uint8_t id[4] = {static_cast<std::uint8_t>(identity >> 24), static_cast<std::uint8_t>(identity >> 16),
                              static_cast<std::uint8_t>(identity >> 8), static_cast<std::uint8_t>(identity)};
  return fnv1a64(id, 4, h);
}

inline std::vector<std::uint32_t> to_u32(std::span<const std::uint8_t> v) { return {v.begin(), v.end()}; }

}  // namespace detail

/// Parses the overhead fields embedded in the MSB plane. The first three
/// plane bits are the top three bits of the first pixel whatever l is.
inline ContainerHeader read_header(const ShareContainer& c) {
  if (c.pixels.empty()) fail(ErrorKind::corrupt_side_info, "empty container");
  ContainerHeader h;
  h.level = static_cast<unsigned>(c.pixels[0] >> 5);
  if (h.level < 4 || h.level > 6) fail(ErrorKind::corrupt_side_info, "embedded level is not 4, 5 or 6");
  const BitString fixed = detail::read_msb_plane(c.pixels, h.level, 0, ContainerHeader::fixed_bits);
  BitReader in(fixed);
  in.read(3);
  h.threshold = static_cast<unsigned>(in.read(8));
  h.identity = static_cast<std::uint32_t>(in.read(8));
  h.height = static_cast<std::uint32_t>(in.read(20));
  h.width = static_cast<std::uint32_t>(in.read(20));
  if (h.height == 0 || h.width == 0) fail(ErrorKind::corrupt_side_info, "embedded dimensions are zero");
  const BitString len = detail::read_msb_plane(c.pixels, h.level, ContainerHeader::fixed_bits, h.length_field_bits());
  h.si_share_bits = BitReader(len).read(h.length_field_bits());
  if (h.si_share_bits % 7 != 0) fail(ErrorKind::corrupt_side_info, "side-information share length is not a multiple of 7");
  if (h.overhead_bits() > c.pixels.size() * h.level) fail(ErrorKind::corrupt_side_info, "overhead exceeds the container");
  return h;
}

inline BitString encode_header(const ContainerHeader& h) {
  BitString out;
  out.append(h.level, 3);
  out.append(h.threshold, 8);
  out.append(h.identity, 8);
  out.append(h.height, 20);
  out.append(h.width, 20);
  out.append(h.si_share_bits, h.length_field_bits());
  return out;
}

/// 7-bit SI share values stored after the header fields.
inline std::vector<std::uint8_t> read_si_share(const ShareContainer& c, const ContainerHeader& h) {
  const std::size_t start = ContainerHeader::fixed_bits + h.length_field_bits();
  const BitString bits = detail::read_msb_plane(c.pixels, h.level, start, h.si_share_bits);
  BitReader in(bits);
  std::vector<std::uint8_t> out(h.si_share_bits / 7);
  for (auto& v : out) v = static_cast<std::uint8_t>(in.read(7));
  return out;
}

/// Owner side: splits `image` into n containers, any r of which rebuild it.
inline std::vector<ShareContainer> owner_encrypt(const GrayImage& image, const EncryptionKey& key, unsigned r, unsigned n,
                                                 EntropySource& entropy) {
  if (r < 2 || r > n) fail(ErrorKind::usage, "need 2 <= r <= n");
  if (n > 255) fail(ErrorKind::usage, "at most 255 shares fit the identity field");
  if (image.size() < 2) fail(ErrorKind::usage, "image must have at least two pixels");
  if (image.height >= (1U << 20) || image.width >= (1U << 20)) fail(ErrorKind::usage, "image side exceeds 2^20 - 1");
  const std::size_t mn = image.size();

  const unsigned l = optimal_level(prediction_accuracy(image));
  const auto lp = level_params(l);
  if (n > lp.field - 1 || n > side_info_field - 1) fail(ErrorKind::usage, "too many shares for the field");

  // l-MSB plane: prediction record and side information, minus T.
  const PredictionRecord rec = classify(image, l);
  SideInfo si;
  std::tie(si.rearrangement, si.lm) = compress_map(rec.location_map, image.height, image.width);
  si.lpes = rec.lpes;
  si.b_store = rec.b_store;

  // (8-l)-LSB plane: concatenate, permute, clamp.
  std::vector<std::uint8_t> lsb(mn);
  for (std::size_t k = 0; k < mn; ++k) lsb[k] = static_cast<std::uint8_t>(image.pixels[k] & ((1U << lp.lsb_bits) - 1));
  const auto joined = concat_pixels(lsb, l);
  const std::uint64_t sum = std::accumulate(joined.begin(), joined.end(), std::uint64_t{0});
  const auto order = permutation(key, sum, joined.size(), lp.field);
  auto [clamped, t_ref] = clamp_and_record(apply_permutation(joined, order), lp.field);
  si.t_ref = std::move(t_ref);

  const HenonState state = key_to_state(key, lp.field);

  // Image sharing over GF(F) with Q.
  const SectionStream image_sections = make_sections(clamped, r - 1, lp.field, entropy);
  const auto q = q_sequence(state, image_sections.sections(), lp.field, n, IterateStream::x);
  const std::uint32_t f0 = entropy.below(lp.field);
  const auto image_shares = share(image_sections, q, n, f0, entropy);

  // SI sharing over GF(127) with Q~.
  const auto packed = pack7(assemble(si, image.height, image.width, l)).flatten();
  // The receiver locates the end of the SI from its own length fields, with
  // the random padding in between. Redraw the padding in the rare case where
  // that reading is not unique.
  SectionStream si_sections;
  for (int attempt = 0;; ++attempt) {
    si_sections = make_sections(detail::to_u32(packed), r - 1, side_info_field, entropy);
    const std::vector<std::uint8_t> padded(si_sections.elements.begin(), si_sections.elements.end());
    try {
      if (recover_side_info(padded, image.height, image.width, l, r - 2) == si) break;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::corrupt_side_info) throw;
    }
    if (attempt == 63 || padded.size() == packed.size()) {
      fail(ErrorKind::internal, "side information is not uniquely decodable");
    }
  }
  const auto q_si = q_sequence(state, si_sections.sections(), side_info_field - n, IterateStream::y);
  const std::uint32_t f0_si = entropy.below(side_info_field);
  const auto si_shares = share(si_sections, q_si, n, f0_si, entropy);

  const std::size_t pixel_count = image_sections.sections() * lp.group;
  std::vector<ShareContainer> out(n);
  for (unsigned i = 0; i < n; ++i) {
    ShareContainer& c = out[i];
    c.identity = i + 1;
    c.level = l;
    c.threshold = r;
    c.orig_height = static_cast<std::uint32_t>(image.height);
    c.orig_width = static_cast<std::uint32_t>(image.width);
    c.rows = pixel_count % image.height == 0 ? image.height : 1;
    c.cols = pixel_count / c.rows;
    c.pixels.reserve(pixel_count);
    for (auto e : image_shares[i].elements) {
      const auto parts = split_element(e, l);
      c.pixels.insert(c.pixels.end(), parts.begin(), parts.end());
    }

    ContainerHeader h{l, r, c.identity, c.orig_height, c.orig_width, si_shares[i].elements.size() * 7};
    BitString overhead = encode_header(h);
    for (auto v : si_shares[i].elements) overhead.append(v, 7);
    const std::size_t capacity = pixel_count * l;
    if (overhead.size() > capacity) {
      fail(ErrorKind::capacity, "overhead of " + std::to_string(overhead.size()) + " bits exceeds the " +
                                    std::to_string(capacity) + "-bit MSB plane by " +
                                    std::to_string(overhead.size() - capacity) + " bits");
    }
    // Random fill first, then the overhead over the start of the plane.
    EntropySource fill = entropy.derive(detail::lsb_digest(c.pixels, l, c.identity));
    for (auto& px : c.pixels) px = detail::set_msbs(px, fill.below(1U << l), l);
    detail::write_msb_plane(c.pixels, l, 0, overhead);
  }
  return out;
}

inline std::vector<ShareContainer> owner_encrypt(const GrayImage& image, const EncryptionKey& key, unsigned r, unsigned n) {
  EntropySource entropy;
  return owner_encrypt(image, key, r, n, entropy);
}

/// Width of the payload length prefix written by the data hider.
inline unsigned payload_length_bits(const ShareContainer& c) { return bit_width_of(std::uint64_t{c.level} * c.pixel_count()); }

/// Payload bits a data hider can embed: MSB plane minus overhead minus the length prefix.
inline std::size_t payload_capacity(const ShareContainer& c) {
  const ContainerHeader h = read_header(c);
  const std::size_t free_bits = c.pixel_count() * h.level - h.overhead_bits();
  return free_bits > payload_length_bits(c) ? free_bits - payload_length_bits(c) : 0;
}

/// Data hider side: needs only the data-hiding key.
inline ShareContainer hider_embed(const ShareContainer& container, const BitString& payload, const EncryptionKey& data_hiding_key) {
  const ContainerHeader h = read_header(container);
  const std::size_t capacity = payload_capacity(container);
  if (payload.size() > capacity) {
    fail(ErrorKind::capacity, "payload of " + std::to_string(payload.size()) + " bits exceeds the free " +
                                  std::to_string(capacity) + " bits");
  }
  BitString plain;
  plain.append(payload.size(), payload_length_bits(container));
  plain.append(payload);
  ShareContainer out = container;
  detail::write_msb_plane(out.pixels, h.level, h.overhead_bits(), xor_keystream(plain, data_hiding_key));
  return out;
}

/// Decrypts the payload region. A wrong key yields noise of some length.
inline BitString extract_data(const ShareContainer& container, const EncryptionKey& data_hiding_key) {
  const ContainerHeader h = read_header(container);
  const std::size_t available = container.pixel_count() * h.level - h.overhead_bits();
  const unsigned prefix = payload_length_bits(container);
  if (available < prefix) return {};
  const BitString region = xor_keystream(detail::read_msb_plane(container.pixels, h.level, h.overhead_bits(), available), data_hiding_key);
  BitReader in(region);
  const std::size_t length = std::min<std::size_t>(in.read(prefix), available - prefix);
  return in.read_bits(length);
}

namespace detail {

struct SharedHeader {
  ContainerHeader header;
  std::vector<const ShareContainer*> chosen;
};

inline SharedHeader check_containers(std::span<const ShareContainer> containers) {
  if (containers.empty()) fail(ErrorKind::insufficient_shares, "no containers given");
  SharedHeader s;
  s.header = read_header(containers.front());
  const auto& h0 = s.header;
  if (containers.size() < h0.threshold) fail(ErrorKind::insufficient_shares, "fewer containers than the threshold");
  if (h0.threshold < 2) fail(ErrorKind::corrupt_side_info, "embedded threshold below 2");
  for (const auto& c : containers) {
    const ContainerHeader h = read_header(c);
    if (h.level != h0.level || h.threshold != h0.threshold || h.height != h0.height || h.width != h0.width ||
        h.si_share_bits != h0.si_share_bits || c.pixel_count() != containers.front().pixel_count()) {
      fail(ErrorKind::inconsistent_shares, "containers come from different encryptions");
    }
    if (c.pixel_count() != container_pixel_count(h.height, h.width, h.level, h.threshold)) {
      fail(ErrorKind::inconsistent_shares, "container size does not match its header");
    }
  }
  for (std::size_t i = 0; i < h0.threshold; ++i) s.chosen.push_back(&containers[i]);
  return s;
}

inline std::vector<std::uint32_t> container_elements(const ShareContainer& c, const LevelParams& lp, bool lenient) {
  std::vector<std::uint8_t> lsb(c.pixel_count());
  for (std::size_t k = 0; k < lsb.size(); ++k) lsb[k] = static_cast<std::uint8_t>(c.pixels[k] & ((1U << lp.lsb_bits) - 1));
  auto elements = concat_pixels(lsb, lp.level);
  for (auto& e : elements) {
    if (e < lp.field) continue;
    if (!lenient) fail(ErrorKind::inconsistent_shares, "share element outside the field");
    e %= lp.field;
  }
  return elements;
}

inline std::vector<std::uint32_t> unclamp_lenient(std::span<const std::uint32_t> clamped, const BitString& t_ref,
                                                  std::uint32_t field) {
  const unsigned width = t_code_width(field);
  std::vector<std::uint32_t> out(clamped.begin(), clamped.end());
  std::size_t pos = 0;
  for (auto& v : out) {
    if (v != field - 1) continue;
    std::uint32_t code = 0;
    for (unsigned b = 0; b < width; ++b) code = (code << 1) | (pos < t_ref.size() && t_ref[pos++] ? 1U : 0U);
    v += code;
  }
  return out;
}

inline GrayImage reconstruct_impl(std::span<const ShareContainer> containers, const EncryptionKey& key, unsigned n,
                                  bool lenient) {
  const SharedHeader shared = check_containers(containers);
  const ContainerHeader& h = shared.header;
  const unsigned r = h.threshold;
  const std::size_t m = h.height;
  const std::size_t w = h.width;
  const std::size_t mn = m * w;
  const auto lp = level_params(h.level);
  if (n < r || n > lp.field - 1) fail(ErrorKind::usage, "share count n must satisfy r <= n < F");
  for (const auto* c : shared.chosen) {
    if (read_header(*c).identity == 0 || read_header(*c).identity > n) {
      fail(ErrorKind::inconsistent_shares, "container identity outside [1, n]");
    }
  }
  const HenonState state = key_to_state(key, lp.field);

  // Step 1: side information.
  std::vector<ShareStream> si_streams;
  for (const auto* c : shared.chosen) {
    ShareStream s;
    s.identity = read_header(*c).identity;
    for (auto v : read_si_share(*c, h)) {
      if (v >= side_info_field && !lenient) fail(ErrorKind::corrupt_side_info, "side-information share value 127");
      s.elements.push_back(v % side_info_field);
    }
    si_streams.push_back(std::move(s));
  }
  const std::size_t si_sections = si_streams.front().elements.size();
  const auto q_si = q_sequence(state, si_sections, side_info_field - n, IterateStream::y);
  const SectionStream si_flat = recover(si_streams, q_si, r, side_info_field);
  std::vector<std::uint8_t> flat(si_flat.elements.begin(), si_flat.elements.end());

  PredictionRecord rec;
  rec.level = h.level;
  BitString t_ref;
  bool parsed = false;
  try {
    SideInfo si = recover_side_info(flat, m, w, h.level, r - 2);
    rec.location_map = decompress_map(si.rearrangement, si.lm, m, w);
    rec.lpes = std::move(si.lpes);
    rec.b_store = std::move(si.b_store);
    t_ref = std::move(si.t_ref);
    parsed = true;
  } catch (const Error& e) {
    if (!lenient || e.kind() != ErrorKind::corrupt_side_info) throw;
  }
  auto fallback_record = [&] {
    // Treat every pixel as unpredictable and read MSBs cyclically from the
    // recovered side-information bits.
    const BitString source = flat.empty() ? BitString::from_string("0") : detail::from_values7(flat);
    rec.location_map = BitString();
    rec.location_map.resize(mn);
    for (std::size_t k = 1; k < mn; ++k) rec.location_map.set(k, true);
    rec.lpes = BitString();
    rec.b_store = BitString();
    rec.b_store.reserve(mn * h.level);
    for (std::size_t k = 0; k < mn * h.level; ++k) rec.b_store.push_back(source[k % source.size()]);
  };
  if (!parsed) fallback_record();

  // Step 2: reverse sharing of the LSB planes.
  std::vector<ShareStream> streams;
  for (const auto* c : shared.chosen) streams.push_back({read_header(*c).identity, container_elements(*c, lp, lenient)});
  const std::size_t sections = streams.front().elements.size();
  const auto q = q_sequence(state, sections, lp.field, n, IterateStream::x);
  SectionStream recovered = recover(streams, q, r, lp.field);
  const std::size_t elements = (mn + lp.group - 1) / lp.group;
  recovered.elements.resize(elements);

  // Step 3: unclamp, undo the permutation, split.
  std::vector<std::uint32_t> permuted;
  if (lenient) {
    try {
      permuted = unclamp(recovered.elements, t_ref, lp.field);
    } catch (const Error&) {
      permuted = unclamp_lenient(recovered.elements, t_ref, lp.field);
    }
  } else {
    permuted = unclamp(recovered.elements, t_ref, lp.field);
  }
  const std::uint64_t sum = std::accumulate(permuted.begin(), permuted.end(), std::uint64_t{0});
  const auto joined = invert_permutation(permuted, permutation(key, sum, elements, lp.field));
  GrayImage lsb_image(m, w);
  for (std::size_t e = 0; e < elements; ++e) {
    const auto parts = split_element(std::min(joined[e], lp.max_element()), h.level);
    for (unsigned g = 0; g < lp.group && e * lp.group + g < mn; ++g) lsb_image.pixels[e * lp.group + g] = parts[g];
  }

  // Step 4: l-MSB plane.
  if (!lenient) return recover_msbs(lsb_image, rec);
  try {
    return recover_msbs(lsb_image, rec);
  } catch (const Error&) {
    fallback_record();
    return recover_msbs(lsb_image, rec);
  }
}

}  // namespace detail

/// Rebuilds the original image from at least r containers. `n` is the share
/// count chosen at encryption time; like the key it is known to the receiver,
/// since the sequence bounds depend on it.
inline GrayImage reconstruct(std::span<const ShareContainer> containers, const EncryptionKey& key, unsigned n) {
  return detail::reconstruct_impl(containers, key, n, false);
}

/// Reconstruction that never rejects corrupted side information: used to show
/// what an attacker gets from forged or altered containers.
inline GrayImage reconstruct_lenient(std::span<const ShareContainer> containers, const EncryptionKey& key, unsigned n) {
  return detail::reconstruct_impl(containers, key, n, true);
}

// Container file: "CFSS", version, identity, l, r, M and N as 32-bit and the
// pixel count as 64-bit big-endian integers, then the pixels.
inline constexpr std::uint8_t container_format_version = 1;

inline std::string encode_container(const ShareContainer& c) {
  std::string out = "CFSS";
  auto put = [&](std::uint64_t v, unsigned bytes) {
    for (unsigned b = bytes; b-- > 0;) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
  };
  put(container_format_version, 1);
  put(c.identity, 1);
  put(c.level, 1);
  put(c.threshold, 1);
  put(c.orig_height, 4);
  put(c.orig_width, 4);
  put(c.pixel_count(), 8);
  out.append(c.pixels.begin(), c.pixels.end());
  return out;
}

inline ShareContainer decode_container(const std::string& data) {
  constexpr std::size_t header_size = 4 + 4 + 4 + 4 + 8;
  if (data.size() < header_size || data.compare(0, 4, "CFSS") != 0) fail(ErrorKind::usage, "not a container file");
  std::size_t pos = 4;
  auto get = [&](unsigned bytes) {
    std::uint64_t v = 0;
    for (unsigned b = 0; b < bytes; ++b) v = (v << 8) | static_cast<std::uint8_t>(data[pos++]);
    return v;
  };
  if (get(1) != container_format_version) fail(ErrorKind::usage, "unsupported container version");
  ShareContainer c;
  c.identity = static_cast<std::uint32_t>(get(1));
  c.level = static_cast<unsigned>(get(1));
  c.threshold = static_cast<unsigned>(get(1));
  c.orig_height = static_cast<std::uint32_t>(get(4));
  c.orig_width = static_cast<std::uint32_t>(get(4));
  const std::uint64_t count = get(8);
  if (data.size() - header_size != count) fail(ErrorKind::usage, "container pixel data has the wrong length");
  c.pixels.assign(data.begin() + header_size, data.end());
  c.rows = c.orig_height != 0 && count % c.orig_height == 0 ? c.orig_height : 1;
  c.cols = count / c.rows;
  return c;
}

inline ShareContainer read_container(const std::string& path) { return decode_container(read_file(path)); }
inline void write_container(const std::string& path, const ShareContainer& c) { write_file(path, encode_container(c)); }

}  // namespace cfss

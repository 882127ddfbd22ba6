#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "cfss/bits.hpp"
#include "cfss/errors.hpp"

namespace cfss {

/// 256-bit key k_1..k_256. Hex text maps k_1 to the most significant bit of
/// the first byte.
class EncryptionKey {
 public:
  EncryptionKey() = default;
  explicit EncryptionKey(const std::array<std::uint8_t, 32>& bytes) : bytes_(bytes) {}

  static EncryptionKey from_hex(std::string_view hex) {
    if (hex.size() != 64) fail(ErrorKind::usage, "key must be 64 hex characters");
    std::array<std::uint8_t, 32> bytes{};
    for (std::size_t i = 0; i < 32; ++i) bytes[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
    return EncryptionKey(bytes);
  }

  static EncryptionKey from_bits(const BitString& bits) {
    if (bits.size() != 256) fail(ErrorKind::usage, "key must be exactly 256 bits");
    EncryptionKey key;
    for (std::size_t i = 0; i < 256; ++i) key.set_bit(i + 1, bits[i]);
    return key;
  }

  std::string to_hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    for (auto b : bytes_) {
      out.push_back(digits[b >> 4]);
      out.push_back(digits[b & 15]);
    }
    return out;
  }

  /// 1-based, as k_i.
  bool bit(std::size_t i) const { return (bytes_[(i - 1) / 8] >> (7 - (i - 1) % 8)) & 1U; }
  void set_bit(std::size_t i, bool value) {
    const auto mask = static_cast<std::uint8_t>(1U << (7 - (i - 1) % 8));
    if (value) {
      bytes_[(i - 1) / 8] |= mask;
    } else {
      bytes_[(i - 1) / 8] &= static_cast<std::uint8_t>(~mask);
    }
  }
  EncryptionKey with_flipped_bit(std::size_t i) const {
    EncryptionKey k = *this;
    k.set_bit(i, !bit(i));
    return k;
  }

  const std::array<std::uint8_t, 32>& bytes() const { return bytes_; }
  friend bool operator==(const EncryptionKey&, const EncryptionKey&) = default;

 private:
  static unsigned nibble(char c) {
    if (c >= '0' && c <= '9') return static_cast<unsigned>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<unsigned>(c - 'a' + 10);
    if (c >= 'A' && c <= 'F') return static_cast<unsigned>(c - 'A' + 10);
    fail(ErrorKind::usage, "key contains a non-hex character");
  }

  std::array<std::uint8_t, 32> bytes_{};
};

struct HenonState {
  double a_hat = 5.0;
  double b_hat = 5.0;
  double x = 0.0;
  double y = 0.0;
  std::uint32_t modulus = 251;

  friend bool operator==(const HenonState&, const HenonState&) = default;
};

namespace detail {

// ((v * u) mod m) + offset, with v = V / 2^48 and u a 16-bit integer, computed
// exactly and rounded once to binary64.
inline double scaled_product_mod(std::uint64_t v48, std::uint64_t u16, std::uint64_t m, std::uint64_t offset) {
  const std::uint64_t product = v48 * u16;  // < 2^64
  const std::uint64_t integer = product >> 48;
  const std::uint64_t fraction = product & ((std::uint64_t{1} << 48) - 1);
  const std::uint64_t numerator = ((integer % m + offset) << 48) | fraction;  // < 2^56
  return std::ldexp(static_cast<double>(numerator), -48);
}

/// floor(v * 2^21) mod bound, plus one.
inline std::uint32_t q_value(double v, std::uint32_t bound) {
  const auto scaled = static_cast<std::uint64_t>(std::floor(std::ldexp(v, 21)));
  return static_cast<std::uint32_t>(scaled % bound) + 1;
}

inline double wrap(double value, double modulus) {
  double r = std::fmod(value, modulus);
  if (r < 0) r += modulus;
  if (r >= modulus) r = 0.0;
  return r;
}

}  // namespace detail

/// Initial map state from the key: four 48-bit fractions v_1..v_4 (k_1..k_192,
/// first bit weighs 1/2) and four 16-bit integers u_1..u_4 (k_193..k_256,
/// first bit of each chunk weighs 1).
inline HenonState key_to_state(const EncryptionKey& key, std::uint32_t modulus) {
  if (modulus < 2) fail(ErrorKind::usage, "modulus must be at least 2");
  std::array<std::uint64_t, 4> v{};
  std::array<std::uint64_t, 4> u{};
  for (std::size_t j = 0; j < 4; ++j) {
    for (std::size_t t = 0; t < 48; ++t) v[j] = (v[j] << 1) | (key.bit(48 * j + t + 1) ? 1U : 0U);
    for (std::size_t t = 0; t < 16; ++t) u[j] |= std::uint64_t{key.bit(192 + 16 * j + t + 1) ? 1U : 0U} << t;
  }
  HenonState s;
  s.modulus = modulus;
  s.a_hat = detail::scaled_product_mod(v[0], u[0], 96, 5);
  s.b_hat = detail::scaled_product_mod(v[1], u[1], 96, 5);
  s.x = detail::scaled_product_mod(v[2], u[2], modulus, 0);
  s.y = detail::scaled_product_mod(v[3], u[3], modulus, 0);
  return s;
}

/// One map step. The expression order is fixed; golden vectors depend on it.
inline HenonState next(HenonState s) {
  const double m = static_cast<double>(s.modulus);
  const double x2 = s.x * s.x;
  const double t = s.a_hat * x2;
  const double nx = detail::wrap((1.0 - t) + s.y, m);
  const double ny = detail::wrap(s.b_hat * s.x, m);
  s.x = nx;
  s.y = ny;
  return s;
}

enum class IterateStream { x, y };

/// q_i = (floor(v_{i+1} * 2^21) mod bound) + 1 for i = 1..count, where v is the
/// chosen iterate stream. The image sequence Q uses the x stream with
/// bound = F - n; the side-information sequence uses the y stream with 127 - n.
inline std::vector<std::uint32_t> q_sequence(HenonState state, std::size_t count, std::uint32_t bound, IterateStream stream) {
  if (bound < 1) fail(ErrorKind::usage, "sequence bound must be positive");
  std::vector<std::uint32_t> out;
  out.reserve(count);
  state = next(state);  // v_1 is not used
  for (std::size_t i = 0; i < count; ++i) {
    state = next(state);
    out.push_back(detail::q_value(stream == IterateStream::x ? state.x : state.y, bound));
  }
  return out;
}

inline std::vector<std::uint32_t> q_sequence(const HenonState& state, std::size_t count, std::uint32_t field,
                                             std::uint32_t n, IterateStream stream) {
  if (field <= n) fail(ErrorKind::usage, "modulus must exceed the number of shares");
  return q_sequence(state, count, field - n, stream);
}

/// Keyed permutation salted with the concatenated-image pixel sum: the sum is
/// XORed big-endian into k_193..k_256 and the x iterates are stably argsorted.
/// Returns order[k] = source index of the k-th output element.
inline std::vector<std::size_t> permutation(const EncryptionKey& key, std::uint64_t pixel_sum, std::size_t length,
                                            std::uint32_t modulus = 251) {
  EncryptionKey salted = key;
  for (std::size_t t = 0; t < 64; ++t) {
    if ((pixel_sum >> (63 - t)) & 1U) salted.set_bit(193 + t, !salted.bit(193 + t));
  }
  HenonState s = key_to_state(salted, modulus);
  std::vector<double> xs(length);
  for (auto& x : xs) {
    s = next(s);
    x = s.x;
  }
  std::vector<std::size_t> order(length);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  return order;
}

template <typename T>
std::vector<T> apply_permutation(const std::vector<T>& values, const std::vector<std::size_t>& order) {
  std::vector<T> out(values.size());
  for (std::size_t k = 0; k < order.size(); ++k) out[k] = values[order[k]];
  return out;
}

template <typename T>
std::vector<T> invert_permutation(const std::vector<T>& permuted, const std::vector<std::size_t>& order) {
  std::vector<T> out(permuted.size());
  for (std::size_t k = 0; k < order.size(); ++k) out[order[k]] = permuted[k];
  return out;
}

/// Payload keystream: parity of floor(y * 2^21) over the y iterates of the
/// map keyed by the data-hiding key.
inline BitString keystream(const EncryptionKey& data_hiding_key, std::size_t nbits) {
  BitString out;
  out.reserve(nbits);
  HenonState s = key_to_state(data_hiding_key, 251);
  for (std::size_t i = 0; i < nbits; ++i) {
    s = next(s);
    out.push_back((static_cast<std::uint64_t>(std::floor(std::ldexp(s.y, 21))) & 1U) != 0);
  }
  return out;
}

inline BitString xor_keystream(const BitString& data, const EncryptionKey& data_hiding_key) {
  const BitString stream = keystream(data_hiding_key, data.size());
  BitString out = data;
  for (std::size_t i = 0; i < data.size(); ++i) out.set(i, data[i] != stream[i]);
  return out;
}

}  // namespace cfss

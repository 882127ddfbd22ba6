#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cfss/errors.hpp"

namespace cfss {

/// Smallest w with 2^w >= value; ceil_log2(0) == ceil_log2(1) == 0.
constexpr unsigned ceil_log2(std::uint64_t value) {
  unsigned width = 0;
  while (width < 64 && (std::uint64_t{1} << width) < value) ++width;
  return width;
}

/// Number of bits needed to write `value` in plain binary.
constexpr unsigned bit_width_of(std::uint64_t value) {
  unsigned width = 0;
  while (value != 0) {
    ++width;
    value >>= 1;
  }
  return width;
}

/// Growable bit sequence. Multi-bit fields are appended most-significant bit first.
class BitString {
 public:
  BitString() = default;

  static BitString from_string(std::string_view text) {
    BitString out;
    for (char ch : text) {
      if (ch == '0' || ch == '1') out.push_back(ch == '1');
    }
    return out;
  }

  void push_back(bool bit) { bits_.push_back(bit); }

  void append(std::uint64_t value, unsigned width) {
    for (unsigned i = width; i-- > 0;) bits_.push_back(((value >> i) & 1U) != 0);
  }

  void append(const BitString& other) { bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end()); }

  bool operator[](std::size_t i) const { return bits_[i]; }
  void set(std::size_t i, bool bit) { bits_[i] = bit; }
  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  void reserve(std::size_t n) { bits_.reserve(n); }
  void resize(std::size_t n) { bits_.resize(n); }

  std::size_t count_ones() const {
    std::size_t n = 0;
    for (bool b : bits_) n += b ? 1 : 0;
    return n;
  }

  std::string to_string() const {
    std::string s;
    s.reserve(bits_.size());
    for (bool b : bits_) s.push_back(b ? '1' : '0');
    return s;
  }

  friend bool operator==(const BitString&, const BitString&) = default;

 private:
  std::vector<bool> bits_;
};

/// Sequential reader over a BitString. Running past the end is reported as
/// corrupt side information, since every reader in this library parses
/// recovered side data or container headers.
class BitReader {
 public:
  explicit BitReader(const BitString& bits, std::size_t start = 0) : bits_(&bits), pos_(start) {}

  bool read_bit() {
    if (pos_ >= bits_->size()) fail(ErrorKind::corrupt_side_info, "bit stream exhausted");
    return (*bits_)[pos_++];
  }

  std::uint64_t read(unsigned width) {
    if (remaining() < width) fail(ErrorKind::corrupt_side_info, "bit stream exhausted");
    std::uint64_t v = 0;
    for (unsigned i = 0; i < width; ++i) v = (v << 1) | ((*bits_)[pos_++] ? 1U : 0U);
    return v;
  }

  BitString read_bits(std::size_t count) {
    if (remaining() < count) fail(ErrorKind::corrupt_side_info, "bit stream exhausted");
    BitString out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back((*bits_)[pos_++]);
    return out;
  }

  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return bits_->size() - pos_; }

 private:
  const BitString* bits_;
  std::size_t pos_;
};

}  // namespace cfss

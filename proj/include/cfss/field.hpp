#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cfss/errors.hpp"

namespace cfss {

/// Integer modulo a small prime. The sharing code only ever uses 61, 127 and 251,
/// but any prime below 2^16 works.
class FieldElement {
 public:
  FieldElement() = default;
  FieldElement(std::uint32_t value, std::uint32_t modulus) : value_(value % modulus), modulus_(modulus) {}

  std::uint32_t value() const { return value_; }
  std::uint32_t modulus() const { return modulus_; }

  friend FieldElement operator+(FieldElement a, FieldElement b) {
    check_same(a, b);
    std::uint32_t s = a.value_ + b.value_;
    return raw(s >= a.modulus_ ? s - a.modulus_ : s, a.modulus_);
  }
  friend FieldElement operator-(FieldElement a, FieldElement b) {
    check_same(a, b);
    return raw(a.value_ >= b.value_ ? a.value_ - b.value_ : a.value_ + a.modulus_ - b.value_, a.modulus_);
  }
  friend FieldElement operator*(FieldElement a, FieldElement b) {
    check_same(a, b);
    return raw(a.value_ * b.value_ % a.modulus_, a.modulus_);
  }
  FieldElement& operator+=(FieldElement o) { return *this = *this + o; }
  FieldElement& operator-=(FieldElement o) { return *this = *this - o; }
  FieldElement& operator*=(FieldElement o) { return *this = *this * o; }

  friend bool operator==(const FieldElement&, const FieldElement&) = default;

 private:
  static FieldElement raw(std::uint32_t v, std::uint32_t m) {
    FieldElement e;
    e.value_ = v;
    e.modulus_ = m;
    return e;
  }
  static void check_same(const FieldElement& a, const FieldElement& b) {
    if (a.modulus_ != b.modulus_) fail(ErrorKind::usage, "field elements with different moduli");
  }

  std::uint32_t value_ = 0;
  std::uint32_t modulus_ = 2;
};

struct SharePoint {
  FieldElement x;
  FieldElement y;
};

/// Horner evaluation of a_0 + a_1 x + ... + a_{k-1} x^{k-1}.
inline FieldElement eval_poly(std::span<const FieldElement> coefficients, FieldElement x) {
  FieldElement acc(0, x.modulus());
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * x + *it;
  return acc;
}

inline FieldElement pow(FieldElement base, std::uint32_t exponent) {
  FieldElement result(1, base.modulus());
  while (exponent != 0) {
    if (exponent & 1U) result *= base;
    base *= base;
    exponent >>= 1;
  }
  return result;
}

/// Multiplicative inverse via a^(F-2).
inline FieldElement invert(FieldElement a) {
  if (a.value() == 0) fail(ErrorKind::domain, "zero has no inverse");
  return pow(a, a.modulus() - 2);
}

/// Full coefficient vector of the interpolating polynomial through `points`,
/// lowest degree first. Points need distinct, nonzero abscissae.
inline std::vector<FieldElement> lagrange_coefficients(std::span<const SharePoint> points) {
  if (points.empty()) fail(ErrorKind::usage, "interpolation needs at least one point");
  const std::uint32_t modulus = points.front().x.modulus();
  const std::size_t r = points.size();
  for (const auto& p : points) {
    if (p.x.modulus() != modulus || p.y.modulus() != modulus) fail(ErrorKind::usage, "mixed moduli");
    if (p.x.value() == 0) fail(ErrorKind::domain, "share point at x = 0");
  }

  // product(x) = prod_k (x - x_k), degree r, lowest degree first.
  std::vector<FieldElement> product(r + 1, FieldElement(0, modulus));
  product[0] = FieldElement(1, modulus);
  for (std::size_t k = 0; k < r; ++k) {
    for (std::size_t d = k + 1; d > 0; --d) product[d] = product[d - 1] - points[k].x * product[d];
    product[0] = FieldElement(0, modulus) - points[k].x * product[0];
  }

  std::vector<FieldElement> result(r, FieldElement(0, modulus));
  std::vector<FieldElement> basis(r, FieldElement(0, modulus));
  for (std::size_t j = 0; j < r; ++j) {
    const FieldElement xj = points[j].x;
    // basis(x) = product(x) / (x - x_j), synthetic division from the top.
    FieldElement carry = product[r];
    for (std::size_t d = r; d-- > 0;) {
      basis[d] = carry;
      carry = product[d] + carry * xj;
    }
    FieldElement denom = eval_poly(basis, xj);
    if (denom.value() == 0) fail(ErrorKind::domain, "duplicate share abscissa");
    const FieldElement scale = points[j].y * invert(denom);
    for (std::size_t d = 0; d < r; ++d) result[d] += scale * basis[d];
  }
  return result;
}

}  // namespace cfss

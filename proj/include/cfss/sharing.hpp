#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <vector>

#include "cfss/entropy.hpp"
#include "cfss/errors.hpp"
#include "cfss/field.hpp"

namespace cfss {

/// Secret elements grouped in sections of r-1, stored flat.
struct SectionStream {
  std::vector<std::uint32_t> elements;
  std::size_t section_size = 1;
  std::uint32_t modulus = 251;

  std::size_t sections() const { return elements.size() / section_size; }
  friend bool operator==(const SectionStream&, const SectionStream&) = default;
};

/// One participant's output: element j is f_j(q_j + identity - 1).
struct ShareStream {
  std::uint32_t identity = 1;
  std::vector<std::uint32_t> elements;
  friend bool operator==(const ShareStream&, const ShareStream&) = default;
};

/// Groups `values` into sections of `section_size`, padding the final section
/// with random field elements.
inline SectionStream make_sections(std::span<const std::uint32_t> values, std::size_t section_size, std::uint32_t modulus,
                                   EntropySource& entropy) {
  if (section_size == 0) fail(ErrorKind::usage, "section size must be positive");
  SectionStream s;
  s.section_size = section_size;
  s.modulus = modulus;
  s.elements.assign(values.begin(), values.end());
  for (auto v : s.elements) {
    if (v >= modulus) fail(ErrorKind::domain, "section element outside the field");
  }
  while (s.elements.size() % section_size != 0) s.elements.push_back(entropy.below(modulus));
  return s;
}

/// Cipher-feedback sharing. Section j is shared with the polynomial whose low
/// coefficients are the section elements and whose top coefficient is the
/// feedback register, evaluated at q_j, q_j + 1, ..., q_j + n - 1. After each
/// section the register takes the output of a randomly drawn share p in [1, n].
inline std::vector<ShareStream> share(const SectionStream& stream, std::span<const std::uint32_t> q, std::uint32_t n,
                                      std::uint32_t seed_feedback, EntropySource& entropy) {
  const std::uint32_t modulus = stream.modulus;
  const std::size_t sections = stream.sections();
  if (n == 0 || n >= modulus) fail(ErrorKind::usage, "share count must be in [1, F-1]");
  if (q.size() < sections) fail(ErrorKind::usage, "evaluation sequence shorter than the section stream");
  if (seed_feedback >= modulus) fail(ErrorKind::domain, "seed feedback outside the field");

  std::vector<ShareStream> out(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    out[i].identity = i + 1;
    out[i].elements.resize(sections);
  }

  std::vector<FieldElement> coeffs(stream.section_size + 1);
  FieldElement feedback(seed_feedback, modulus);
  for (std::size_t j = 0; j < sections; ++j) {
    if (q[j] < 1 || q[j] + n - 1 >= modulus) fail(ErrorKind::domain, "evaluation point outside [1, F-1]");
    for (std::size_t k = 0; k < stream.section_size; ++k) {
      coeffs[k] = FieldElement(stream.elements[j * stream.section_size + k], modulus);
    }
    coeffs.back() = feedback;
    for (std::uint32_t i = 0; i < n; ++i) {
      out[i].elements[j] = eval_poly(coeffs, FieldElement(q[j] + i, modulus)).value();
    }
    const std::uint32_t p = entropy.below(n);
    feedback = FieldElement(out[p].elements[j], modulus);
  }
  return out;
}

/// Inverse of share() from any r streams; the feedback coefficient is discarded.
inline SectionStream recover(std::span<const ShareStream> shares, std::span<const std::uint32_t> q, std::uint32_t r,
                             std::uint32_t modulus) {
  if (r < 2) fail(ErrorKind::usage, "threshold must be at least 2");
  if (shares.size() < r) fail(ErrorKind::insufficient_shares, "fewer share streams than the threshold");
  std::set<std::uint32_t> ids;
  for (const auto& s : shares) {
    if (!ids.insert(s.identity).second) fail(ErrorKind::domain, "duplicate share identity");
  }
  const std::size_t sections = shares.front().elements.size();
  for (std::size_t i = 0; i < r; ++i) {
    if (shares[i].elements.size() != sections) fail(ErrorKind::inconsistent_shares, "share streams differ in length");
    if (shares[i].identity == 0) fail(ErrorKind::domain, "share identity must be positive");
  }
  if (q.size() < sections) fail(ErrorKind::usage, "evaluation sequence shorter than the share streams");

  SectionStream out;
  out.section_size = r - 1;
  out.modulus = modulus;
  out.elements.resize(sections * (r - 1));
  // The abscissae depend only on q_j, so the inverse Vandermonde matrix is
  // computed once per distinct q value: basis[q][i] holds the coefficients of
  // the Lagrange basis polynomial of stream i.
  std::vector<std::vector<std::vector<FieldElement>>> basis(modulus);
  std::vector<SharePoint> points(r);
  for (std::size_t j = 0; j < sections; ++j) {
    if (q[j] >= modulus) fail(ErrorKind::domain, "evaluation point outside the field");
    auto& rows = basis[q[j]];
    if (rows.empty()) {
      for (std::size_t i = 0; i < r; ++i) {
        const std::uint64_t x = std::uint64_t{q[j]} + shares[i].identity - 1;
        if (x >= modulus) fail(ErrorKind::domain, "evaluation point outside the field");
        points[i].x = FieldElement(static_cast<std::uint32_t>(x), modulus);
      }
      for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t t = 0; t < r; ++t) points[t].y = FieldElement(t == i ? 1 : 0, modulus);
        rows.push_back(lagrange_coefficients(points));
      }
    }
    for (std::size_t k = 0; k + 1 < r; ++k) {
      std::uint32_t acc = 0;
      for (std::size_t i = 0; i < r; ++i) acc = (acc + rows[i][k].value() * (shares[i].elements[j] % modulus)) % modulus;
      out.elements[j * (r - 1) + k] = acc;
    }
  }
  return out;
}

}  // namespace cfss

#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "cfss/entropy.hpp"
#include "cfss/errors.hpp"
#include "cfss/field.hpp"
#include "cfss/image.hpp"
#include "cfss/pipeline.hpp"
#include "cfss/prng.hpp"

namespace cfss {

using PixelSpan = std::span<const std::uint8_t>;

namespace detail {
inline void require_same_size(PixelSpan a, PixelSpan b) {
  if (a.size() != b.size()) fail(ErrorKind::usage, "images differ in size");
  if (a.empty()) fail(ErrorKind::usage, "empty image");
}
}  // namespace detail

/// Base-2 entropy of the 256-bin histogram.
inline double shannon_entropy(PixelSpan pixels) {
  if (pixels.empty()) fail(ErrorKind::usage, "empty image");
  std::array<std::size_t, 256> hist{};
  for (auto p : pixels) ++hist[p];
  const double total = static_cast<double>(pixels.size());
  double h = 0.0;
  for (auto count : hist) {
    if (count == 0) continue;
    const double pr = static_cast<double>(count) / total;
    h -= pr * std::log2(pr);
  }
  return h;
}

/// Hamming distance over total bit length.
inline double nbcr(PixelSpan a, PixelSpan b) {
  detail::require_same_size(a, b);
  std::size_t diff = 0;
  for (std::size_t i = 0; i < a.size(); ++i) diff += static_cast<std::size_t>(std::popcount(static_cast<unsigned>(a[i] ^ b[i])));
  return static_cast<double>(diff) / (8.0 * static_cast<double>(a.size()));
}

struct NpcrUaci {
  double npcr = 0.0;  // percent
  double uaci = 0.0;  // percent
};

inline NpcrUaci npcr_uaci(PixelSpan a, PixelSpan b) {
  detail::require_same_size(a, b);
  std::size_t changed = 0;
  double intensity = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) ++changed;
    intensity += std::abs(static_cast<int>(a[i]) - static_cast<int>(b[i])) / 255.0;
  }
  const double total = static_cast<double>(a.size());
  return {100.0 * static_cast<double>(changed) / total, 100.0 * intensity / total};
}

namespace detail {

// Average ranks, 1-based.
inline std::vector<double> average_ranks(PixelSpan v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && v[order[j]] == v[order[i]]) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg;
    i = j;
  }
  return ranks;
}

inline std::uint64_t tied_pairs(std::vector<std::pair<std::uint8_t, std::uint8_t>>::const_iterator begin,
                                std::vector<std::pair<std::uint8_t, std::uint8_t>>::const_iterator end, bool by_first) {
  std::uint64_t ties = 0;
  for (auto it = begin; it != end;) {
    auto jt = it;
    while (jt != end && (by_first ? jt->first == it->first : *jt == *it)) ++jt;
    const auto t = static_cast<std::uint64_t>(jt - it);
    ties += t * (t - 1) / 2;
    it = jt;
  }
  return ties;
}

// Bottom-up merge sort counting inversions (swaps).
inline std::uint64_t sort_counting_swaps(std::vector<std::uint8_t>& v) {
  std::vector<std::uint8_t> buf(v.size());
  std::uint64_t swaps = 0;
  for (std::size_t width = 1; width < v.size(); width *= 2) {
    for (std::size_t lo = 0; lo < v.size(); lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, v.size());
      const std::size_t hi = std::min(lo + 2 * width, v.size());
      std::size_t i = lo;
      std::size_t j = mid;
      std::size_t k = lo;
      while (i < mid && j < hi) {
        if (v[j] < v[i]) {
          swaps += mid - i;
          buf[k++] = v[j++];
        } else {
          buf[k++] = v[i++];
        }
      }
      while (i < mid) buf[k++] = v[i++];
      while (j < hi) buf[k++] = v[j++];
    }
    v.swap(buf);
  }
  return swaps;
}

}  // namespace detail

/// Spearman: 1 - 6 sum d^2 / (n (n^2 - 1)) over average ranks.
inline double srcc(PixelSpan a, PixelSpan b) {
  detail::require_same_size(a, b);
  if (a.size() < 2) fail(ErrorKind::usage, "rank correlation needs at least two samples");
  const auto ra = detail::average_ranks(a);
  const auto rb = detail::average_ranks(b);
  double sum = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) sum += (ra[i] - rb[i]) * (ra[i] - rb[i]);
  const double n = static_cast<double>(a.size());
  return 1.0 - 6.0 * sum / (n * (n * n - 1.0));
}

/// Kendall: (Nc - Nd) / (n (n - 1) / 2), tied pairs counted in neither.
/// Knight's O(n log n) method.
inline double krcc(PixelSpan a, PixelSpan b) {
  detail::require_same_size(a, b);
  if (a.size() < 2) fail(ErrorKind::usage, "rank correlation needs at least two samples");
  std::vector<std::pair<std::uint8_t, std::uint8_t>> pairs(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) pairs[i] = {a[i], b[i]};
  std::sort(pairs.begin(), pairs.end());
  const auto n = static_cast<std::uint64_t>(a.size());
  const std::uint64_t n0 = n * (n - 1) / 2;
  const std::uint64_t n1 = detail::tied_pairs(pairs.begin(), pairs.end(), true);
  const std::uint64_t n3 = detail::tied_pairs(pairs.begin(), pairs.end(), false);
  std::vector<std::uint8_t> ys(a.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) ys[i] = pairs[i].second;
  const std::uint64_t swaps = detail::sort_counting_swaps(ys);
  std::uint64_t n2 = 0;
  for (std::size_t i = 0; i < ys.size();) {
    std::size_t j = i;
    while (j < ys.size() && ys[j] == ys[i]) ++j;
    n2 += static_cast<std::uint64_t>(j - i) * (j - i - 1) / 2;
    i = j;
  }
  const auto diff = static_cast<double>(n0) - static_cast<double>(n1) - static_cast<double>(n2) + static_cast<double>(n3) -
                    2.0 * static_cast<double>(swaps);
  return diff / static_cast<double>(n0);
}

inline double shannon_entropy(const GrayImage& img) { return shannon_entropy(PixelSpan(img.pixels)); }
inline double nbcr(const GrayImage& a, const GrayImage& b) { return nbcr(PixelSpan(a.pixels), PixelSpan(b.pixels)); }
inline NpcrUaci npcr_uaci(const GrayImage& a, const GrayImage& b) { return npcr_uaci(PixelSpan(a.pixels), PixelSpan(b.pixels)); }
inline double srcc(const GrayImage& a, const GrayImage& b) { return srcc(PixelSpan(a.pixels), PixelSpan(b.pixels)); }
inline double krcc(const GrayImage& a, const GrayImage& b) { return krcc(PixelSpan(a.pixels), PixelSpan(b.pixels)); }

/// Bits per container pixel left for payload: (l * pixels - overhead) / pixels.
inline double embedding_rate(const ShareContainer& c) {
  const ContainerHeader h = read_header(c);
  const double pixels = static_cast<double>(c.pixel_count());
  return (static_cast<double>(h.level) * pixels - static_cast<double>(h.overhead_bits())) / pixels;
}

/// Pairwise comparison of two share images.
struct MetricReport {
  double entropy = 0.0;  // of the first image
  double nbcr = 0.0;
  double npcr = 0.0;
  double uaci = 0.0;
  double srcc = 0.0;
  double krcc = 0.0;
};

inline MetricReport compare(PixelSpan a, PixelSpan b) {
  MetricReport r;
  r.entropy = shannon_entropy(a);
  r.nbcr = nbcr(a, b);
  const auto nu = npcr_uaci(a, b);
  r.npcr = nu.npcr;
  r.uaci = nu.uaci;
  r.srcc = srcc(a, b);
  r.krcc = krcc(a, b);
  return r;
}

/// Runs `job(i)` for i in [0, count) on a small worker pool.
template <typename Job>
void parallel_for(std::size_t count, Job job, unsigned workers = 0) {
  if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

struct KeyFlipResult {
  std::size_t bit = 0;              // 1-based key bit that was flipped
  std::vector<double> share_nbcr;  // one per share identity
};

/// Encrypts with the key and with each of its 256 one-bit variants, all under
/// the same non-keyed randomness seed, and reports per-share NBCR.
inline std::vector<KeyFlipResult> key_sensitivity_sweep(const GrayImage& image, const EncryptionKey& key, unsigned r,
                                                        unsigned n, std::uint64_t seed, unsigned workers = 0) {
  EntropySource base(seed);
  const auto reference = owner_encrypt(image, key, r, n, base);
  std::vector<KeyFlipResult> out(256);
  parallel_for(
      256,
      [&](std::size_t i) {
        EntropySource entropy(seed);
        const auto flipped = owner_encrypt(image, key.with_flipped_bit(i + 1), r, n, entropy);
        out[i].bit = i + 1;
        for (unsigned s = 0; s < n; ++s) {
          if (flipped[s].pixel_count() != reference[s].pixel_count()) {
            out[i].share_nbcr.push_back(std::nan(""));
          } else {
            out[i].share_nbcr.push_back(nbcr(PixelSpan(reference[s].pixels), PixelSpan(flipped[s].pixels)));
          }
        }
      },
      workers);
  return out;
}

/// Encrypts `image` and a copy with one bit flipped under the same key and
/// seed, and compares each share pair.
inline std::vector<MetricReport> differential_test(const GrayImage& image, const EncryptionKey& key, unsigned r, unsigned n,
                                                   std::uint64_t seed, std::size_t pixel_index, unsigned bit) {
  if (pixel_index >= image.size() || bit > 7) fail(ErrorKind::usage, "differential bit outside the image");
  GrayImage altered = image;
  altered.pixels[pixel_index] = static_cast<std::uint8_t>(altered.pixels[pixel_index] ^ (1U << bit));
  EntropySource e1(seed);
  EntropySource e2(seed);
  const auto a = owner_encrypt(image, key, r, n, e1);
  const auto b = owner_encrypt(altered, key, r, n, e2);
  std::vector<MetricReport> out;
  for (unsigned s = 0; s < n; ++s) {
    if (a[s].pixel_count() != b[s].pixel_count()) fail(ErrorKind::inconsistent_shares, "share sizes differ after a one-bit change");
    out.push_back(compare(PixelSpan(a[s].pixels), PixelSpan(b[s].pixels)));
  }
  return out;
}

/// For one section observed through r-1 share points, counts the secret
/// vectors (a_0..a_{r-2}) for which some feedback coefficient a_{r-1} makes
/// the polynomial pass through every point. Exhaustive, so only for small F and r.
inline std::size_t consistent_secret_count(std::span<const SharePoint> points, std::uint32_t modulus, unsigned r) {
  if (points.size() + 1 != r) fail(ErrorKind::usage, "expected exactly r-1 points");
  std::size_t total = 1;
  for (unsigned k = 0; k + 1 < r; ++k) total *= modulus;
  std::size_t count = 0;
  std::vector<FieldElement> coeffs(r, FieldElement(0, modulus));
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    for (unsigned k = 0; k + 1 < r; ++k) {
      coeffs[k] = FieldElement(static_cast<std::uint32_t>(rest % modulus), modulus);
      rest /= modulus;
    }
    for (std::uint32_t top = 0; top < modulus; ++top) {
      coeffs[r - 1] = FieldElement(top, modulus);
      bool ok = true;
      for (const auto& p : points) ok = ok && eval_poly(coeffs, p.x) == p.y;
      if (ok) {
        ++count;
        break;
      }
    }
  }
  return count;
}

/// A forged container: the embedded header of `genuine` with another identity,
/// and random share data everywhere else.
inline ShareContainer forge_container(const ShareContainer& genuine, std::uint32_t identity, EntropySource& entropy) {
  ContainerHeader h = read_header(genuine);
  h.identity = identity;
  ShareContainer fake = genuine;
  fake.identity = identity;
  for (auto& px : fake.pixels) px = static_cast<std::uint8_t>(entropy.below(256));
  detail::write_msb_plane(fake.pixels, h.level, 0, encode_header(h));
  return fake;
}

/// Reconstruction from r-1 genuine containers plus one forgery.
inline GrayImage fake_share_attack(std::span<const ShareContainer> genuine, const EncryptionKey& key, unsigned n,
                                   EntropySource& entropy) {
  if (genuine.empty()) fail(ErrorKind::insufficient_shares, "no genuine containers");
  const ContainerHeader h = read_header(genuine.front());
  if (genuine.size() + 1 != h.threshold) fail(ErrorKind::usage, "the attack uses exactly r-1 genuine containers");
  std::vector<bool> used(256, false);
  for (const auto& c : genuine) used[read_header(c).identity] = true;
  std::uint32_t fake_id = 1;
  while (fake_id < 255 && used[fake_id]) ++fake_id;
  std::vector<ShareContainer> set(genuine.begin(), genuine.end());
  set.push_back(forge_container(genuine.front(), fake_id, entropy));
  return reconstruct_lenient(set, key, n);
}

/// key=value lines.
inline void write_report_text(std::ostream& out, const std::vector<std::pair<std::string, double>>& rows) {
  out.precision(6);
  out << std::fixed;
  for (const auto& [k, v] : rows) out << k << '=' << v << '\n';
}

/// Comma-separated table with a header row.
inline void write_report_csv(std::ostream& out, const std::vector<std::string>& header,
                             const std::vector<std::vector<std::string>>& rows) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
}

}  // namespace cfss

#pragma once

// Test-only reference computations. None of these reuse library code paths: membership
// is re-derived from definitions, and scale existence is decided by exhaustive search.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace oracle {

// Bernoulli membership straight from the hash definition.
inline bool bernoulli_member(std::uint64_t seed, std::uint64_t p_num, std::uint64_t p_den, std::int64_t i) {
  std::uint64_t z = seed ^ (static_cast<std::uint64_t>(i) * 0x9E3779B97F4A7C15ULL);
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  const std::uint64_t top = z >> 11;
  // top / 2^53 < p_num / p_den
  return static_cast<unsigned __int128>(top) * p_den < (static_cast<unsigned __int128>(p_num) << 53);
}

inline bool is_prime_trial(std::int64_t v) {
  if (v < 2) return false;
  for (std::int64_t d = 2; d * d <= v; ++d) {
    if (v % d == 0) return false;
  }
  return true;
}

// Plain (unsegmented) sieve over [0, n].
inline std::vector<bool> sieve(std::uint64_t n) {
  std::vector<bool> is(n + 1, true);
  is[0] = false;
  if (n >= 1) is[1] = false;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (!is[p]) continue;
    for (std::uint64_t q = p * p; q <= n; q += p) is[q] = false;
  }
  return is;
}

struct BruteScale {
  bool exists = false;
  // Optimal bottleneck |r_i * span - n * (q_i - q_1)| over all valid tuples.
  std::int64_t best_scaled = std::numeric_limits<std::int64_t>::max();
};

// Exhaustive search over distinct k-tuples (k <= 3) of members in [0, n] with
// |r_i - tau_i| < n * eps_num / eps_den.
inline BruteScale brute_force_scale(const std::vector<bool>& member, const std::vector<std::int64_t>& q,
                                    std::int64_t n, std::int64_t eps_num, std::int64_t eps_den) {
  const std::size_t k = q.size();
  const std::int64_t span = k == 1 ? 1 : q.back() - q.front();
  std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>> cands(k);  // (r, scaled distance)
  for (std::size_t i = 0; i < k; ++i) {
    for (std::int64_t r = 0; r <= n; ++r) {
      if (!member[static_cast<std::size_t>(r)]) continue;
      std::int64_t dist = r * span - n * (q[i] - q.front());
      if (dist < 0) dist = -dist;
      // dist / (n span) < eps  <=>  dist * eps_den < n * span * eps_num
      if (dist * eps_den < n * span * eps_num) cands[i].push_back({r, dist});
    }
  }
  BruteScale out;
  auto consider = [&](std::int64_t worst) {
    out.exists = true;
    if (worst < out.best_scaled) out.best_scaled = worst;
  };
  if (k == 1) {
    for (auto [r, d] : cands[0]) consider(d);
  } else if (k == 2) {
    for (auto [r0, d0] : cands[0])
      for (auto [r1, d1] : cands[1])
        if (r0 != r1) consider(std::max(d0, d1));
  } else {
    for (auto [r0, d0] : cands[0])
      for (auto [r1, d1] : cands[1]) {
        if (r0 == r1) continue;
        const std::int64_t m01 = std::max(d0, d1);
        if (m01 >= out.best_scaled) continue;
        for (auto [r2, d2] : cands[2])
          if (r2 != r0 && r2 != r1) consider(std::max(m01, d2));
      }
  }
  return out;
}

}  // namespace oracle

#pragma once

// Search for epsilon-contained n-scales {r_1, ..., r_k} of a pattern inside a set.
//
// Targets are t_i = (q_i - q_1) / (q_k - q_1) and every comparison |r/n - t| < tol is
// done on integers after clearing denominators, so boundary points of the open
// windows are never rounded in.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "frieze/certificate.hpp"
#include "frieze/errors.hpp"
#include "frieze/rational.hpp"
#include "frieze/set_model.hpp"

namespace frieze {

// t_i = offsets[i] / denominator.
class TargetVector {
 public:
  explicit TargetVector(const ScalePattern& pattern) {
    const auto& q = pattern.values();
    denominator_ = pattern.k() == 1 ? 1 : pattern.span();
    offsets_.reserve(q.size());
    for (auto v : q) offsets_.push_back(v - q.front());
  }

  std::size_t size() const noexcept { return offsets_.size(); }
  std::int64_t offset(std::size_t i) const { return offsets_.at(i); }
  std::int64_t denominator() const noexcept { return denominator_; }

  Rational t(std::size_t i) const { return Rational(BigInt(offsets_.at(i)), BigInt(denominator_)); }
  std::vector<Rational> values() const {
    std::vector<Rational> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back(t(i));
    return out;
  }
  // tau_i = t_i * n
  Rational tau(std::size_t i, std::uint64_t n) const { return t(i) * Rational(BigInt(n)); }

 private:
  std::vector<std::int64_t> offsets_;
  std::int64_t denominator_ = 1;
};

inline TargetVector targets(const ScalePattern& pattern) { return TargetVector(pattern); }

enum class ScaleMode { Certified, Loose };

inline std::string to_string(ScaleMode m) { return m == ScaleMode::Certified ? "certified" : "loose"; }

struct SearchMode {
  ScaleMode kind = ScaleMode::Loose;
  Rational eps_bar;  // tolerance in Certified mode

  static SearchMode loose() { return {}; }
  static SearchMode certified(Rational eps_bar) { return {ScaleMode::Certified, std::move(eps_bar)}; }
};

struct ScaleResult {
  std::uint64_t n = 0;
  bool success = false;
  std::vector<std::uint64_t> r;
  std::vector<Rational> residuals;  // |r_i / n - t_i|
  ScaleMode mode = ScaleMode::Loose;
  Rational tolerance;
  std::optional<std::size_t> failed_target;  // index of the first target without a usable member
  bool verified = false;

  Rational max_residual() const {
    Rational m(0);
    for (const auto& x : residuals) m = x > m ? x : m;
    return m;
  }
};

// Integer points of {0..n} inside the open window (n(t - tol), n(t + tol)), as [lo, hi].
struct IntegerWindow {
  std::int64_t lo = 0;
  std::int64_t hi = -1;
  std::uint64_t count() const noexcept { return hi < lo ? 0 : static_cast<std::uint64_t>(hi - lo + 1); }
};

inline IntegerWindow open_window(std::uint64_t n, const Rational& t, const Rational& tol) {
  if (n == 0 || tol <= 0) return {};
  const Rational nn{BigInt(n)};
  BigInt lo = floor_of(nn * (t - tol)) + 1;
  BigInt hi = ceil_of(nn * (t + tol)) - 1;
  if (lo < 0) lo = 0;
  if (hi > BigInt(n)) hi = BigInt(n);
  if (hi < lo) return {};
  return {to_int64(lo), to_int64(hi)};
}

inline std::uint64_t window_integer_count(std::uint64_t n, const Rational& t, const Rational& tol) {
  return open_window(n, t, tol).count();
}

// A member r in {0..n} with |r/n - t| < tol, nearest to n*t, ties toward the smaller r.
inline std::optional<std::uint64_t> find_r_for_t(const ObserverWindow& window, std::uint64_t n, const Rational& t,
                                                 const Rational& tol) {
  if (t < 0 || t > 1) throw InputError("target must lie in [0, 1], got " + to_string(t));
  if (window.size() < n + 1) throw RangeError("observer window does not cover 0.." + std::to_string(n));
  const IntegerWindow iw = open_window(n, t, tol);
  if (iw.count() == 0) return std::nullopt;

  const Rational center = t * Rational(BigInt(n));
  const std::int64_t floor_c = std::clamp(to_int64(floor_of(center)), iw.lo, iw.hi);
  const std::int64_t ceil_c = std::clamp(to_int64(ceil_of(center)), iw.lo, iw.hi);

  std::optional<std::uint64_t> left;
  std::optional<std::uint64_t> right;
  if (const std::int64_t p = window.prev_set(floor_c); p >= iw.lo) left = static_cast<std::uint64_t>(p);
  if (const std::uint64_t q = window.next_set(static_cast<std::uint64_t>(ceil_c));
      q <= static_cast<std::uint64_t>(iw.hi)) {
    right = q;
  }
  if (!left) return right;
  if (!right) return left;
  const Rational dl = abs_of(Rational(BigInt(*left)) - center);
  const Rational dr = abs_of(Rational(BigInt(*right)) - center);
  return dr < dl ? right : left;
}

// True iff 2 eps_bar < 1 / span: neighbouring target windows cannot overlap.
inline bool check_window_disjointness(const ScalePattern& pattern, const Rational& eps_bar) {
  if (pattern.k() < 2) throw InputError("window disjointness needs a pattern with k > 1");
  return 2 * eps_bar < Rational(BigInt(1), BigInt(pattern.span()));
}

// Pattern sizes above this are rejected in Loose mode.
inline constexpr std::size_t kMaxLoosePatternSize = 64;

namespace detail {

using i128 = __int128;

// |r * D - n * a|: the residual |r/n - a/D| scaled by n * D.
inline i128 scaled_distance(std::uint64_t r, std::uint64_t n, std::int64_t a, std::int64_t d) {
  const i128 v = static_cast<i128>(r) * d - static_cast<i128>(n) * a;
  return v < 0 ? -v : v;
}

inline i128 ceil_div(i128 a, i128 b) {  // b > 0
  i128 q = a / b;
  if (q * b != a && a > 0) ++q;
  return q;
}

inline i128 floor_div(i128 a, i128 b) {  // b > 0
  i128 q = a / b;
  if (q * b != a && a < 0) --q;
  return q;
}

// Greedy distinct assignment with every scaled distance <= dist. Targets are increasing
// and all windows share one radius, so taking the smallest free member in each window
// decides feasibility exactly. On failure `failed` is set to the stuck target.
inline bool assign_within(const ObserverWindow& window, const TargetVector& tv, std::uint64_t n, i128 dist,
                          std::vector<std::uint64_t>& picks, std::size_t& failed) {
  picks.clear();
  const i128 d = tv.denominator();
  i128 next_free = 0;
  for (std::size_t i = 0; i < tv.size(); ++i) {
    const i128 center = static_cast<i128>(n) * tv.offset(i);
    i128 lo = std::max<i128>(ceil_div(center - dist, d), 0);
    const i128 hi = std::min<i128>(floor_div(center + dist, d), static_cast<i128>(n));
    lo = std::max(lo, next_free);
    if (lo > hi) {
      failed = i;
      return false;
    }
    const std::uint64_t r = window.next_set(static_cast<std::uint64_t>(lo));
    if (static_cast<i128>(r) > hi) {
      failed = i;
      return false;
    }
    picks.push_back(r);
    next_free = static_cast<i128>(r) + 1;
  }
  return true;
}

inline void fill_residuals(ScaleResult& res, const TargetVector& tv) {
  res.residuals.clear();
  for (std::size_t i = 0; i < res.r.size(); ++i) {
    res.residuals.push_back(abs_of(Rational(BigInt(res.r[i]), BigInt(res.n)) - tv.t(i)));
  }
}

}  // namespace detail

// Independent check of an n-scale: members of {0..n}, pairwise distinct, |r_i - tau_i| < n * epsilon.
inline bool verify_scale(const SetSpec& s, const ScalePattern& pattern, const Rational& epsilon,
                         const ScaleResult& result) {
  if (result.r.size() != pattern.k() || result.n == 0 || epsilon <= 0) return false;
  const auto& q = pattern.values();
  const BigInt span = pattern.k() == 1 ? BigInt(1) : BigInt(pattern.span());
  const BigInt n(result.n);
  for (std::size_t i = 0; i < result.r.size(); ++i) {
    const std::uint64_t r = result.r[i];
    if (r > result.n || !membership(s, static_cast<std::int64_t>(r))) return false;
    // tau_i = n (q_i - q_1) / span, so |r - tau_i| < n eps  <=>  |r span - n (q_i - q_1)| eps_den < n span eps_num
    BigInt diff = BigInt(r) * span - n * (BigInt(q[i]) - BigInt(q.front()));
    if (diff < 0) diff = -diff;
    if (!(diff * denominator_of(epsilon) < n * span * numerator_of(epsilon))) return false;
  }
  std::vector<std::uint64_t> sorted = result.r;
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

// Scale search over a prebuilt window covering 0..n.
//
// Certified mode searches each target independently with tolerance eps_bar. Loose mode
// uses tolerance epsilon and finds a distinct assignment minimizing the maximum residual
// (binary search on the bottleneck distance with an exact greedy feasibility test).
inline ScaleResult find_scale(const SetSpec& s, const ObserverWindow& window, const ScalePattern& pattern,
                              const Rational& epsilon, std::uint64_t n, const SearchMode& mode) {
  if (epsilon <= 0) throw InputError("epsilon must be positive, got " + to_string(epsilon));
  if (n < pattern.k()) {
    throw InputError("n = " + std::to_string(n) + " is below the pattern size k = " + std::to_string(pattern.k()));
  }
  if (window.size() < n + 1) throw RangeError("observer window does not cover 0.." + std::to_string(n));

  const TargetVector tv(pattern);
  ScaleResult res;
  res.n = n;
  res.mode = mode.kind;

  if (mode.kind == ScaleMode::Certified) {
    if (mode.eps_bar <= 0) throw InputError("certified mode needs a positive eps_bar");
    res.tolerance = mode.eps_bar;
    for (std::size_t i = 0; i < tv.size(); ++i) {
      auto r = find_r_for_t(window, n, tv.t(i), mode.eps_bar);
      if (!r) {
        res.failed_target = i;
        res.r.clear();
        return res;
      }
      res.r.push_back(*r);
    }
  } else {
    if (pattern.k() > kMaxLoosePatternSize) {
      throw InputError("loose mode supports patterns of at most " + std::to_string(kMaxLoosePatternSize) + " points");
    }
    res.tolerance = epsilon;
    using detail::i128;
    const i128 d = tv.denominator();
    const i128 full = static_cast<i128>(n) * d;
    // largest scaled distance strictly below n * D * epsilon
    const BigInt limit = ceil_of(Rational(BigInt(n) * BigInt(tv.denominator())) * epsilon) - 1;
    i128 hi = limit >= BigInt(static_cast<std::int64_t>(0)) && limit < BigInt(INT64_MAX)
                  ? static_cast<i128>(limit.convert_to<std::int64_t>())
                  : full;
    hi = std::min(hi, full);
    std::vector<std::uint64_t> picks;
    std::size_t failed = 0;
    if (limit < 0 || !detail::assign_within(window, tv, n, hi, picks, failed)) {
      res.failed_target = failed;
      return res;
    }
    i128 lo = -1;  // infeasible sentinel
    while (hi - lo > 1) {
      const i128 mid = lo + (hi - lo) / 2;
      if (detail::assign_within(window, tv, n, mid, picks, failed)) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    detail::assign_within(window, tv, n, hi, picks, failed);
    res.r = picks;
  }

  res.success = true;
  detail::fill_residuals(res, tv);
  res.verified = verify_scale(s, pattern, epsilon, res);
  return res;
}

inline ScaleResult find_scale(const SetSpec& s, const ScalePattern& pattern, const Rational& epsilon, std::uint64_t n,
                              const SearchMode& mode) {
  if (n < pattern.k()) {
    throw InputError("n = " + std::to_string(n) + " is below the pattern size k = " + std::to_string(pattern.k()));
  }
  return find_scale(s, observer_window(s, n), pattern, epsilon, n, mode);
}

}  // namespace frieze

#pragma once

// Partial densities, Birkhoff averages of 1_Gamma along the shift orbit of the
// observer sequence, and the finite-evidence estimate of the forward density beta.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "frieze/errors.hpp"
#include "frieze/rational.hpp"
#include "frieze/set_model.hpp"

namespace frieze {

enum class DensityVerdict { ExactPositive, EmpiricalPositive, LikelyZero, Inconclusive };

inline std::string to_string(DensityVerdict v) {
  switch (v) {
    case DensityVerdict::ExactPositive: return "ExactPositive";
    case DensityVerdict::EmpiricalPositive: return "EmpiricalPositive";
    case DensityVerdict::LikelyZero: return "LikelyZero";
    case DensityVerdict::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

struct DensityEstimate {
  Rational beta;
  bool exact = false;
  std::uint64_t horizon = 0;
  // max over n in [H/2, H] of |A(n) - beta|
  Rational tail_oscillation;
  DensityVerdict verdict = DensityVerdict::Inconclusive;
};

struct DensityThresholds {
  Rational zero_threshold = Rational(1, 10);
  Rational oscillation_threshold = Rational(1, 20);
};

inline constexpr std::uint64_t kMinEstimateHorizon = 1000;

// (1/(n+1)) * #{0 <= i <= n : i in N}
inline Rational partial_forward_density(const SetSpec& s, std::uint64_t n) {
  const ObserverWindow w = observer_window(s, n);
  return Rational(BigInt(w.popcount()), BigInt(n) + 1);
}

// (1/n) * sum_{i<n} 1_Gamma(sigma^i x), summed through the cylinder indicator.
inline Rational birkhoff_average(const ObserverWindow& window, std::uint64_t n) {
  if (n == 0) throw InputError("birkhoff average needs n >= 1");
  if (n > window.size()) throw RangeError("birkhoff average beyond observer window");
  // sum of indicator_gamma(window, i) for i < n, read from the prefix counts
  return Rational(BigInt(window.count_prefix(n)), BigInt(n));
}

inline Rational birkhoff_average(const SetSpec& s, std::uint64_t n) {
  if (n == 0) throw InputError("birkhoff average needs n >= 1");
  return birkhoff_average(observer_window(s, n - 1), n);
}

// Birkhoff sums read off the window's prefix counts; A(n) for every n <= size().
class BirkhoffSeries {
 public:
  explicit BirkhoffSeries(const ObserverWindow& window) : window_(&window) {}

  std::uint64_t max_n() const noexcept { return window_->size(); }
  std::uint64_t sum(std::uint64_t n) const { return window_->count_prefix(n); }
  Rational average(std::uint64_t n) const {
    if (n == 0) throw InputError("birkhoff average needs n >= 1");
    return Rational(BigInt(sum(n)), BigInt(n));
  }

 private:
  const ObserverWindow* window_;
};

// Diagnostic: (1/(2n+1)) * #{-n <= i <= n : i in N}.
inline Rational two_sided_partial_density(const SetSpec& s, std::uint64_t n) {
  const ObserverWindow w = observer_window(s, n);
  std::uint64_t count = w.popcount();
  for (std::uint64_t i = 1; i <= n; ++i) {
    if (membership(s, -static_cast<std::int64_t>(i))) ++count;
  }
  return Rational(BigInt(count), 2 * BigInt(n) + 1);
}

// Residue-class description of a periodic set: member iff mask[i mod modulus].
struct PeriodicForm {
  std::int64_t modulus = 1;
  std::vector<bool> mask;

  std::int64_t residue_count() const {
    return static_cast<std::int64_t>(std::count(mask.begin(), mask.end(), true));
  }
  Rational density() const { return Rational(BigInt(residue_count()), BigInt(modulus)); }
};

// Joint moduli above this are not expanded.
inline constexpr std::int64_t kMaxPeriodicModulus = std::int64_t{1} << 24;

namespace detail {

inline std::optional<PeriodicForm> expand_to(const PeriodicForm& f, std::int64_t modulus) {
  PeriodicForm out{modulus, std::vector<bool>(static_cast<std::size_t>(modulus))};
  for (std::int64_t r = 0; r < modulus; ++r) {
    out.mask[static_cast<std::size_t>(r)] = f.mask[static_cast<std::size_t>(r % f.modulus)];
  }
  return out;
}

template <typename Op>
std::optional<PeriodicForm> combine_periodic(const std::optional<PeriodicForm>& a,
                                             const std::optional<PeriodicForm>& b, Op op) {
  if (!a || !b) return std::nullopt;
  const std::int64_t g = std::gcd(a->modulus, b->modulus);
  if (a->modulus / g > kMaxPeriodicModulus / b->modulus) return std::nullopt;
  const std::int64_t m = a->modulus / g * b->modulus;
  auto ea = expand_to(*a, m);
  auto eb = expand_to(*b, m);
  PeriodicForm out{m, std::vector<bool>(static_cast<std::size_t>(m))};
  for (std::size_t r = 0; r < out.mask.size(); ++r) out.mask[r] = op(ea->mask[r], eb->mask[r]);
  return out;
}

}  // namespace detail

// Periodic structure of finite boolean combinations of residue classes and progressions.
inline std::optional<PeriodicForm> periodic_form(const SetSpec& s) {
  return std::visit(
      [](const auto& v) -> std::optional<PeriodicForm> {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, spec::ResidueClasses>) {
          if (v.modulus > kMaxPeriodicModulus) return std::nullopt;
          PeriodicForm f{v.modulus, std::vector<bool>(static_cast<std::size_t>(v.modulus))};
          for (auto r : v.residues) f.mask[static_cast<std::size_t>(r)] = true;
          return f;
        } else if constexpr (std::is_same_v<T, spec::ArithmeticProgression>) {
          if (v.difference > kMaxPeriodicModulus) return std::nullopt;
          PeriodicForm f{v.difference, std::vector<bool>(static_cast<std::size_t>(v.difference))};
          f.mask[static_cast<std::size_t>(detail::floor_mod(v.anchor, v.difference))] = true;
          return f;
        } else if constexpr (std::is_same_v<T, spec::Union>) {
          return detail::combine_periodic(periodic_form(v.left), periodic_form(v.right),
                                          [](bool a, bool b) { return a || b; });
        } else if constexpr (std::is_same_v<T, spec::Intersection>) {
          return detail::combine_periodic(periodic_form(v.left), periodic_form(v.right),
                                          [](bool a, bool b) { return a && b; });
        } else if constexpr (std::is_same_v<T, spec::Difference>) {
          return detail::combine_periodic(periodic_form(v.left), periodic_form(v.right),
                                          [](bool a, bool b) { return a && !b; });
        } else {
          return std::nullopt;
        }
      },
      s.node().value);
}

// Exact forward density when it follows from the set's structure: periodic sets give
// |residues| / modulus and finite sets give 0. Absent otherwise.
inline std::optional<Rational> closed_form_beta(const SetSpec& s) {
  if (std::holds_alternative<spec::Explicit>(s.node().value)) return Rational(0);
  if (auto f = periodic_form(s)) return f->density();
  return std::nullopt;
}

namespace detail {

// Tracks argmax of |sum(n) - beta * n| / n over a range of n without building rationals.
class DeviationMax {
 public:
  explicit DeviationMax(const Rational& beta)
      : num_(numerator_of(beta)), den_(denominator_of(beta)),
        small_(den_ < (BigInt(1) << 31) && num_ < (BigInt(1) << 31)),
        num64_(small_ ? num_.convert_to<std::int64_t>() : 0),
        den64_(small_ ? den_.convert_to<std::int64_t>() : 0) {}

  void observe(std::uint64_t sum, std::uint64_t n) {
    if (small_) {
      __int128 diff = static_cast<__int128>(sum) * den64_ - static_cast<__int128>(num64_) * static_cast<__int128>(n);
      if (diff < 0) diff = -diff;
      // compare diff / n against best_diff / best_n
      if (best_n_ == 0 || static_cast<unsigned __int128>(diff) * best_n_ >
                              static_cast<unsigned __int128>(best_small_) * n) {
        best_small_ = static_cast<unsigned __int128>(diff);
        best_n_ = n;
      }
    } else {
      BigInt diff = BigInt(sum) * den_ - num_ * BigInt(n);
      if (diff < 0) diff = -diff;
      if (best_n_ == 0 || diff * BigInt(best_n_) > best_big_ * BigInt(n)) {
        best_big_ = diff;
        best_n_ = n;
      }
    }
  }

  Rational value() const {
    if (best_n_ == 0) return Rational(0);
    BigInt diff;
    if (small_) {
      diff = BigInt(static_cast<std::uint64_t>(best_small_ >> 64)) << 64;
      diff += BigInt(static_cast<std::uint64_t>(best_small_));
    } else {
      diff = best_big_;
    }
    return Rational(diff, den_ * BigInt(best_n_));
  }

 private:
  BigInt num_, den_;
  bool small_;
  std::int64_t num64_, den64_;
  unsigned __int128 best_small_ = 0;
  BigInt best_big_;
  std::uint64_t best_n_ = 0;
};

}  // namespace detail

// max over n in [lo, hi] of |A(n) - beta|.
inline Rational max_deviation(const BirkhoffSeries& series, const Rational& beta, std::uint64_t lo, std::uint64_t hi) {
  detail::DeviationMax tracker(beta);
  for (std::uint64_t n = std::max<std::uint64_t>(lo, 1); n <= hi; ++n) tracker.observe(series.sum(n), n);
  return tracker.value();
}

// Finite-evidence estimate of beta = lim A(n). Exact when a closed form exists.
inline DensityEstimate estimate_beta(const SetSpec& s, std::uint64_t horizon,
                                     const DensityThresholds& thresholds = {}) {
  if (horizon < kMinEstimateHorizon) {
    throw InputError("density horizon must be >= " + std::to_string(kMinEstimateHorizon));
  }
  const ObserverWindow window = observer_window(s, horizon - 1);
  const BirkhoffSeries series(window);

  DensityEstimate est;
  est.horizon = horizon;

  if (auto exact = closed_form_beta(s)) {
    est.beta = *exact;
    est.exact = true;
    est.tail_oscillation = max_deviation(series, est.beta, horizon / 2, horizon);
    est.verdict = est.beta > 0 ? DensityVerdict::ExactPositive : DensityVerdict::LikelyZero;
    return est;
  }

  est.beta = series.average(horizon);
  est.tail_oscillation = max_deviation(series, est.beta, horizon / 2, horizon);

  const Rational a_100 = series.average(horizon / 100);
  const Rational a_10 = series.average(horizon / 10);
  if (est.beta > thresholds.zero_threshold && est.tail_oscillation < thresholds.oscillation_threshold) {
    est.verdict = DensityVerdict::EmpiricalPositive;
  } else if (est.beta < thresholds.zero_threshold && a_100 >= a_10 && a_10 >= est.beta) {
    est.verdict = DensityVerdict::LikelyZero;
  } else {
    est.verdict = DensityVerdict::Inconclusive;
  }
  return est;
}

}  // namespace frieze

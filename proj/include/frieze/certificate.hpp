#pragma once

// The constant chain eps_bar -> delta -> n0 -> N0 -> N = max(k, N0), computed in exact
// rational arithmetic so that every strict inequality in the chain is checked without
// rounding.

#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "frieze/density.hpp"
#include "frieze/errors.hpp"
#include "frieze/rational.hpp"
#include "frieze/set_model.hpp"

namespace frieze {

// Finite integer pattern q_1 < ... < q_k.
class ScalePattern {
 public:
  explicit ScalePattern(std::vector<std::int64_t> q) : q_(std::move(q)) {
    if (q_.empty()) throw InputError("pattern must contain at least one integer");
    for (std::size_t i = 1; i < q_.size(); ++i) {
      if (q_[i - 1] >= q_[i]) throw InputError("pattern must be strictly increasing");
    }
  }

  const std::vector<std::int64_t>& values() const noexcept { return q_; }
  std::size_t k() const noexcept { return q_.size(); }
  // q_k - q_1; zero for a single point.
  std::int64_t span() const noexcept { return q_.back() - q_.front(); }

  friend bool operator==(const ScalePattern&, const ScalePattern&) = default;

 private:
  std::vector<std::int64_t> q_;
};

inline std::string to_string(const ScalePattern& p) {
  std::string out;
  for (std::size_t i = 0; i < p.k(); ++i) {
    if (i) out += ',';
    out += std::to_string(p.values()[i]);
  }
  return out;
}

enum class N0Basis { ClosedForm, FiniteHorizon };

struct N0Result {
  std::uint64_t n0 = 1;
  N0Basis basis = N0Basis::ClosedForm;
  std::uint64_t horizon = 0;  // scanned range for FiniteHorizon, period bound for ClosedForm
  // Largest n' with |beta - A(n')| >= delta; n0 = witness + 1. Absent when n0 = 1.
  std::optional<std::uint64_t> witness;
};

struct FriezeCertificate {
  Rational epsilon;
  Rational eps_bar;
  Rational beta;
  bool beta_exact = false;
  Rational delta;
  std::uint64_t n0 = 1;
  N0Basis n0_basis = N0Basis::ClosedForm;
  std::uint64_t horizon = 0;
  std::optional<std::uint64_t> n0_witness;
  std::uint64_t N0 = 0;
  std::uint64_t k = 1;
  std::uint64_t N = 0;

  friend bool operator==(const FriezeCertificate&, const FriezeCertificate&) = default;
};

inline Rational choose_eps_bar(const Rational& epsilon, const ScalePattern& pattern) {
  if (epsilon <= 0) throw InputError("epsilon must be positive, got " + to_string(epsilon));
  if (pattern.k() == 1) return epsilon < 1 ? epsilon : Rational(1);
  const Rational separation(BigInt(1), 2 * BigInt(pattern.span()));
  const Rational& smaller = epsilon < separation ? epsilon : separation;
  return smaller / 2;
}

// delta = beta * eps_bar / (2 * (4 + eps_bar)), half the supremum of the admissible range.
inline Rational choose_delta(const Rational& beta, const Rational& eps_bar) {
  if (beta <= 0) throw CertificateRefused("density must be positive to choose delta", "LikelyZero");
  if (eps_bar <= 0) throw InputError("eps_bar must be positive");
  Rational delta = beta * eps_bar / (2 * (4 + eps_bar));
  if (!(delta > 0 && delta < beta && (beta + delta) / (beta - delta) < 1 + eps_bar / 2)) {
    throw std::logic_error("delta postcondition violated");
  }
  return delta;
}

namespace detail {

// |beta - sum/n| >= delta, by cross-multiplication.
class DeviationTest {
 public:
  DeviationTest(const Rational& beta, const Rational& delta)
      : bp_(numerator_of(beta)), bq_(denominator_of(beta)), dp_(numerator_of(delta)), dq_(denominator_of(delta)) {
    const BigInt limit = BigInt(1) << 40;
    small_ = bp_ < limit && bq_ < limit && dp_ < limit && dq_ < limit;
    if (small_) {
      bp64_ = bp_.convert_to<std::int64_t>();
      bq64_ = bq_.convert_to<std::int64_t>();
      dp64_ = dp_.convert_to<std::int64_t>();
      dq64_ = dq_.convert_to<std::int64_t>();
    }
  }

  bool violates(std::uint64_t sum, std::uint64_t n) const {
    if (small_ && n < (std::uint64_t{1} << 32)) {
      __int128 diff = static_cast<__int128>(sum) * bq64_ - static_cast<__int128>(bp64_) * static_cast<__int128>(n);
      if (diff < 0) diff = -diff;
      return diff * dq64_ >= static_cast<__int128>(dp64_) * bq64_ * static_cast<__int128>(n);
    }
    BigInt diff = BigInt(sum) * bq_ - bp_ * BigInt(n);
    if (diff < 0) diff = -diff;
    return diff * dq_ >= dp_ * bq_ * BigInt(n);
  }

 private:
  BigInt bp_, bq_, dp_, dq_;
  bool small_ = false;
  std::int64_t bp64_ = 0, bq64_ = 0, dp64_ = 0, dq64_ = 0;
};

inline N0Result last_violation_scan(const ObserverWindow& window, const Rational& beta, const Rational& delta,
                                    std::uint64_t upto) {
  const DeviationTest test(beta, delta);
  N0Result r;
  for (std::uint64_t n = upto; n >= 1; --n) {
    if (test.violates(window.count_prefix(n), n)) {
      r.witness = n;
      r.n0 = n + 1;
      break;
    }
  }
  return r;
}

}  // namespace detail

// Convergence onset n0: |beta - A(n)| < delta for every n >= n0 (exact for periodic
// specs) or for every n in [n0, horizon] (finite evidence otherwise).
inline N0Result find_n0(const SetSpec& s, const Rational& beta, const Rational& delta, std::uint64_t horizon) {
  if (delta <= 0) throw InputError("delta must be positive");

  if (auto periodic = periodic_form(s); periodic && periodic->density() == beta) {
    // m*count(n) - c*n has period m in n, so past max|e| * dq / (dp * m) the bound always holds.
    const auto m = static_cast<std::uint64_t>(periodic->modulus);
    const auto c = static_cast<std::int64_t>(periodic->residue_count());
    const ObserverWindow period = observer_window(s, m);
    BigInt max_e = 0;
    for (std::uint64_t n = 1; n <= m; ++n) {
      BigInt e = BigInt(m) * BigInt(period.count_prefix(n)) - BigInt(c) * BigInt(n);
      if (e < 0) e = -e;
      if (e > max_e) max_e = e;
    }
    const BigInt bound = max_e * denominator_of(delta) / (numerator_of(delta) * BigInt(m)) + 1;
    if (bound >= BigInt(kMaxWindowBits)) {
      throw CapacityError("closed-form n0 scan needs " + bound.str() + " terms", kMaxWindowBits);
    }
    const auto upto = bound.convert_to<std::uint64_t>();
    const ObserverWindow window = observer_window(s, upto);
    N0Result r = detail::last_violation_scan(window, beta, delta, upto);
    r.basis = N0Basis::ClosedForm;
    r.horizon = upto;
    return r;
  }

  if (horizon < 1) throw InputError("horizon must be >= 1");
  const ObserverWindow window = observer_window(s, horizon - 1);
  N0Result r = detail::last_violation_scan(window, beta, delta, horizon);
  r.basis = N0Basis::FiniteHorizon;
  r.horizon = horizon;
  if (r.n0 > horizon) {
    throw CertificationFailure("|beta - A(n)| < delta fails at the horizon n = " + std::to_string(horizon) +
                               "; increase the horizon");
  }
  return r;
}

// Smallest integer strictly above max(2 n0 / (eps_bar (beta - delta)), 4 / eps_bar).
inline std::uint64_t compute_N0(std::uint64_t n0, const Rational& eps_bar, const Rational& beta,
                                const Rational& delta) {
  const Rational a = Rational(2 * BigInt(n0)) / (eps_bar * (beta - delta));
  const Rational b = Rational(4) / eps_bar;
  const BigInt value = floor_of(a > b ? a : b) + 1;
  if (value > BigInt(UINT64_MAX)) throw CapacityError("N0 exceeds 64-bit range", 0);
  return value.convert_to<std::uint64_t>();
}

// Names of every certificate invariant that fails; empty for a valid certificate.
inline std::vector<std::string> certificate_violations(const FriezeCertificate& c, const ScalePattern& pattern) {
  std::vector<std::string> bad;
  const Rational one(1);
  if (!(c.eps_bar > 0)) bad.emplace_back("eps_bar > 0");
  if (!(c.eps_bar <= c.epsilon && c.eps_bar <= one)) bad.emplace_back("eps_bar <= min(epsilon, 1)");
  if (!(c.eps_bar < 2)) bad.emplace_back("eps_bar < 2");
  if (pattern.k() > 1) {
    if (!(c.eps_bar < c.epsilon)) bad.emplace_back("eps_bar < epsilon");
    if (!(c.eps_bar < Rational(BigInt(1), 2 * BigInt(pattern.span())))) bad.emplace_back("eps_bar < 1/(2 span)");
  }
  if (!(c.delta > 0 && c.delta < c.beta)) bad.emplace_back("0 < delta < beta");
  if (c.delta < c.beta && !((c.beta + c.delta) / (c.beta - c.delta) < 1 + c.eps_bar / 2)) {
    bad.emplace_back("(beta+delta)/(beta-delta) < 1 + eps_bar/2");
  }
  if (c.eps_bar > 0 && c.delta < c.beta) {
    const Rational a = Rational(2 * BigInt(c.n0)) / (c.eps_bar * (c.beta - c.delta));
    const Rational b = Rational(4) / c.eps_bar;
    const Rational bound = a > b ? a : b;
    if (!(Rational(BigInt(c.N0)) > bound)) bad.emplace_back("N0 > max(2 n0/(eps_bar (beta-delta)), 4/eps_bar)");
    if (!(Rational(BigInt(c.N0)) * c.eps_bar > 4)) bad.emplace_back("N0 * eps_bar > 4");
  }
  if (!(c.N0 > c.n0)) bad.emplace_back("N0 > n0");
  if (c.k != pattern.k()) bad.emplace_back("k matches pattern");
  if (c.N != std::max<std::uint64_t>(c.k, c.N0)) bad.emplace_back("N = max(k, N0)");
  return bad;
}

// Chain of constants for a known beta and n0.
inline FriezeCertificate assemble_certificate(const Rational& epsilon, const ScalePattern& pattern, const Rational& beta,
                                              bool beta_exact, const N0Result& n0_result) {
  FriezeCertificate c;
  c.epsilon = epsilon;
  c.eps_bar = choose_eps_bar(epsilon, pattern);
  c.beta = beta;
  c.beta_exact = beta_exact;
  c.delta = choose_delta(beta, c.eps_bar);
  c.n0 = n0_result.n0;
  c.n0_basis = n0_result.basis;
  c.horizon = n0_result.horizon;
  c.n0_witness = n0_result.witness;
  c.N0 = compute_N0(c.n0, c.eps_bar, c.beta, c.delta);
  c.k = pattern.k();
  c.N = std::max<std::uint64_t>(c.k, c.N0);
  return c;
}

inline FriezeCertificate build_certificate(const SetSpec& s, const ScalePattern& pattern, const Rational& epsilon,
                                           std::uint64_t horizon, const DensityThresholds& thresholds = {}) {
  if (epsilon <= 0) throw InputError("epsilon must be positive, got " + to_string(epsilon));
  const DensityEstimate est = estimate_beta(s, horizon, thresholds);
  if (est.verdict != DensityVerdict::ExactPositive && est.verdict != DensityVerdict::EmpiricalPositive) {
    throw CertificateRefused("forward density not established as positive (verdict " + to_string(est.verdict) +
                                 ", beta " + to_string(est.beta) + ")",
                             to_string(est.verdict));
  }
  const Rational eps_bar = choose_eps_bar(epsilon, pattern);
  const Rational delta = choose_delta(est.beta, eps_bar);
  const N0Result n0 = find_n0(s, est.beta, delta, horizon);
  FriezeCertificate c = assemble_certificate(epsilon, pattern, est.beta, est.exact, n0);
  if (auto bad = certificate_violations(c, pattern); !bad.empty()) {
    throw std::logic_error("certificate invariant violated: " + bad.front());
  }
  return c;
}

inline std::string to_string(N0Basis b) { return b == N0Basis::ClosedForm ? "ClosedForm" : "FiniteHorizon"; }

// Flat key=value record, one field per line, rationals as p/q.
inline std::string to_record(const FriezeCertificate& c) {
  std::ostringstream out;
  out << "epsilon=" << to_string(c.epsilon) << '\n'
      << "eps_bar=" << to_string(c.eps_bar) << '\n'
      << "beta=" << to_string(c.beta) << '\n'
      << "beta_exact=" << (c.beta_exact ? "true" : "false") << '\n'
      << "delta=" << to_string(c.delta) << '\n'
      << "n0=" << c.n0 << '\n'
      << "n0_basis=" << to_string(c.n0_basis);
  if (c.n0_basis == N0Basis::FiniteHorizon) out << '(' << c.horizon << ')';
  out << '\n'
      << "n0_scan_bound=" << c.horizon << '\n'
      << "n0_witness=" << (c.n0_witness ? std::to_string(*c.n0_witness) : "none") << '\n'
      << "N0=" << c.N0 << '\n'
      << "k=" << c.k << '\n'
      << "N=" << c.N << '\n';
  return out.str();
}

inline FriezeCertificate parse_record(const std::string& text) {
  FriezeCertificate c;
  std::istringstream in(text);
  std::string line;
  auto to_u64 = [](const std::string& v) {
    std::size_t used = 0;
    const auto value = std::stoull(v, &used);
    if (used != v.size()) throw InputError("bad integer '" + v + "'");
    return static_cast<std::uint64_t>(value);
  };
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError("certificate line without '=': " + line);
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    try {
      if (key == "epsilon") c.epsilon = parse_rational(value);
      else if (key == "eps_bar") c.eps_bar = parse_rational(value);
      else if (key == "beta") c.beta = parse_rational(value);
      else if (key == "beta_exact") c.beta_exact = value == "true";
      else if (key == "delta") c.delta = parse_rational(value);
      else if (key == "n0") c.n0 = to_u64(value);
      else if (key == "n0_basis") c.n0_basis = value.rfind("ClosedForm", 0) == 0 ? N0Basis::ClosedForm : N0Basis::FiniteHorizon;
      else if (key == "n0_scan_bound") c.horizon = to_u64(value);
      else if (key == "n0_witness") c.n0_witness = value == "none" ? std::nullopt : std::optional(to_u64(value));
      else if (key == "N0") c.N0 = to_u64(value);
      else if (key == "k") c.k = to_u64(value);
      else if (key == "N") c.N = to_u64(value);
      else throw InputError("unknown certificate field '" + key + "'");
    } catch (const std::logic_error&) {
      throw InputError("bad value for certificate field '" + key + "': " + value);
    }
  }
  return c;
}

}  // namespace frieze

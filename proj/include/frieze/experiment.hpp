#pragma once

// Empirical threshold measurement and certified-vs-empirical comparison reports.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "frieze/certificate.hpp"
#include "frieze/density.hpp"
#include "frieze/errors.hpp"
#include "frieze/rational.hpp"
#include "frieze/scale_search.hpp"
#include "frieze/set_model.hpp"
#include "frieze/spec_expression.hpp"

namespace frieze {

inline constexpr std::uint64_t kDefaultWindow = 1000;

struct ScanRow {
  std::uint64_t n = 0;
  bool success = false;
  std::vector<std::uint64_t> r;
  Rational max_residual;
};

// Observer window grown on demand by doubling, capped at `cap`.
class GrowingWindow {
 public:
  GrowingWindow(SetSpec s, std::uint64_t cap) : spec_(std::move(s)), cap_(cap) {}

  const ObserverWindow& covering(std::uint64_t n) {
    if (window_.size() < n + 1) {
      std::uint64_t target = std::max<std::uint64_t>(n, 4095);
      if (window_.size() > 0) target = std::max(target, 2 * window_.size());
      target = std::min(target, std::max(cap_, n));
      window_ = observer_window(spec_, target);
    }
    return window_;
  }

 private:
  SetSpec spec_;
  std::uint64_t cap_;
  ObserverWindow window_;
};

inline ScanRow loose_row(const SetSpec& s, GrowingWindow& windows, const ScalePattern& pattern,
                         const Rational& epsilon, std::uint64_t n) {
  const ScaleResult res = find_scale(s, windows.covering(n), pattern, epsilon, n, SearchMode::loose());
  ScanRow row{n, res.success, res.r, res.success ? res.max_residual() : Rational(0)};
  return row;
}

struct EmpiricalScan {
  std::optional<std::uint64_t> empirical_N;
  std::vector<ScanRow> rows;  // every n examined, increasing
};

// Smallest N' >= k with a Loose-mode scale for every n in [N', N' + W], scanning n <= n_max.
inline EmpiricalScan scan_empirical(const SetSpec& s, const ScalePattern& pattern, const Rational& epsilon,
                                    std::uint64_t window, std::uint64_t n_max) {
  if (window < 1) throw InputError("window W must be >= 1");
  if (epsilon <= 0) throw InputError("epsilon must be positive, got " + to_string(epsilon));
  const std::uint64_t k = pattern.k();
  EmpiricalScan scan;
  if (n_max < k + window) return scan;
  GrowingWindow windows(s, n_max);
  std::uint64_t run_start = k;
  for (std::uint64_t n = k; n <= n_max; ++n) {
    ScanRow row = loose_row(s, windows, pattern, epsilon, n);
    const bool ok = row.success;
    scan.rows.push_back(std::move(row));
    if (!ok) {
      run_start = n + 1;
      if (run_start + window > n_max) break;
      continue;
    }
    if (n - run_start == window) {
      scan.empirical_N = run_start;
      break;
    }
  }
  return scan;
}

inline std::optional<std::uint64_t> minimal_empirical_N(const SetSpec& s, const ScalePattern& pattern,
                                                        const Rational& epsilon, std::uint64_t window,
                                                        std::uint64_t n_max) {
  return scan_empirical(s, pattern, epsilon, window, n_max).empirical_N;
}

inline std::vector<ScanRow> scan_rows(const SetSpec& s, const ScalePattern& pattern, const Rational& epsilon,
                                      std::uint64_t n_lo, std::uint64_t n_hi) {
  if (n_lo < pattern.k() || n_lo > n_hi) {
    throw InputError("scan range needs k <= from <= to (k = " + std::to_string(pattern.k()) + ")");
  }
  GrowingWindow windows(s, n_hi);
  std::vector<ScanRow> rows;
  rows.reserve(n_hi - n_lo + 1);
  for (std::uint64_t n = n_lo; n <= n_hi; ++n) rows.push_back(loose_row(s, windows, pattern, epsilon, n));
  return rows;
}

// Every n in [n_lo, n_hi] without a Loose-mode scale, increasing.
inline std::vector<std::uint64_t> failure_scan(const SetSpec& s, const ScalePattern& pattern, const Rational& epsilon,
                                               std::uint64_t n_lo, std::uint64_t n_hi) {
  std::vector<std::uint64_t> failures;
  for (const auto& row : scan_rows(s, pattern, epsilon, n_lo, n_hi)) {
    if (!row.success) failures.push_back(row.n);
  }
  return failures;
}

// Smallest anchor a in [lo, hi] with a + (q_i - q_1) a member for every i.
inline std::optional<std::int64_t> exact_copy_exists(const SetSpec& s, const ScalePattern& pattern,
                                                     std::int64_t anchor_lo, std::int64_t anchor_hi) {
  const auto& q = pattern.values();
  for (std::int64_t a = anchor_lo; a <= anchor_hi; ++a) {
    bool all = true;
    for (auto v : q) {
      if (!membership(s, a + (v - q.front()))) {
        all = false;
        break;
      }
    }
    if (all) return a;
    if (a == INT64_MAX) break;
  }
  return std::nullopt;
}

struct ExperimentReport {
  std::string spec;
  ScalePattern pattern{std::vector<std::int64_t>{0}};
  Rational epsilon;
  std::uint64_t horizon = 0;
  std::uint64_t window = kDefaultWindow;
  std::uint64_t n_max = 0;
  std::optional<FriezeCertificate> certificate;
  std::optional<std::string> refusal;
  std::optional<std::uint64_t> empirical_N;
  std::vector<std::uint64_t> failures;  // Loose-mode failures on [N, N + W] when certified
  std::vector<std::uint64_t> certified_mode_failures;
  std::optional<std::int64_t> slack;  // N_certified - N_empirical
  std::vector<ScanRow> rows;
};

struct CompareOptions {
  std::uint64_t horizon = 1000000;
  std::uint64_t window = kDefaultWindow;
  // Scan limit for the empirical search; 0 picks N + W when certified, else k + 10 W.
  std::uint64_t n_max = 0;
  DensityThresholds thresholds;
};

inline ExperimentReport compare_report(const SetSpec& s, const ScalePattern& pattern, const Rational& epsilon,
                                       const CompareOptions& opt = {}) {
  ExperimentReport rep;
  rep.spec = to_expression(s);
  rep.pattern = pattern;
  rep.epsilon = epsilon;
  rep.horizon = opt.horizon;
  rep.window = opt.window;

  try {
    rep.certificate = build_certificate(s, pattern, epsilon, opt.horizon, opt.thresholds);
  } catch (const CertificateRefused& e) {
    rep.refusal = e.what();
  } catch (const CertificationFailure& e) {
    rep.refusal = e.what();
  }

  rep.n_max = opt.n_max;
  if (rep.n_max == 0) {
    rep.n_max = rep.certificate ? rep.certificate->N + opt.window : pattern.k() + 10 * opt.window;
  }

  EmpiricalScan scan = scan_empirical(s, pattern, epsilon, opt.window, rep.n_max);
  rep.empirical_N = scan.empirical_N;

  std::map<std::uint64_t, ScanRow> rows;
  for (auto& row : scan.rows) rows.emplace(row.n, std::move(row));

  if (rep.certificate) {
    const std::uint64_t lo = rep.certificate->N;
    const std::uint64_t hi = lo + opt.window;
    const ObserverWindow window = observer_window(s, hi);
    const SearchMode certified = SearchMode::certified(rep.certificate->eps_bar);
    for (std::uint64_t n = lo; n <= hi; ++n) {
      const ScaleResult loose = find_scale(s, window, pattern, epsilon, n, SearchMode::loose());
      if (!loose.success) rep.failures.push_back(n);
      rows.try_emplace(n, ScanRow{n, loose.success, loose.r, loose.success ? loose.max_residual() : Rational(0)});
      const ScaleResult strict = find_scale(s, window, pattern, epsilon, n, certified);
      if (!strict.success || !strict.verified) rep.certified_mode_failures.push_back(n);
    }
    if (rep.empirical_N) {
      rep.slack = static_cast<std::int64_t>(rep.certificate->N) - static_cast<std::int64_t>(*rep.empirical_N);
    }
  }

  rep.rows.reserve(rows.size());
  for (auto& [n, row] : rows) rep.rows.push_back(std::move(row));
  return rep;
}

namespace detail {

inline std::string join_u64(const std::vector<std::uint64_t>& xs, char sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(xs[i]);
  }
  return out;
}

}  // namespace detail

inline constexpr const char* kCsvHeader = "n,success,r_list,max_residual_num,max_residual_den";

// Rows only; failed rows leave the witness and residual columns empty.
inline void write_rows_csv(std::ostream& out, const std::vector<ScanRow>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& row : rows) {
    out << row.n << ',' << (row.success ? 1 : 0) << ',';
    if (row.success) {
      out << detail::join_u64(row.r, ';') << ',' << numerator_of(row.max_residual) << ','
          << denominator_of(row.max_residual);
    } else {
      out << ",,";
    }
    out << '\n';
  }
}

inline std::string to_csv(const ExperimentReport& rep) {
  std::ostringstream out;
  out << "# spec=" << rep.spec << '\n'
      << "# pattern=" << to_string(rep.pattern) << '\n'
      << "# epsilon=" << to_string(rep.epsilon) << '\n'
      << "# horizon=" << rep.horizon << '\n'
      << "# window=" << rep.window << '\n'
      << "# n_max=" << rep.n_max << '\n';
  if (rep.certificate) {
    const auto& c = *rep.certificate;
    out << "# certified=true\n"
        << "# eps_bar=" << to_string(c.eps_bar) << '\n'
        << "# beta=" << to_string(c.beta) << '\n'
        << "# beta_exact=" << (c.beta_exact ? "true" : "false") << '\n'
        << "# delta=" << to_string(c.delta) << '\n'
        << "# n0=" << c.n0 << '\n'
        << "# n0_basis=" << to_string(c.n0_basis) << '\n'
        << "# N0=" << c.N0 << '\n'
        << "# N_certified=" << c.N << '\n';
  } else {
    out << "# certified=false\n"
        << "# refusal=" << rep.refusal.value_or("") << '\n';
  }
  out << "# empirical_N=" << (rep.empirical_N ? std::to_string(*rep.empirical_N) : "none") << '\n';
  if (rep.certificate) {
    out << "# certified_range_failures=" << detail::join_u64(rep.failures, ';') << '\n'
        << "# certified_mode_failures=" << detail::join_u64(rep.certified_mode_failures, ';') << '\n';
  }
  out << "# slack=" << (rep.slack ? std::to_string(*rep.slack) : "none") << '\n';
  write_rows_csv(out, rep.rows);
  return out.str();
}

}  // namespace frieze

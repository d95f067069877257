#pragma once

// Command-line front end. `run` is the whole program minus process plumbing, so tests
// can drive it with string vectors and capture both streams.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "frieze/certificate.hpp"
#include "frieze/density.hpp"
#include "frieze/errors.hpp"
#include "frieze/experiment.hpp"
#include "frieze/rational.hpp"
#include "frieze/scale_search.hpp"
#include "frieze/set_model.hpp"
#include "frieze/spec_expression.hpp"

namespace frieze::cli {

enum ExitCode : int {
  kSuccess = 0,
  kNegative = 1,
  kInvalidInput = 2,
  kRefused = 3,
  kCapacity = 4,
};

namespace detail {

inline ScalePattern parse_pattern(const std::string& text) { return ScalePattern(parse_integer_list(text)); }

inline Rational parse_positive(const std::string& text, const char* what) {
  Rational v = parse_rational(text);
  if (v <= 0) throw InputError(std::string(what) + " must be positive, got " + text);
  return v;
}

inline std::string join(const std::vector<std::uint64_t>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(xs[i]);
  }
  return out;
}

struct Thresholds {
  std::string zero = "1/10";
  std::string oscillation = "1/20";

  void add_to(CLI::App* cmd) {
    cmd->add_option("--zero-threshold", zero, "Density below which a set counts as likely zero")
        ->capture_default_str();
    cmd->add_option("--oscillation-threshold", oscillation, "Largest tail oscillation accepted as convergence")
        ->capture_default_str();
  }

  DensityThresholds parse() const { return {parse_rational(zero), parse_rational(oscillation)}; }
};

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Scaled-pattern search in positive-density integer sets"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::string set_text;
  std::string pattern_text;
  std::string epsilon_text;
  std::uint64_t horizon = 1000000;
  detail::Thresholds thresholds;

  auto add_set = [&](CLI::App* cmd) { cmd->add_option("--set", set_text, "Set expression")->required(); };
  auto add_pattern = [&](CLI::App* cmd) {
    cmd->add_option("--pattern", pattern_text, "Strictly increasing integers q1,q2,...")->required();
  };
  auto add_epsilon = [&](CLI::App* cmd) {
    cmd->add_option("--epsilon", epsilon_text, "Accuracy, decimal or p/q (parsed exactly)")->required();
  };
  auto add_horizon = [&](CLI::App* cmd, bool required) {
    auto* opt = cmd->add_option("--horizon", horizon, "Density horizon H");
    if (required) opt->required();
    else opt->capture_default_str();
  };

  bool two_sided = false;
  auto* density = app.add_subcommand("density", "Estimate the forward density beta");
  add_set(density);
  add_horizon(density, true);
  density->add_flag("--two-sided", two_sided, "Also report the two-sided partial density at H");
  thresholds.add_to(density);

  auto* certify = app.add_subcommand("certify", "Compute the certified threshold N");
  add_set(certify);
  add_pattern(certify);
  add_epsilon(certify);
  add_horizon(certify, true);
  thresholds.add_to(certify);

  std::uint64_t n = 0;
  std::string mode_text = "loose";
  auto* find = app.add_subcommand("find", "Find an epsilon-contained n-scale of the pattern");
  add_set(find);
  add_pattern(find);
  add_epsilon(find);
  find->add_option("--n", n, "Scale n")->required();
  find->add_option("--mode", mode_text, "certified|loose")
      ->check(CLI::IsMember({"certified", "loose"}))
      ->capture_default_str();
  add_horizon(find, false);
  thresholds.add_to(find);

  std::uint64_t from = 0;
  std::uint64_t to = 0;
  auto* scan = app.add_subcommand("scan", "Loose-mode scale search for every n in a range, as CSV");
  add_set(scan);
  add_pattern(scan);
  add_epsilon(scan);
  scan->add_option("--from", from, "First n")->required();
  scan->add_option("--to", to, "Last n")->required();

  std::uint64_t window = kDefaultWindow;
  std::uint64_t n_max = 0;
  auto* compare = app.add_subcommand("compare", "Certified vs empirical threshold report, as CSV");
  add_set(compare);
  add_pattern(compare);
  add_epsilon(compare);
  compare->add_option("--window", window, "Window W for the empirical threshold")->capture_default_str();
  add_horizon(compare, false);
  compare->add_option("--n-max", n_max, "Empirical scan limit (default: N + W, or k + 10 W when refused)");
  thresholds.add_to(compare);

  std::int64_t anchor_from = 0;
  std::int64_t anchor_to = 0;
  auto* exact = app.add_subcommand("exact", "First exact translated copy of the pattern");
  add_set(exact);
  add_pattern(exact);
  exact->add_option("--from", anchor_from, "First anchor")->required();
  exact->add_option("--to", anchor_to, "Last anchor")->required();

  std::int64_t bitmap_from = 0;
  std::uint64_t bitmap_count = 0;
  std::string bitmap_out;
  auto* bitmap = app.add_subcommand("bitmap", "Write membership bits of a set to a bitmap file");
  add_set(bitmap);
  bitmap->add_option("--from", bitmap_from, "Offset of the first bit")->required();
  bitmap->add_option("--count", bitmap_count, "Number of bits")->required();
  bitmap->add_option("--out", bitmap_out, "Output path")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kInvalidInput;
  }

  try {
    if (density->parsed()) {
      const SetSpec s = parse_spec(set_text);
      const DensityEstimate est = estimate_beta(s, horizon, thresholds.parse());
      out << "spec=" << to_expression(s) << '\n'
          << "horizon=" << est.horizon << '\n'
          << "beta=" << to_string(est.beta) << '\n'
          << "exact=" << (est.exact ? "true" : "false") << '\n'
          << "tail_oscillation=" << to_string(est.tail_oscillation) << '\n'
          << "verdict=" << to_string(est.verdict) << '\n'
          << "partial_forward_density=" << to_string(partial_forward_density(s, horizon)) << '\n';
      if (two_sided) out << "two_sided_partial_density=" << to_string(two_sided_partial_density(s, horizon)) << '\n';
      return est.verdict == DensityVerdict::LikelyZero ? kNegative : kSuccess;
    }

    if (certify->parsed()) {
      const SetSpec s = parse_spec(set_text);
      const ScalePattern pattern = detail::parse_pattern(pattern_text);
      const Rational eps = detail::parse_positive(epsilon_text, "epsilon");
      const FriezeCertificate cert = build_certificate(s, pattern, eps, horizon, thresholds.parse());
      out << to_record(cert);
      return kSuccess;
    }

    if (find->parsed()) {
      const SetSpec s = parse_spec(set_text);
      const ScalePattern pattern = detail::parse_pattern(pattern_text);
      const Rational eps = detail::parse_positive(epsilon_text, "epsilon");
      SearchMode mode = SearchMode::loose();
      if (mode_text == "certified") {
        const FriezeCertificate cert = build_certificate(s, pattern, eps, horizon, thresholds.parse());
        mode = SearchMode::certified(cert.eps_bar);
        out << "N_certified=" << cert.N << '\n';
        if (n < cert.N) err << "warning: n = " << n << " is below the certified threshold N = " << cert.N << '\n';
      }
      const ScaleResult res = find_scale(s, pattern, eps, n, mode);
      out << "n=" << res.n << '\n'
          << "mode=" << to_string(res.mode) << '\n'
          << "tolerance=" << to_string(res.tolerance) << '\n'
          << "success=" << (res.success ? "true" : "false") << '\n';
      if (res.success) {
        std::string residuals;
        for (std::size_t i = 0; i < res.residuals.size(); ++i) {
          if (i) residuals += ';';
          residuals += to_string(res.residuals[i]);
        }
        out << "r=" << detail::join(res.r) << '\n'
            << "residuals=" << residuals << '\n'
            << "max_residual=" << to_string(res.max_residual()) << '\n'
            << "verified=" << (res.verified ? "true" : "false") << '\n';
      } else if (res.failed_target) {
        out << "failed_target=" << *res.failed_target << '\n';
      }
      return res.success && res.verified ? kSuccess : kNegative;
    }

    if (scan->parsed()) {
      const SetSpec s = parse_spec(set_text);
      const ScalePattern pattern = detail::parse_pattern(pattern_text);
      const Rational eps = detail::parse_positive(epsilon_text, "epsilon");
      write_rows_csv(out, scan_rows(s, pattern, eps, from, to));
      return kSuccess;
    }

    if (compare->parsed()) {
      const SetSpec s = parse_spec(set_text);
      const ScalePattern pattern = detail::parse_pattern(pattern_text);
      const Rational eps = detail::parse_positive(epsilon_text, "epsilon");
      CompareOptions opt;
      opt.horizon = horizon;
      opt.window = window;
      opt.n_max = n_max;
      opt.thresholds = thresholds.parse();
      const ExperimentReport rep = compare_report(s, pattern, eps, opt);
      if (rep.refusal) err << "certificate refused: " << *rep.refusal << '\n';
      out << to_csv(rep);
      return kSuccess;
    }

    if (exact->parsed()) {
      const SetSpec s = parse_spec(set_text);
      const ScalePattern pattern = detail::parse_pattern(pattern_text);
      if (anchor_from > anchor_to) throw InputError("--from must not exceed --to");
      if (auto a = exact_copy_exists(s, pattern, anchor_from, anchor_to)) {
        out << "anchor=" << *a << '\n';
        return kSuccess;
      }
      out << "none\n";
      return kNegative;
    }

    if (bitmap->parsed()) {
      const SetSpec s = parse_spec(set_text);
      if (bitmap_count > kMaxWindowBits) throw CapacityError("bitmap too large", kMaxWindowBits);
      std::vector<bool> bits(bitmap_count);
      for (std::uint64_t j = 0; j < bitmap_count; ++j) {
        bits[j] = membership(s, bitmap_from + static_cast<std::int64_t>(j));
      }
      write_bitmap_file(bitmap_out, bitmap_from, bits);
      out << "wrote=" << bitmap_out << '\n' << "bits=" << bitmap_count << '\n';
      return kSuccess;
    }
  } catch (const CertificateRefused& e) {
    err << "certificate refused: " << e.what() << '\n';
    return kRefused;
  } catch (const CertificationFailure& e) {
    err << "certificate refused: " << e.what() << '\n';
    return kRefused;
  } catch (const CapacityError& e) {
    err << "capacity limit: " << e.what() << '\n';
    return kCapacity;
  } catch (const InputError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const RangeError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kInvalidInput;
  }
  return kInvalidInput;
}

}  // namespace frieze::cli

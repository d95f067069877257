#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "frieze/certificate.hpp"
#include "oracles.hpp"

using namespace frieze;

namespace {

const ScalePattern kSingle({7});
const ScalePattern kThree({0, 1, 2});

// |beta - count/n| < delta, cross-multiplied in 128-bit integers.
bool within(std::int64_t count, std::int64_t n, std::int64_t bp, std::int64_t bq, std::int64_t dp, std::int64_t dq) {
  __int128 diff = static_cast<__int128>(count) * bq - static_cast<__int128>(bp) * n;
  if (diff < 0) diff = -diff;
  return diff * dq < static_cast<__int128>(dp) * bq * n;
}

}  // namespace

TEST(ChooseEpsBar, Rules) {
  EXPECT_EQ(choose_eps_bar(Rational(3), kSingle), Rational(1));
  EXPECT_EQ(choose_eps_bar(Rational(1, 2), kSingle), Rational(1, 2));
  EXPECT_EQ(choose_eps_bar(Rational(1, 10), kThree), Rational(1, 20));
  EXPECT_EQ(choose_eps_bar(Rational(1), kThree), Rational(1, 8));
  EXPECT_EQ(choose_eps_bar(Rational(1, 10), ScalePattern({1, 4, 9})), Rational(1, 32));
  EXPECT_THROW(choose_eps_bar(Rational(0), kThree), InputError);
  EXPECT_THROW(choose_eps_bar(Rational(-1), kSingle), InputError);
  for (int e = 1; e < 50; ++e) EXPECT_LT(choose_eps_bar(Rational(e, 3), kSingle), 2);
}

TEST(ChooseDelta, WorkedValues) {
  const Rational d = choose_delta(Rational(1), Rational(1));
  EXPECT_EQ(d, Rational(1, 10));
  EXPECT_EQ((1 + d) / (1 - d), Rational(11, 9));
  EXPECT_LT(Rational(11, 9), Rational(3, 2));

  // the admissible range is delta < beta eps_bar / (4 + eps_bar) = 1/162; delta is half of it
  const Rational beta(1, 2);
  const Rational eb(1, 20);
  const Rational sup = beta * eb / (4 + eb);
  EXPECT_EQ(sup, Rational(1, 162));
  EXPECT_EQ((beta + sup) / (beta - sup), 1 + eb / 2);  // equality at the supremum
  const Rational delta = choose_delta(beta, eb);
  EXPECT_EQ(delta, Rational(1, 324));
  EXPECT_LT((beta + delta) / (beta - delta), 1 + eb / 2);

  EXPECT_THROW(choose_delta(Rational(0), Rational(1)), CertificateRefused);
}

TEST(ChooseDelta, InequalityHoldsExactlyForRandomInputs) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::int64_t bq = std::uniform_int_distribution<std::int64_t>(1, 1000000)(rng);
    const std::int64_t bp = std::uniform_int_distribution<std::int64_t>(1, bq)(rng);
    const std::int64_t eq = std::uniform_int_distribution<std::int64_t>(1, 1000000)(rng);
    const std::int64_t ep = std::uniform_int_distribution<std::int64_t>(1, 2 * eq - 1)(rng);
    const Rational beta(bp, bq);
    const Rational eb(ep, eq);
    const Rational d = choose_delta(beta, eb);
    ASSERT_GT(d, 0);
    ASSERT_LT(d, beta);
    ASSERT_LT((beta + d) / (beta - d), 1 + eb / 2);
  }
}

TEST(FindN0, EvensClosedForm) {
  const N0Result r = find_n0(SetSpec::evens(), Rational(1, 2), Rational(1, 162), 10000);
  EXPECT_EQ(r.basis, N0Basis::ClosedForm);
  EXPECT_EQ(r.n0, 82U);
  ASSERT_TRUE(r.witness);
  EXPECT_EQ(*r.witness, 81U);

  // oracle: exact scan of |1/2 - A(n)| with A(n) = ceil(n/2)/n for n <= 10^4
  std::int64_t last_bad = 0;
  for (std::int64_t n = 1; n <= 10000; ++n) {
    if (!within((n + 1) / 2, n, 1, 2, 1, 162)) last_bad = n;
  }
  EXPECT_EQ(static_cast<std::uint64_t>(last_bad + 1), r.n0);

  // the delta actually used by the evens chain
  EXPECT_EQ(find_n0(SetSpec::evens(), Rational(1, 2), Rational(1, 324), 10000).n0, 162U);
}

TEST(FindN0, IntegersStartAtOne) {
  const N0Result r = find_n0(SetSpec::integers(), Rational(1), Rational(1, 10), 1000);
  EXPECT_EQ(r.n0, 1U);
  EXPECT_FALSE(r.witness);
  EXPECT_EQ(r.basis, N0Basis::ClosedForm);
}

TEST(FindN0, BernoulliFiniteHorizonMatchesScan) {
  const SetSpec s = SetSpec::bernoulli(Rational(3, 10), 42);
  const std::int64_t h = 1000000;
  std::int64_t count = 0;
  for (std::int64_t i = 0; i < h; ++i) count += oracle::bernoulli_member(42, 3, 10, i) ? 1 : 0;
  const Rational beta{BigInt(count), BigInt(h)};

  const N0Result r = find_n0(s, beta, Rational(1, 100), h);
  EXPECT_EQ(r.basis, N0Basis::FiniteHorizon);
  EXPECT_EQ(r.horizon, static_cast<std::uint64_t>(h));

  std::int64_t running = 0;
  std::int64_t last_bad = 0;
  for (std::int64_t n = 1; n <= h; ++n) {
    running += oracle::bernoulli_member(42, 3, 10, n - 1) ? 1 : 0;
    if (!within(running, n, count, h, 1, 100)) last_bad = n;
  }
  EXPECT_EQ(r.n0, static_cast<std::uint64_t>(last_bad + 1));
  EXPECT_GT(r.n0, 1U);
}

TEST(FindN0, FailsWhenHorizonTooShort) {
  // beta far from the observed average: the condition fails at the horizon itself
  EXPECT_THROW(find_n0(SetSpec::bernoulli(Rational(1, 2), 3), Rational(9, 10), Rational(1, 100), 5000),
               CertificationFailure);
}

TEST(ComputeN0, WorkedValues) {
  EXPECT_EQ(compute_N0(1, Rational(1), Rational(1), Rational(1, 10)), 5U);
  // evens chain: max(2*162 / ((1/20)(1/2 - 1/324)), 80) = 2099520/161, floor 13040
  EXPECT_EQ(compute_N0(162, Rational(1, 20), Rational(1, 2), Rational(1, 324)), 13041U);
  EXPECT_EQ(Rational(2 * 162) / (Rational(1, 20) * (Rational(1, 2) - Rational(1, 324))), Rational(2099520, 161));
  // same formula at delta = 1/162, n0 = 82: 2*82 / ((1/20)(80/162)) = 6642
  EXPECT_EQ(compute_N0(82, Rational(1, 20), Rational(1, 2), Rational(1, 162)), 6643U);
  // the 4 / eps_bar branch binds when n0 is small
  EXPECT_EQ(compute_N0(1, Rational(1, 100), Rational(1), Rational(1, 1000)), 401U);
}

TEST(ComputeN0, AlwaysExceedsFourOverEpsBar) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const Rational eb(std::uniform_int_distribution<std::int64_t>(1, 399)(rng), 200);
    const Rational beta(std::uniform_int_distribution<std::int64_t>(1, 100)(rng), 100);
    const Rational delta = choose_delta(beta, eb);
    const std::uint64_t n0 = std::uniform_int_distribution<std::uint64_t>(1, 100000)(rng);
    const std::uint64_t n0_big = compute_N0(n0, eb, beta, delta);
    ASSERT_GT(Rational(BigInt(n0_big)) * eb, 4);
    ASSERT_GT(n0_big, n0);
  }
}

TEST(BuildCertificate, IntegersSinglePoint) {
  const FriezeCertificate c = build_certificate(SetSpec::integers(), ScalePattern({0}), Rational(1), 1000);
  EXPECT_EQ(c.eps_bar, Rational(1));
  EXPECT_EQ(c.beta, Rational(1));
  EXPECT_TRUE(c.beta_exact);
  EXPECT_EQ(c.delta, Rational(1, 10));
  EXPECT_EQ(c.n0, 1U);
  EXPECT_EQ(c.N0, 5U);
  EXPECT_EQ(c.N, 5U);
}

TEST(BuildCertificate, EvensFixture) {
  const FriezeCertificate c = build_certificate(SetSpec::evens(), kThree, Rational(1, 10), 10000);
  EXPECT_EQ(to_record(c),
            "epsilon=1/10\n"
            "eps_bar=1/20\n"
            "beta=1/2\n"
            "beta_exact=true\n"
            "delta=1/324\n"
            "n0=162\n"
            "n0_basis=ClosedForm\n"
            "n0_scan_bound=163\n"
            "n0_witness=161\n"
            "N0=13041\n"
            "k=3\n"
            "N=13041\n");
  EXPECT_TRUE(certificate_violations(c, kThree).empty());
  EXPECT_EQ(parse_record(to_record(c)), c);
}

TEST(BuildCertificate, RefusesZeroAndUnknownDensity) {
  EXPECT_THROW(build_certificate(SetSpec::primes(), ScalePattern({0, 1}), Rational(1, 10), 10000000), CertificateRefused);
  EXPECT_THROW(build_certificate(SetSpec::explicit_set({1, 2, 3}), kThree, Rational(1, 10), 1000), CertificateRefused);
  EXPECT_THROW(build_certificate(SetSpec::powers_of_two(), kSingle, Rational(1), 100000), CertificateRefused);
  try {
    build_certificate(SetSpec::primes(), kThree, Rational(1, 2), 100000);
    FAIL() << "expected refusal";
  } catch (const CertificateRefused& e) {
    EXPECT_EQ(e.verdict(), "LikelyZero");
  }
  EXPECT_THROW(build_certificate(SetSpec::evens(), kThree, Rational(0), 10000), InputError);
}

TEST(BuildCertificate, BernoulliRecordsFiniteBasis) {
  const FriezeCertificate c =
      build_certificate(SetSpec::bernoulli(Rational(3, 10), 42), kThree, Rational(1, 10), 1000000);
  EXPECT_FALSE(c.beta_exact);
  EXPECT_EQ(c.n0_basis, N0Basis::FiniteHorizon);
  EXPECT_NE(to_record(c).find("n0_basis=FiniteHorizon(1000000)"), std::string::npos);
  EXPECT_TRUE(certificate_violations(c, kThree).empty());
  EXPECT_EQ(parse_record(to_record(c)), c);
}

TEST(CertificateProperties, ChainOrderingAndConvergenceOnRecord) {
  std::mt19937_64 rng(77);
  const std::vector<ScalePattern> patterns{ScalePattern({0}), ScalePattern({0, 1}), ScalePattern({0, 1, 2}),
                                           ScalePattern({1, 4, 9}), ScalePattern({-3, 0, 10, 11})};
  for (int trial = 0; trial < 40; ++trial) {
    const std::int64_t m = std::uniform_int_distribution<std::int64_t>(1, 12)(rng);
    std::vector<std::int64_t> rs;
    for (std::int64_t r = 0; r < m; ++r) {
      if (rng() % 2) rs.push_back(r);
    }
    if (rs.empty()) rs.push_back(0);
    const SetSpec s = SetSpec::residue_classes(m, rs);
    const ScalePattern& pattern = patterns[rng() % patterns.size()];
    const Rational eps(std::uniform_int_distribution<std::int64_t>(1, 20)(rng), 20);
    const FriezeCertificate c = build_certificate(s, pattern, eps, 10000);

    ASSERT_TRUE(certificate_violations(c, pattern).empty());
    ASSERT_GT(c.N0, c.n0);
    ASSERT_GE(c.N, c.k);
    ASSERT_GE(c.N, c.N0);
    ASSERT_LT(c.eps_bar, 2);
    if (pattern.k() > 1) {
      ASSERT_LT(c.eps_bar, eps);
      ASSERT_LT(c.eps_bar, Rational(BigInt(1), 2 * BigInt(pattern.span())));
    }

    // |beta - A(n)| < delta on [n0, n0 + 10^4]
    const std::uint64_t hi = c.n0 + 10000;
    const ObserverWindow w = observer_window(s, hi);
    for (std::uint64_t n = c.n0; n <= hi; ++n) {
      ASSERT_LT(abs_of(c.beta - birkhoff_average(w, n)), c.delta) << n;
    }
    // minimality: n0 - 1 fails at the recorded witness
    if (c.n0 > 1) {
      ASSERT_TRUE(c.n0_witness);
      ASSERT_EQ(*c.n0_witness, c.n0 - 1);
      ASSERT_GE(abs_of(c.beta - birkhoff_average(w, *c.n0_witness)), c.delta);
    }
  }
}

TEST(CertificateRecord, RejectsUnknownFields) {
  EXPECT_THROW(parse_record("bogus=1\n"), InputError);
  EXPECT_THROW(parse_record("n0=abc\n"), InputError);
  EXPECT_THROW(parse_record("no equals sign\n"), InputError);
}

TEST(ScalePatternType, Validation) {
  EXPECT_THROW(ScalePattern({}), InputError);
  EXPECT_THROW(ScalePattern({1, 1}), InputError);
  EXPECT_THROW(ScalePattern({2, 1}), InputError);
  EXPECT_EQ(ScalePattern({1, 4, 9}).span(), 8);
  EXPECT_EQ(ScalePattern({5}).k(), 1U);
}

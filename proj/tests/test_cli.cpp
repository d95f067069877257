#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>

#include "frieze/cli.hpp"

using namespace frieze;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string random_expression(std::mt19937_64& rng, int depth) {
  const int pick = static_cast<int>(rng() % (depth > 0 ? 10 : 6));
  switch (pick) {
    case 0: {
      const std::int64_t m = std::uniform_int_distribution<std::int64_t>(1, 9)(rng);
      return "residue(" + std::to_string(m) + ";" + std::to_string(rng() % m) + ")";
    }
    case 1:
      return "ap(" + std::to_string(static_cast<int>(rng() % 21) - 10) + ";" + std::to_string(rng() % 7 + 1) + ")";
    case 2:
      return "explicit[" + std::to_string(rng() % 5) + "," + std::to_string(rng() % 50 + 5) + "]";
    case 3:
      return "bernoulli(" + std::to_string(rng() % 10) + "/10;" + std::to_string(rng() % 1000) + ")";
    case 4:
      return "primes";
    case 5:
      return "pow2";
    case 6:
      return "union(" + random_expression(rng, depth - 1) + "," + random_expression(rng, depth - 1) + ")";
    case 7:
      return "inter(" + random_expression(rng, depth - 1) + "," + random_expression(rng, depth - 1) + ")";
    default:
      return "diff(" + random_expression(rng, depth - 1) + "," + random_expression(rng, depth - 1) + ")";
  }
}

}  // namespace

TEST(SpecExpression, Examples) {
  EXPECT_EQ(parse_spec("residue(2;0)"), SetSpec::evens());
  EXPECT_EQ(parse_spec(" residue( 2 ; 0 ) "), SetSpec::evens());
  EXPECT_EQ(parse_spec("explicit[]"), SetSpec::explicit_set({}));
  const SetSpec half = parse_spec("union(residue(4;0),residue(4;1))");
  EXPECT_EQ(closed_form_beta(half), Rational(1, 2));
  EXPECT_EQ(parse_spec("bernoulli(0.3;42)"), SetSpec::bernoulli(Rational(3, 10), 42));
  EXPECT_EQ(parse_spec("ap(-1;5)"), SetSpec::arithmetic_progression(-1, 5));
}

TEST(SpecExpression, Errors) {
  for (const char* bad : {"", "residue(2;", "residue(0;0)", "residue(2;2)", "bernoulli(1.5;1)", "primes()", "widget",
                          "union(primes)", "explicit[1,,2]", "file(\"unterminated)", "pow2 pow2"}) {
    EXPECT_THROW(parse_spec(bad), InputError) << bad;
  }
  try {
    parse_spec("union(primes,@)");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("13"), std::string::npos) << e.what();
  }
}

TEST(SpecExpression, RoundTrip) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 500; ++trial) {
    const std::string text = random_expression(rng, 3);
    const SetSpec s = parse_spec(text);
    const std::string printed = to_expression(s);
    ASSERT_EQ(parse_spec(printed), s) << text;
    ASSERT_EQ(to_expression(parse_spec(printed)), printed);
  }
}

TEST(Cli, FindExamples) {
  const Outcome a = run_cli({"find", "--set", "residue(2;0)", "--pattern", "0,1,2", "--epsilon", "0.1", "--n", "100",
                             "--mode", "loose"});
  EXPECT_EQ(a.code, 0) << a.err;
  EXPECT_NE(a.out.find("r=0;50;100\n"), std::string::npos);
  EXPECT_NE(a.out.find("verified=true\n"), std::string::npos);

  const Outcome b =
      run_cli({"find", "--set", "residue(2;0)", "--pattern", "0,1", "--epsilon", "0.1", "--n", "5", "--mode", "loose"});
  EXPECT_EQ(b.code, 1);
  EXPECT_NE(b.out.find("success=false\n"), std::string::npos);

  const Outcome c = run_cli({"find", "--set", "residue(2;0)", "--pattern", "0,1,2", "--epsilon", "1/10", "--n",
                             "20000", "--mode", "certified", "--horizon", "10000"});
  EXPECT_EQ(c.code, 0) << c.err;
  EXPECT_NE(c.out.find("N_certified=13041\n"), std::string::npos);
  EXPECT_NE(c.out.find("tolerance=1/20\n"), std::string::npos);
}

TEST(Cli, CertifyExamples) {
  const Outcome p = run_cli({"certify", "--set", "primes", "--pattern", "0,1", "--epsilon", "0.1", "--horizon",
                             "10000000"});
  EXPECT_EQ(p.code, 3);
  EXPECT_TRUE(p.out.empty());
  EXPECT_NE(p.err.find("certificate refused"), std::string::npos);

  const Outcome e = run_cli({"certify", "--set", "residue(2;0)", "--pattern", "0,1,2", "--epsilon", "0.1", "--horizon",
                             "10000"});
  EXPECT_EQ(e.code, 0);
  EXPECT_EQ(parse_record(e.out).N, 13041U);
}

TEST(Cli, DensityAndExact) {
  const Outcome d = run_cli({"density", "--set", "residue(2;0)", "--horizon", "1000", "--two-sided"});
  EXPECT_EQ(d.code, 0);
  EXPECT_NE(d.out.find("beta=1/2\nexact=true\n"), std::string::npos);
  EXPECT_NE(d.out.find("partial_forward_density=501/1001\n"), std::string::npos);
  EXPECT_NE(d.out.find("two_sided_partial_density=1001/2001\n"), std::string::npos);
  EXPECT_EQ(run_cli({"density", "--set", "pow2", "--horizon", "100000"}).code, 1);

  const Outcome none = run_cli({"exact", "--set", "residue(2;0)", "--pattern", "0,1", "--from", "0", "--to", "10000"});
  EXPECT_EQ(none.code, 1);
  EXPECT_EQ(none.out, "none\n");
  const Outcome found = run_cli({"exact", "--set", "residue(2;0)", "--pattern", "0,2,4", "--from", "1", "--to", "9"});
  EXPECT_EQ(found.code, 0);
  EXPECT_EQ(found.out, "anchor=2\n");
}

TEST(Cli, ScanCsv) {
  const Outcome s =
      run_cli({"scan", "--set", "residue(2;0)", "--pattern", "0,1", "--epsilon", "1/10", "--from", "2", "--to", "5"});
  EXPECT_EQ(s.code, 0);
  EXPECT_EQ(s.out, std::string(kCsvHeader) + "\n2,1,0;2,0,1\n3,0,,,\n4,1,0;4,0,1\n5,0,,,\n");
}

TEST(Cli, InvalidInputExitsTwo) {
  const std::vector<std::vector<std::string>> cases{
      {"find", "--set", "residue(2;0)", "--pattern", "0,2,1", "--epsilon", "0.1", "--n", "10"},
      {"find", "--set", "residue(2;0)", "--pattern", "0,0", "--epsilon", "0.1", "--n", "10"},
      {"find", "--set", "residue(2;0)", "--pattern", "0,x", "--epsilon", "0.1", "--n", "10"},
      {"find", "--set", "residue(2;", "--pattern", "0,1", "--epsilon", "0.1", "--n", "10"},
      {"find", "--set", "residue(2;0)", "--pattern", "0,1", "--epsilon", "-1", "--n", "10"},
      {"find", "--set", "residue(2;0)", "--pattern", "0,1,2", "--epsilon", "0.1", "--n", "2"},
      {"find", "--set", "residue(2;0)", "--pattern", "0,1", "--epsilon", "0.1", "--n", "10", "--mode", "fast"},
      {"scan", "--set", "primes", "--pattern", "0,1", "--epsilon", "0.1", "--from", "9", "--to", "3"},
      {"density", "--set", "primes"},
      {"nonsense"},
      {},
  };
  for (const auto& args : cases) {
    const Outcome o = run_cli(args);
    EXPECT_EQ(o.code, 2) << (args.empty() ? "" : args[0]) << ' ' << o.err;
    EXPECT_FALSE(o.err.empty());
  }
}

TEST(Cli, CapacityExitsFour) {
  const Outcome o = run_cli({"density", "--set", "primes", "--horizon", "9000000000"});
  EXPECT_EQ(o.code, 4) << o.err;
}

TEST(Cli, CompareIsDeterministic) {
  const std::vector<std::string> args{"compare", "--set",    "bernoulli(0.3;42)", "--pattern", "0,1,2", "--epsilon",
                                      "0.3",     "--window", "100",               "--horizon", "100000"};
  const Outcome a = run_cli(args);
  const Outcome b = run_cli(args);
  EXPECT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.err, b.err);
  EXPECT_NE(a.out.find("# certified=true\n"), std::string::npos);
}

TEST(Cli, BitmapRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "frieze_cli_bitmap_test.bin";
  const Outcome w =
      run_cli({"bitmap", "--set", "primes", "--from", "0", "--count", "1000", "--out", path.string()});
  ASSERT_EQ(w.code, 0) << w.err;
  const SetSpec f = parse_spec("file(\"" + path.string() + "\")");
  for (std::int64_t i = 0; i < 1000; ++i) ASSERT_EQ(membership(f, i), membership(SetSpec::primes(), i)) << i;
  std::filesystem::remove(path);
}

TEST(Cli, BinaryExitCodes) {
  auto status = [](const std::string& args) {
    const std::string cmd = std::string(FRIEZE_TOOL_PATH) + " " + args + " >/dev/null 2>&1";
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  EXPECT_EQ(status("find --set 'residue(2;0)' --pattern 0,1,2 --epsilon 0.1 --n 100 --mode loose"), 0);
  EXPECT_EQ(status("find --set 'residue(2;0)' --pattern 0,1 --epsilon 0.1 --n 5 --mode loose"), 1);
  EXPECT_EQ(status("find --set 'residue(2;0)' --pattern 2,1 --epsilon 0.1 --n 5"), 2);
  EXPECT_EQ(status("certify --set primes --pattern 0,1 --epsilon 0.1 --horizon 100000"), 3);
}

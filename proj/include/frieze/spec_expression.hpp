#pragma once

// Textual set expressions:
//
//   E := residue(m; r1,r2,...) | ap(a; d) | explicit[n1,n2,...] | bernoulli(p; seed)
//      | primes | pow2 | file("path") | union(E,E) | inter(E,E) | diff(E,E)
//
// Whitespace between tokens is ignored. p accepts decimals and fractions, parsed exactly.

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "frieze/errors.hpp"
#include "frieze/rational.hpp"
#include "frieze/set_model.hpp"

namespace frieze {

namespace detail {

class SpecParser {
 public:
  explicit SpecParser(std::string_view text) : text_(text) {}

  SetSpec parse_all() {
    SetSpec s = expression();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return s;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw InputError("syntax error at position " + std::to_string(pos_) + ": " + what);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_space();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  void expect(char c) {
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string identifier() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    if (start == pos_) fail("expected a set expression");
    return std::string(text_.substr(start, pos_ - start));
  }

  // Numeric token: digits, sign, '.', '/', exponent.
  std::string number_token() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.' || c == '/' || c == 'e' ||
          c == 'E') {
        ++pos_;
      } else {
        break;
      }
    }
    if (start == pos_) fail("expected a number");
    token_start_ = start;
    return std::string(text_.substr(start, pos_ - start));
  }

  std::int64_t integer() {
    const std::string tok = number_token();
    const Rational v = rational_from(tok);
    if (denominator_of(v) != 1) fail_at(token_start_, "expected an integer, got '" + tok + "'");
    const BigInt num = numerator_of(v);
    if (num > BigInt(INT64_MAX) || num < BigInt(INT64_MIN)) fail_at(token_start_, "integer out of range: " + tok);
    return num.convert_to<std::int64_t>();
  }

  std::uint64_t unsigned_integer() {
    const std::string tok = number_token();
    const Rational v = rational_from(tok);
    if (denominator_of(v) != 1 || v < 0) fail_at(token_start_, "expected a nonnegative integer, got '" + tok + "'");
    const BigInt num = numerator_of(v);
    if (num > BigInt(UINT64_MAX)) fail_at(token_start_, "integer out of range: " + tok);
    return num.convert_to<std::uint64_t>();
  }

  Rational rational_from(const std::string& tok) {
    try {
      return parse_rational(tok);
    } catch (const InputError& e) {
      fail_at(token_start_, e.what());
    }
  }

  [[noreturn]] void fail_at(std::size_t at, const std::string& what) const {
    throw InputError("syntax error at position " + std::to_string(at) + ": " + what);
  }

  std::vector<std::int64_t> integer_list(char close) {
    std::vector<std::int64_t> out;
    if (peek(close)) return out;
    out.push_back(integer());
    while (peek(',')) {
      ++pos_;
      out.push_back(integer());
    }
    return out;
  }

  std::string quoted() {
    expect('"');
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != '"') ++pos_;
    if (pos_ >= text_.size()) fail("unterminated string");
    std::string s(text_.substr(start, pos_ - start));
    ++pos_;
    return s;
  }

  SetSpec expression() {
    const std::size_t at = (skip_space(), pos_);
    const std::string name = identifier();
    try {
      if (name == "primes") return SetSpec::primes();
      if (name == "pow2") return SetSpec::powers_of_two();
      if (name == "explicit") {
        expect('[');
        auto elems = integer_list(']');
        expect(']');
        return SetSpec::explicit_set(std::move(elems));
      }
      if (name == "residue") {
        expect('(');
        const std::int64_t m = integer();
        expect(';');
        auto residues = integer_list(')');
        expect(')');
        return SetSpec::residue_classes(m, std::move(residues));
      }
      if (name == "ap") {
        expect('(');
        const std::int64_t a = integer();
        expect(';');
        const std::int64_t d = integer();
        expect(')');
        return SetSpec::arithmetic_progression(a, d);
      }
      if (name == "bernoulli") {
        expect('(');
        const std::string tok = number_token();
        const Rational p = rational_from(tok);
        expect(';');
        const std::uint64_t seed = unsigned_integer();
        expect(')');
        return SetSpec::bernoulli(p, seed);
      }
      if (name == "file") {
        expect('(');
        const std::string path = quoted();
        expect(')');
        return SetSpec::bitmap_file(path);
      }
      if (name == "union" || name == "inter" || name == "diff") {
        expect('(');
        SetSpec left = expression();
        expect(',');
        SetSpec right = expression();
        expect(')');
        if (name == "union") return SetSpec::unite(std::move(left), std::move(right));
        if (name == "inter") return SetSpec::intersect(std::move(left), std::move(right));
        return SetSpec::difference(std::move(left), std::move(right));
      }
    } catch (const InputError& e) {
      const std::string what = e.what();
      if (what.rfind("syntax error", 0) == 0) throw;
      throw InputError("invalid '" + name + "' expression at position " + std::to_string(at) + ": " + what);
    }
    fail_at(at, "unknown set '" + name + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t token_start_ = 0;
};

}  // namespace detail

inline SetSpec parse_spec(std::string_view text) { return detail::SpecParser(text).parse_all(); }

inline std::string to_expression(const SetSpec& s) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        auto join = [](const std::vector<std::int64_t>& xs) {
          std::string out;
          for (std::size_t i = 0; i < xs.size(); ++i) {
            if (i) out += ',';
            out += std::to_string(xs[i]);
          }
          return out;
        };
        if constexpr (std::is_same_v<T, spec::Explicit>) {
          return "explicit[" + join(v.elements) + "]";
        } else if constexpr (std::is_same_v<T, spec::ResidueClasses>) {
          return "residue(" + std::to_string(v.modulus) + ";" + join(v.residues) + ")";
        } else if constexpr (std::is_same_v<T, spec::ArithmeticProgression>) {
          return "ap(" + std::to_string(v.anchor) + ";" + std::to_string(v.difference) + ")";
        } else if constexpr (std::is_same_v<T, spec::Union>) {
          return "union(" + to_expression(v.left) + "," + to_expression(v.right) + ")";
        } else if constexpr (std::is_same_v<T, spec::Intersection>) {
          return "inter(" + to_expression(v.left) + "," + to_expression(v.right) + ")";
        } else if constexpr (std::is_same_v<T, spec::Difference>) {
          return "diff(" + to_expression(v.left) + "," + to_expression(v.right) + ")";
        } else if constexpr (std::is_same_v<T, spec::Bernoulli>) {
          return "bernoulli(" + to_string(v.p) + ";" + std::to_string(v.seed) + ")";
        } else if constexpr (std::is_same_v<T, spec::Primes>) {
          return "primes";
        } else if constexpr (std::is_same_v<T, spec::PowersOfTwo>) {
          return "pow2";
        } else {
          return "file(\"" + v.path + "\")";
        }
      },
      s.node().value);
}

// "q1,q2,..." with strictly increasing integers.
inline std::vector<std::int64_t> parse_integer_list(std::string_view text) {
  std::vector<std::int64_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    std::string_view item = text.substr(start, comma - start);
    const Rational v = parse_rational(item);
    if (denominator_of(v) != 1) throw InputError("expected an integer, got '" + std::string(item) + "'");
    const BigInt num = numerator_of(v);
    if (num > BigInt(INT64_MAX) || num < BigInt(INT64_MIN)) throw InputError("integer out of range: '" + std::string(item) + "'");
    out.push_back(num.convert_to<std::int64_t>());
    start = comma + 1;
  }
  return out;
}

}  // namespace frieze

#pragma once

// Constructive models of integer sets, their observer sequences x_0..x_n
// (x_i = 1 iff i is a member) and the cylinder indicator 1_Gamma(sigma^i x) = x_i.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "frieze/errors.hpp"
#include "frieze/rational.hpp"

namespace frieze {

// Largest observer window (in bits) materialized in memory.
inline constexpr std::uint64_t kMaxWindowBits = std::uint64_t{1} << 32;

class SetSpec;

namespace spec {

struct Explicit {
  std::vector<std::int64_t> elements;  // strictly increasing
};

struct ResidueClasses {
  std::int64_t modulus;
  std::vector<std::int64_t> residues;  // sorted, distinct, each in [0, modulus)
};

// Two-sided progression {anchor + j * difference : j in Z}.
struct ArithmeticProgression {
  std::int64_t anchor;
  std::int64_t difference;
};

struct Union;
struct Intersection;
struct Difference;

struct Bernoulli {
  Rational p;
  std::uint64_t seed;
  // ceil(p * 2^53): a 53-bit draw u53 is a member iff u53 < threshold.
  std::uint64_t threshold;
};

struct Primes {};
struct PowersOfTwo {};

struct BitmapFile {
  std::string path;
  std::int64_t offset;
  std::uint64_t bit_count;
  std::shared_ptr<const std::vector<std::uint8_t>> payload;
};

}  // namespace spec

// Immutable, cheaply copyable handle to a set model.
class SetSpec {
 public:
  struct Node;

  static SetSpec explicit_set(std::vector<std::int64_t> elements);
  static SetSpec residue_classes(std::int64_t modulus, std::vector<std::int64_t> residues);
  static SetSpec arithmetic_progression(std::int64_t anchor, std::int64_t difference);
  static SetSpec unite(SetSpec left, SetSpec right);
  static SetSpec intersect(SetSpec left, SetSpec right);
  static SetSpec difference(SetSpec left, SetSpec right);
  static SetSpec bernoulli(Rational p, std::uint64_t seed);
  static SetSpec primes();
  static SetSpec powers_of_two();
  static SetSpec bitmap_file(const std::string& path);

  static SetSpec integers() { return residue_classes(1, {0}); }
  static SetSpec evens() { return residue_classes(2, {0}); }

  const Node& node() const { return *node_; }

  friend bool operator==(const SetSpec& a, const SetSpec& b);

 private:
  explicit SetSpec(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

namespace spec {

struct Union {
  SetSpec left, right;
};
struct Intersection {
  SetSpec left, right;
};
struct Difference {
  SetSpec left, right;
};

}  // namespace spec

struct SetSpec::Node {
  std::variant<spec::Explicit, spec::ResidueClasses, spec::ArithmeticProgression, spec::Union,
               spec::Intersection, spec::Difference, spec::Bernoulli, spec::Primes,
               spec::PowersOfTwo, spec::BitmapFile>
      value;
};

inline SetSpec SetSpec::explicit_set(std::vector<std::int64_t> elements) {
  for (std::size_t i = 1; i < elements.size(); ++i) {
    if (elements[i - 1] >= elements[i]) {
      throw InputError("explicit set elements must be strictly increasing");
    }
  }
  return SetSpec(std::make_shared<const Node>(Node{spec::Explicit{std::move(elements)}}));
}

inline SetSpec SetSpec::residue_classes(std::int64_t modulus, std::vector<std::int64_t> residues) {
  if (modulus < 1) throw InputError("residue modulus must be >= 1");
  if (residues.empty()) throw InputError("residue list must be nonempty");
  for (auto r : residues) {
    if (r < 0 || r >= modulus) {
      throw InputError("residue " + std::to_string(r) + " out of range [0, " +
                       std::to_string(modulus) + ")");
    }
  }
  std::sort(residues.begin(), residues.end());
  residues.erase(std::unique(residues.begin(), residues.end()), residues.end());
  return SetSpec(std::make_shared<const Node>(Node{spec::ResidueClasses{modulus, std::move(residues)}}));
}

inline SetSpec SetSpec::arithmetic_progression(std::int64_t anchor, std::int64_t difference) {
  if (difference < 1) throw InputError("progression difference must be >= 1");
  return SetSpec(std::make_shared<const Node>(Node{spec::ArithmeticProgression{anchor, difference}}));
}

inline SetSpec SetSpec::unite(SetSpec left, SetSpec right) {
  return SetSpec(std::make_shared<const Node>(Node{spec::Union{std::move(left), std::move(right)}}));
}

inline SetSpec SetSpec::intersect(SetSpec left, SetSpec right) {
  return SetSpec(std::make_shared<const Node>(Node{spec::Intersection{std::move(left), std::move(right)}}));
}

inline SetSpec SetSpec::difference(SetSpec left, SetSpec right) {
  return SetSpec(std::make_shared<const Node>(Node{spec::Difference{std::move(left), std::move(right)}}));
}

inline SetSpec SetSpec::bernoulli(Rational p, std::uint64_t seed) {
  if (p < 0 || p > 1) throw InputError("bernoulli probability must lie in [0, 1], got " + to_string(p));
  const BigInt scaled = ceil_of(p * Rational(BigInt(1) << 53));
  const auto threshold = scaled.convert_to<std::uint64_t>();
  return SetSpec(std::make_shared<const Node>(Node{spec::Bernoulli{std::move(p), seed, threshold}}));
}

inline SetSpec SetSpec::primes() { return SetSpec(std::make_shared<const Node>(Node{spec::Primes{}})); }

inline SetSpec SetSpec::powers_of_two() {
  return SetSpec(std::make_shared<const Node>(Node{spec::PowersOfTwo{}}));
}

namespace detail {

inline bool node_equal(const SetSpec::Node& a, const SetSpec::Node& b);

}  // namespace detail

inline bool operator==(const SetSpec& a, const SetSpec& b) {
  return a.node_ == b.node_ || detail::node_equal(*a.node_, *b.node_);
}

namespace detail {

inline bool node_equal(const SetSpec::Node& a, const SetSpec::Node& b) {
  if (a.value.index() != b.value.index()) return false;
  return std::visit(
      [&](const auto& lhs) -> bool {
        using T = std::decay_t<decltype(lhs)>;
        const auto& rhs = std::get<T>(b.value);
        if constexpr (std::is_same_v<T, spec::Explicit>) {
          return lhs.elements == rhs.elements;
        } else if constexpr (std::is_same_v<T, spec::ResidueClasses>) {
          return lhs.modulus == rhs.modulus && lhs.residues == rhs.residues;
        } else if constexpr (std::is_same_v<T, spec::ArithmeticProgression>) {
          return lhs.anchor == rhs.anchor && lhs.difference == rhs.difference;
        } else if constexpr (std::is_same_v<T, spec::Union> || std::is_same_v<T, spec::Intersection> ||
                             std::is_same_v<T, spec::Difference>) {
          return lhs.left == rhs.left && lhs.right == rhs.right;
        } else if constexpr (std::is_same_v<T, spec::Bernoulli>) {
          return lhs.p == rhs.p && lhs.seed == rhs.seed;
        } else if constexpr (std::is_same_v<T, spec::BitmapFile>) {
          return lhs.path == rhs.path && lhs.offset == rhs.offset && *lhs.payload == *rhs.payload;
        } else {
          return true;
        }
      },
      a.value);
}

// Floor modulo for a positive modulus.
inline std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return result;
}

// Deterministic Miller-Rabin; the first twelve prime bases suffice below 2^64.
inline bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  static constexpr std::array<std::uint64_t, 12> kBases{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (auto p : kBases) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (auto a : kBases) {
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

inline std::uint64_t splitmix64_finalize(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

// Top 53 bits of the counter hash for (seed, i); u = result / 2^53 lies in [0, 1).
inline std::uint64_t bernoulli_draw(std::uint64_t seed, std::int64_t i) {
  const std::uint64_t z = seed ^ (static_cast<std::uint64_t>(i) * 0x9E3779B97F4A7C15ULL);
  return splitmix64_finalize(z) >> 11;
}

inline std::uint32_t read_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint64_t read_u64_le(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int b = 7; b >= 0; --b) v = (v << 8) | p[b];
  return v;
}

}  // namespace detail

inline constexpr std::array<char, 4> kBitmapMagic{'F', 'R', 'Z', 'B'};
inline constexpr std::uint32_t kBitmapVersion = 1;
inline constexpr std::size_t kBitmapHeaderSize = 16;

inline SetSpec SetSpec::bitmap_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open bitmap file '" + path + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < kBitmapHeaderSize) throw InputError("bitmap file '" + path + "' is shorter than its header");
  if (!std::equal(kBitmapMagic.begin(), kBitmapMagic.end(), bytes.begin())) {
    throw InputError("bitmap file '" + path + "' has a bad magic number");
  }
  if (const auto version = detail::read_u32_le(bytes.data() + 4); version != kBitmapVersion) {
    throw InputError("bitmap file '" + path + "' has unsupported version " + std::to_string(version));
  }
  const auto offset = static_cast<std::int64_t>(detail::read_u64_le(bytes.data() + 8));
  auto payload = std::make_shared<std::vector<std::uint8_t>>(bytes.begin() + kBitmapHeaderSize, bytes.end());
  const std::uint64_t bit_count = static_cast<std::uint64_t>(payload->size()) * 8;
  return SetSpec(std::make_shared<const Node>(
      Node{spec::BitmapFile{path, offset, bit_count, std::move(payload)}}));
}

// x_i for the observer sequence of `s`. Pure and deterministic; negative i allowed.
inline bool membership(const SetSpec& s, std::int64_t i) {
  return std::visit(
      [i](const auto& v) -> bool {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, spec::Explicit>) {
          return std::binary_search(v.elements.begin(), v.elements.end(), i);
        } else if constexpr (std::is_same_v<T, spec::ResidueClasses>) {
          return std::binary_search(v.residues.begin(), v.residues.end(), detail::floor_mod(i, v.modulus));
        } else if constexpr (std::is_same_v<T, spec::ArithmeticProgression>) {
          // compare residues separately to avoid overflow in i - anchor
          return detail::floor_mod(i, v.difference) == detail::floor_mod(v.anchor, v.difference);
        } else if constexpr (std::is_same_v<T, spec::Union>) {
          return membership(v.left, i) || membership(v.right, i);
        } else if constexpr (std::is_same_v<T, spec::Intersection>) {
          return membership(v.left, i) && membership(v.right, i);
        } else if constexpr (std::is_same_v<T, spec::Difference>) {
          return membership(v.left, i) && !membership(v.right, i);
        } else if constexpr (std::is_same_v<T, spec::Bernoulli>) {
          return detail::bernoulli_draw(v.seed, i) < v.threshold;
        } else if constexpr (std::is_same_v<T, spec::Primes>) {
          return i >= 2 && detail::is_prime_u64(static_cast<std::uint64_t>(i));
        } else if constexpr (std::is_same_v<T, spec::PowersOfTwo>) {
          return i >= 1 && std::has_single_bit(static_cast<std::uint64_t>(i));
        } else {
          static_assert(std::is_same_v<T, spec::BitmapFile>);
          if (i < v.offset) return false;
          const auto j = static_cast<std::uint64_t>(i) - static_cast<std::uint64_t>(v.offset);
          if (j >= v.bit_count) return false;
          return ((*v.payload)[j >> 3] >> (j & 7)) & 1U;
        }
      },
      s.node().value);
}

// Finite prefix x_0..x_n of an observer sequence, with O(1) prefix counts.
class ObserverWindow {
 public:
  ObserverWindow() = default;

  // `length` bits, all zero.
  explicit ObserverWindow(std::uint64_t length)
      : length_(length), words_((length + 63) / 64, 0) {}

  static ObserverWindow from_bits(const std::vector<bool>& bits) {
    ObserverWindow w(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (bits[i]) w.set(i);
    }
    w.finalize();
    return w;
  }

  std::int64_t start() const noexcept { return 0; }
  std::uint64_t size() const noexcept { return length_; }
  // Largest n covered, i.e. size() - 1.
  std::uint64_t last_index() const noexcept { return length_ - 1; }

  bool bit(std::uint64_t i) const {
    if (i >= length_) {
      throw RangeError("index " + std::to_string(i) + " outside observer window of length " +
                       std::to_string(length_));
    }
    return test(i);
  }

  // Number of set bits among indices [0, n). n may equal size().
  std::uint64_t count_prefix(std::uint64_t n) const {
    if (n > length_) {
      throw RangeError("prefix " + std::to_string(n) + " exceeds observer window of length " +
                       std::to_string(length_));
    }
    const std::uint64_t word = n >> 6;
    std::uint64_t c = word < cumulative_.size() ? cumulative_[word] : total_;
    if (const unsigned rem = n & 63; rem != 0) {
      c += static_cast<std::uint64_t>(std::popcount(words_[word] & ((std::uint64_t{1} << rem) - 1)));
    }
    return c;
  }

  std::uint64_t popcount() const noexcept { return total_; }

  // Smallest set index >= from, or size() if none.
  std::uint64_t next_set(std::uint64_t from) const noexcept {
    if (from >= length_) return length_;
    std::uint64_t word = from >> 6;
    std::uint64_t bits = words_[word] & (~std::uint64_t{0} << (from & 63));
    while (bits == 0) {
      if (++word >= words_.size()) return length_;
      bits = words_[word];
    }
    const std::uint64_t idx = (word << 6) + static_cast<std::uint64_t>(std::countr_zero(bits));
    return idx < length_ ? idx : length_;
  }

  // Largest set index <= from, or -1 if none.
  std::int64_t prev_set(std::int64_t from) const noexcept {
    if (from < 0) return -1;
    auto f = static_cast<std::uint64_t>(from);
    if (f >= length_) f = length_ - 1;
    std::int64_t word = static_cast<std::int64_t>(f >> 6);
    const unsigned shift = 63 - static_cast<unsigned>(f & 63);
    std::uint64_t bits = words_[static_cast<std::size_t>(word)] & (~std::uint64_t{0} >> shift);
    while (bits == 0) {
      if (--word < 0) return -1;
      bits = words_[static_cast<std::size_t>(word)];
    }
    return (word << 6) + 63 - std::countl_zero(bits);
  }

  std::span<const std::uint64_t> words() const noexcept { return words_; }

  friend bool operator==(const ObserverWindow& a, const ObserverWindow& b) {
    return a.length_ == b.length_ && a.words_ == b.words_;
  }

  // Builder interface; finalize() must run before counting queries.
  void set(std::uint64_t i) noexcept { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  std::span<std::uint64_t> mutable_words() noexcept { return words_; }

  void finalize() {
    if (const unsigned rem = length_ & 63; rem != 0 && !words_.empty()) {
      words_.back() &= (std::uint64_t{1} << rem) - 1;
    }
    cumulative_.resize(words_.size());
    std::uint64_t running = 0;
    for (std::size_t w = 0; w < words_.size(); ++w) {
      cumulative_[w] = running;
      running += static_cast<std::uint64_t>(std::popcount(words_[w]));
    }
    total_ = running;
  }

 private:
  bool test(std::uint64_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1U; }

  std::uint64_t length_ = 0;
  std::vector<std::uint64_t> words_;
  std::vector<std::uint64_t> cumulative_;
  std::uint64_t total_ = 0;
};

namespace detail {

// Sets bits of the odd primes and 2 in [0, n] with a segmented sieve of Eratosthenes.
inline void sieve_primes_into(ObserverWindow& w, std::uint64_t n) {
  if (n < 2) return;
  const auto root = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(n))) + 1;
  std::vector<std::uint8_t> small(root + 1, 1);
  std::vector<std::uint64_t> base;
  for (std::uint64_t p = 2; p <= root; ++p) {
    if (!small[p]) continue;
    if (p * p <= n) base.push_back(p);
    for (std::uint64_t q = p * p; q <= root; q += p) small[q] = 0;
  }

  constexpr std::uint64_t kSegment = std::uint64_t{1} << 18;
  std::vector<std::uint8_t> seg(kSegment);
  for (std::uint64_t lo = 0; lo <= n; lo += kSegment) {
    const std::uint64_t hi = std::min(n, lo + kSegment - 1);
    std::fill(seg.begin(), seg.begin() + static_cast<std::ptrdiff_t>(hi - lo + 1), 1);
    for (auto p : base) {
      if (p * p > hi) break;
      std::uint64_t start = std::max(p * p, (lo + p - 1) / p * p);
      for (std::uint64_t q = start; q <= hi; q += p) seg[q - lo] = 0;
    }
    for (std::uint64_t i = std::max<std::uint64_t>(lo, 2); i <= hi; ++i) {
      if (seg[i - lo]) w.set(i);
    }
  }
}

inline void fill_window(const SetSpec& s, ObserverWindow& w, std::uint64_t n);

template <typename Op>
void combine_windows(const SetSpec& left, const SetSpec& right, ObserverWindow& w, std::uint64_t n, Op op) {
  ObserverWindow a(n + 1);
  ObserverWindow b(n + 1);
  fill_window(left, a, n);
  fill_window(right, b, n);
  auto out = w.mutable_words();
  auto aw = a.mutable_words();
  auto bw = b.mutable_words();
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = op(aw[k], bw[k]);
}

inline void fill_window(const SetSpec& s, ObserverWindow& w, std::uint64_t n) {
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, spec::Explicit>) {
          for (auto e : v.elements) {
            if (e >= 0 && static_cast<std::uint64_t>(e) <= n) w.set(static_cast<std::uint64_t>(e));
          }
        } else if constexpr (std::is_same_v<T, spec::ResidueClasses>) {
          const auto m = static_cast<std::uint64_t>(v.modulus);
          for (auto r : v.residues) {
            for (auto i = static_cast<std::uint64_t>(r); i <= n; i += m) w.set(i);
          }
        } else if constexpr (std::is_same_v<T, spec::ArithmeticProgression>) {
          const auto d = static_cast<std::uint64_t>(v.difference);
          for (auto i = static_cast<std::uint64_t>(floor_mod(v.anchor, v.difference)); i <= n; i += d) w.set(i);
        } else if constexpr (std::is_same_v<T, spec::Union>) {
          combine_windows(v.left, v.right, w, n, [](std::uint64_t a, std::uint64_t b) { return a | b; });
        } else if constexpr (std::is_same_v<T, spec::Intersection>) {
          combine_windows(v.left, v.right, w, n, [](std::uint64_t a, std::uint64_t b) { return a & b; });
        } else if constexpr (std::is_same_v<T, spec::Difference>) {
          combine_windows(v.left, v.right, w, n, [](std::uint64_t a, std::uint64_t b) { return a & ~b; });
        } else if constexpr (std::is_same_v<T, spec::Bernoulli>) {
          for (std::uint64_t i = 0; i <= n; ++i) {
            if (bernoulli_draw(v.seed, static_cast<std::int64_t>(i)) < v.threshold) w.set(i);
          }
        } else if constexpr (std::is_same_v<T, spec::Primes>) {
          sieve_primes_into(w, n);
        } else if constexpr (std::is_same_v<T, spec::PowersOfTwo>) {
          for (std::uint64_t i = 1; i <= n; i <<= 1) {
            w.set(i);
            if (i > (std::uint64_t{1} << 62)) break;
          }
        } else {
          static_assert(std::is_same_v<T, spec::BitmapFile>);
          for (std::uint64_t i = 0; i <= n; ++i) {
            if (membership(s, static_cast<std::int64_t>(i))) w.set(i);
          }
        }
      },
      s.node().value);
}

}  // namespace detail

// Observer prefix x_0..x_n (n + 1 bits). Throws CapacityError beyond kMaxWindowBits.
inline ObserverWindow observer_window(const SetSpec& s, std::uint64_t n) {
  if (n >= kMaxWindowBits) {
    throw CapacityError("observer window of " + std::to_string(n + 1) + " bits exceeds limit of " +
                            std::to_string(kMaxWindowBits) + " bits",
                        kMaxWindowBits);
  }
  ObserverWindow w(n + 1);
  detail::fill_window(s, w, n);
  w.finalize();
  return w;
}

// 1_Gamma(sigma^i x): the shifted sequence has a 1 at the origin iff i is a member.
inline int indicator_gamma(const ObserverWindow& window, std::uint64_t i) {
  return window.bit(i) ? 1 : 0;
}

// Writes a bitmap corpus file: bit j of the payload is membership(offset + j).
inline void write_bitmap_file(const std::string& path, std::int64_t offset, const std::vector<bool>& bits) {
  std::vector<unsigned char> bytes(kBitmapHeaderSize + (bits.size() + 7) / 8, 0);
  std::copy(kBitmapMagic.begin(), kBitmapMagic.end(), bytes.begin());
  for (int b = 0; b < 4; ++b) bytes[4 + b] = static_cast<unsigned char>((kBitmapVersion >> (8 * b)) & 0xFF);
  const auto uoffset = static_cast<std::uint64_t>(offset);
  for (int b = 0; b < 8; ++b) bytes[8 + b] = static_cast<unsigned char>((uoffset >> (8 * b)) & 0xFF);
  for (std::size_t j = 0; j < bits.size(); ++j) {
    if (bits[j]) bytes[kBitmapHeaderSize + j / 8] |= static_cast<unsigned char>(1U << (j % 8));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write bitmap file '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError("failed writing bitmap file '" + path + "'");
}

}  // namespace frieze

#ifndef CSTSSOS_EXPONENT_HPP
#define CSTSSOS_EXPONENT_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cstssos {

/// Monomial exponent vector in N^n.
///
/// Entries are stored as 16-bit counters; degrees beyond that are far outside
/// anything a moment relaxation can handle.
class Exponent {
 public:
  using value_type = std::uint16_t;

  Exponent() = default;
  explicit Exponent(std::size_t n) : e_(n, 0) {}
  Exponent(std::initializer_list<unsigned> entries) {
    e_.reserve(entries.size());
    for (auto v : entries) e_.push_back(static_cast<value_type>(v));
  }
  explicit Exponent(std::span<const int> entries) {
    e_.reserve(entries.size());
    for (int v : entries) {
      if (v < 0) throw std::invalid_argument("negative exponent entry");
      e_.push_back(static_cast<value_type>(v));
    }
  }

  static Exponent unit(std::size_t n, std::size_t i, unsigned power = 1) {
    Exponent a(n);
    a.e_.at(i) = static_cast<value_type>(power);
    return a;
  }

  std::size_t size() const noexcept { return e_.size(); }
  value_type operator[](std::size_t i) const { return e_[i]; }
  value_type& operator[](std::size_t i) { return e_[i]; }
  std::span<const value_type> entries() const noexcept { return e_; }

  unsigned degree() const noexcept {
    return std::accumulate(e_.begin(), e_.end(), 0u);
  }
  bool is_zero() const noexcept {
    return std::all_of(e_.begin(), e_.end(), [](auto v) { return v == 0; });
  }
  bool is_even() const noexcept {
    return std::all_of(e_.begin(), e_.end(), [](auto v) { return v % 2 == 0; });
  }

  /// Indices i with entry != 0.
  std::vector<int> support() const {
    std::vector<int> s;
    for (std::size_t i = 0; i < e_.size(); ++i)
      if (e_[i] != 0) s.push_back(static_cast<int>(i));
    return s;
  }

  /// Entry-wise reduction modulo 2, i.e. (alpha)_2.
  Exponent mod2() const {
    Exponent r(*this);
    for (auto& v : r.e_) v = static_cast<value_type>(v % 2);
    return r;
  }

  Exponent& operator+=(const Exponent& o) {
    if (o.size() != size()) throw std::invalid_argument("exponent arity mismatch");
    for (std::size_t i = 0; i < e_.size(); ++i) e_[i] = static_cast<value_type>(e_[i] + o.e_[i]);
    return *this;
  }
  friend Exponent operator+(Exponent a, const Exponent& b) { return a += b; }
  friend Exponent operator*(unsigned k, Exponent a) {
    for (auto& v : a.e_) v = static_cast<value_type>(v * k);
    return a;
  }

  friend bool operator==(const Exponent&, const Exponent&) = default;

  std::string to_string() const {
    std::string s;
    for (auto v : e_) s += std::to_string(v);
    return s;
  }

 private:
  std::vector<value_type> e_;
};

/// Graded order: total degree first; within a degree, x1 > x2 > ... so the
/// listing reads 1, x1, x2, ..., x1^2, x1x2, ...
struct GrlexLess {
  bool operator()(const Exponent& a, const Exponent& b) const noexcept {
    const unsigned da = a.degree(), db = b.degree();
    if (da != db) return da < db;
    const auto ea = a.entries(), eb = b.entries();
    return std::lexicographical_compare(eb.begin(), eb.end(), ea.begin(), ea.end());
  }
};

struct ExponentHash {
  std::size_t operator()(const Exponent& a) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (auto v : a.entries()) {
      h ^= v;
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

/// All exponents over the variables `vars` (0-based) with total degree <= max_degree,
/// embedded into N^n, in graded order.  With `square_free`, entries are capped at 1.
inline std::vector<Exponent> monomials_up_to(std::size_t n, std::span<const int> vars,
                                             unsigned max_degree, bool square_free = false) {
  std::vector<Exponent> out;
  Exponent cur(n);
  const unsigned cap = square_free ? 1u : max_degree;
  std::function<void(std::size_t, unsigned)> rec = [&](std::size_t pos, unsigned left) {
    if (pos == vars.size()) {
      out.push_back(cur);
      return;
    }
    const auto v = static_cast<std::size_t>(vars[pos]);
    for (unsigned p = 0; p <= std::min(left, cap); ++p) {
      cur[v] = static_cast<Exponent::value_type>(p);
      rec(pos + 1, left - p);
    }
    cur[v] = 0;
  };
  rec(0, max_degree);
  std::sort(out.begin(), out.end(), GrlexLess{});
  return out;
}

}  // namespace cstssos

#endif  // CSTSSOS_EXPONENT_HPP

#ifndef CSTSSOS_POLYNOMIAL_HPP
#define CSTSSOS_POLYNOMIAL_HPP

#include <cmath>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cstssos/exponent.hpp"

namespace cstssos {

/// Sparse real polynomial in a fixed number of variables.
///
/// Terms are kept in graded order and never hold a zero coefficient, so the
/// key set is exactly the support.
class Polynomial {
 public:
  using Terms = std::map<Exponent, double, GrlexLess>;

  Polynomial() = default;
  explicit Polynomial(std::size_t n) : n_(n) {}

  static Polynomial constant(std::size_t n, double c) {
    Polynomial p(n);
    p.add_term(Exponent(n), c);
    return p;
  }
  static Polynomial variable(std::size_t n, std::size_t i) {
    Polynomial p(n);
    p.add_term(Exponent::unit(n, i), 1.0);
    return p;
  }
  static Polynomial monomial(const Exponent& a, double c = 1.0) {
    Polynomial p(a.size());
    p.add_term(a, c);
    return p;
  }

  std::size_t arity() const noexcept { return n_; }
  const Terms& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }

  double coefficient(const Exponent& a) const {
    auto it = terms_.find(a);
    return it == terms_.end() ? 0.0 : it->second;
  }

  /// Adds c * x^a; drops the term if it cancels exactly.
  void add_term(const Exponent& a, double c) {
    if (a.size() != n_) throw std::invalid_argument("exponent arity mismatch");
    if (!std::isfinite(c)) throw std::invalid_argument("non-finite coefficient");
    if (c == 0.0) return;
    auto [it, inserted] = terms_.try_emplace(a, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0.0) terms_.erase(it);
    }
  }

  /// Zero polynomial has degree 0.
  unsigned degree() const noexcept {
    return terms_.empty() ? 0u : terms_.rbegin()->first.degree();
  }

  std::vector<Exponent> support() const {
    std::vector<Exponent> s;
    s.reserve(terms_.size());
    for (const auto& [a, c] : terms_) s.push_back(a);
    return s;
  }

  /// Variables (0-based) that occur in some term.
  std::vector<int> variables() const {
    std::set<int> vs;
    for (const auto& [a, c] : terms_)
      for (int i : a.support()) vs.insert(i);
    return {vs.begin(), vs.end()};
  }

  double evaluate(std::span<const double> x) const {
    if (x.size() != n_) throw std::invalid_argument("evaluation point arity mismatch");
    double sum = 0.0;
    for (const auto& [a, c] : terms_) {
      double t = c;
      for (std::size_t i = 0; i < n_; ++i)
        for (unsigned k = 0; k < a[i]; ++k) t *= x[i];
      sum += t;
    }
    return sum;
  }

  /// x_i^2 -> 1 for every variable: exponents reduced mod 2.
  Polynomial reduced_binary() const {
    Polynomial r(n_);
    for (const auto& [a, c] : terms_) r.add_term(a.mod2(), c);
    return r;
  }

  /// Drops terms with |c| <= tol.
  Polynomial pruned(double tol) const {
    Polynomial r(n_);
    for (const auto& [a, c] : terms_)
      if (std::abs(c) > tol) r.terms_.emplace(a, c);
    return r;
  }

  double max_abs_coefficient() const noexcept {
    double m = 0.0;
    for (const auto& [a, c] : terms_) m = std::max(m, std::abs(c));
    return m;
  }

  Polynomial& operator+=(const Polynomial& o) {
    check_arity(o);
    for (const auto& [a, c] : o.terms_) add_term(a, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    check_arity(o);
    for (const auto& [a, c] : o.terms_) add_term(a, -c);
    return *this;
  }
  Polynomial& operator*=(double s) {
    if (s == 0.0) {
      terms_.clear();
      return *this;
    }
    for (auto& [a, c] : terms_) c *= s;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator-(Polynomial a) { return a *= -1.0; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator+(Polynomial a, double s) {
    a.add_term(Exponent(a.n_), s);
    return a;
  }
  friend Polynomial operator+(double s, Polynomial a) { return std::move(a) + s; }
  friend Polynomial operator-(Polynomial a, double s) { return std::move(a) + (-s); }
  friend Polynomial operator-(double s, const Polynomial& a) { return -a + s; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.check_arity(b);
    Polynomial r(a.n_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) r.add_term(ea + eb, ca * cb);
    return r;
  }
  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

  Polynomial pow(unsigned k) const {
    Polynomial r = constant(n_, 1.0);
    for (unsigned i = 0; i < k; ++i) r *= *this;
    return r;
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.n_ == b.n_ && a.terms_ == b.terms_;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [a, c] : terms_) {
      if (!first) os << (c < 0 ? " - " : " + ");
      else if (c < 0) os << "-";
      first = false;
      const double m = std::abs(c);
      const bool unit = a.is_zero();
      if (m != 1.0 || unit) os << m;
      for (std::size_t i = 0; i < n_; ++i) {
        if (a[i] == 0) continue;
        os << "x" << i + 1;
        if (a[i] > 1) os << "^" << a[i];
      }
    }
    return os.str();
  }

 private:
  void check_arity(const Polynomial& o) const {
    if (o.n_ != n_) throw std::invalid_argument("polynomial arity mismatch");
  }

  std::size_t n_ = 0;
  Terms terms_;
};

/// Halved degree rounded up, ceil(deg/2).
inline unsigned half_degree(const Polynomial& p) { return (p.degree() + 1) / 2; }

}  // namespace cstssos

#endif  // CSTSSOS_POLYNOMIAL_HPP

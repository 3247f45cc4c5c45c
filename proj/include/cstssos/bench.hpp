#ifndef CSTSSOS_BENCH_HPP
#define CSTSSOS_BENCH_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "cstssos/pop.hpp"

namespace cstssos {

/// SplitMix64: small, portable and fully specified, so generated instances
/// are identical on every platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  /// Uniform in [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

enum class Family { BroydenBanded, GenRosenbrock, BroydenTridiagonal, ChainedWood, MaxCutBlockBand };

inline std::string to_string(Family f) {
  switch (f) {
    case Family::BroydenBanded: return "broyden_banded";
    case Family::GenRosenbrock: return "gen_rosenbrock";
    case Family::BroydenTridiagonal: return "broyden_tridiagonal";
    case Family::ChainedWood: return "chained_wood";
    case Family::MaxCutBlockBand: return "maxcut_blockband";
  }
  return "?";
}

inline Family parse_family(const std::string& s) {
  for (auto f : {Family::BroydenBanded, Family::GenRosenbrock, Family::BroydenTridiagonal, Family::ChainedWood,
                 Family::MaxCutBlockBand})
    if (to_string(f) == s || (f == Family::MaxCutBlockBand && s == "maxcut")) return f;
  throw std::invalid_argument("unknown benchmark family \"" + s + "\"");
}

struct BenchSpec {
  Family family = Family::BroydenBanded;
  std::size_t n = 0;
  std::size_t l = 0, b = 0, h = 0;  // Max-Cut block-band shape
  std::uint64_t seed = 0;
  bool spheres = false;

  void validate() const {
    if (family == Family::MaxCutBlockBand) {
      if (l < 1 || b < 1) throw std::invalid_argument("maxcut requires l >= 1 and b >= 1");
      return;
    }
    if (n < 2) throw std::invalid_argument("benchmark requires n >= 2");
    if (family == Family::ChainedWood && n % 4 != 0) throw std::invalid_argument("chained_wood requires 4 | n");
    if (spheres && n % 20 != 0) throw std::invalid_argument("sphere constraints require 20 | n");
  }
};

/// Undirected weighted graph on nodes 0..n-1; edges sorted with i < j.
struct WeightedGraph {
  std::size_t n = 0;
  std::vector<std::tuple<int, int, double>> edges;
};

namespace detail {

inline Polynomial var(std::size_t n, std::size_t i) { return Polynomial::variable(n, i); }

/// 1 - sum_{i=20j-19}^{20j} x_i^2 >= 0 for every group of 20 variables.
inline void add_spheres(POPInstance& pop) {
  for (std::size_t j = 0; j < pop.n / 20; ++j) {
    Polynomial g = Polynomial::constant(pop.n, 1.0);
    for (std::size_t i = 20 * j; i < 20 * j + 20; ++i) g.add_term(Exponent::unit(pop.n, i, 2), -1.0);
    pop.constraints.push_back({std::move(g), ConstraintKind::Geq0});
  }
}

}  // namespace detail

inline POPInstance broyden_banded(std::size_t n) {
  POPInstance pop;
  pop.n = n;
  pop.name = "broyden_banded_" + std::to_string(n);
  Polynomial f(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = detail::var(n, i);
    Polynomial t = xi * (2.0 + 5.0 * xi * xi) + 1.0;
    const std::size_t lo = i >= 5 ? i - 5 : 0, hi = std::min(n - 1, i + 1);
    for (std::size_t j = lo; j <= hi; ++j)
      if (j != i) {
        const auto xj = detail::var(n, j);
        t -= (1.0 + xj) * xj;
      }
    f += t * t;
  }
  pop.objective = std::move(f);
  return pop;
}

inline POPInstance gen_rosenbrock(std::size_t n, bool spheres) {
  POPInstance pop;
  pop.n = n;
  pop.name = "gen_rosenbrock_" + std::to_string(n);
  Polynomial f = Polynomial::constant(n, 1.0);
  for (std::size_t i = 1; i < n; ++i) {
    const auto a = detail::var(n, i) - detail::var(n, i - 1).pow(2);
    const auto b = 1.0 - detail::var(n, i);
    f += 100.0 * a * a + b * b;
  }
  pop.objective = std::move(f);
  if (spheres) detail::add_spheres(pop);
  return pop;
}

inline POPInstance broyden_tridiagonal(std::size_t n, bool spheres) {
  POPInstance pop;
  pop.n = n;
  pop.name = "broyden_tridiagonal_" + std::to_string(n);
  Polynomial f(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = detail::var(n, i);
    Polynomial t = (3.0 - 2.0 * xi) * xi + 1.0;
    if (i > 0) t -= detail::var(n, i - 1);
    if (i + 1 < n) t -= 2.0 * detail::var(n, i + 1);
    f += t * t;
  }
  pop.objective = std::move(f);
  if (spheres) detail::add_spheres(pop);
  return pop;
}

inline POPInstance chained_wood(std::size_t n, bool spheres) {
  if (n % 4 != 0) throw std::invalid_argument("chained_wood requires 4 | n");
  POPInstance pop;
  pop.n = n;
  pop.name = "chained_wood_" + std::to_string(n);
  Polynomial f = Polynomial::constant(n, 1.0);
  auto x = [n](std::size_t i) { return detail::var(n, i); };
  // J = {1,3,...,n-3} in 1-based indexing
  for (std::size_t i = 0; i + 3 < n; i += 2) {
    const auto a = x(i + 1) - x(i).pow(2);
    const auto b = 1.0 - x(i);
    const auto c = x(i + 3) - x(i + 2).pow(2);
    const auto d = 1.0 - x(i + 2);
    const auto e = x(i + 1) + x(i + 3) - 2.0;
    const auto g = x(i + 1) - x(i + 3);
    f += 100.0 * a * a + b * b + 90.0 * c * c + d * d + 10.0 * e * e + 0.1 * g * g;
  }
  pop.objective = std::move(f);
  if (spheres) detail::add_spheres(pop);
  return pop;
}

/// Block-band random graph: l diagonal blocks of size b (edge probability
/// 0.16) and an arrow band of width h (probability min(1, 2/sqrt(l))). One
/// draw per candidate pair in sorted order, then one draw per edge for the
/// sign of its weight.
inline WeightedGraph maxcut_blockband(std::size_t l, std::size_t b, std::size_t h, std::uint64_t seed) {
  if (l < 1 || b < 1) throw std::invalid_argument("maxcut requires l >= 1 and b >= 1");
  WeightedGraph g;
  g.n = l * b + h;
  const std::size_t body = l * b;
  const double band_p = std::min(1.0, 2.0 / std::sqrt(static_cast<double>(l)));
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j = i + 1; j < g.n; ++j) {
      double p;
      if (j >= body) p = band_p;
      else if (i / b == j / b) p = 0.16;
      else continue;
      if (rng.uniform() < p) g.edges.emplace_back(static_cast<int>(i), static_cast<int>(j), 0.0);
    }
  for (auto& e : g.edges) std::get<2>(e) = (rng.next() >> 63) ? -1.0 : 1.0;
  return g;
}

/// maximize 1/2 sum w_ij (1 - x_i x_j) subject to 1 - x_i^2 = 0.
inline POPInstance maxcut_pop(const WeightedGraph& g, std::string name = "maxcut") {
  POPInstance pop;
  pop.n = g.n;
  pop.name = std::move(name);
  pop.sense = Sense::Maximize;
  Polynomial f(g.n);
  for (const auto& [i, j, w] : g.edges) {
    f.add_term(Exponent(g.n), 0.5 * w);
    f.add_term(Exponent::unit(g.n, static_cast<std::size_t>(i)) + Exponent::unit(g.n, static_cast<std::size_t>(j)), -0.5 * w);
  }
  pop.objective = std::move(f);
  for (std::size_t i = 0; i < g.n; ++i) {
    Polynomial c = Polynomial::constant(g.n, 1.0);
    c.add_term(Exponent::unit(g.n, i, 2), -1.0);
    pop.constraints.push_back({std::move(c), ConstraintKind::Eq0});
  }
  return pop;
}

inline double cut_value(const WeightedGraph& g, const std::vector<int>& signs) {
  double v = 0.0;
  for (const auto& [i, j, w] : g.edges)
    v += 0.5 * w * (1.0 - signs[static_cast<std::size_t>(i)] * signs[static_cast<std::size_t>(j)]);
  return v;
}

/// Exact max-cut by Gray-code enumeration with node 0 fixed (cuts are
/// symmetric under a global flip).
inline double brute_force_maxcut(const WeightedGraph& g) {
  if (g.n > 24) throw std::invalid_argument("brute_force_maxcut supports at most 24 nodes");
  if (g.n <= 1) return 0.0;
  std::vector<std::vector<std::pair<int, double>>> adj(g.n);
  for (const auto& [i, j, w] : g.edges) {
    adj[static_cast<std::size_t>(i)].push_back({j, w});
    adj[static_cast<std::size_t>(j)].push_back({i, w});
  }
  std::vector<int> x(g.n, 1);
  double cur = 0.0, best = 0.0;
  const std::uint64_t count = 1ull << (g.n - 1);
  for (std::uint64_t k = 1; k < count; ++k) {
    const auto bit = static_cast<std::size_t>(__builtin_ctzll(k)) + 1;  // node to flip
    // flipping x_bit changes each incident term w (1 - x_i x_j)/2 by w x_i x_j
    for (auto [j, w] : adj[bit]) cur += w * x[bit] * x[static_cast<std::size_t>(j)];
    x[bit] = -x[bit];
    best = std::max(best, cur);
  }
  return best;
}

/// "i j w" lines, 1-based, sorted.
inline std::string to_edge_list(const WeightedGraph& g) {
  std::ostringstream os;
  for (const auto& [i, j, w] : g.edges) os << i + 1 << ' ' << j + 1 << ' ' << w << '\n';
  return os.str();
}

inline WeightedGraph parse_edge_list(const std::string& text, std::size_t n) {
  WeightedGraph g;
  g.n = n;
  std::istringstream is(text);
  long long i = 0, j = 0;
  double w = 0;
  while (is >> i >> j >> w) {
    if (i < 1 || j < 1 || static_cast<std::size_t>(i) > n || static_cast<std::size_t>(j) > n || i == j)
      throw std::invalid_argument("edge list: node index out of range");
    if (i > j) std::swap(i, j);
    g.edges.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1), w);
  }
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

inline POPInstance generate(const BenchSpec& s) {
  s.validate();
  switch (s.family) {
    case Family::BroydenBanded: return broyden_banded(s.n);
    case Family::GenRosenbrock: return gen_rosenbrock(s.n, s.spheres);
    case Family::BroydenTridiagonal: return broyden_tridiagonal(s.n, s.spheres);
    case Family::ChainedWood: return chained_wood(s.n, s.spheres);
    case Family::MaxCutBlockBand:
      return maxcut_pop(maxcut_blockband(s.l, s.b, s.h, s.seed),
                        "maxcut_l" + std::to_string(s.l) + "_b" + std::to_string(s.b) + "_h" + std::to_string(s.h) +
                            "_s" + std::to_string(s.seed));
  }
  throw std::logic_error("unreachable");
}

}  // namespace cstssos

#endif  // CSTSSOS_BENCH_HPP

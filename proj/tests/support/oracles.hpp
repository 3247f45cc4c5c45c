// Independent reference computations used by the tests. Nothing here calls
// into the chordal or sparsity code it is meant to check.
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "cstssos/cstssos.hpp"

namespace oracle {

using cstssos::Exponent;
using cstssos::Polynomial;
using cstssos::POPInstance;

inline Polynomial x(std::size_t n, std::size_t i) { return Polynomial::variable(n, i); }

/// f = 1 + x1^2 + x2^2 + x3^2 + x1 x2 + x2 x3 + x3
inline POPInstance example1() {
  POPInstance p;
  p.n = 3;
  p.name = "example1";
  auto v = [](std::size_t i) { return x(3, i); };
  p.objective = 1.0 + v(0) * v(0) + v(1) * v(1) + v(2) * v(2) + v(0) * v(1) + v(1) * v(2) + v(2);
  return p;
}

/// f = 1 + sum x_i^4 + x1x2x3 + x3x4x5 + x3x4x6 + x3x5x6 + x4x5x6
inline POPInstance example2() {
  POPInstance p;
  p.n = 6;
  p.name = "example2";
  auto v = [](std::size_t i) { return x(6, i); };
  Polynomial f = Polynomial::constant(6, 1.0);
  for (std::size_t i = 0; i < 6; ++i) f += v(i).pow(4);
  f += v(0) * v(1) * v(2) + v(2) * v(3) * v(4) + v(2) * v(3) * v(5) + v(2) * v(4) * v(5) + v(3) * v(4) * v(5);
  p.objective = f;
  return p;
}

using Adj = std::vector<std::vector<char>>;

inline Adj adjacency(std::size_t n, const std::vector<std::pair<int, int>>& edges) {
  Adj a(n, std::vector<char>(n, 0));
  for (auto [i, j] : edges) a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = a[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = 1;
  return a;
}

/// Chordality by repeated removal of simplicial vertices.
inline bool is_chordal(Adj a) {
  const std::size_t n = a.size();
  std::vector<char> alive(n, 1);
  for (std::size_t step = 0; step < n; ++step) {
    bool removed = false;
    for (std::size_t v = 0; v < n && !removed; ++v) {
      if (!alive[v]) continue;
      std::vector<std::size_t> nb;
      for (std::size_t u = 0; u < n; ++u)
        if (alive[u] && a[v][u]) nb.push_back(u);
      bool simplicial = true;
      for (std::size_t p = 0; p < nb.size() && simplicial; ++p)
        for (std::size_t q = p + 1; q < nb.size() && simplicial; ++q)
          if (!a[nb[p]][nb[q]]) simplicial = false;
      if (simplicial) {
        alive[v] = 0;
        removed = true;
      }
    }
    if (!removed) return false;
  }
  return true;
}

/// All maximal cliques by exhaustive subset search (n <= 20).
inline std::vector<std::vector<int>> brute_force_maximal_cliques(const Adj& a) {
  const std::size_t n = a.size();
  std::vector<std::uint32_t> cliques;
  for (std::uint32_t s = 1; s < (1u << n); ++s) {
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i)
      if (s >> i & 1u)
        for (std::size_t j = i + 1; j < n && ok; ++j)
          if ((s >> j & 1u) && !a[i][j]) ok = false;
    if (ok) cliques.push_back(s);
  }
  std::vector<std::vector<int>> out;
  for (auto s : cliques) {
    bool maximal = true;
    for (std::size_t v = 0; v < n && maximal; ++v) {
      if (s >> v & 1u) continue;
      bool all = true;
      for (std::size_t u = 0; u < n && all; ++u)
        if ((s >> u & 1u) && !a[u][v]) all = false;
      if (all) maximal = false;
    }
    if (!maximal) continue;
    std::vector<int> c;
    for (std::size_t v = 0; v < n; ++v)
      if (s >> v & 1u) c.push_back(static_cast<int>(v));
    out.push_back(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Random polynomial problem with chain-shaped correlative sparsity: quartic
/// diagonal terms plus random monomials on windows of three variables, and
/// optionally one ball constraint per window.
inline POPInstance random_pop(std::uint64_t seed, std::size_t n, bool constrained) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  POPInstance p;
  p.n = n;
  p.name = "random_" + std::to_string(seed);
  Polynomial f(n);
  for (std::size_t i = 0; i < n; ++i) f += x(n, i).pow(4);
  for (std::size_t w = 0; w + 2 < n; w += 2) {
    for (int t = 0; t < 4; ++t) {
      std::vector<unsigned> e(n, 0);
      unsigned deg = 1 + static_cast<unsigned>(rng() % 3);
      for (unsigned k = 0; k < deg; ++k) ++e[w + rng() % 3];
      Exponent a(std::span<const int>(std::vector<int>(e.begin(), e.end())));
      f.add_term(a, coef(rng));
    }
    if (constrained) {
      Polynomial g = Polynomial::constant(n, 3.0);
      for (std::size_t i = w; i < w + 3; ++i) g -= x(n, i) * x(n, i);
      p.constraints.push_back({g, cstssos::ConstraintKind::Geq0});
    }
  }
  p.objective = f;
  return p;
}

/// Reference term-sparsity iteration with maximal chordal extension, written
/// with plain sets and union-find.  Returns the edge sets per (clique,
/// constraint) in the order the library enumerates them.
struct NaiveGraph {
  int clique;
  int constraint;
  std::vector<Exponent> basis;
  std::set<std::pair<int, int>> edges;
};

inline std::vector<NaiveGraph> naive_iteration(const POPInstance& pop, const cstssos::CliqueDecomposition& dec,
                                               unsigned d, int k) {
  using Set = std::set<Exponent, cstssos::GrlexLess>;
  auto basis_of = [&](const std::vector<int>& vars, unsigned deg) {
    // all exponents supported on vars with degree <= deg, graded order
    std::vector<Exponent> out;
    std::vector<int> e(pop.n, 0);
    std::function<void(std::size_t, unsigned)> rec = [&](std::size_t pos, unsigned left) {
      if (pos == vars.size()) {
        out.emplace_back(std::span<const int>(e));
        return;
      }
      for (unsigned t = 0; t <= left; ++t) {
        e[static_cast<std::size_t>(vars[pos])] = static_cast<int>(t);
        rec(pos + 1, left - t);
      }
      e[static_cast<std::size_t>(vars[pos])] = 0;
    };
    rec(0, deg);
    std::sort(out.begin(), out.end(), cstssos::GrlexLess{});
    return out;
  };
  std::vector<NaiveGraph> gs;
  for (std::size_t l = 0; l < dec.size(); ++l) {
    std::vector<int> js{0};
    js.insert(js.end(), dec.assignment[l].begin(), dec.assignment[l].end());
    for (int j : js) gs.push_back({static_cast<int>(l), j, basis_of(dec.cliques[l], d - pop.constraint_order(static_cast<std::size_t>(j))), {}});
  }
  auto gsupp = [&](int j) { return pop.constraint_poly(static_cast<std::size_t>(j)).support(); };
  auto all_supp = pop.joint_support();
  Set c;
  for (auto& g : gs) {
    if (g.constraint != 0) continue;
    const auto& cl = dec.cliques[static_cast<std::size_t>(g.clique)];
    Set al;
    for (const auto& a : all_supp) {
      bool inside = true;
      for (int v : a.support()) inside = inside && std::find(cl.begin(), cl.end(), v) != cl.end();
      if (inside) al.insert(a);
    }
    for (std::size_t i = 0; i < g.basis.size(); ++i)
      for (std::size_t j = i + 1; j < g.basis.size(); ++j) {
        const Exponent s = g.basis[i] + g.basis[j];
        if (s.is_even() || al.count(s)) g.edges.insert({static_cast<int>(i), static_cast<int>(j)});
      }
    for (auto [i, j] : g.edges) c.insert(g.basis[static_cast<std::size_t>(i)] + g.basis[static_cast<std::size_t>(j)]);
    for (const auto& b : g.basis) c.insert(b + b);
  }
  for (int round = 1; round <= k; ++round) {
    for (auto& g : gs) {
      const auto gsj = gsupp(g.constraint);
      std::set<std::pair<int, int>> f = g.edges;
      for (std::size_t i = 0; i < g.basis.size(); ++i)
        for (std::size_t j = i + 1; j < g.basis.size(); ++j)
          for (const auto& a : gsj)
            if (c.count(g.basis[i] + g.basis[j] + a)) f.insert({static_cast<int>(i), static_cast<int>(j)});
      // maximal extension: complete every connected component
      std::vector<int> parent(g.basis.size());
      std::iota(parent.begin(), parent.end(), 0);
      std::function<int(int)> find = [&](int v) { return parent[static_cast<std::size_t>(v)] == v ? v : parent[static_cast<std::size_t>(v)] = find(parent[static_cast<std::size_t>(v)]); };
      for (auto [i, j] : f) parent[static_cast<std::size_t>(find(i))] = find(j);
      g.edges.clear();
      for (std::size_t i = 0; i < g.basis.size(); ++i)
        for (std::size_t j = i + 1; j < g.basis.size(); ++j)
          if (find(static_cast<int>(i)) == find(static_cast<int>(j))) g.edges.insert({static_cast<int>(i), static_cast<int>(j)});
    }
    c.clear();
    for (const auto& g : gs) {
      const auto gsj = gsupp(g.constraint);
      for (auto [i, j] : g.edges)
        for (const auto& a : gsj) c.insert(g.basis[static_cast<std::size_t>(i)] + g.basis[static_cast<std::size_t>(j)] + a);
      for (const auto& b : g.basis)
        for (const auto& a : gsj) c.insert(b + b + a);
    }
  }
  return gs;
}

}  // namespace oracle

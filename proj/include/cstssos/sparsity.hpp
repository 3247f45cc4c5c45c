#ifndef CSTSSOS_SPARSITY_HPP
#define CSTSSOS_SPARSITY_HPP

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "cstssos/chordal.hpp"
#include "cstssos/pop.hpp"
#include "cstssos/sign_symmetry.hpp"

namespace cstssos {

using ExponentSet = std::unordered_set<Exponent, ExponentHash>;

/// Variable cliques I_l (0-based, sorted) and the constraint groups J_l
/// (1-based constraint indices) assigned to them.
struct CliqueDecomposition {
  std::vector<std::vector<int>> cliques;
  std::vector<std::vector<int>> assignment;
  ChordalGraph<int> csp;

  std::size_t size() const noexcept { return cliques.size(); }
  std::size_t max_clique_size() const {
    std::size_t m = 0;
    for (const auto& c : cliques) m = std::max(m, c.size());
    return m;
  }
};

/// Correlative sparsity pattern: variables linked when they share an objective
/// monomial or appear in the same constraint.
inline Graph<int> build_csp_graph(const POPInstance& pop) {
  std::vector<int> ids(pop.n);
  std::iota(ids.begin(), ids.end(), 0);
  Graph<int> g(ids);
  auto link_all = [&](const std::vector<int>& vs) {
    for (std::size_t a = 0; a < vs.size(); ++a)
      for (std::size_t b = a + 1; b < vs.size(); ++b) g.add_edge(vs[a], vs[b]);
  };
  for (const auto& a : pop.objective.support()) link_all(a.support());
  for (const auto& c : pop.constraints) link_all(c.poly.variables());
  return g;
}

namespace detail {

inline bool is_subset(const std::vector<int>& small, const std::vector<int>& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

inline CliqueDecomposition assign_constraints(const POPInstance& pop, std::vector<std::vector<int>> cliques,
                                              ChordalGraph<int> csp) {
  CliqueDecomposition dec{std::move(cliques), {}, std::move(csp)};
  dec.assignment.assign(dec.cliques.size(), {});
  for (std::size_t j = 1; j <= pop.m(); ++j) {
    const auto vars = pop.constraints[j - 1].poly.variables();
    int best = -1;
    for (std::size_t l = 0; l < dec.cliques.size(); ++l) {
      if (!is_subset(vars, dec.cliques[l])) continue;
      if (best < 0 || dec.cliques[l].size() < dec.cliques[static_cast<std::size_t>(best)].size())
        best = static_cast<int>(l);
    }
    if (best < 0) throw std::logic_error("constraint " + std::to_string(j) + " fits no variable clique");
    dec.assignment[static_cast<std::size_t>(best)].push_back(static_cast<int>(j));
  }
  return dec;
}

}  // namespace detail

/// Cliques of the chordally extended csp graph; each constraint goes to the
/// smallest clique containing its variables (lowest index on ties).
inline CliqueDecomposition decompose(const POPInstance& pop, ExtensionKind csp_extension = ExtensionKind::MinFill) {
  auto csp = chordal_extension(build_csp_graph(pop), csp_extension);
  auto cliques = csp.cliques;  // node ids equal positions
  return detail::assign_constraints(pop, std::move(cliques), std::move(csp));
}

/// One clique holding every variable and every constraint (TSSOS and dense modes).
inline CliqueDecomposition single_clique(const POPInstance& pop) {
  std::vector<int> all(pop.n);
  std::iota(all.begin(), all.end(), 0);
  Graph<int> g(all);
  for (std::size_t a = 0; a < pop.n; ++a)
    for (std::size_t b = a + 1; b < pop.n; ++b) g.add_edge(static_cast<int>(a), static_cast<int>(b));
  return detail::assign_constraints(pop, {all}, extend_maximal(g));
}

/// Standard monomial basis N^{n_l}_{d-d_j} of one (clique, constraint) pair.
struct MonomialBasis {
  int clique = 0;
  int constraint = 0;  // 0 = objective
  std::vector<Exponent> exponents;

  std::size_t size() const noexcept { return exponents.size(); }
};

inline MonomialBasis make_basis(std::size_t n, int clique, const std::vector<int>& vars, int constraint,
                                unsigned degree, bool square_free = false) {
  return {clique, constraint, monomials_up_to(n, vars, degree, square_free)};
}

/// Term-sparsity graph of one (clique l, constraint j) pair over basis positions.
struct TermGraph {
  int clique = 0;
  int constraint = 0;
  MonomialBasis basis;
  Graph<int> graph;
  std::vector<std::vector<int>> blocks;
};

struct SparsityOptions {
  ExtensionKind extension = ExtensionKind::MinFill;
  bool binary = false;
};

/// Result of the term-sparsity iteration: one chordal graph per (l, j), its
/// maximal-clique blocks and the global support C.
struct BlockStructure {
  std::size_t n = 0;
  unsigned order = 0;
  int rounds = 0;
  bool stabilized = false;
  int stable_round = -1;  // first k with G^(k) == G^(k+1), if observed
  bool binary = false;
  std::vector<TermGraph> graphs;
  std::vector<Exponent> support;  // C, graded order

  std::vector<std::size_t> block_sizes() const {
    std::vector<std::size_t> s;
    for (const auto& tg : graphs)
      for (const auto& b : tg.blocks) s.push_back(b.size());
    return s;
  }
  const TermGraph& graph_of(int clique, int constraint) const {
    for (const auto& tg : graphs)
      if (tg.clique == clique && tg.constraint == constraint) return tg;
    throw std::out_of_range("no term graph for (clique, constraint)");
  }
};

namespace detail {

inline Exponent normalize(Exponent e, bool binary) { return binary ? e.mod2() : e; }

struct ConstraintData {
  std::vector<Polynomial> polys;             // g_0..g_m, reduced in binary mode
  std::vector<std::vector<Exponent>> supps;  // supports of the above
};

inline ConstraintData constraint_data(const POPInstance& pop, bool binary) {
  ConstraintData cd;
  for (std::size_t j = 0; j <= pop.m(); ++j) {
    auto g = pop.constraint_poly(j);
    if (binary) g = g.reduced_binary();
    cd.supps.push_back(g.support());
    cd.polys.push_back(std::move(g));
  }
  return cd;
}

inline std::vector<TermGraph> empty_term_graphs(const POPInstance& pop, const CliqueDecomposition& dec, unsigned d,
                                                bool binary) {
  std::vector<TermGraph> out;
  for (std::size_t l = 0; l < dec.size(); ++l) {
    std::vector<int> js{0};
    js.insert(js.end(), dec.assignment[l].begin(), dec.assignment[l].end());
    for (int j : js) {
      const unsigned dj = pop.constraint_order(static_cast<std::size_t>(j));
      TermGraph tg;
      tg.clique = static_cast<int>(l);
      tg.constraint = j;
      tg.basis = make_basis(pop.n, static_cast<int>(l), dec.cliques[l], j, d - dj, binary);
      std::vector<int> ids(tg.basis.size());
      std::iota(ids.begin(), ids.end(), 0);
      tg.graph = Graph<int>(ids);
      out.push_back(std::move(tg));
    }
  }
  return out;
}

/// Adds supp(g_j) + supp(G) to C, with the diagonal 2*beta of every node when
/// `diagonals` is set.
inline void collect_support(const TermGraph& tg, const std::vector<Exponent>& gsupp, bool diagonals, bool binary,
                            ExponentSet& c) {
  const auto& b = tg.basis.exponents;
  for (auto [i, j] : tg.graph.edges()) {
    const Exponent s = b[static_cast<std::size_t>(i)] + b[static_cast<std::size_t>(j)];
    for (const auto& a : gsupp) c.insert(normalize(s + a, binary));
  }
  if (!diagonals) return;
  for (const auto& beta : b) {
    const Exponent s = 2u * beta;
    for (const auto& a : gsupp) c.insert(normalize(s + a, binary));
  }
}

inline std::vector<Exponent> sorted_support(const ExponentSet& c) {
  std::vector<Exponent> v(c.begin(), c.end());
  std::sort(v.begin(), v.end(), GrlexLess{});
  return v;
}

}  // namespace detail

/// Initial term sparsity graph of a clique: beta ~ gamma iff beta + gamma lies in
/// A_l or is even.
inline Graph<int> initial_tsp_graph(const std::vector<Exponent>& clique_support, const MonomialBasis& basis,
                                    bool binary = false) {
  ExponentSet al;
  for (const auto& a : clique_support) al.insert(detail::normalize(a, binary));
  std::vector<int> ids(basis.size());
  std::iota(ids.begin(), ids.end(), 0);
  Graph<int> g(ids);
  const auto& b = basis.exponents;
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = i + 1; j < b.size(); ++j) {
      const Exponent s = detail::normalize(b[i] + b[j], binary);
      if (s.is_even() || al.count(s)) g.add_edge(static_cast<int>(i), static_cast<int>(j));
    }
  return g;
}

/// A_l = { alpha in A : supp(alpha) in I_l }.
inline std::vector<Exponent> clique_support(const std::vector<Exponent>& a, const std::vector<int>& clique) {
  std::vector<Exponent> out;
  for (const auto& e : a)
    if (detail::is_subset(e.support(), clique)) out.push_back(e);
  return out;
}

/// Runs k rounds of support extension followed by chordal extension on every
/// (clique, constraint) graph.  Each round reads C from all graphs of the
/// previous round.
inline BlockStructure ts_iterate(const POPInstance& pop, const CliqueDecomposition& dec, unsigned d, int k,
                                 const SparsityOptions& opt = {}) {
  if (d < pop.d_min()) throw std::invalid_argument("relaxation order below d_min");
  if (k < 1) throw std::invalid_argument("sparse order must be >= 1");
  const bool bin = opt.binary;
  const auto cd = detail::constraint_data(pop, bin);

  BlockStructure bs;
  bs.n = pop.n;
  bs.order = d;
  bs.binary = bin;
  bs.graphs = detail::empty_term_graphs(pop, dec, d, bin);

  std::vector<Exponent> a = pop.joint_support();
  ExponentSet c;
  for (auto& tg : bs.graphs) {
    if (tg.constraint != 0) continue;
    tg.graph = initial_tsp_graph(clique_support(a, dec.cliques[static_cast<std::size_t>(tg.clique)]), tg.basis, bin);
    detail::collect_support(tg, cd.supps[0], true, bin, c);
  }

  for (int round = 1; round <= k; ++round) {
    bool changed = false;
    for (auto& tg : bs.graphs) {
      const auto& gs = cd.supps[static_cast<std::size_t>(tg.constraint)];
      const auto& b = tg.basis.exponents;
      Graph<int> f = tg.graph;
      for (std::size_t i = 0; i < b.size(); ++i)
        for (std::size_t j = i + 1; j < b.size(); ++j) {
          if (f.has_edge(static_cast<int>(i), static_cast<int>(j))) continue;
          const Exponent s = b[i] + b[j];
          for (const auto& al : gs)
            if (c.count(detail::normalize(s + al, bin))) {
              f.add_edge(static_cast<int>(i), static_cast<int>(j));
              break;
            }
        }
      auto cg = chordal_extension(f, opt.extension);
      if (!(cg.extended == tg.graph)) changed = true;
      tg.graph = std::move(cg.extended);
      tg.blocks = std::move(cg.cliques);
    }
    c.clear();
    for (const auto& tg : bs.graphs)
      detail::collect_support(tg, cd.supps[static_cast<std::size_t>(tg.constraint)], true, bin, c);
    bs.rounds = round;
    bs.stabilized = !changed;
    if (!changed && bs.stable_round < 0) bs.stable_round = round - 1;
  }
  bs.support = detail::sorted_support(c);
  return bs;
}

/// Runs rounds until no graph changes (or max_rounds is hit).
inline BlockStructure iterate_to_stability(const POPInstance& pop, const CliqueDecomposition& dec, unsigned d,
                                           const SparsityOptions& opt = {}, int max_rounds = 64) {
  BlockStructure bs;
  for (int k = 1; k <= max_rounds; ++k) {
    bs = ts_iterate(pop, dec, d, k, opt);
    if (bs.stabilized) break;
  }
  return bs;
}

/// Every (l, j) graph complete: the dense moment and localizing matrices of
/// each clique (CSSOS, or dense with a single clique).
inline BlockStructure complete_structure(const POPInstance& pop, const CliqueDecomposition& dec, unsigned d,
                                         bool binary = false) {
  if (d < pop.d_min()) throw std::invalid_argument("relaxation order below d_min");
  const auto cd = detail::constraint_data(pop, binary);
  BlockStructure bs;
  bs.n = pop.n;
  bs.order = d;
  bs.binary = binary;
  bs.stabilized = true;
  bs.graphs = detail::empty_term_graphs(pop, dec, d, binary);
  ExponentSet c;
  for (auto& tg : bs.graphs) {
    for (std::size_t i = 0; i < tg.basis.size(); ++i)
      for (std::size_t j = i + 1; j < tg.basis.size(); ++j) tg.graph.add_edge(static_cast<int>(i), static_cast<int>(j));
    std::vector<int> all(tg.basis.size());
    std::iota(all.begin(), all.end(), 0);
    tg.blocks = {all};
    detail::collect_support(tg, cd.supps[static_cast<std::size_t>(tg.constraint)], true, binary, c);
  }
  bs.support = detail::sorted_support(c);
  return bs;
}

/// Every alpha in C satisfies R^T alpha == 0 (mod 2).
inline bool support_respects(const BlockStructure& bs, const SignSymmetryBasis& r) {
  return std::all_of(bs.support.begin(), bs.support.end(), [&](const Exponent& a) { return r.respects(a); });
}

/// Debug dump of a block structure.
inline nlohmann::json block_report(const BlockStructure& bs) {
  nlohmann::json j;
  j["order"] = bs.order;
  j["rounds"] = bs.rounds;
  j["stabilized"] = bs.stabilized;
  j["support_size"] = bs.support.size();
  j["graphs"] = nlohmann::json::array();
  for (const auto& tg : bs.graphs) {
    std::vector<std::size_t> sizes;
    for (const auto& b : tg.blocks) sizes.push_back(b.size());
    j["graphs"].push_back({{"clique", tg.clique},
                           {"constraint", tg.constraint},
                           {"basis_size", tg.basis.size()},
                           {"edges", tg.graph.edge_count()},
                           {"block_sizes", sizes}});
  }
  return j;
}

}  // namespace cstssos

#endif  // CSTSSOS_SPARSITY_HPP

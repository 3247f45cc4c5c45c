#ifndef CSTSSOS_RELAX_HPP
#define CSTSSOS_RELAX_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "cstssos/sparsity.hpp"

namespace cstssos {

enum class Hierarchy { Dense, CS, TS, CSTS };

inline std::string to_string(Hierarchy h) {
  switch (h) {
    case Hierarchy::Dense: return "dense";
    case Hierarchy::CS: return "cs";
    case Hierarchy::TS: return "ts";
    case Hierarchy::CSTS: return "cstsos";
  }
  return "?";
}

inline Hierarchy parse_hierarchy(const std::string& s) {
  if (s == "dense") return Hierarchy::Dense;
  if (s == "cs") return Hierarchy::CS;
  if (s == "ts") return Hierarchy::TS;
  if (s == "cstsos" || s == "csts") return Hierarchy::CSTS;
  throw std::invalid_argument("unknown hierarchy \"" + s + "\"");
}

/// Moment variables y_alpha; position 0 is the zero exponent, pinned to 1.
class MomentLayout {
 public:
  MomentLayout() = default;
  explicit MomentLayout(std::vector<Exponent> exps) : exps_(std::move(exps)) {
    std::sort(exps_.begin(), exps_.end(), GrlexLess{});
    exps_.erase(std::unique(exps_.begin(), exps_.end()), exps_.end());
    if (exps_.empty() || !exps_.front().is_zero()) throw std::logic_error("moment layout lacks y_0");
    for (std::size_t i = 0; i < exps_.size(); ++i) index_.emplace(exps_[i], static_cast<int>(i));
  }
  std::size_t size() const noexcept { return exps_.size(); }
  const std::vector<Exponent>& exponents() const noexcept { return exps_; }
  const Exponent& exponent(int i) const { return exps_.at(static_cast<std::size_t>(i)); }
  bool contains(const Exponent& a) const { return index_.count(a) > 0; }
  int index_of(const Exponent& a) const {
    auto it = index_.find(a);
    if (it == index_.end()) throw std::out_of_range("exponent " + a.to_string() + " not in moment layout");
    return it->second;
  }

 private:
  std::vector<Exponent> exps_;
  std::unordered_map<Exponent, int, ExponentHash> index_;
};

/// coef * y_var; var 0 is the constant slot.
struct LinearTerm {
  int var = 0;
  double coef = 0.0;
  friend bool operator==(const LinearTerm&, const LinearTerm&) = default;
};

struct BlockEntry {
  int row = 0;  // row <= col
  int col = 0;
  std::vector<LinearTerm> terms;
};

/// One PSD constraint: the principal submatrix of a moment or localizing
/// matrix indexed by `basis`.
struct PsdBlock {
  int clique = 0;
  int constraint = 0;  // 0 = moment matrix
  int index = 0;       // clique of the term graph
  bool first_order = false;
  std::vector<Exponent> basis;
  std::vector<BlockEntry> entries;

  std::size_t size() const noexcept { return basis.size(); }
};

/// Linear equality sum_k coef_k y_k = 0 coming from an equality constraint
/// g_j shifted by x^shift.
struct ZeroRow {
  int clique = 0;
  int constraint = 0;
  Exponent shift;
  std::vector<LinearTerm> terms;
};

struct RelaxOptions {
  Hierarchy hierarchy = Hierarchy::CSTS;
  unsigned order = 0;  // 0 = d_min
  int sparse_order = 1;
  ExtensionKind extension = ExtensionKind::MinFill;
  bool first_order_blocks = false;
  std::optional<double> ball;
  bool binary = false;
};

/// Moment-side SDP: minimize sum_k objective[k] y_k subject to PSD blocks and
/// zero rows, with y_0 = 1.  The internal objective is objective_sign * f.
struct SDPProblem {
  MomentLayout layout;
  std::vector<double> objective;
  double objective_sign = 1.0;
  std::vector<PsdBlock> blocks;
  std::vector<ZeroRow> equalities;
  RelaxOptions provenance;

  std::size_t num_variables() const noexcept { return layout.size() - 1; }
};

inline std::vector<std::size_t> block_sizes(const SDPProblem& sdp) {
  std::vector<std::size_t> s;
  for (const auto& b : sdp.blocks) s.push_back(b.size());
  return s;
}

inline std::size_t max_block_size(const SDPProblem& sdp) {
  std::size_t m = 0;
  for (const auto& b : sdp.blocks) m = std::max(m, b.size());
  return m;
}

/// Everything built on the way to the SDP, kept for certificates and extraction.
struct Relaxation {
  POPInstance pop;  // with ball constraints appended, if requested
  CliqueDecomposition decomposition;
  BlockStructure structure;
  SDPProblem sdp;
};

namespace detail {

inline std::vector<LinearTerm> merge_terms(std::map<int, double>& acc) {
  std::vector<LinearTerm> out;
  for (auto [v, c] : acc)
    if (c != 0.0) out.push_back({v, c});
  return out;
}

inline std::vector<Exponent> first_order_basis(std::size_t n, const std::vector<int>& clique) {
  std::vector<Exponent> b{Exponent(n)};
  for (int i : clique) b.push_back(Exponent::unit(n, static_cast<std::size_t>(i)));
  return b;
}

}  // namespace detail

/// Appends n_l M^2 - ||x(I_l)||^2 >= 0 for every clique of `dec`.
inline POPInstance with_ball_constraints(const POPInstance& pop, const CliqueDecomposition& dec, double radius) {
  POPInstance out = pop;
  for (const auto& clique : dec.cliques) {
    Polynomial g = Polynomial::constant(pop.n, static_cast<double>(clique.size()) * radius * radius);
    for (int i : clique) g.add_term(Exponent::unit(pop.n, static_cast<std::size_t>(i), 2), -1.0);
    out.constraints.push_back({std::move(g), ConstraintKind::Geq0});
  }
  return out;
}

/// Builds the SDP from an already computed block structure.
inline SDPProblem assemble(const POPInstance& pop, const CliqueDecomposition& dec, const BlockStructure& bs,
                           const RelaxOptions& opt) {
  const bool bin = opt.binary;
  auto norm = [bin](const Exponent& e) { return detail::normalize(e, bin); };
  const auto cd = detail::constraint_data(pop, bin);

  Polynomial f = pop.objective;
  if (bin) f = f.reduced_binary();

  std::vector<Exponent> used = bs.support;
  for (const auto& a : f.support()) used.push_back(a);
  used.push_back(Exponent(pop.n));
  if (opt.first_order_blocks)
    for (const auto& clique : dec.cliques) {
      const auto b = detail::first_order_basis(pop.n, clique);
      for (const auto& r : b)
        for (const auto& c : b) used.push_back(norm(r + c));
    }

  SDPProblem sdp;
  sdp.layout = MomentLayout(std::move(used));
  sdp.provenance = opt;
  sdp.objective_sign = pop.sense == Sense::Maximize ? -1.0 : 1.0;
  sdp.objective.assign(sdp.layout.size(), 0.0);
  for (const auto& [a, c] : f.terms()) sdp.objective[static_cast<std::size_t>(sdp.layout.index_of(a))] += sdp.objective_sign * c;

  for (const auto& tg : bs.graphs) {
    const auto j = static_cast<std::size_t>(tg.constraint);
    const auto& g = cd.polys[j];
    const bool equality = j > 0 && pop.constraints[j - 1].kind == ConstraintKind::Eq0;
    const auto& basis = tg.basis.exponents;
    if (equality) {
      std::vector<Exponent> shifts;
      for (const auto& blk : tg.blocks)
        for (std::size_t a = 0; a < blk.size(); ++a)
          for (std::size_t b = a; b < blk.size(); ++b)
            shifts.push_back(norm(basis[static_cast<std::size_t>(blk[a])] + basis[static_cast<std::size_t>(blk[b])]));
      std::sort(shifts.begin(), shifts.end(), GrlexLess{});
      shifts.erase(std::unique(shifts.begin(), shifts.end()), shifts.end());
      for (const auto& s : shifts) {
        std::map<int, double> acc;
        for (const auto& [al, c] : g.terms()) acc[sdp.layout.index_of(norm(al + s))] += c;
        auto terms = detail::merge_terms(acc);
        if (!terms.empty()) sdp.equalities.push_back({tg.clique, tg.constraint, s, std::move(terms)});
      }
      continue;
    }
    for (std::size_t bi = 0; bi < tg.blocks.size(); ++bi) {
      const auto& blk = tg.blocks[bi];
      PsdBlock pb;
      pb.clique = tg.clique;
      pb.constraint = tg.constraint;
      pb.index = static_cast<int>(bi);
      for (int v : blk) pb.basis.push_back(basis[static_cast<std::size_t>(v)]);
      for (std::size_t a = 0; a < pb.basis.size(); ++a)
        for (std::size_t b = a; b < pb.basis.size(); ++b) {
          std::map<int, double> acc;
          const Exponent s = pb.basis[a] + pb.basis[b];
          for (const auto& [al, c] : g.terms()) acc[sdp.layout.index_of(norm(al + s))] += c;
          auto terms = detail::merge_terms(acc);
          if (!terms.empty())
            pb.entries.push_back({static_cast<int>(a), static_cast<int>(b), std::move(terms)});
        }
      sdp.blocks.push_back(std::move(pb));
    }
  }

  if (opt.first_order_blocks) {
    for (std::size_t l = 0; l < dec.size(); ++l) {
      PsdBlock pb;
      pb.clique = static_cast<int>(l);
      pb.constraint = 0;
      pb.index = -1;
      pb.first_order = true;
      pb.basis = detail::first_order_basis(pop.n, dec.cliques[l]);
      for (std::size_t a = 0; a < pb.basis.size(); ++a)
        for (std::size_t b = a; b < pb.basis.size(); ++b)
          pb.entries.push_back({static_cast<int>(a), static_cast<int>(b),
                                {{sdp.layout.index_of(norm(pb.basis[a] + pb.basis[b])), 1.0}}});
      sdp.blocks.push_back(std::move(pb));
    }
  }
  return sdp;
}

/// Decomposition, block discovery and SDP assembly for the requested hierarchy.
inline Relaxation build_relaxation(const POPInstance& input, RelaxOptions opt) {
  input.validate();
  const unsigned dmin = input.d_min();
  if (opt.order == 0) opt.order = std::max(dmin, 1u);
  if (opt.order < dmin)
    throw std::invalid_argument("relaxation order " + std::to_string(opt.order) + " is below d_min = " +
                                std::to_string(dmin));
  const bool sparse_terms = opt.hierarchy == Hierarchy::TS || opt.hierarchy == Hierarchy::CSTS;
  if (sparse_terms && opt.sparse_order < 1) throw std::invalid_argument("sparse order must be >= 1");
  const bool sparse_vars = opt.hierarchy == Hierarchy::CS || opt.hierarchy == Hierarchy::CSTS;

  Relaxation r;
  r.pop = input;
  auto decomp = [&](const POPInstance& p) { return sparse_vars ? decompose(p) : single_clique(p); };
  r.decomposition = decomp(r.pop);
  if (opt.ball) {
    r.pop = with_ball_constraints(r.pop, r.decomposition, *opt.ball);
    r.decomposition = decomp(r.pop);
  }
  const unsigned d = std::max(opt.order, r.pop.d_min());
  opt.order = d;
  r.structure = sparse_terms ? ts_iterate(r.pop, r.decomposition, d, opt.sparse_order, {opt.extension, opt.binary})
                             : complete_structure(r.pop, r.decomposition, d, opt.binary);
  r.sdp = assemble(r.pop, r.decomposition, r.structure, opt);
  return r;
}

inline SDPProblem assemble(const POPInstance& pop, const RelaxOptions& opt) {
  return build_relaxation(pop, opt).sdp;
}

}  // namespace cstssos

#endif  // CSTSSOS_RELAX_HPP

#ifndef CSTSSOS_EXTRACT_HPP
#define CSTSSOS_EXTRACT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "cstssos/sdp.hpp"

namespace cstssos {

struct ExtractionOptions {
  double zero_threshold = 1e-5;
  double rank_tolerance = 1e-3;  // sigma_2 / sigma_1 below this counts as rank one
  double overlap_tolerance = 1e-4;
  double feasibility_tolerance = 1e-6;
  double gap_tolerance = 1e-4;
};

struct CliqueRank {
  int clique = 0;
  int rank = 0;          // numerical rank of the thresholded M_1(y, I_l)
  double ratio = 0.0;    // sigma_2 / sigma_1
  int components = 0;    // diagonal blocks after thresholding
};

struct ExtractionResult {
  std::optional<std::vector<double>> x;
  std::vector<CliqueRank> ranks;
  double feasibility_residual = 0.0;
  double objective = 0.0;  // f(x*) in the problem's own sense
  double gap = 0.0;        // percent, relative to max(1, |f(x*)|)
  bool certified = false;
  bool partial = false;  // candidate assembled from some rank-deficient blocks
  std::string message;
};

/// (AC - opt) / AC * 100.
inline double optimality_gap(double ac, double opt) {
  if (ac == 0.0) throw std::invalid_argument("optimality gap undefined for AC = 0");
  return (ac - opt) / ac * 100.0;
}

/// Adds eps * sum c_i x_i with seeded c_i in [0,1]; breaks sign symmetries so
/// that a problem with several global minimizers has a unique one nearby.
inline POPInstance perturb_objective(const POPInstance& pop, double eps = 1e-4, std::uint64_t seed = 0) {
  POPInstance out = pop;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t i = 0; i < pop.n; ++i) out.objective.add_term(Exponent::unit(pop.n, i), eps * unif(rng));
  return out;
}

inline double feasibility_residual(const POPInstance& pop, const std::vector<double>& x) {
  double r = 0.0;
  for (const auto& c : pop.constraints) {
    const double v = c.poly.evaluate(x);
    r = std::max(r, c.kind == ConstraintKind::Eq0 ? std::abs(v) : std::max(0.0, -v));
  }
  return r;
}

/// Reads a candidate minimizer off the order-one moment blocks. Never throws
/// on numerical trouble; the outcome is described by the result fields.
inline ExtractionResult extract_solution(const SDPSolution& sol, const SDPProblem& sdp, const CliqueDecomposition& dec,
                                         const POPInstance& pop, const ExtractionOptions& opt = {}) {
  ExtractionResult out;
  const std::size_t n = pop.n;
  std::vector<double> x(n, 0.0);
  std::vector<char> seen(n, 0);
  bool all_rank_one = true, consistent = true;
  std::size_t found = 0;

  for (const auto& blk : sdp.blocks) {
    if (!blk.first_order) continue;
    ++found;
    const auto k = static_cast<Eigen::Index>(blk.size());
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(k, k);
    for (const auto& e : blk.entries) {
      double v = 0.0;
      for (const auto& t : e.terms) v += t.coef * sol.y.at(static_cast<std::size_t>(t.var));
      M(e.row, e.col) = M(e.col, e.row) = v;
    }
    M = M.unaryExpr([&](double v) { return std::abs(v) < opt.zero_threshold ? 0.0 : v; });

    CliqueRank cr;
    cr.clique = blk.clique;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const auto sv = svd.singularValues();
    const double s1 = sv.size() ? sv[0] : 0.0;
    cr.ratio = sv.size() > 1 && s1 > 0 ? sv[1] / s1 : 0.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (s1 > 0 && sv[i] >= opt.rank_tolerance * s1) ++cr.rank;
    if (cr.rank != 1) all_rank_one = false;

    // basis is {1, x_i for i in the clique}; walk each component of the
    // nonzero pattern, rooted at the constant entry when it belongs to it
    std::vector<int> sign(static_cast<std::size_t>(k), 0);
    for (Eigen::Index root = 0; root < k; ++root) {
      if (sign[static_cast<std::size_t>(root)] != 0) continue;
      ++cr.components;
      sign[static_cast<std::size_t>(root)] = 1;
      std::queue<Eigen::Index> q;
      q.push(root);
      while (!q.empty()) {
        const auto u = q.front();
        q.pop();
        for (Eigen::Index v = 0; v < k; ++v)
          if (v != u && M(u, v) != 0.0 && sign[static_cast<std::size_t>(v)] == 0) {
            sign[static_cast<std::size_t>(v)] = M(u, v) > 0 ? sign[static_cast<std::size_t>(u)] : -sign[static_cast<std::size_t>(u)];
            q.push(v);
          }
      }
    }
    const double y0 = M(0, 0) > 0 ? M(0, 0) : 1.0;
    for (Eigen::Index i = 1; i < k; ++i) {
      const auto var = static_cast<std::size_t>(blk.basis[static_cast<std::size_t>(i)].support().at(0));
      const double val = sign[static_cast<std::size_t>(i)] * std::sqrt(std::max(0.0, M(i, i)) / y0);
      if (seen[var] && std::abs(x[var] - val) > opt.overlap_tolerance) consistent = false;
      if (!seen[var]) x[var] = val;
      seen[var] = 1;
    }
    out.ranks.push_back(cr);
  }

  if (found == 0) {
    out.message = "no first-order moment blocks; assemble with first_order_blocks";
    return out;
  }
  if (found != dec.size()) {
    out.message = "expected one first-order block per clique";
    return out;
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!seen[i]) {
      out.message = "variable x" + std::to_string(i + 1) + " is not covered by any clique";
      return out;
    }

  out.x = x;
  out.partial = !all_rank_one;
  out.feasibility_residual = feasibility_residual(pop, x);
  out.objective = pop.objective.evaluate(x);
  const double excess = sdp.objective_sign * (out.objective - sol.objective);
  out.gap = excess / std::max(1.0, std::abs(out.objective)) * 100.0;
  const bool feasible = out.feasibility_residual <= opt.feasibility_tolerance;
  const bool tight = excess / std::max(1.0, std::abs(out.objective)) <= opt.gap_tolerance;
  out.certified = all_rank_one && consistent && feasible && tight && is_success(sol.status);
  if (!all_rank_one) out.message = "moment block of rank greater than one";
  else if (!consistent) out.message = "cliques disagree on shared variables";
  else if (!feasible) out.message = "candidate violates the constraints";
  else if (!tight) out.message = "candidate value is not within tolerance of the bound";
  else if (!out.certified) out.message = "solver did not converge";
  else out.message = "certified global minimizer";
  return out;
}

}  // namespace cstssos

#endif  // CSTSSOS_EXTRACT_HPP

#ifndef CSTSSOS_CERTIFICATE_HPP
#define CSTSSOS_CERTIFICATE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "cstssos/sdp.hpp"
#include "cstssos/sign_symmetry.hpp"

namespace cstssos {

struct CertificateOptions {
  int samples = 100;
  std::uint64_t seed = 1;
  double zero_threshold = 1e-6;
};

struct CertificateReport {
  double rho = 0.0;                   // constant of the certificate, internal sense
  double coefficient_residual = 0.0;  // max |coefficient| of rho + sum sigma g + sum lambda h - f
  double evaluation_residual = 0.0;   // max |value| of the same at the sample points
  bool symmetry_consistent = true;
  std::size_t symmetry_violations = 0;
};

/// Rebuilds the sum-of-squares decomposition from the Gram matrices of `sol`
/// and measures how far it is from the objective.  Everything is in the
/// internal (minimization) sense, i.e. against objective_sign * f.
inline CertificateReport check_certificate(const SDPSolution& sol, const SDPProblem& sdp, const POPInstance& pop,
                                           const CertificateOptions& opt = {}) {
  if (sol.dual.size() != sdp.blocks.size()) throw std::invalid_argument("solution carries no Gram matrices");
  if (sol.equality_multipliers.size() != sdp.equalities.size())
    throw std::invalid_argument("solution carries no equality multipliers");
  const bool bin = sdp.provenance.binary;
  const std::size_t n = pop.n;
  const double sign = sdp.objective_sign;

  std::vector<Polynomial> g;
  for (std::size_t j = 0; j <= pop.m(); ++j) g.push_back(pop.constraint_poly(j));
  Polynomial f = pop.objective;

  CertificateReport rep;
  rep.rho = sign * sol.dual_objective;

  // coefficient residual
  Polynomial res = Polynomial::constant(n, rep.rho);
  for (std::size_t b = 0; b < sdp.blocks.size(); ++b) {
    const auto& blk = sdp.blocks[b];
    const auto& X = sol.dual[b];
    Polynomial sigma(n);
    for (std::size_t r = 0; r < blk.size(); ++r)
      for (std::size_t c = 0; c < blk.size(); ++c)
        sigma.add_term(blk.basis[r] + blk.basis[c], X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
    res += sigma * g[static_cast<std::size_t>(blk.constraint)];
  }
  for (std::size_t r = 0; r < sdp.equalities.size(); ++r) {
    const auto& zr = sdp.equalities[r];
    res += Polynomial::monomial(zr.shift, sol.equality_multipliers[r]) * g[static_cast<std::size_t>(zr.constraint)];
  }
  res -= sign * f;
  if (bin) res = res.reduced_binary();
  rep.coefficient_residual = res.max_abs_coefficient();

  // evaluation residual, term by term so it does not reuse the expansion above
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<double> x(n);
  for (int s = 0; s < opt.samples; ++s) {
    for (auto& v : x) v = bin ? (rng() >> 63 ? -1.0 : 1.0) : unif(rng);
    double total = rep.rho - sign * f.evaluate(x);
    for (std::size_t b = 0; b < sdp.blocks.size(); ++b) {
      const auto& blk = sdp.blocks[b];
      Eigen::VectorXd mono(static_cast<Eigen::Index>(blk.size()));
      for (std::size_t r = 0; r < blk.size(); ++r)
        mono[static_cast<Eigen::Index>(r)] = Polynomial::monomial(blk.basis[r]).evaluate(x);
      total += g[static_cast<std::size_t>(blk.constraint)].evaluate(x) * mono.dot(sol.dual[b] * mono);
    }
    for (std::size_t r = 0; r < sdp.equalities.size(); ++r) {
      const auto& zr = sdp.equalities[r];
      total += sol.equality_multipliers[r] * g[static_cast<std::size_t>(zr.constraint)].evaluate(x) *
               Polynomial::monomial(zr.shift).evaluate(x);
    }
    rep.evaluation_residual = std::max(rep.evaluation_residual, std::abs(total));
  }

  // Gram supports must respect the sign symmetries of the problem
  std::vector<Exponent> supp;
  for (const auto& p : g) {
    const auto q = bin ? p.reduced_binary() : p;
    for (const auto& a : q.support()) supp.push_back(a);
  }
  for (const auto& a : (bin ? f.reduced_binary() : f).support()) supp.push_back(a);
  const auto R = sign_symmetries(n, supp);
  for (std::size_t b = 0; b < sdp.blocks.size(); ++b) {
    const auto& blk = sdp.blocks[b];
    for (std::size_t r = 0; r < blk.size(); ++r)
      for (std::size_t c = r; c < blk.size(); ++c)
        if (std::abs(sol.dual[b](static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))) > opt.zero_threshold &&
            !R.respects(blk.basis[r] + blk.basis[c]))
          ++rep.symmetry_violations;
  }
  rep.symmetry_consistent = rep.symmetry_violations == 0;
  return rep;
}

}  // namespace cstssos

#endif  // CSTSSOS_CERTIFICATE_HPP

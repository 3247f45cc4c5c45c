#ifndef CSTSSOS_SDP_HPP
#define CSTSSOS_SDP_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "cstssos/relax.hpp"

namespace cstssos {

enum class SolverStatus { Optimal, NearOptimal, Infeasible, Unbounded, IterLimit, NumericalFailure };

inline std::string to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::Optimal: return "optimal";
    case SolverStatus::NearOptimal: return "near_optimal";
    case SolverStatus::Infeasible: return "infeasible";
    case SolverStatus::Unbounded: return "unbounded";
    case SolverStatus::IterLimit: return "iteration_limit";
    case SolverStatus::NumericalFailure: return "numerical_failure";
  }
  return "?";
}

inline bool is_success(SolverStatus s) { return s == SolverStatus::Optimal || s == SolverStatus::NearOptimal; }

struct SolverConfig {
  int max_iterations = 200;
  double feasibility_tol = 1e-8;
  double gap_tol = 1e-8;
  double near_tol = 1e-6;
  double step_fraction = 0.98;
  double regularization = 1e-10;
  double retry_regularization = 1e-8;

  void validate() const {
    if (max_iterations < 1) throw std::invalid_argument("max_iterations must be positive");
    if (!(feasibility_tol > 0) || !(gap_tol > 0) || !(near_tol > 0))
      throw std::invalid_argument("solver tolerances must be positive");
    if (!(step_fraction > 0 && step_fraction < 1)) throw std::invalid_argument("step fraction must lie in (0,1)");
  }
};

struct SDPSolution {
  SolverStatus status = SolverStatus::NumericalFailure;
  std::vector<double> y;                 // every layout variable, y[0] = 1
  double objective = 0.0;                // bound in the problem's own sense
  double dual_objective = 0.0;           // value certified by the Gram matrices
  std::vector<Eigen::MatrixXd> primal;   // moment / localizing blocks
  std::vector<Eigen::MatrixXd> dual;     // Gram matrices
  std::vector<double> equality_multipliers;
  int iterations = 0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double relative_gap = 0.0;
};

/// Sparse symmetric coefficient matrix of one free variable in one block,
/// stored as its upper triangle.
struct BlockCoefficient {
  int var = 0;
  std::vector<std::tuple<int, int, double>> entries;
};

struct ReducedBlock {
  int size = 0;
  Eigen::MatrixXd constant;
  std::vector<BlockCoefficient> coefficients;  // sorted by var
};

/// The SDP after y_0 = 1 substitution and elimination of equality rows:
/// minimize c^T z + c0 subject to S_b(z) = constant_b + sum_i z_i A_{b,i} >= 0,
/// with the moment vector recovered as y = t + T z.
struct ReducedSDP {
  int m = 0;
  std::vector<double> c;
  double c0 = 0.0;
  std::vector<ReducedBlock> blocks;
  Eigen::SparseMatrix<double> T;  // layout.size() x m
  Eigen::VectorXd t;
  bool infeasible = false;  // equality rows inconsistent
  bool unbounded = false;   // two variables with proportional cones but not objectives

  Eigen::VectorXd moments(const Eigen::VectorXd& z) const { return t + T * z; }
};

namespace detail {

/// Gaussian elimination of E y = rhs; pivots are searched in `order`.
struct Elimination {
  std::vector<int> pivot_var;                // per pivot row
  std::vector<std::vector<double>> rows;     // reduced rows over all columns
  std::vector<double> rhs;
  bool inconsistent = false;
};

inline Elimination eliminate(std::vector<std::vector<double>> rows, std::vector<double> rhs,
                             const std::vector<int>& order) {
  Elimination out;
  double scale = 0.0;
  for (const auto& r : rows)
    for (double v : r) scale = std::max(scale, std::abs(v));
  const double tol = 1e-12 * std::max(1.0, scale);
  std::size_t next = 0;
  for (int col : order) {
    if (next == rows.size()) break;
    std::size_t best = next;
    for (std::size_t r = next; r < rows.size(); ++r)
      if (std::abs(rows[r][static_cast<std::size_t>(col)]) > std::abs(rows[best][static_cast<std::size_t>(col)])) best = r;
    const double p = rows[best][static_cast<std::size_t>(col)];
    if (std::abs(p) <= tol) continue;
    std::swap(rows[best], rows[next]);
    std::swap(rhs[best], rhs[next]);
    for (auto& v : rows[next]) v /= p;
    rhs[next] /= p;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == next) continue;
      const double f = rows[r][static_cast<std::size_t>(col)];
      if (f == 0.0) continue;
      for (std::size_t k = 0; k < rows[r].size(); ++k) rows[r][k] -= f * rows[next][k];
      rows[r][static_cast<std::size_t>(col)] = 0.0;
      rhs[r] -= f * rhs[next];
    }
    out.pivot_var.push_back(col);
    ++next;
  }
  double rhs_scale = 1.0;
  for (double v : rhs) rhs_scale = std::max(rhs_scale, std::abs(v));
  for (std::size_t r = next; r < rows.size(); ++r)
    if (std::abs(rhs[r]) > 1e-9 * rhs_scale) out.inconsistent = true;
  rows.resize(next);
  rhs.resize(next);
  out.rows = std::move(rows);
  out.rhs = std::move(rhs);
  return out;
}


/// Variables whose coefficient matrices are proportional in every block (for
/// instance moments that only occur together in one localizing entry) make
/// the Schur complement singular. Only their combination matters, so all but
/// one are fixed to zero.
inline void merge_proportional(ReducedSDP& red) {
  using Key = std::vector<std::tuple<int, int, int, double>>;
  std::vector<Key> sig(static_cast<std::size_t>(red.m));
  std::vector<double> lead(static_cast<std::size_t>(red.m), 0.0);
  for (std::size_t b = 0; b < red.blocks.size(); ++b)
    for (const auto& a : red.blocks[b].coefficients)
      for (const auto& [r, c, v] : a.entries) sig[static_cast<std::size_t>(a.var)].emplace_back(static_cast<int>(b), r, c, v);
  std::map<Key, int> rep;
  std::vector<int> keep(static_cast<std::size_t>(red.m), 1);
  for (int z = 0; z < red.m; ++z) {
    auto& k = sig[static_cast<std::size_t>(z)];
    if (k.empty()) continue;
    lead[static_cast<std::size_t>(z)] = std::get<3>(k.front());
    for (auto& e : k) std::get<3>(e) /= lead[static_cast<std::size_t>(z)];
    auto [it, fresh] = rep.emplace(k, z);
    if (fresh) continue;
    const int r = it->second;
    const double ratio = lead[static_cast<std::size_t>(z)] / lead[static_cast<std::size_t>(r)];
    const double cz = red.c[static_cast<std::size_t>(z)], cr = red.c[static_cast<std::size_t>(r)];
    if (std::abs(cz - ratio * cr) > 1e-12 * (1.0 + std::abs(cz) + std::abs(ratio * cr))) red.unbounded = true;
    keep[static_cast<std::size_t>(z)] = 0;
  }
  std::vector<int> index(static_cast<std::size_t>(red.m), -1);
  int m = 0;
  for (int z = 0; z < red.m; ++z)
    if (keep[static_cast<std::size_t>(z)]) index[static_cast<std::size_t>(z)] = m++;
  if (m == red.m) return;
  std::vector<double> c;
  for (int z = 0; z < red.m; ++z)
    if (keep[static_cast<std::size_t>(z)]) c.push_back(red.c[static_cast<std::size_t>(z)]);
  for (auto& b : red.blocks) {
    std::vector<BlockCoefficient> kept;
    for (auto& a : b.coefficients)
      if (keep[static_cast<std::size_t>(a.var)]) {
        a.var = index[static_cast<std::size_t>(a.var)];
        kept.push_back(std::move(a));
      }
    b.coefficients = std::move(kept);
  }
  std::vector<Eigen::Triplet<double>> trips;
  for (int k = 0; k < red.T.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(red.T, k); it; ++it)
      if (keep[static_cast<std::size_t>(it.col())]) trips.emplace_back(static_cast<int>(it.row()), index[static_cast<std::size_t>(it.col())], it.value());
  Eigen::SparseMatrix<double> T(red.T.rows(), m);
  T.setFromTriplets(trips.begin(), trips.end());
  red.T = std::move(T);
  red.c = std::move(c);
  red.m = m;
}

}  // namespace detail

inline ReducedSDP reduce(const SDPProblem& sdp) {
  const std::size_t N = sdp.layout.size();
  std::vector<char> in_block(N, 0);
  for (const auto& b : sdp.blocks)
    for (const auto& e : b.entries)
      for (const auto& t : e.terms) in_block[static_cast<std::size_t>(t.var)] = 1;

  // Pivot preference: variables that no cone sees, then the rest by index.
  std::vector<int> order;
  for (std::size_t k = 1; k < N; ++k)
    if (!in_block[k]) order.push_back(static_cast<int>(k));
  for (std::size_t k = 1; k < N; ++k)
    if (in_block[k]) order.push_back(static_cast<int>(k));

  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  for (const auto& zr : sdp.equalities) {
    std::vector<double> row(N, 0.0);
    double r0 = 0.0;
    for (const auto& t : zr.terms) {
      if (t.var == 0) r0 -= t.coef;
      else row[static_cast<std::size_t>(t.var)] += t.coef;
    }
    rows.push_back(std::move(row));
    rhs.push_back(r0);
  }
  const auto el = detail::eliminate(std::move(rows), std::move(rhs), order);

  ReducedSDP red;
  red.infeasible = el.inconsistent;
  std::vector<int> pivot_row(N, -1);
  for (std::size_t r = 0; r < el.pivot_var.size(); ++r) pivot_row[static_cast<std::size_t>(el.pivot_var[r])] = static_cast<int>(r);
  std::vector<int> zi(N, -1);
  for (std::size_t k = 1; k < N; ++k)
    if (pivot_row[k] < 0) zi[k] = red.m++;

  // y_k = t_k + sum_z T_kz z
  std::vector<Eigen::Triplet<double>> trips;
  red.t = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(N));
  red.t[0] = 1.0;
  std::vector<std::vector<std::pair<int, double>>> affine(N);
  for (std::size_t k = 1; k < N; ++k) {
    if (zi[k] >= 0) {
      affine[k].push_back({zi[k], 1.0});
      continue;
    }
    const auto r = static_cast<std::size_t>(pivot_row[k]);
    red.t[static_cast<Eigen::Index>(k)] = el.rhs[r];
    for (std::size_t f = 1; f < N; ++f)
      if (zi[f] >= 0 && el.rows[r][f] != 0.0) affine[k].push_back({zi[f], -el.rows[r][f]});
  }
  for (std::size_t k = 1; k < N; ++k)
    for (auto [z, v] : affine[k]) trips.emplace_back(static_cast<int>(k), z, v);
  red.T.resize(static_cast<Eigen::Index>(N), red.m);
  red.T.setFromTriplets(trips.begin(), trips.end());

  red.c.assign(static_cast<std::size_t>(red.m), 0.0);
  red.c0 = sdp.objective[0];
  for (std::size_t k = 1; k < N; ++k) {
    const double ck = sdp.objective[k];
    if (ck == 0.0) continue;
    red.c0 += ck * red.t[static_cast<Eigen::Index>(k)];
    for (auto [z, v] : affine[k]) red.c[static_cast<std::size_t>(z)] += ck * v;
  }

  for (const auto& b : sdp.blocks) {
    ReducedBlock rb;
    rb.size = static_cast<int>(b.size());
    rb.constant = Eigen::MatrixXd::Zero(rb.size, rb.size);
    std::vector<std::tuple<int, int, int, double>> acc;  // z, row, col, value
    for (const auto& e : b.entries) {
      for (const auto& t : e.terms) {
        const auto k = static_cast<std::size_t>(t.var);
        const double cst = k == 0 ? t.coef : t.coef * red.t[static_cast<Eigen::Index>(k)];
        if (cst != 0.0) {
          rb.constant(e.row, e.col) += cst;
          if (e.row != e.col) rb.constant(e.col, e.row) += cst;
        }
        if (k != 0)
          for (auto [z, v] : affine[k]) acc.emplace_back(z, e.row, e.col, t.coef * v);
      }
    }
    std::sort(acc.begin(), acc.end());
    for (std::size_t i = 0; i < acc.size();) {
      const int z = std::get<0>(acc[i]);
      BlockCoefficient bc{z, {}};
      while (i < acc.size() && std::get<0>(acc[i]) == z) {
        const int r = std::get<1>(acc[i]), c = std::get<2>(acc[i]);
        double v = 0.0;
        while (i < acc.size() && std::get<0>(acc[i]) == z && std::get<1>(acc[i]) == r && std::get<2>(acc[i]) == c)
          v += std::get<3>(acc[i++]);
        if (v != 0.0) bc.entries.emplace_back(r, c, v);
      }
      if (!bc.entries.empty()) rb.coefficients.push_back(std::move(bc));
    }
    red.blocks.push_back(std::move(rb));
  }
  detail::merge_proportional(red);
  return red;
}

namespace detail {

inline void add_coefficient(Eigen::MatrixXd& m, const BlockCoefficient& a, double s) {
  for (const auto& [r, c, v] : a.entries) {
    m(r, c) += s * v;
    if (r != c) m(c, r) += s * v;
  }
}

inline double inner(const BlockCoefficient& a, const Eigen::MatrixXd& x) {
  double s = 0.0;
  for (const auto& [r, c, v] : a.entries) s += r == c ? v * x(r, c) : v * (x(r, c) + x(c, r));
  return s;
}

/// Largest alpha with M + alpha D >= 0, given the Cholesky factor of M.
inline double max_step(const Eigen::MatrixXd& L, const Eigen::MatrixXd& D) {
  const auto tri = L.triangularView<Eigen::Lower>();
  Eigen::MatrixXd Y = tri.solve(D);
  Eigen::MatrixXd Z = tri.solve(Y.transpose());
  Z = 0.5 * (Z + Z.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Z, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  return lmin < 0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
}

struct BlockScaling {
  Eigen::MatrixXd LX, G, Ginv, W;
  Eigen::VectorXd lambda;
};

}  // namespace detail

/// Primal-dual interior-point method with Nesterov-Todd scaling and
/// Mehrotra's predictor-corrector on the reduced problem.
class InteriorPointSolver {
 public:
  InteriorPointSolver(const ReducedSDP& p, SolverConfig cfg) : p_(p), cfg_(cfg) { cfg_.validate(); }

  struct Result {
    SolverStatus status = SolverStatus::NumericalFailure;
    Eigen::VectorXd z;
    std::vector<Eigen::MatrixXd> X, S;
    double pobj = 0, dobj = 0, pinf = 0, dinf = 0, gap = 0;
    int iterations = 0;
  };

  Result run() {
    Result res;
    const int m = p_.m;
    res.z = Eigen::VectorXd::Zero(m);
    if (p_.infeasible) {
      res.status = SolverStatus::Infeasible;
      return res;
    }
    if (p_.unbounded) {
      res.status = SolverStatus::Unbounded;
      return res;
    }
    setup();
    for (int i = 0; i < m; ++i)
      if (schur_index_[static_cast<std::size_t>(i)] < 0 && std::abs(p_.c[static_cast<std::size_t>(i)]) > 1e-12) {
        res.status = SolverStatus::Unbounded;
        return res;
      }

    const std::size_t nb = p_.blocks.size();
    std::size_t ntot = 0;
    double max_a = 0.0, a0n = 0.0, cratio = 0.0;
    for (const auto& b : p_.blocks) {
      ntot += static_cast<std::size_t>(b.size);
      a0n += b.constant.squaredNorm();
    }
    a0n = std::sqrt(a0n);
    for (int i = 0; i < m; ++i) {
      const double an = std::sqrt(anorm2_[static_cast<std::size_t>(i)]);
      max_a = std::max(max_a, an);
      cratio = std::max(cratio, (1.0 + std::abs(p_.c[static_cast<std::size_t>(i)])) / (1.0 + an));
    }
    if (ntot == 0) {
      res.status = m == 0 ? SolverStatus::Optimal : SolverStatus::Unbounded;
      res.pobj = res.dobj = p_.c0;
      return res;
    }
    const double dn = static_cast<double>(ntot);
    const double xi = 10.0 * std::max(1.0, dn * cratio);
    const double eta = 10.0 * std::max(1.0, (1.0 + std::max(max_a, a0n)) / std::sqrt(dn));
    std::vector<Eigen::MatrixXd> X(nb), S(nb);
    for (std::size_t b = 0; b < nb; ++b) {
      X[b] = xi * Eigen::MatrixXd::Identity(p_.blocks[b].size, p_.blocks[b].size);
      S[b] = eta * Eigen::MatrixXd::Identity(p_.blocks[b].size, p_.blocks[b].size);
    }
    Eigen::VectorXd z = Eigen::VectorXd::Zero(m);
    Eigen::Map<const Eigen::VectorXd> c(p_.c.data(), m);
    const double cn = c.norm();

    std::vector<detail::BlockScaling> sc(nb);
    std::vector<Eigen::MatrixXd> rp(nb), dXa(nb), dSa(nb), dX(nb), dS(nb), Rc(nb);
    double best_merit = std::numeric_limits<double>::infinity();
    Result best;

    for (int it = 0;; ++it) {
      // residuals and objectives
      double pinf2 = 0.0, xs = 0.0, a0x = 0.0;
      for (std::size_t b = 0; b < nb; ++b) {
        rp[b] = affine(b, z) - S[b];
        pinf2 += rp[b].squaredNorm();
        xs += X[b].cwiseProduct(S[b]).sum();
        a0x += p_.blocks[b].constant.cwiseProduct(X[b]).sum();
      }
      Eigen::VectorXd rd = c - adjoint(X);
      const double pobj = c.dot(z) + p_.c0;
      const double dobj = p_.c0 - a0x;
      const double pinf = std::sqrt(pinf2) / (1.0 + a0n);
      const double dinf = rd.norm() / (1.0 + cn);
      const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
      const double mu = xs / dn;

      auto snapshot = [&](SolverStatus st) {
        Result r;
        r.status = st;
        r.z = z;
        r.X = X;
        r.S = S;
        r.pobj = pobj;
        r.dobj = dobj;
        r.pinf = pinf;
        r.dinf = dinf;
        r.gap = gap;
        r.iterations = it;
        return r;
      };
      const double merit = std::max({pinf, dinf, gap});
      if (std::isfinite(merit) && merit < best_merit) {
        best_merit = merit;
        best = snapshot(SolverStatus::IterLimit);
      }
      if (pinf <= cfg_.feasibility_tol && dinf <= cfg_.feasibility_tol && gap <= cfg_.gap_tol)
        return snapshot(SolverStatus::Optimal);
      if (!std::isfinite(merit)) return finish(best, SolverStatus::NumericalFailure);
      if (it >= cfg_.max_iterations) return finish(best, SolverStatus::IterLimit);
      // divergence heuristics: moment side unbounded or Gram side exploding
      if (pinf <= cfg_.near_tol && pobj < -1e10 * (1.0 + std::abs(dobj))) return snapshot(SolverStatus::Unbounded);
      if (dinf <= cfg_.near_tol && dobj > 1e10 * (1.0 + std::abs(pobj))) return snapshot(SolverStatus::Infeasible);

      bool ok = true;
      for (std::size_t b = 0; b < nb && ok; ++b) ok = scaling(X[b], S[b], sc[b]);
      if (!ok) return finish(best, SolverStatus::NumericalFailure);
      if (!factor_schur(sc)) return finish(best, SolverStatus::NumericalFailure);

      // predictor
      for (std::size_t b = 0; b < nb; ++b) Rc[b] = -Eigen::MatrixXd(sc[b].lambda.asDiagonal());
      if (!direction(sc, Rc, rp, rd, dXa, dSa, nullptr)) return finish(best, SolverStatus::NumericalFailure);
      double ap = 1.0, ad = 1.0;
      for (std::size_t b = 0; b < nb; ++b) {
        ap = std::min(ap, cfg_.step_fraction * detail::max_step(sc[b].LX, dXa[b]));
        ad = std::min(ad, cfg_.step_fraction * max_step_s(S[b], dSa[b]));
      }
      double xs_aff = 0.0;
      for (std::size_t b = 0; b < nb; ++b) xs_aff += (X[b] + ap * dXa[b]).cwiseProduct(S[b] + ad * dSa[b]).sum();
      const double sigma = std::clamp(std::pow(std::max(xs_aff, 0.0) / xs, 3.0), 0.0, 1.0);

      // corrector
      for (std::size_t b = 0; b < nb; ++b) {
        const auto& s = sc[b];
        const Eigen::MatrixXd dxt = s.Ginv * dXa[b] * s.Ginv.transpose();
        const Eigen::MatrixXd dst = s.G.transpose() * dSa[b] * s.G;
        Eigen::MatrixXd R = -0.5 * (dxt * dst + dst * dxt);
        const Eigen::Index k = s.lambda.size();
        for (Eigen::Index i = 0; i < k; ++i) R(i, i) += sigma * mu - s.lambda[i] * s.lambda[i];
        for (Eigen::Index i = 0; i < k; ++i)
          for (Eigen::Index j = 0; j < k; ++j) R(i, j) *= 2.0 / (s.lambda[i] + s.lambda[j]);
        Rc[b] = R;
      }
      Eigen::VectorXd dz;
      if (!direction(sc, Rc, rp, rd, dX, dS, &dz)) return finish(best, SolverStatus::NumericalFailure);
      ap = 1.0;
      ad = 1.0;
      for (std::size_t b = 0; b < nb; ++b) {
        ap = std::min(ap, cfg_.step_fraction * detail::max_step(sc[b].LX, dX[b]));
        ad = std::min(ad, cfg_.step_fraction * max_step_s(S[b], dS[b]));
      }
      if (ap < 1e-12 && ad < 1e-12) return finish(best, SolverStatus::NumericalFailure);
      for (std::size_t b = 0; b < nb; ++b) {
        X[b] += ap * dX[b];
        S[b] += ad * dS[b];
        X[b] = 0.5 * (X[b] + X[b].transpose()).eval();
        S[b] = 0.5 * (S[b] + S[b].transpose()).eval();
      }
      z += ad * dz;
    }
  }

 private:
  const ReducedSDP& p_;
  SolverConfig cfg_;
  std::vector<int> schur_index_;   // z index -> Schur row, -1 when the variable touches no block
  std::vector<int> schur_var_;
  std::vector<double> anorm2_;
  int ms_ = 0;
  bool sparse_ = false;
  Eigen::SparseMatrix<double> Msp_;
  template <class Scalar>
  struct SparseFactor {
    Eigen::SimplicialLLT<Eigen::SparseMatrix<Scalar>> llt;
    bool analyzed = false;
  };
  SparseFactor<double> sd_;
  SparseFactor<long double> sx_;
  Eigen::MatrixXd Md_;
  Eigen::LLT<Eigen::MatrixXd> dd_;
  Eigen::LLT<Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>> dx_;
  bool extended_ = false;  // Schur factorization in extended precision
  std::vector<std::vector<Eigen::Index>> offsets_;  // per block: lower-triangle value positions

  Result finish(Result best, SolverStatus fallback) {
    if (best.pinf <= cfg_.near_tol && best.dinf <= cfg_.near_tol && best.gap <= cfg_.near_tol && !best.X.empty())
      best.status = SolverStatus::NearOptimal;
    else
      best.status = fallback;
    return best;
  }

  void setup() {
    const int m = p_.m;
    anorm2_.assign(static_cast<std::size_t>(m), 0.0);
    schur_index_.assign(static_cast<std::size_t>(m), -1);
    for (const auto& b : p_.blocks)
      for (const auto& a : b.coefficients) {
        double s = 0.0;
        for (const auto& [r, cc, v] : a.entries) s += (r == cc ? 1.0 : 2.0) * v * v;
        anorm2_[static_cast<std::size_t>(a.var)] += s;
      }
    for (int i = 0; i < m; ++i)
      if (anorm2_[static_cast<std::size_t>(i)] > 0) {
        schur_index_[static_cast<std::size_t>(i)] = ms_++;
        schur_var_.push_back(i);
      }
    // density estimate decides between dense and sparse Cholesky
    std::vector<Eigen::Triplet<double>> pattern;
    for (const auto& b : p_.blocks)
      for (const auto& a : b.coefficients)
        for (const auto& a2 : b.coefficients) {
          const int i = schur_index_[static_cast<std::size_t>(a.var)], j = schur_index_[static_cast<std::size_t>(a2.var)];
          if (i >= j) pattern.emplace_back(i, j, 0.0);
        }
    for (int i = 0; i < ms_; ++i) pattern.emplace_back(i, i, 0.0);
    Msp_.resize(ms_, ms_);
    Msp_.setFromTriplets(pattern.begin(), pattern.end());
    Msp_.makeCompressed();
    sparse_ = ms_ > 400 && static_cast<double>(Msp_.nonZeros()) < 0.15 * static_cast<double>(ms_) * (ms_ + 1) / 2.0;
    if (sparse_) {
      offsets_.resize(p_.blocks.size());
      for (std::size_t bi = 0; bi < p_.blocks.size(); ++bi) {
        const auto& b = p_.blocks[bi];
        auto& off = offsets_[bi];
        const std::size_t nv = b.coefficients.size();
        off.assign(nv * nv, -1);
        for (std::size_t x = 0; x < nv; ++x)
          for (std::size_t y = 0; y < nv; ++y) {
            const int i = schur_index_[static_cast<std::size_t>(b.coefficients[x].var)];
            const int j = schur_index_[static_cast<std::size_t>(b.coefficients[y].var)];
            if (i < j) continue;
            const Eigen::Index start = Msp_.outerIndexPtr()[j], end = Msp_.outerIndexPtr()[j + 1];
            const int* first = Msp_.innerIndexPtr() + start;
            const int* last = Msp_.innerIndexPtr() + end;
            const int* pos = std::lower_bound(first, last, i);
            off[x * nv + y] = start + (pos - first);
          }
      }
    }
  }

  Eigen::MatrixXd affine(std::size_t b, const Eigen::VectorXd& z) const {
    Eigen::MatrixXd m = p_.blocks[b].constant;
    for (const auto& a : p_.blocks[b].coefficients) detail::add_coefficient(m, a, z[a.var]);
    return m;
  }

  Eigen::VectorXd adjoint(const std::vector<Eigen::MatrixXd>& X) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(p_.m);
    for (std::size_t b = 0; b < p_.blocks.size(); ++b)
      for (const auto& a : p_.blocks[b].coefficients) v[a.var] += detail::inner(a, X[b]);
    return v;
  }

  static double max_step_s(const Eigen::MatrixXd& S, const Eigen::MatrixXd& D) {
    Eigen::LLT<Eigen::MatrixXd> llt(S);
    if (llt.info() != Eigen::Success) return 0.0;
    return detail::max_step(llt.matrixL(), D);
  }

  static bool scaling(const Eigen::MatrixXd& X, const Eigen::MatrixXd& S, detail::BlockScaling& s) {
    Eigen::LLT<Eigen::MatrixXd> lx(X), ls(S);
    if (lx.info() != Eigen::Success || ls.info() != Eigen::Success) return false;
    s.LX = lx.matrixL();
    const Eigen::MatrixXd LS = ls.matrixL();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(LS.transpose() * s.LX, Eigen::ComputeFullU | Eigen::ComputeFullV);
    s.lambda = svd.singularValues();
    if (s.lambda.minCoeff() <= 0 || !s.lambda.allFinite()) return false;
    const Eigen::VectorXd isq = s.lambda.cwiseSqrt().cwiseInverse();
    s.G = s.LX * svd.matrixV() * isq.asDiagonal();
    // G^{-1} = D^{1/2} V^T L_X^{-1}
    const Eigen::MatrixXd VtLinv =
        s.LX.triangularView<Eigen::Lower>().transpose().solve(svd.matrixV()).transpose();
    s.Ginv = s.lambda.cwiseSqrt().asDiagonal() * VtLinv;
    s.W = s.G * s.G.transpose();
    return true;
  }

  bool factor_schur(const std::vector<detail::BlockScaling>& sc) {
    if (sparse_) std::fill(Msp_.valuePtr(), Msp_.valuePtr() + Msp_.nonZeros(), 0.0);
    else Md_ = Eigen::MatrixXd::Zero(ms_, ms_);
    for (std::size_t bi = 0; bi < p_.blocks.size(); ++bi) {
      const auto& b = p_.blocks[bi];
      const Eigen::MatrixXd& W = sc[bi].W;
      const std::size_t nv = b.coefficients.size();
      for (std::size_t x = 0; x < nv; ++x) {
        Eigen::MatrixXd P = Eigen::MatrixXd::Zero(b.size, b.size);
        for (const auto& [r, cc, v] : b.coefficients[x].entries) {
          P.noalias() += v * W.col(r) * W.row(cc);
          if (r != cc) P.noalias() += v * W.col(cc) * W.row(r);
        }
        const int i = schur_index_[static_cast<std::size_t>(b.coefficients[x].var)];
        for (std::size_t y = 0; y < nv; ++y) {
          const int j = schur_index_[static_cast<std::size_t>(b.coefficients[y].var)];
          if (i < j) continue;
          const double val = detail::inner(b.coefficients[y], P);
          if (sparse_) Msp_.valuePtr()[offsets_[bi][x * nv + y]] += val;
          else Md_(i, j) += val;
        }
      }
    }
    return factorize();
  }

  // Static shift `reg` plus a relative shift `rel` of each diagonal entry.
  template <class Scalar, class Sparse, class Dense>
  bool factorize_as(Sparse& sp, Dense& de, double reg, double rel) {
    if (sparse_) {
      Eigen::SparseMatrix<Scalar> M = Msp_.cast<Scalar>();
      for (int i = 0; i < ms_; ++i) M.coeffRef(i, i) = M.coeff(i, i) * (Scalar(1) + Scalar(rel)) + Scalar(reg);
      if (!sp.analyzed) {
        sp.llt.analyzePattern(M);
        sp.analyzed = true;
      }
      sp.llt.factorize(M);
      return sp.llt.info() == Eigen::Success;
    }
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> M = Md_.cast<Scalar>().template selfadjointView<Eigen::Lower>();
    M.diagonal() = M.diagonal() * (Scalar(1) + Scalar(rel));
    M.diagonal().array() += Scalar(reg);
    de.compute(M);
    return de.info() == Eigen::Success;
  }

  bool factorize_with(double reg, double rel) {
    return extended_ ? factorize_as<long double>(sx_, dx_, reg, rel) : factorize_as<double>(sd_, dd_, reg, rel);
  }

  // Escalation: static shift, larger shift, extended precision, then
  // diagonal-relative shifts (iterative refinement removes their bias).
  bool factorize() {
    for (double reg : {cfg_.regularization, cfg_.retry_regularization})
      if (factorize_with(reg, 0.0)) return true;
    if (!extended_) {
      extended_ = true;
      for (double reg : {cfg_.regularization, cfg_.retry_regularization})
        if (factorize_with(reg, 0.0)) return true;
    }
    for (double rel : {cfg_.regularization, cfg_.retry_regularization})
      if (factorize_with(0.0, rel)) return true;
    return false;
  }

  Eigen::VectorXd schur_solve(const Eigen::VectorXd& r) const {
    if (extended_) {
      using V = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
      const V rl = r.cast<long double>();
      return sparse_ ? Eigen::VectorXd(V(sx_.llt.solve(rl)).cast<double>()) : Eigen::VectorXd(V(dx_.solve(rl)).cast<double>());
    }
    return sparse_ ? Eigen::VectorXd(sd_.llt.solve(r)) : Eigen::VectorXd(dd_.solve(r));
  }

  double schur_residual(const Eigen::VectorXd& rhs, const Eigen::VectorXd& sol) const {
    return (rhs - schur_apply(sol)).norm() / (1.0 + rhs.norm());
  }

  // iterative refinement against the unregularized Schur matrix
  Eigen::VectorXd refined_solve(const Eigen::VectorXd& rhs) const {
    Eigen::VectorXd sol = schur_solve(rhs);
    for (int pass = 0; pass < 5 && sol.allFinite(); ++pass) {
      const Eigen::VectorXd r = rhs - schur_apply(sol);
      if (r.norm() <= 1e-15 * (1.0 + rhs.norm())) break;
      sol += schur_solve(r);
    }
    return sol;
  }

  Eigen::VectorXd schur_apply(const Eigen::VectorXd& v) const {
    return sparse_ ? Eigen::VectorXd(Msp_.selfadjointView<Eigen::Lower>() * v)
                   : Eigen::VectorXd(Md_.selfadjointView<Eigen::Lower>() * v);
  }

  // Rt is the scaled complementarity target: dX~ + dS~ = Rt.
  bool direction(const std::vector<detail::BlockScaling>& sc, const std::vector<Eigen::MatrixXd>& Rt,
                 const std::vector<Eigen::MatrixXd>& rp, const Eigen::VectorXd& rd, std::vector<Eigen::MatrixXd>& dX,
                 std::vector<Eigen::MatrixXd>& dS, Eigen::VectorXd* dz_out) {
    const std::size_t nb = p_.blocks.size();
    std::vector<Eigen::MatrixXd> T(nb);
    for (std::size_t b = 0; b < nb; ++b) T[b] = sc[b].G * Rt[b] * sc[b].G.transpose() - sc[b].W * rp[b] * sc[b].W;
    const Eigen::VectorXd full = adjoint(T) - rd;
    Eigen::VectorXd rhs(ms_);
    for (int i = 0; i < ms_; ++i) rhs[i] = full[schur_var_[static_cast<std::size_t>(i)]];
    Eigen::VectorXd sol = refined_solve(rhs);
    if (!extended_ && !(schur_residual(rhs, sol) <= 1e-12)) {
      // the double factor has run out of digits; switch precision for good
      extended_ = true;
      if (!factorize()) return false;
      sol = refined_solve(rhs);
    }
    if (!sol.allFinite()) return false;
    Eigen::VectorXd dz = Eigen::VectorXd::Zero(p_.m);
    for (int i = 0; i < ms_; ++i) dz[schur_var_[static_cast<std::size_t>(i)]] = sol[i];
    for (std::size_t b = 0; b < nb; ++b) {
      dS[b] = rp[b];
      for (const auto& a : p_.blocks[b].coefficients) detail::add_coefficient(dS[b], a, dz[a.var]);
      dX[b] = sc[b].G * (Rt[b] - sc[b].G.transpose() * dS[b] * sc[b].G) * sc[b].G.transpose();
      dX[b] = 0.5 * (dX[b] + dX[b].transpose()).eval();
    }
    if (dz_out) *dz_out = std::move(dz);
    return true;
  }
};

/// Solves the moment SDP and maps the result back to moments and Gram matrices.
inline SDPSolution solve_internal(const SDPProblem& sdp, const SolverConfig& cfg = {}) {
  for (const auto& b : sdp.blocks)
    if (b.size() == 0) throw std::invalid_argument("empty PSD block");
  const ReducedSDP red = reduce(sdp);
  InteriorPointSolver ipm(red, cfg);
  auto r = ipm.run();

  SDPSolution sol;
  sol.status = r.status;
  sol.iterations = r.iterations;
  sol.primal_infeasibility = r.pinf;
  sol.dual_infeasibility = r.dinf;
  sol.relative_gap = r.gap;
  const Eigen::VectorXd y = red.moments(r.z);
  sol.y.assign(y.data(), y.data() + y.size());
  sol.primal = r.S;
  sol.dual = r.X;
  if (sol.primal.empty())
    for (const auto& b : red.blocks) {
      sol.primal.push_back(Eigen::MatrixXd::Zero(b.size, b.size));
      sol.dual.push_back(Eigen::MatrixXd::Zero(b.size, b.size));
    }

  // Equality multipliers: the part of the objective the Gram matrices leave
  // unexplained must lie in the row space of the equality rows.
  const std::size_t N = sdp.layout.size();
  Eigen::VectorXd resid = Eigen::Map<const Eigen::VectorXd>(sdp.objective.data(), static_cast<Eigen::Index>(N));
  for (std::size_t b = 0; b < sdp.blocks.size(); ++b)
    for (const auto& e : sdp.blocks[b].entries) {
      const double x = e.row == e.col ? sol.dual[b](e.row, e.col) : 2.0 * sol.dual[b](e.row, e.col);
      for (const auto& t : e.terms) resid[t.var] -= t.coef * x;
    }
  double eq0 = 0.0;
  if (!sdp.equalities.empty()) {
    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(N) - 1, static_cast<Eigen::Index>(sdp.equalities.size()));
    for (std::size_t r2 = 0; r2 < sdp.equalities.size(); ++r2)
      for (const auto& t : sdp.equalities[r2].terms)
        if (t.var > 0) E(t.var - 1, static_cast<Eigen::Index>(r2)) += t.coef;
    const Eigen::VectorXd lam = E.completeOrthogonalDecomposition().solve(resid.tail(static_cast<Eigen::Index>(N) - 1));
    sol.equality_multipliers.assign(lam.data(), lam.data() + lam.size());
    for (std::size_t r2 = 0; r2 < sdp.equalities.size(); ++r2)
      for (const auto& t : sdp.equalities[r2].terms)
        if (t.var == 0) eq0 += t.coef * lam[static_cast<Eigen::Index>(r2)];
  }
  const double rho = resid[0] - eq0;
  sol.objective = sdp.objective_sign * r.pobj;
  sol.dual_objective = sdp.objective_sign * rho;
  return sol;
}

}  // namespace cstssos

#endif  // CSTSSOS_SDP_HPP

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cstssos/bench.hpp"
#include "cstssos/relax.hpp"
#include "cstssos/sdp.hpp"
#include "support/oracles.hpp"

using namespace cstssos;

namespace {

RelaxOptions options(Hierarchy h, unsigned d, int k = 1, ExtensionKind ce = ExtensionKind::Maximal) {
  RelaxOptions o;
  o.hierarchy = h;
  o.order = d;
  o.sparse_order = k;
  o.extension = ce;
  return o;
}

SDPSolution solve(const POPInstance& p, const RelaxOptions& o) { return solve_internal(assemble(p, o)); }

}  // namespace

TEST(Solve, SquareHasZeroBound) {
  POPInstance p;
  p.n = 1;
  p.objective = oracle::x(1, 0).pow(2);
  const auto s = solve(p, options(Hierarchy::Dense, 1));
  ASSERT_TRUE(is_success(s.status)) << to_string(s.status);
  EXPECT_NEAR(s.objective, 0.0, 1e-6);
  EXPECT_NEAR(s.y[0], 1.0, 0.0);
}

TEST(Solve, ShiftedSquare) {
  // (x - 3)^2 + 2 has minimum 2 at x = 3
  POPInstance p;
  p.n = 1;
  p.objective = (oracle::x(1, 0) - 3.0).pow(2) + 2.0;
  const auto s = solve(p, options(Hierarchy::Dense, 1));
  ASSERT_TRUE(is_success(s.status));
  EXPECT_NEAR(s.objective, 2.0, 1e-6);
  EXPECT_NEAR(s.y[1], 3.0, 1e-4);
}

TEST(Solve, LinearOverDisc) {
  // min x1 + x2 over the unit disc: -sqrt(2), exact at order one
  POPInstance p;
  p.n = 2;
  auto v = [](std::size_t i) { return oracle::x(2, i); };
  p.objective = v(0) + v(1);
  p.constraints.push_back({1.0 - v(0) * v(0) - v(1) * v(1), ConstraintKind::Geq0});
  const auto s = solve(p, options(Hierarchy::Dense, 1));
  ASSERT_TRUE(is_success(s.status));
  EXPECT_NEAR(s.objective, -std::sqrt(2.0), 1e-6);
}

TEST(Solve, EqualityConstrained) {
  // min x s.t. x^2 = 1 -> -1
  POPInstance p;
  p.n = 1;
  p.objective = oracle::x(1, 0);
  p.constraints.push_back({1.0 - oracle::x(1, 0).pow(2), ConstraintKind::Eq0});
  const auto s = solve(p, options(Hierarchy::Dense, 1));
  ASSERT_TRUE(is_success(s.status));
  EXPECT_NEAR(s.objective, -1.0, 1e-6);
  EXPECT_EQ(s.equality_multipliers.size(), 1u);
}

TEST(Solve, MaximizeReportsUpperBound) {
  // max 1 - x^2 -> 1
  POPInstance p;
  p.n = 1;
  p.sense = Sense::Maximize;
  p.objective = 1.0 - oracle::x(1, 0).pow(2);
  const auto s = solve(p, options(Hierarchy::Dense, 1));
  ASSERT_TRUE(is_success(s.status));
  EXPECT_NEAR(s.objective, 1.0, 1e-6);
}

TEST(Solve, Example1SparseMatchesDense) {
  const auto p = oracle::example1();
  const auto dense = solve(p, options(Hierarchy::Dense, 1));
  const auto sparse = solve(p, options(Hierarchy::CSTS, 1, 2));
  ASSERT_TRUE(is_success(dense.status));
  ASSERT_TRUE(is_success(sparse.status));
  EXPECT_NEAR(sparse.objective, dense.objective, 1e-6);
  // oracle: f is a convex quadratic, so its minimum solves grad f = 0:
  // [2 1 0; 1 2 1; 0 1 2] x = (0, 0, -1)
  Eigen::Matrix3d H;
  H << 2, 1, 0, 1, 2, 1, 0, 1, 2;
  const Eigen::Vector3d xs = H.lu().solve(Eigen::Vector3d(0, 0, -1));
  const double fmin = p.objective.evaluate(std::vector<double>{xs[0], xs[1], xs[2]});
  EXPECT_NEAR(dense.objective, fmin, 1e-6);
}

TEST(Solve, Example2AllHierarchiesAgree) {
  const auto p = oracle::example2();
  const auto dense = solve(p, options(Hierarchy::Dense, 2));
  const auto cs = solve(p, options(Hierarchy::CS, 2));
  const auto cst = solve(p, options(Hierarchy::CSTS, 2));
  ASSERT_TRUE(is_success(dense.status));
  ASSERT_TRUE(is_success(cs.status));
  ASSERT_TRUE(is_success(cst.status));
  EXPECT_LE(cst.objective, cs.objective + 1e-6);
  EXPECT_LE(cs.objective, dense.objective + 1e-6);
  // the bound is below every sampled value of f
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> x(6);
    for (auto& v : x) v = u(rng);
    EXPECT_LE(dense.objective, p.objective.evaluate(x) + 1e-6);
  }
}

TEST(Solve, RosenbrockSmall) {
  // generalized Rosenbrock attains 1 at the all-ones point
  const auto p = gen_rosenbrock(8, false);
  const auto s = solve(p, options(Hierarchy::CSTS, 2, 1, ExtensionKind::MinFill));
  ASSERT_TRUE(is_success(s.status));
  EXPECT_LE(s.objective, 1.0 + 1e-6);
  EXPECT_GE(s.objective, 0.0);
  EXPECT_NEAR(p.objective.evaluate(std::vector<double>(8, 1.0)), 1.0, 0.0);
}

TEST(Solve, WeakDuality) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto p = oracle::random_pop(seed, 5, seed % 2 == 0);
    const auto s = solve(p, options(Hierarchy::CSTS, 2, 1, ExtensionKind::MinFill));
    ASSERT_TRUE(is_success(s.status)) << "seed " << seed;
    EXPECT_LE(s.dual_objective, s.objective + 1e-6 * std::max(1.0, std::abs(s.objective)));
    EXPECT_NEAR(s.dual_objective, s.objective, 1e-5 * std::max(1.0, std::abs(s.objective)));
  }
}

TEST(Solve, GramAndMomentBlocksArePsd) {
  const auto p = oracle::random_pop(4, 6, true);
  const auto s = solve(p, options(Hierarchy::CSTS, 2, 1, ExtensionKind::MinFill));
  ASSERT_TRUE(is_success(s.status));
  for (const auto* mats : {&s.primal, &s.dual})
    for (const auto& m : *mats) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
      EXPECT_GE(es.eigenvalues().minCoeff(), -1e-7 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff()));
    }
}

TEST(Solve, Deterministic) {
  const auto p = oracle::random_pop(5, 6, true);
  const auto sdp = assemble(p, options(Hierarchy::CSTS, 2, 1, ExtensionKind::MinFill));
  const auto a = solve_internal(sdp), b = solve_internal(sdp);
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ(a.y, b.y);
  EXPECT_EQ(a.objective, b.objective);
}

TEST(Solve, IterationLimitIsReported) {
  const auto p = oracle::example2();
  SolverConfig cfg;
  cfg.max_iterations = 2;
  const auto s = solve_internal(assemble(p, options(Hierarchy::Dense, 2)), cfg);
  EXPECT_EQ(s.status, SolverStatus::IterLimit);
  EXPECT_FALSE(is_success(s.status));
}

TEST(Solve, ConfigValidation) {
  SolverConfig cfg;
  cfg.max_iterations = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.step_fraction = 1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Reduce, EliminatesEqualities) {
  POPInstance p;
  p.n = 2;
  auto v = [](std::size_t i) { return oracle::x(2, i); };
  p.objective = v(0) * v(0) + v(1) * v(1) + v(0);
  p.constraints.push_back({v(0) - v(1), ConstraintKind::Eq0});
  const auto sdp = assemble(p, options(Hierarchy::Dense, 1));
  const auto red = reduce(sdp);
  EXPECT_FALSE(red.infeasible);
  EXPECT_LT(red.m, static_cast<int>(sdp.num_variables()));
  // any z maps to moments that satisfy the equality row
  Eigen::VectorXd z = Eigen::VectorXd::LinSpaced(red.m, 0.3, 1.7);
  const Eigen::VectorXd y = red.moments(z);
  EXPECT_NEAR(y[0], 1.0, 1e-14);
  EXPECT_NEAR(y[sdp.layout.index_of(Exponent({1, 0}))], y[sdp.layout.index_of(Exponent({0, 1}))], 1e-14);
}

TEST(Reduce, DetectsInconsistentEqualities) {
  // 1 = 0 after substituting y_0 = 1
  POPInstance p;
  p.n = 1;
  p.objective = oracle::x(1, 0).pow(2);
  p.constraints.push_back({Polynomial::constant(1, 1.0), ConstraintKind::Eq0});
  const auto red = reduce(assemble(p, options(Hierarchy::Dense, 1)));
  EXPECT_TRUE(red.infeasible);
}

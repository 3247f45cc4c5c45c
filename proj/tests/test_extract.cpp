#include <gtest/gtest.h>

#include "cstssos/extract.hpp"
#include "support/oracles.hpp"

using namespace cstssos;

namespace {

struct Run {
  Relaxation relax;
  SDPSolution sol;
  ExtractionResult ext;
};

Run run(const POPInstance& p, Hierarchy h, unsigned d, int k = 1) {
  RelaxOptions o;
  o.hierarchy = h;
  o.order = d;
  o.sparse_order = k;
  o.extension = ExtensionKind::Maximal;
  o.first_order_blocks = true;
  Run r{build_relaxation(p, o), {}, {}};
  r.sol = solve_internal(r.relax.sdp);
  r.ext = extract_solution(r.sol, r.relax.sdp, r.relax.decomposition, r.relax.pop);
  return r;
}

}  // namespace

TEST(Extract, SingleSquare) {
  POPInstance p;
  p.n = 1;
  p.objective = (oracle::x(1, 0) - 1.0).pow(2);
  const auto r = run(p, Hierarchy::Dense, 1);
  ASSERT_TRUE(r.ext.x);
  EXPECT_TRUE(r.ext.certified) << r.ext.message;
  EXPECT_NEAR((*r.ext.x)[0], 1.0, 1e-4);
}

TEST(Extract, ChainOfSquares) {
  // (x1 - 1)^2 + (x2 - x1)^2 vanishes only at (1, 1)
  POPInstance p;
  p.n = 2;
  auto v = [](std::size_t i) { return oracle::x(2, i); };
  p.objective = (v(0) - 1.0).pow(2) + (v(1) - v(0)).pow(2);
  for (auto h : {Hierarchy::Dense, Hierarchy::CSTS}) {
    const auto r = run(p, h, 1);
    ASSERT_TRUE(r.ext.x);
    EXPECT_TRUE(r.ext.certified) << r.ext.message;
    EXPECT_NEAR((*r.ext.x)[0], 1.0, 1e-4);
    EXPECT_NEAR((*r.ext.x)[1], 1.0, 1e-4);
    for (const auto& cr : r.ext.ranks) EXPECT_EQ(cr.rank, 1);
  }
}

TEST(Extract, SymmetricProblemIsNotCertified) {
  // min x^2 s.t. x^2 = 1 has minimizers +1 and -1
  POPInstance p;
  p.n = 1;
  p.objective = oracle::x(1, 0).pow(2);
  p.constraints.push_back({1.0 - oracle::x(1, 0).pow(2), ConstraintKind::Eq0});
  const auto r = run(p, Hierarchy::Dense, 1);
  ASSERT_EQ(r.ext.ranks.size(), 1u);
  EXPECT_EQ(r.ext.ranks[0].rank, 2);
  EXPECT_FALSE(r.ext.certified);
  EXPECT_TRUE(r.ext.partial);
}

TEST(Extract, PerturbationSelectsOneMinimizer) {
  POPInstance p;
  p.n = 1;
  p.objective = oracle::x(1, 0).pow(2);
  p.constraints.push_back({1.0 - oracle::x(1, 0).pow(2), ConstraintKind::Eq0});
  const auto q = perturb_objective(p, 1e-2, 3);
  const auto r = run(q, Hierarchy::Dense, 1);
  ASSERT_TRUE(r.ext.x);
  EXPECT_TRUE(r.ext.certified) << r.ext.message;
  // the added term is positive on x, so -1 wins
  EXPECT_NEAR((*r.ext.x)[0], -1.0, 1e-4);
}

TEST(Extract, Example1MatchesStationaryPoint) {
  const auto p = oracle::example1();
  const auto r = run(p, Hierarchy::CSTS, 1, 2);
  ASSERT_TRUE(r.ext.x);
  EXPECT_TRUE(r.ext.certified) << r.ext.message;
  // oracle: the unique minimizer of the convex quadratic solves H x = -g
  Eigen::Matrix3d H;
  H << 2, 1, 0, 1, 2, 1, 0, 1, 2;
  const Eigen::Vector3d xs = H.lu().solve(Eigen::Vector3d(0, 0, -1));
  for (int i = 0; i < 3; ++i) EXPECT_NEAR((*r.ext.x)[static_cast<std::size_t>(i)], xs[i], 1e-4);
  EXPECT_GE(r.ext.objective, r.sol.objective - 1e-6);
}

TEST(Extract, SignFlipAlongSymmetryKeepsValue) {
  const auto p = oracle::example2();
  const auto r = run(p, Hierarchy::CSTS, 2);
  ASSERT_TRUE(r.ext.x);
  const auto R = sign_symmetries(p.n, p.joint_support());
  ASSERT_FALSE(R.vectors.empty());
  for (const auto& v : R.vectors) {
    auto y = *r.ext.x;
    for (std::size_t i = 0; i < p.n; ++i)
      if (v[i]) y[i] = -y[i];
    EXPECT_NEAR(p.objective.evaluate(y), r.ext.objective, 1e-12);
  }
}

TEST(Extract, ReadOnlyOverSolution) {
  const auto p = oracle::example1();
  auto r = run(p, Hierarchy::Dense, 1);
  const auto before = r.sol.y;
  extract_solution(r.sol, r.relax.sdp, r.relax.decomposition, r.relax.pop);
  EXPECT_EQ(r.sol.y, before);
}

TEST(Extract, NeedsFirstOrderBlocks) {
  const auto p = oracle::example1();
  RelaxOptions o;
  o.hierarchy = Hierarchy::Dense;
  o.order = 1;
  const auto rel = build_relaxation(p, o);
  const auto sol = solve_internal(rel.sdp);
  const auto ext = extract_solution(sol, rel.sdp, rel.decomposition, rel.pop);
  EXPECT_FALSE(ext.x);
  EXPECT_FALSE(ext.certified);
  EXPECT_FALSE(ext.message.empty());
}

TEST(Feasibility, Residual) {
  POPInstance p;
  p.n = 1;
  p.objective = oracle::x(1, 0);
  p.constraints.push_back({1.0 - oracle::x(1, 0).pow(2), ConstraintKind::Geq0});
  p.constraints.push_back({oracle::x(1, 0) - 0.5, ConstraintKind::Eq0});
  EXPECT_DOUBLE_EQ(feasibility_residual(p, {0.5}), 0.0);
  EXPECT_DOUBLE_EQ(feasibility_residual(p, {2.0}), 3.0);
  EXPECT_DOUBLE_EQ(feasibility_residual(p, {0.0}), 0.5);
}

TEST(Perturb, IsSeededAndSmall) {
  const auto p = oracle::example1();
  const auto a = perturb_objective(p, 1e-4, 7), b = perturb_objective(p, 1e-4, 7);
  EXPECT_EQ(a.objective, b.objective);
  const auto diff = a.objective - p.objective;
  EXPECT_EQ(diff.degree(), 1u);
  for (const auto& [e, c] : diff.terms()) {
    EXPECT_GE(c, 0.0);
    EXPECT_LE(c, 1e-4);
  }
}

TEST(OptimalityGap, Values) {
  EXPECT_NEAR(optimality_gap(1.1242e4, 1.0417e4), 7.34, 5e-3);
  EXPECT_EQ(optimality_gap(5.0, 5.0), 0.0);
  EXPECT_NEAR(optimality_gap(200.0, 198.0), 1.00, 1e-12);
  EXPECT_THROW(optimality_gap(0.0, 1.0), std::invalid_argument);
}

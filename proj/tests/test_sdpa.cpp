#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "cstssos/relax.hpp"
#include "cstssos/sdpa.hpp"
#include "support/oracles.hpp"

using namespace cstssos;

namespace {

RelaxOptions options(Hierarchy h, unsigned d) {
  RelaxOptions o;
  o.hierarchy = h;
  o.order = d;
  o.extension = ExtensionKind::Maximal;
  return o;
}

std::string write(const SDPAProblem& p) {
  std::ostringstream os;
  write_sdpa(p, os);
  return os.str();
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(Sdpa, OneVariableFileIsSixLines) {
  // minimize x subject to [[1, x], [x, 1]] >= 0
  SDPAProblem p;
  p.m = 1;
  p.block_sizes = {2};
  p.c = {1.0};
  p.entries = {{0, 1, 1, 1, -1.0}, {1, 1, 1, 2, 1.0}};
  const auto text = write(p);
  EXPECT_EQ(text, "1\n1\n2\n1\n0 1 1 1 -1\n1 1 1 2 1\n");
  EXPECT_EQ(line_count(text), 6u);
  EXPECT_EQ(parse_sdpa(text), p);
}

TEST(Sdpa, SquareProblemByHand) {
  // min x^2: variables y_1, y_2; block [[y_0, y_1], [y_1, y_2]] with y_0 = 1
  POPInstance p;
  p.n = 1;
  p.objective = oracle::x(1, 0).pow(2);
  EXPECT_EQ(export_sdpa(assemble(p, options(Hierarchy::Dense, 1))),
            "2\n1\n2\n0 1\n0 1 1 1 -1\n1 1 1 2 1\n2 1 2 2 1\n");
}

TEST(Sdpa, ObjectiveConstantInComment) {
  POPInstance p;
  p.n = 1;
  p.objective = (oracle::x(1, 0) - 1.0).pow(2) + 0.5;
  const auto text = export_sdpa(assemble(p, options(Hierarchy::Dense, 1)));
  EXPECT_EQ(text.substr(0, text.find('\n')), "\"objective constant 1.5");
  const auto q = parse_sdpa(text);
  EXPECT_EQ(q.c0, 1.5);
  EXPECT_EQ(q.c, (std::vector<double>{-2.0, 1.0}));
}

TEST(Sdpa, Example2RoundTrip) {
  const auto sdp = assemble(oracle::example2(), options(Hierarchy::CSTS, 2));
  const auto p = to_sdpa(sdp);
  const auto q = parse_sdpa(write(p));
  EXPECT_EQ(q, p);
  std::multiset<int> sizes(q.block_sizes.begin(), q.block_sizes.end());
  EXPECT_EQ(sizes, (std::multiset<int>{4, 2, 2, 2, 5, 10}));
}

TEST(Sdpa, ByteStable) {
  const auto p = oracle::random_pop(3, 6, true);
  RelaxOptions o;
  o.order = 2;
  const auto a = export_sdpa(assemble(p, o));
  const auto b = export_sdpa(assemble(p, o));
  EXPECT_EQ(a, b);
  EXPECT_EQ(write(parse_sdpa(a)), a);
}

TEST(Sdpa, ValuesRoundTripBitForBit) {
  SDPAProblem p;
  p.m = 2;
  p.block_sizes = {2, -3};
  p.c = {1.0 / 3.0, -2.0e-17};
  p.entries = {{0, 1, 1, 1, 0.1}, {1, 1, 1, 2, 1e300}, {2, 2, 3, 3, -5e-324}, {2, 1, 2, 2, 2.0 / 7.0}};
  std::sort(p.entries.begin(), p.entries.end());
  EXPECT_EQ(parse_sdpa(write(p)), p);
}

TEST(Sdpa, WritesToFile) {
  const auto sdp = assemble(oracle::example1(), options(Hierarchy::Dense, 1));
  const auto path = std::filesystem::temp_directory_path() / "cstssos_sdpa_test.dat-s";
  export_sdpa(sdp, path.string());
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  EXPECT_EQ(ss.str(), export_sdpa(sdp));
  std::filesystem::remove(path);
}

TEST(Sdpa, ParserCanonicalises) {
  // a lower-triangle entry and a repeated position
  const std::string text = "* comment\n1\n1\n2\n{1.0}\n1 1 2 1 0.5\n1 1 1 2 0.25\n0 1 1 1 +1\n";
  const auto p = parse_sdpa(text);
  ASSERT_EQ(p.entries.size(), 2u);
  EXPECT_EQ(p.entries[0], (std::tuple<int, int, int, int, double>{0, 1, 1, 1, 1.0}));
  EXPECT_EQ(p.entries[1], (std::tuple<int, int, int, int, double>{1, 1, 1, 2, 0.75}));
}

TEST(Sdpa, ParserRejectsBadInput) {
  EXPECT_THROW(parse_sdpa(""), SDPAParseError);
  EXPECT_THROW(parse_sdpa("1\n1\n2\n1\n2 1 1 1 1\n"), SDPAParseError);   // matrix index > m
  EXPECT_THROW(parse_sdpa("1\n1\n2\n1\n1 2 1 1 1\n"), SDPAParseError);   // block index
  EXPECT_THROW(parse_sdpa("1\n1\n2\n1\n1 1 3 1 1\n"), SDPAParseError);   // row outside block
  EXPECT_THROW(parse_sdpa("1\n1\n-2\n1\n1 1 1 2 1\n"), SDPAParseError);  // off-diagonal in LP block
  EXPECT_THROW(parse_sdpa("1\n1\n2\nx\n"), SDPAParseError);
}

TEST(Sdpa, ReducedFromFileSolvesToSameValue) {
  const auto sdp = assemble(oracle::example2(), options(Hierarchy::CSTS, 2));
  const auto direct = InteriorPointSolver(reduce(sdp), {}).run();
  const auto via_file = InteriorPointSolver(to_reduced(parse_sdpa(export_sdpa(sdp))), {}).run();
  ASSERT_TRUE(is_success(direct.status));
  ASSERT_TRUE(is_success(via_file.status));
  EXPECT_NEAR(direct.pobj, via_file.pobj, 1e-9);
}

TEST(SdpaResult, ReadsSolverOutput) {
  const std::string out =
      "SDPA start at ...\n"
      "phase.value  = pdOPT\n"
      "   objValPrimal = +5.0424750000000e-01\n"
      "   objValDual   = +5.0424749000000e-01\n"
      "xVec = \n"
      "{+1.0e+00,-2.5e-01,+3.0e+00}\n"
      "xMat = \n";
  const auto r = parse_sdpa_result(out);
  EXPECT_EQ(r.phase, "pdOPT");
  EXPECT_EQ(*r.primal_objective, 0.504247500);
  EXPECT_EQ(*r.dual_objective, 0.50424749);
  EXPECT_EQ(r.x, (std::vector<double>{1.0, -0.25, 3.0}));
  EXPECT_THROW(parse_sdpa_result("phase.value = pFEAS\n"), SDPAParseError);
}

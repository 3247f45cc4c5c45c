// Command-line front end: solve, generate, export-sdpa, blocks.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cstssos/cstssos.hpp"

using nlohmann::json;
using namespace cstssos;

namespace {

constexpr int kSchemaVersion = 1;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RelaxFlags {
  std::string problem;
  std::string hierarchy = "cstsos";
  unsigned order = 0;
  std::optional<int> sparse_order;
  std::optional<std::string> ce;
  bool binary = false;
  std::optional<double> ball;
  bool first_order = false;
};

void add_relax_flags(CLI::App* cmd, RelaxFlags& f) {
  cmd->add_option("--problem", f.problem, "POP instance (JSON)")->required();
  cmd->add_option("--hierarchy", f.hierarchy, "dense | cs | ts | cstsos")
      ->check(CLI::IsMember({"dense", "cs", "ts", "cstsos"}));
  cmd->add_option("--order", f.order, "relaxation order d (default d_min)");
  cmd->add_option("--sparse-order", f.sparse_order, "sparse order k (ts, cstsos)");
  cmd->add_option("--ce", f.ce, "chordal extension: max | min")->check(CLI::IsMember({"max", "min"}));
  cmd->add_flag("--binary", f.binary, "variables are +-1; reduce exponents mod 2");
  cmd->add_option("--ball", f.ball, "append n_l M^2 - |x(I_l)|^2 >= 0 per clique");
  cmd->add_flag("--first-order-blocks", f.first_order, "append dense order-one moment blocks");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

RelaxOptions relax_options(const RelaxFlags& f, const std::string& default_ce) {
  RelaxOptions o;
  o.hierarchy = parse_hierarchy(f.hierarchy);
  const bool term_sparse = o.hierarchy == Hierarchy::TS || o.hierarchy == Hierarchy::CSTS;
  if (f.sparse_order && !term_sparse)
    throw UsageError("--sparse-order only applies to the ts and cstsos hierarchies");
  o.order = f.order;
  o.sparse_order = f.sparse_order.value_or(1);
  o.extension = f.ce.value_or(default_ce) == "max" ? ExtensionKind::Maximal : ExtensionKind::MinFill;
  o.binary = f.binary;
  if (f.ball && !(*f.ball > 0)) throw UsageError("--ball needs a positive radius");
  o.ball = f.ball;
  o.first_order_blocks = f.first_order;
  return o;
}

POPInstance load_problem(const std::string& path) {
  try {
    return parse_pop(read_file(path));
  } catch (const ParseError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

json finite(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json structure_report(const Relaxation& r, const RelaxOptions& o) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["instance"] = r.pop.name;
  j["n"] = r.pop.n;
  j["hierarchy"] = to_string(o.hierarchy);
  j["order"] = o.order;
  if (o.hierarchy == Hierarchy::TS || o.hierarchy == Hierarchy::CSTS) {
    j["sparse_order"] = o.sparse_order;
    j["ce"] = o.extension == ExtensionKind::Maximal ? "max" : "min";
  }
  j["binary"] = o.binary;
  j["ball"] = o.ball ? json(*o.ball) : json(nullptr);
  j["first_order_blocks"] = o.first_order_blocks;
  std::vector<std::size_t> cliques;
  for (const auto& c : r.decomposition.cliques) cliques.push_back(c.size());
  j["clique_sizes"] = cliques;
  j["mc"] = r.decomposition.max_clique_size();
  j["block_sizes"] = block_sizes(r.sdp);
  j["mb"] = max_block_size(r.sdp);
  j["support_size"] = r.structure.support.size();
  j["moment_variables"] = r.sdp.num_variables();
  j["equality_rows"] = r.sdp.equalities.size();
  j["stabilized"] = r.structure.stabilized;
  return j;
}

int cmd_blocks(const RelaxFlags& f) {
  const auto o = relax_options(f, "min");
  const auto r = build_relaxation(load_problem(f.problem), o);
  auto j = structure_report(r, r.sdp.provenance);
  j["graphs"] = block_report(r.structure)["graphs"];
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_export(const RelaxFlags& f, const std::string& out) {
  const auto r = build_relaxation(load_problem(f.problem), relax_options(f, "min"));
  write_output(out, export_sdpa(r.sdp));
  return 0;
}

struct SolveFlags {
  bool extract = false;
  std::string solver = "internal";
  std::string out;
  std::string sdpa_out;
  std::optional<double> reference;
  std::uint64_t seed = 1;
  int max_iterations = 200;
};

int cmd_solve(RelaxFlags f, const SolveFlags& s) {
  if (s.extract) f.first_order = true;
  const auto opts = relax_options(f, s.extract ? "max" : "min");
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = build_relaxation(load_problem(f.problem), opts);
  const double build_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json rep = structure_report(r, r.sdp.provenance);
  rep["build_time_s"] = build_time;

  if (s.solver == "sdpa-export") {
    const std::string path = s.sdpa_out.empty() ? "problem.dat-s" : s.sdpa_out;
    export_sdpa(r.sdp, path);
    rep["solver"] = {{"name", "sdpa-export"}, {"file", path}};
    write_output(s.out, rep.dump(2) + "\n");
    return 0;
  }

  SolverConfig cfg;
  cfg.max_iterations = s.max_iterations;
  const auto t1 = std::chrono::steady_clock::now();
  const auto sol = solve_internal(r.sdp, cfg);
  const double solve_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count();
  rep["bound"] = finite(sol.objective);
  rep["solver"] = {{"name", "internal"},
                   {"status", to_string(sol.status)},
                   {"iterations", sol.iterations},
                   {"time_s", solve_time},
                   {"dual_objective", finite(sol.dual_objective)},
                   {"primal_infeasibility", finite(sol.primal_infeasibility)},
                   {"dual_infeasibility", finite(sol.dual_infeasibility)},
                   {"relative_gap", finite(sol.relative_gap)}};
  if (is_success(sol.status)) {
    CertificateOptions co;
    co.seed = s.seed;
    const auto cert = check_certificate(sol, r.sdp, r.pop, co);
    rep["certificate"] = {{"rho", finite(cert.rho)},
                          {"coefficient_residual", finite(cert.coefficient_residual)},
                          {"evaluation_residual", finite(cert.evaluation_residual)},
                          {"symmetry_consistent", cert.symmetry_consistent}};
  }
  if (s.extract) {
    const auto ex = extract_solution(sol, r.sdp, r.decomposition, r.pop);
    json e{{"certified", ex.certified}, {"partial", ex.partial}, {"message", ex.message}};
    json ranks = json::array();
    for (const auto& cr : ex.ranks)
      ranks.push_back({{"clique", cr.clique}, {"rank", cr.rank}, {"ratio", finite(cr.ratio)}, {"components", cr.components}});
    e["ranks"] = ranks;
    if (ex.x) {
      json xs = json::array();
      for (double v : *ex.x) xs.push_back(finite(v));
      e["x"] = xs;
      e["objective"] = finite(ex.objective);
      e["feasibility_residual"] = finite(ex.feasibility_residual);
      e["gap_percent"] = finite(ex.gap);
    }
    rep["extraction"] = e;
  }
  if (s.reference) {
    rep["reference"] = *s.reference;
    rep["gap_percent"] = *s.reference != 0.0 ? finite(optimality_gap(*s.reference, sol.objective)) : json(nullptr);
  }
  write_output(s.out, rep.dump(2) + "\n");
  return is_success(sol.status) ? 0 : 2;
}

struct GenerateFlags {
  std::string family;
  std::size_t n = 0, l = 0, b = 0, h = 0;
  std::uint64_t seed = 0;
  bool spheres = false;
  std::string out;
  std::string edges;
};

int cmd_generate(const GenerateFlags& g) {
  BenchSpec spec;
  try {
    spec.family = parse_family(g.family);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  spec.n = g.n;
  spec.l = g.l;
  spec.b = g.b;
  spec.h = g.h;
  spec.seed = g.seed;
  spec.spheres = g.spheres;
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto pop = generate(spec);
  write_output(g.out, to_json(pop).dump(2) + "\n");
  if (!g.edges.empty()) {
    if (spec.family != Family::MaxCutBlockBand) throw UsageError("--edges only applies to maxcut instances");
    write_output(g.edges, to_edge_list(maxcut_blockband(spec.l, spec.b, spec.h, spec.seed)));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse moment-SOS relaxations exploiting correlative and term sparsity"};
  app.require_subcommand(1);

  RelaxFlags solve_relax, export_relax, blocks_relax;
  SolveFlags solve_flags;
  auto* solve = app.add_subcommand("solve", "build and solve a relaxation, print a JSON report");
  add_relax_flags(solve, solve_relax);
  solve->add_flag("--extract", solve_flags.extract, "extract a minimizer (implies --first-order-blocks, default --ce max)");
  solve->add_option("--solver", solve_flags.solver, "internal | sdpa-export")
      ->check(CLI::IsMember({"internal", "sdpa-export"}));
  solve->add_option("--sdpa-out", solve_flags.sdpa_out, "SDPA file written by --solver sdpa-export");
  solve->add_option("--out", solve_flags.out, "report path (default stdout)");
  solve->add_option("--reference", solve_flags.reference, "known optimum or local value for the gap column");
  solve->add_option("--seed", solve_flags.seed, "seed for certificate sample points");
  solve->add_option("--max-iterations", solve_flags.max_iterations, "interior-point iteration limit")
      ->check(CLI::PositiveNumber);

  std::string export_out;
  auto* exp = app.add_subcommand("export-sdpa", "write the relaxation in SDPA sparse format");
  add_relax_flags(exp, export_relax);
  exp->add_option("--out", export_out, "output path (default stdout)");

  auto* blocks = app.add_subcommand("blocks", "report clique and block structure without solving");
  add_relax_flags(blocks, blocks_relax);

  GenerateFlags gen;
  auto* generate_cmd = app.add_subcommand("generate", "write a benchmark instance as JSON");
  generate_cmd->set_help_flag("--help", "print this help message and exit");  // -h is taken by --h
  generate_cmd->add_option("--family", gen.family,
                           "broyden_banded | gen_rosenbrock | broyden_tridiagonal | chained_wood | maxcut")
      ->required();
  generate_cmd->add_option("--n", gen.n, "number of variables");
  generate_cmd->add_option("--l", gen.l, "Max-Cut: number of blocks");
  generate_cmd->add_option("--b", gen.b, "Max-Cut: block size");
  generate_cmd->add_option("--h", gen.h, "Max-Cut: band width");
  generate_cmd->add_option("--seed", gen.seed, "Max-Cut: generator seed");
  generate_cmd->add_flag("--spheres", gen.spheres, "add the sphere constraints");
  generate_cmd->add_option("--out", gen.out, "output path (default stdout)");
  generate_cmd->add_option("--edges", gen.edges, "Max-Cut: also write the edge list here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (solve->parsed()) return cmd_solve(solve_relax, solve_flags);
    if (exp->parsed()) return cmd_export(export_relax, export_out);
    if (blocks->parsed()) return cmd_blocks(blocks_relax);
    if (generate_cmd->parsed()) return cmd_generate(gen);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

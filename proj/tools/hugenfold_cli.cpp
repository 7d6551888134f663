// hugenfold: command-line front end.
// Exit codes: 0 feasible/valid/optimal, 1 infeasible/invalid/unbounded,
// 2 usage, parse or budget error.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hugenfold/conesolver.hpp"
#include "hugenfold/graver.hpp"
#include "hugenfold/io.hpp"
#include "hugenfold/oracle.hpp"
#include "hugenfold/presentation.hpp"
#include "hugenfold/solve.hpp"
#include "hugenfold/tables.hpp"

using namespace hugenfold;
using io::Json;

namespace {

constexpr int kOk = 0;
constexpr int kNegative = 1;
constexpr int kError = 2;

struct Common {
  std::string strategy = "augment";
  std::string out;
  int threads = 1;
  bool oracle = false;
};

std::optional<std::uint64_t> env_budget() {
  const char* s = std::getenv("HUGE_NFOLD_BUDGET");
  if (!s || !*s) return std::nullopt;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used != std::string(s).size() || v == 0) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(std::string("HUGE_NFOLD_BUDGET: expected a positive integer, got \"") + s + "\"");
  }
}

SolveOptions solve_options(const Common& c) {
  SolveOptions o;
  if (c.strategy == "augment") o.strategy = Strategy::Augment;
  else if (c.strategy == "cone") o.strategy = Strategy::Cone;
  else throw ParseError("--strategy: expected augment or cone, got \"" + c.strategy + "\"");
  o.augment.threads = c.threads;
  if (auto b = env_budget()) {
    o.augment.phi_budget = *b;
    o.cone.node_budget = *b;
    o.exchange_work_cap = *b;
  }
  return o;
}

std::uint64_t oracle_budget() { return env_budget().value_or(oracle::kDefaultBudget); }

void emit(const Json& j, const std::string& out) {
  const std::string text = io::dump(j);
  std::cout << text;
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) throw ParseError(out + ": cannot write file");
    f << text;
  }
}

HugeNFoldInstance as_nfold(const io::Instance& inst) {
  if (auto t = std::get_if<HugeTableInstance>(&inst)) return encode_table(*t);
  return std::get<HugeNFoldInstance>(inst);
}

std::string kind_of(const io::Instance& inst) {
  return std::holds_alternative<HugeTableInstance>(inst) ? "table" : "nfold";
}

// Accepts a solution file or a bare presentation.
CompactPresentation presentation_of(const Json& j) {
  if (j.is_object() && j.contains("presentation")) return io::read_presentation(j["presentation"]);
  return io::read_presentation(j, "solution");
}

Json table_verdict_json(const TableVerdict& v, const std::string& strategy) {
  Json j;
  j["verdict"] = v.feasible ? "feasible" : "infeasible";
  j["kind"] = "table";
  j["solver"] = {{"strategy", strategy}, {"method", v.method}, {"rounds", v.rounds}};
  if (v.solution) j["presentation"] = io::presentation_json(*v.solution);
  if (v.certificate) j["certificate"] = io::certificate_json(*v.certificate);
  return j;
}

// Brute force over explicit layers; only for small n.
int oracle_table(const HugeTableInstance& tbl, const Common& c) {
  if (tbl.n() > Int(64)) throw BudgetError("--oracle needs n <= 64");
  oracle::TableSearch s{tbl.l, tbl.m, tbl.line_sums, {}, {}};
  std::vector<std::size_t> layer_type;
  for (std::size_t k = 0; k < tbl.types.size(); ++k)
    for (Int q = 0; q < tbl.types[k].count; ++q) {
      s.row_sums.push_back(tbl.types[k].rows);
      s.col_sums.push_back(tbl.types[k].cols);
      layer_type.push_back(k);
    }
  auto r = oracle::bf_tables(s, true, oracle::TableScan::LayerMajor, oracle_budget());
  Json j;
  j["verdict"] = r.feasible ? "feasible" : "infeasible";
  j["kind"] = "table";
  j["solver"] = {{"strategy", "oracle"}, {"method", "bf_tables"}, {"rounds", 0}};
  if (r.feasible) {
    CompactPresentation cp;
    cp.types.resize(tbl.types.size());
    for (std::size_t i = 0; i < layer_type.size(); ++i) cp.types[layer_type[i]][r.tables.front()[i]] += 1;
    j["presentation"] = io::presentation_json(cp);
  }
  emit(j, c.out);
  std::cerr << "oracle: " << (r.feasible ? "feasible" : "infeasible") << "\n";
  return r.feasible ? kOk : kNegative;
}

int oracle_nfold(const HugeNFoldInstance& inst, const Common& c) {
  auto r = oracle::bf_nfold(inst, false, oracle_budget());
  Json j;
  j["verdict"] = r.feasible ? "optimal" : "infeasible";
  j["kind"] = "nfold";
  j["solver"] = {{"strategy", "oracle"}, {"method", "bf_nfold"}, {"rounds", 0}};
  if (r.feasible) {
    j["objective"] = io::int_json(r.optimum);
    CompactPresentation cp;
    cp.types.resize(inst.num_types());
    std::size_t i = 0;
    for (std::size_t k = 0; k < inst.num_types(); ++k)
      for (Int q = 0; q < inst.type(k).count; ++q) cp.types[k][r.bricks[i++]] += 1;
    j["presentation"] = io::presentation_json(cp);
  }
  emit(j, c.out);
  std::cerr << "oracle: " << (r.feasible ? "optimum " + to_string(r.optimum) : std::string("infeasible")) << "\n";
  return r.feasible ? kOk : kNegative;
}

int run_table(const HugeTableInstance& tbl, const Common& c) {
  if (c.oracle) return oracle_table(tbl, c);
  const auto t0 = std::chrono::steady_clock::now();
  TableVerdict v = solve_table(tbl, solve_options(c));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  emit(table_verdict_json(v, c.strategy), c.out);
  std::cerr << (v.feasible ? "feasible" : "infeasible") << " (" << v.method << ", " << v.rounds << " rounds, " << secs
            << " s)\n";
  if (v.solution) {
    std::cerr << "support sizes:";
    for (const auto& m : v.solution->types) std::cerr << " " << m.size();
    std::cerr << "\n";
  }
  return v.feasible ? kOk : kNegative;
}

int run_nfold(const HugeNFoldInstance& inst, const Common& c, const std::optional<CompactPresentation>& start,
              bool feasibility_only) {
  if (c.oracle) return oracle_nfold(inst, c);
  const auto t0 = std::chrono::steady_clock::now();
  SolveOptions opts = solve_options(c);
  Json j;
  j["kind"] = "nfold";
  int code = kOk;
  try {
    if (feasibility_only && opts.strategy == Strategy::Augment && !start) {
      PhaseOneResult p = phase_one(inst, opts);
      j["verdict"] = p.feasible ? "feasible" : "infeasible";
      j["solver"] = {{"strategy", c.strategy}, {"method", p.method}, {"rounds", p.rounds}};
      if (p.solution) j["presentation"] = io::presentation_json(*p.solution);
      if (p.certificate) j["certificate"] = io::certificate_json(*p.certificate);
      code = p.feasible ? kOk : kNegative;
    } else {
      NFoldVerdict v = solve_nfold(inst, opts, start);
      const bool ok = v.status == NFoldStatus::Optimal;
      j["verdict"] = ok ? (feasibility_only ? "feasible" : "optimal") : "infeasible";
      j["solver"] = {{"strategy", c.strategy}, {"method", v.method}, {"rounds", v.rounds}};
      if (ok) {
        j["objective"] = io::int_json(v.objective);
        j["proven_optimal"] = v.proven_optimal;
        j["presentation"] = io::presentation_json(*v.solution);
      }
      if (v.certificate) j["certificate"] = io::certificate_json(*v.certificate);
      code = ok ? kOk : kNegative;
    }
  } catch (const UnboundedError& e) {
    j["verdict"] = "unbounded";
    j["solver"] = {{"strategy", c.strategy}};
    code = kNegative;
  }
  emit(j, c.out);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cerr << j["verdict"].get<std::string>();
  if (j.contains("objective")) std::cerr << ", objective " << j["objective"].get<std::string>();
  std::cerr << " (" << secs << " s)\n";
  return code;
}

int cmd_solve(const std::string& file, const Common& c, const std::string& start_file, bool feasibility_only) {
  io::Instance inst = io::read_instance(io::load_json(file));
  if (auto t = std::get_if<HugeTableInstance>(&inst)) {
    if (!start_file.empty()) throw ParseError("--start applies to nfold instances only");
    return run_table(*t, c);
  }
  std::optional<CompactPresentation> start;
  if (!start_file.empty()) start = presentation_of(io::load_json(start_file));
  return run_nfold(std::get<HugeNFoldInstance>(inst), c, start, feasibility_only);
}

bool aux_matches(const HugeNFoldInstance& inst, const InfeasibilityCertificate& cert) {
  try {
    return build_auxiliary(inst).aux == cert.aux;
  } catch (const Error&) {
    return false;
  }
}

int report_certificate(const InfeasibilityCertificate& cert, const std::optional<HugeNFoldInstance>& inst,
                       const Common& c) {
  const bool same = !inst || aux_matches(*inst, cert);
  const bool valid = inst ? verify_certificate(*inst, cert, solve_options(c)) : verify_certificate(cert, solve_options(c));
  Json j;
  j["valid"] = valid;
  j["checked"] = "certificate";
  j["method"] = cert.transcript.method;
  if (inst) j["matches_instance"] = same;
  emit(j, c.out);
  std::cerr << (valid ? "certificate valid" : "certificate INVALID") << "\n";
  return valid ? kOk : kNegative;
}

int cmd_check(const std::string& inst_file, const std::string& sol_file, const Common& c) {
  io::Instance parsed = io::read_instance(io::load_json(inst_file));
  HugeNFoldInstance inst = as_nfold(parsed);
  Json sol = io::load_json(sol_file);
  if (sol.is_object() && sol.contains("certificate") && !sol.contains("presentation")) {
    return report_certificate(io::read_certificate(sol["certificate"]), inst, c);
  }
  PresentationReport rep = check_presentation(inst, presentation_of(sol));
  Json j;
  j["valid"] = rep.ok();
  j["checked"] = "presentation";
  j["structural_ok"] = rep.structural_ok;
  j["bricks_ok"] = rep.bricks_ok;
  j["counts_ok"] = rep.counts_ok;
  j["aggregate_ok"] = rep.aggregate_ok;
  j["issues"] = rep.issues;
  if (rep.ok()) j["objective"] = io::int_json(cost(inst, presentation_of(sol)));
  emit(j, c.out);
  if (rep.ok()) {
    std::cerr << "valid\n";
  } else {
    std::cerr << "INVALID:";
    if (!rep.structural_ok) std::cerr << " structural_ok";
    if (!rep.bricks_ok) std::cerr << " bricks_ok";
    if (!rep.counts_ok) std::cerr << " counts_ok";
    if (!rep.aggregate_ok) std::cerr << " aggregate_ok";
    std::cerr << "\n";
    for (const auto& s : rep.issues) std::cerr << "  " << s << "\n";
  }
  return rep.ok() ? kOk : kNegative;
}

// An instance yields a verdict file; a verdict file is verified on its own.
int cmd_certify(const std::string& file, const Common& c) {
  Json j = io::load_json(file);
  if (j.is_object() && j.contains("certificate")) return report_certificate(io::read_certificate(j["certificate"]), std::nullopt, c);
  if (j.is_object() && j.contains("aux")) return report_certificate(io::read_certificate(j), std::nullopt, c);
  io::Instance inst = io::read_instance(j);
  if (auto t = std::get_if<HugeTableInstance>(&inst)) return run_table(*t, c);
  return run_nfold(std::get<HugeNFoldInstance>(inst), c, std::nullopt, true);
}

int cmd_graver(const std::string& file, const Common& c, long long radius) {
  IntMatrix b = io::read_matrix_file(io::load_json(file));
  std::vector<IntVec> elements;
  if (c.oracle) {
    elements = oracle::bf_graver(b, radius, oracle_budget());
  } else {
    GraverOptions g;
    if (auto budget = env_budget()) g.element_cap = static_cast<std::size_t>(*budget);
    elements = graver_basis(b, g).elements;
  }
  Json j;
  j["matrix"] = io::matrix_json(b);
  j["count"] = elements.size();
  j["elements"] = Json::array();
  for (const auto& e : elements) j["elements"].push_back(io::vec_json(e));
  emit(j, c.out);
  std::cerr << elements.size() << " Graver elements" << (c.oracle ? " (brute force in box)" : "") << "\n";
  return kOk;
}

int cmd_complexity(const std::string& file, const Common& c, bool with_templates) {
  Bimatrix a = io::read_bimatrix(io::load_json(file));
  GraverOptions g;
  if (auto budget = env_budget()) g.element_cap = static_cast<std::size_t>(*budget);
  const std::size_t gc = graver_complexity(a, g);
  Json j;
  j["complexity"] = gc;
  if (with_templates) {
    GraverTemplates t = graver_templates(a, gc, g);
    j["templates"] = Json::array();
    for (const auto& tp : t.templates) {
      Json bricks = Json::array();
      for (const auto& z : tp.bricks) bricks.push_back(io::vec_json(z));
      j["templates"].push_back(bricks);
    }
  }
  emit(j, c.out);
  std::cerr << "Graver complexity " << gc << "\n";
  return kOk;
}

int cmd_reduce(const std::string& inst_file, const std::string& sol_file, const Common& c) {
  HugeNFoldInstance inst = as_nfold(io::read_instance(io::load_json(inst_file)));
  CompactPresentation cp = presentation_of(io::load_json(sol_file));
  PresentationReport rep = check_presentation(inst, cp);
  if (!rep.structural_ok || !rep.bricks_ok) {
    throw PreconditionError("reduce needs well-formed legal bricks" + (rep.issues.empty() ? "" : ": " + rep.issues.front()));
  }
  ReduceStats stats;
  CompactPresentation out = reduce_support(inst, cp, &stats);
  Json j;
  j["merges"] = stats.merges;
  j["presentation"] = io::presentation_json(out);
  emit(j, c.out);
  std::cerr << stats.merges << " merges\n";
  return kOk;
}

int cmd_expand(const std::string& inst_file, const std::string& sol_file, const Common& c, std::size_t max_n) {
  HugeNFoldInstance inst = as_nfold(io::read_instance(io::load_json(inst_file)));
  CompactPresentation cp = presentation_of(io::load_json(sol_file));
  std::vector<IntVec> bricks = expand(inst, cp, max_n);
  Json j;
  j["bricks"] = Json::array();
  for (const auto& z : bricks) j["bricks"].push_back(io::vec_json(z));
  emit(j, c.out);
  std::cerr << bricks.size() << " bricks\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Huge n-fold integer programming and huge table feasibility"};
  app.require_subcommand(1);
  Common common;
  std::string file, inst_file, sol_file, start_file;
  long long radius = 3;
  std::size_t max_n = kMaxExpandedBricks;
  bool with_templates = false;

  auto add_common = [&](CLI::App* sub, bool strategy) {
    if (strategy) {
      sub->add_option("--strategy", common.strategy, "augment | cone")->check(CLI::IsMember({"augment", "cone"}));
      sub->add_flag("--oracle", common.oracle, "brute-force reference solver (small instances)");
    }
    sub->add_option("--out", common.out, "also write the JSON verdict here");
    sub->add_option("--threads", common.threads, "augmentation threads")->check(CLI::PositiveNumber);
  };

  auto* solve = app.add_subcommand("solve", "optimize an instance (tables: decide feasibility)");
  solve->add_option("file", file, "instance JSON")->required();
  solve->add_option("--start", start_file, "feasible starting solution (nfold, augment)");
  add_common(solve, true);

  auto* feasible = app.add_subcommand("feasible", "decide feasibility, emitting a solution or certificate");
  feasible->add_option("file", file, "instance JSON")->required();
  add_common(feasible, true);

  auto* check = app.add_subcommand("check", "verify a solution or certificate against an instance");
  check->add_option("instance", inst_file)->required();
  check->add_option("solution", sol_file)->required();
  add_common(check, false);

  auto* certify = app.add_subcommand("certify", "instance: produce a verdict file; verdict file: verify it");
  certify->add_option("file", file)->required();
  add_common(certify, true);

  auto* graver = app.add_subcommand("graver", "Graver basis of a matrix");
  graver->add_option("--matrix", file, "JSON {\"matrix\": rows} or a bare row array")->required();
  graver->add_flag("--oracle", common.oracle, "brute force inside [-radius, radius]^n");
  graver->add_option("--radius", radius, "box radius for --oracle");
  graver->add_option("--out", common.out);

  auto* complexity = app.add_subcommand("complexity", "Graver complexity of a bimatrix");
  complexity->add_option("--bimatrix", file, "JSON {\"A1\": rows, \"A2\": rows}")->required();
  complexity->add_flag("--templates", with_templates, "also list the brick templates");
  complexity->add_option("--out", common.out);

  auto* reduce = app.add_subcommand("reduce", "shrink the support of a presentation");
  reduce->add_option("instance", inst_file)->required();
  reduce->add_option("solution", sol_file)->required();
  reduce->add_option("--out", common.out);

  auto* expandc = app.add_subcommand("expand", "list every brick of a presentation");
  expandc->add_option("instance", inst_file)->required();
  expandc->add_option("solution", sol_file)->required();
  expandc->add_option("--max-n", max_n, "refuse beyond this many bricks");
  expandc->add_option("--out", common.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kError;
  }

  try {
    if (*solve) return cmd_solve(file, common, start_file, false);
    if (*feasible) return cmd_solve(file, common, "", true);
    if (*check) return cmd_check(inst_file, sol_file, common);
    if (*certify) return cmd_certify(file, common);
    if (*graver) return cmd_graver(file, common, radius);
    if (*complexity) return cmd_complexity(file, common, with_templates);
    if (*reduce) return cmd_reduce(inst_file, sol_file, common);
    if (*expandc) return cmd_expand(inst_file, sol_file, common, max_n);
  } catch (const BudgetError& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kError;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}

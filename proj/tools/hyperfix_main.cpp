// hyperfix: repairs small imperative programs against HyperLTL properties by
// symbolic execution, constraint generation and syntax-guided synthesis.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "hyperfix/bench.hpp"
#include "hyperfix/encode.hpp"
#include "hyperfix/nsa.hpp"
#include "hyperfix/repair.hpp"

using namespace hyperfix;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolated = 1;   // violated / no repair found
constexpr int kExitConfig = 2;     // configuration or input error
constexpr int kExitInconclusive = 3;

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DiagnosticError("cannot read " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

struct CommonOpts {
  std::string programPath, specPath;
  int depth = 3;
  int maxIters = 10;
  double timeout = 120;
  std::string solverCmd;
  std::string domainSpec = "default";
  std::string outDir = "hyperfix-out";
  int jobs = 1;
  bool dumpPaths = false;
  bool dumpAutomaton = false;
  bool emitConstraints = false;
  int maxTermSize = 14;
};

// Domain spec grammar: segments separated by ';':
//   int:lo..hi | int:v1,v2,... | lexicon | strings:a,b | json:<file>
FiniteDomain parse_domain(const std::string& spec, const Program& p, const HyperLtlFormula* f) {
  FiniteDomain dom;
  dom.strings = FiniteDomain::auto_lexicon(p, f);
  if (spec.empty() || spec == "default" || spec == "lexicon") return dom;
  std::stringstream ss(spec);
  std::string seg;
  while (std::getline(ss, seg, ';')) {
    if (seg.empty() || seg == "lexicon") continue;
    auto colon = seg.find(':');
    if (colon == std::string::npos) throw DiagnosticError("bad domain segment: " + seg);
    std::string key = seg.substr(0, colon), val = seg.substr(colon + 1);
    if (key == "json") {
      dom = domain_from_json(slurp(val));
    } else if (key == "int") {
      dom.ints.clear();
      auto dots = val.find("..");
      if (dots != std::string::npos) {
        int64_t lo = std::stoll(val.substr(0, dots));
        int64_t hi = std::stoll(val.substr(dots + 2));
        for (int64_t v = lo; v <= hi; ++v) dom.ints.push_back(v);
      } else {
        std::stringstream vs(val);
        std::string item;
        while (std::getline(vs, item, ',')) dom.ints.push_back(std::stoll(item));
      }
    } else if (key == "strings") {
      dom.strings.clear();
      std::stringstream vs(val);
      std::string item;
      while (std::getline(vs, item, ',')) dom.strings.push_back(item);
    } else {
      throw DiagnosticError("bad domain segment: " + seg);
    }
  }
  return dom;
}

// Default SyGuS command: a sibling sygus-fd binary driven by the run's domain.
std::string default_solver_cmd(const char* argv0) {
  fs::path self(argv0);
  fs::path dir = self.has_parent_path() ? self.parent_path() : fs::path(".");
  fs::path tool = dir / "sygus-fd";
  if (!fs::exists(tool)) {
    fs::path alt = fs::current_path() / "sygus-fd";
    if (fs::exists(alt)) tool = alt;
  }
  return tool.string() + " --domain {domain} --max-size {maxsize} --timeout {timeout} {file}";
}

std::string resolve_solver_cmd(const CommonOpts& opt, const FiniteDomain& dom,
                               const std::string& runDir, const char* argv0) {
  std::string cmd = opt.solverCmd.empty() ? default_solver_cmd(argv0) : opt.solverCmd;
  fs::create_directories(runDir);
  std::string domFile = runDir + "/domain.json";
  std::ofstream(domFile) << domain_to_json(dom);
  auto replace_all = [&](const std::string& key, const std::string& val) {
    size_t pos;
    while ((pos = cmd.find(key)) != std::string::npos) cmd.replace(pos, key.size(), val);
  };
  replace_all("{domain}", domFile);
  replace_all("{maxsize}", std::to_string(opt.maxTermSize));
  replace_all("{timeout}", std::to_string(static_cast<int>(opt.timeout)));
  return cmd;
}

void write_dumps(const CommonOpts& opt, const Program& p, const HyperLtlFormula& f,
                 const std::string& outDir) {
  FiniteModelBackend pruner(parse_domain(opt.domainSpec, p, &f));
  if (opt.dumpPaths) {
    ExploreBounds b;
    b.unrollPerLoop = opt.depth;
    ExploreResult ex = explore_paths(p, b, &pruner);
    std::cout << paths_to_string(ex.paths, p);
  }
  if (opt.dumpAutomaton) std::cout << nsa_to_string(ltl_to_nsa(f.body));
  if (opt.emitConstraints) {
    ExploreBounds b;
    b.unrollPerLoop = opt.depth;
    ExploreResult ex = explore_paths(p, b, &pruner);
    auto paths = f.universal_only() ? ex.paths : ex.maximal_paths();
    TermRef enc = build_enc(f, paths, p);
    fs::create_directories(outDir);
    std::ofstream(outDir + "/enc.smt2") << term_to_smt2(enc) << "\n";
    std::cout << "wrote " << outDir << "/enc.smt2\n";
  }
}

int cmd_repair(const CommonOpts& opt, bool iterative, const char* argv0) {
  Program p = parse_program(slurp(opt.programPath));
  HyperLtlFormula f = parse_formula(slurp(opt.specPath), p.vars);
  RepairConfig cfg;
  cfg.bounds.unrollPerLoop = opt.depth;
  cfg.maxIterations = opt.maxIters;
  cfg.timeoutSeconds = opt.timeout;
  cfg.domain = parse_domain(opt.domainSpec, p, &f);
  cfg.runDir = opt.outDir + "/run";
  cfg.solverCmd = resolve_solver_cmd(opt, cfg.domain, cfg.runDir, argv0);

  write_dumps(opt, p, f, opt.outDir);

  RepairReport rep = iterative ? iterative_repair(p, f, cfg) : direct_repair(p, f, cfg);
  fs::create_directories(opt.outDir);
  std::ofstream(opt.outDir + "/report.json") << rep.to_json();
  if (!rep.finalSource.empty())
    std::ofstream(opt.outDir + "/patched.imp") << rep.finalSource;
  std::cout << rep.to_table_row(fs::path(opt.programPath).stem().string()) << "\n"
            << "outcome: " << rep.stopReason << "\n"
            << "bounded: " << rep.boundedVerdict << "  oracle: " << rep.oracleVerdict << "\n"
            << "report: " << opt.outDir << "/report.json\n";
  switch (rep.outcome) {
    case RepairReport::Repaired:
    case RepairReport::NoRepairNeeded: return kExitOk;
    case RepairReport::NoRepairInGrammar: return kExitViolated;
    case RepairReport::SolverFailed: return kExitInconclusive;
  }
  return kExitInconclusive;
}

int cmd_verify(const CommonOpts& opt) {
  Program p = parse_program(slurp(opt.programPath));
  HyperLtlFormula f = parse_formula(slurp(opt.specPath), p.vars);
  write_dumps(opt, p, f, opt.outDir);
  VerifyConfig cfg;
  cfg.bounds.unrollPerLoop = opt.depth;
  cfg.domain = parse_domain(opt.domainSpec, p, &f);
  VerifyResult r = verify_bounded(p, f, cfg);
  std::cout << (r.verdict == BoundedVerdict::HoldsBounded ? "holds-bounded"
                : r.verdict == BoundedVerdict::Violated   ? "violated"
                                                          : "inconclusive");
  if (!r.note.empty()) std::cout << " (" << r.note << ")";
  std::cout << "\n";
  return r.verdict == BoundedVerdict::HoldsBounded ? kExitOk
         : r.verdict == BoundedVerdict::Violated  ? kExitViolated
                                                  : kExitInconclusive;
}

int cmd_oracle(const CommonOpts& opt) {
  Program p = parse_program(slurp(opt.programPath));
  HyperLtlFormula f = parse_formula(slurp(opt.specPath), p.vars);
  FiniteDomain dom = parse_domain(opt.domainSpec, p, &f);
  OracleVerdict v = oracle_check_hyperltl(p, f, dom);
  std::cout << oracle_verdict_to_json(v) << "\n";
  return v.kind == OracleVerdict::True    ? kExitOk
         : v.kind == OracleVerdict::False ? kExitViolated
                                          : kExitInconclusive;
}

int cmd_emit_sygus(const CommonOpts& opt) {
  Program p = parse_program(slurp(opt.programPath));
  HyperLtlFormula f = parse_formula(slurp(opt.specPath), p.vars);
  FiniteDomain dom = parse_domain(opt.domainSpec, p, &f);
  FiniteModelBackend pruner(dom);

  Skeleton sk = instrument(p, &f);
  LiteralPool pool = collect_literal_pool(p, f);
  ExploreBounds b;
  b.unrollPerLoop = opt.depth;
  ExploreResult ex = explore_paths(sk.program, b, &pruner);
  auto paths = f.universal_only() ? ex.paths : ex.maximal_paths();
  SygusProblem prob;
  prob.funs = sk.funs;
  for (auto& fun : prob.funs)
    fun.grammar = default_grammar(fun.ret, fun.params, pool);
  prob.constraint = build_enc(f, paths, sk.program);
  fs::create_directories(opt.outDir);
  std::string path = opt.outDir + "/problem.sy";
  std::ofstream(path) << serialize_sygus(prob);
  std::cout << "wrote " << path << "\n";
  return kExitOk;
}

int cmd_bench(const CommonOpts& opt, const std::string& suite, const std::string& corpusRoot,
              const char* argv0) {
  std::vector<std::string> dirs = suite_instances(corpusRoot, suite);
  if (dirs.empty()) {
    std::cerr << "suite " << suite << " has no instances under " << corpusRoot << "\n";
    return kExitConfig;
  }
  std::string solverTemplate = opt.solverCmd.empty() ? default_solver_cmd(argv0) : opt.solverCmd;
  std::string runRoot = opt.outDir + "/bench/" + suite;
  fs::create_directories(runRoot);

  std::vector<BenchResult> results(dirs.size());
  auto work = [&](size_t i) {
    BenchInstance inst = load_instance(dirs[i]);
    results[i] = run_instance(inst, solverTemplate, runRoot);
  };
  if (opt.jobs <= 1) {
    for (size_t i = 0; i < dirs.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    for (int t = 0; t < opt.jobs; ++t)
      pool.emplace_back([&]() {
        for (size_t i = next.fetch_add(1); i < dirs.size(); i = next.fetch_add(1)) work(i);
      });
    for (auto& th : pool) th.join();
  }

  std::string table = bench_table(results);
  std::cout << table;
  std::ofstream(runRoot + "/results.txt") << table;
  {
    std::ofstream js(runRoot + "/results.json");
    js << "[\n";
    for (size_t i = 0; i < results.size(); ++i) {
      js << results[i].report.to_json(false);
      if (i + 1 < results.size()) js << ",";
      js << "\n";
    }
    js << "]\n";
  }
  bool allOk = true;
  for (const auto& r : results)
    if (r.expectationsChecked && !r.expectationsMet) allOk = false;
  return allOk ? kExitOk : kExitViolated;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"syntax-guided repair of imperative programs against HyperLTL properties"};
  app.require_subcommand(1);

  CommonOpts opt;
  auto addCommon = [&](CLI::App* c, bool needsSpec = true) {
    c->add_option("--program", opt.programPath, "program file (.imp)")->required();
    if (needsSpec) c->add_option("--spec", opt.specPath, "HyperLTL property file (.hltl)")->required();
    c->add_option("--depth", opt.depth, "loop unrolling bound");
    c->add_option("--max-iters", opt.maxIters, "improvement iteration cap");
    c->add_option("--timeout", opt.timeout, "per-query solver timeout (seconds)");
    c->add_option("--solver-cmd", opt.solverCmd, "SyGuS solver command template ({file})");
    c->add_option("--domain", opt.domainSpec, "oracle domain (int:lo..hi;strings:a,b|lexicon)");
    c->add_option("--out", opt.outDir, "output directory");
    c->add_option("--max-term-size", opt.maxTermSize, "candidate size cap for sygus-fd");
    c->add_flag("--dump-paths", opt.dumpPaths, "print explored symbolic paths");
    c->add_flag("--dump-automaton", opt.dumpAutomaton, "print the safety automaton");
    c->add_flag("--emit-constraints", opt.emitConstraints, "write the encodings as SMT-LIB 2");
  };

  auto* repair = app.add_subcommand("repair", "iterative repair (improvement loop)");
  addCommon(repair);
  auto* direct = app.add_subcommand("repair-direct", "single satisfaction query, no improvement");
  addCommon(direct);
  auto* verify = app.add_subcommand("verify", "bounded verification via the encoding");
  addCommon(verify);
  auto* oracle = app.add_subcommand("oracle", "brute-force finite-domain verdict");
  addCommon(oracle);
  auto* emit = app.add_subcommand("emit-sygus", "write the synthesis problem, no solving");
  addCommon(emit);

  std::string suite, corpusRoot = "benchmarks/instances";
  auto* bench = app.add_subcommand("bench", "run a benchmark suite");
  bench->add_option("--suite", suite, "iterative | scalability | ksafety | functional")
      ->required();
  bench->add_option("--corpus", corpusRoot, "corpus root directory");
  bench->add_option("--solver-cmd", opt.solverCmd, "SyGuS solver command template");
  bench->add_option("--out", opt.outDir, "output directory");
  bench->add_option("--jobs", opt.jobs, "parallel instances");

  try {
    CLI11_PARSE(app, argc, argv);
    if (repair->parsed()) return cmd_repair(opt, true, argv[0]);
    if (direct->parsed()) return cmd_repair(opt, false, argv[0]);
    if (verify->parsed()) return cmd_verify(opt);
    if (oracle->parsed()) return cmd_oracle(opt);
    if (emit->parsed()) return cmd_emit_sygus(opt);
    if (bench->parsed()) return cmd_bench(opt, suite, corpusRoot, argv[0]);
  } catch (const DiagnosticError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}

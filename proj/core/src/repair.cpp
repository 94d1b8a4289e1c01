#include "hyperfix/repair.hpp"

#include <chrono>
#include <functional>
#include <set>
#include <sstream>

#include "json.hpp"

namespace hyperfix {

namespace {

void collect_expr_vars(const TermRef& t, std::set<std::string>& out) {
  if (t->op == Op::Var && t->trace.empty()) out.insert(t->sval);
  for (const auto& k : t->kids) collect_expr_vars(k, out);
}

// Variables assigned or read strictly before each repair location, in source
// (pre-order) walk order.
void collect_args_before(const StmtRef& s, std::map<int, std::set<std::string>>& perLoc,
                         std::set<std::string>& seen) {
  if (!s) return;
  switch (s->kind) {
    case StmtKind::Seq:
      collect_args_before(s->a, perLoc, seen);
      collect_args_before(s->b, perLoc, seen);
      return;
    case StmtKind::Skip:
    case StmtKind::Observe:
      return;
    case StmtKind::Assign:
      if (s->repairLoc) perLoc[*s->repairLoc] = seen;
      collect_expr_vars(s->expr, seen);
      seen.insert(s->var);
      return;
    case StmtKind::If:
      if (s->repairLoc) perLoc[*s->repairLoc] = seen;
      collect_expr_vars(s->expr, seen);
      collect_args_before(s->a, perLoc, seen);
      collect_args_before(s->b, perLoc, seen);
      return;
    case StmtKind::While:
      if (s->repairLoc) perLoc[*s->repairLoc] = seen;
      collect_expr_vars(s->expr, seen);
      collect_args_before(s->a, perLoc, seen);
      return;
  }
}

}  // namespace

Skeleton instrument(const Program& p, const HyperLtlFormula* f,
                    const std::map<int, std::vector<std::string>>& argOverrides) {
  auto locs = p.repair_locations();
  if (locs.empty())
    throw DiagnosticError(
        "program has no @repair markers; annotate the statements to repair "
        "(fault localization is not automated)");

  std::map<int, std::set<std::string>> before;
  std::set<std::string> seen;
  collect_args_before(p.body, before, seen);

  std::set<std::string> formulaVars;
  if (f)
    for (const auto& a : f->atoms()) {
      std::vector<Binder> fv;
      term_free_vars(a, fv);
      for (const auto& b : fv) formulaVars.insert(b.name);
    }

  Skeleton sk;
  sk.program = p;
  for (const auto& [loc, stmt] : locs) {
    std::vector<Binder> params;
    auto ov = argOverrides.find(loc);
    if (ov != argOverrides.end()) {
      for (const auto& name : ov->second) {
        int vi = p.var_index(name);
        if (vi < 0) throw DiagnosticError("argument override names undeclared variable " + name);
        params.push_back({name, p.vars[vi].sort});
      }
    } else {
      std::set<std::string> names = before[loc];
      names.insert(formulaVars.begin(), formulaVars.end());
      for (const auto& v : p.vars)  // declaration order
        if (names.count(v.name)) params.push_back({v.name, v.sort});
    }
    Sort ret = stmt->kind == StmtKind::Assign ? p.var_sort(stmt->var) : Sort::Bool;
    SynthFun fun;
    fun.name = "f" + std::to_string(loc);
    fun.params = params;
    fun.ret = ret;
    sk.funs.push_back(std::move(fun));
    sk.originals.push_back({params, stmt->expr});
    sk.locationStmtIds.push_back(stmt->id);
  }

  // Replace marked expressions with applications.
  std::function<StmtRef(const StmtRef&)> rw = [&](const StmtRef& s) -> StmtRef {
    if (!s) return s;
    auto n = std::make_shared<Stmt>(*s);
    if (s->repairLoc) {
      int loc = *s->repairLoc;
      const SynthFun& fun = sk.funs[loc];
      std::vector<TermRef> args;
      for (const auto& b : fun.params) args.push_back(mk_var(b.name, b.sort));
      n->expr = mk_app(fun.name, fun.ret, std::move(args));
    }
    n->a = rw(s->a);
    n->b = rw(s->b);
    return n;
  };
  sk.program.body = rw(p.body);
  return sk;
}

Program apply_patch(const Skeleton& sk, const std::vector<TermRef>& exprs) {
  if (exprs.size() != sk.funs.size())
    throw DiagnosticError("patch vector arity does not match the skeleton");
  std::map<std::string, FunDef> defs;
  for (size_t i = 0; i < sk.funs.size(); ++i) {
    if (exprs[i]->sort != sk.funs[i].ret)
      throw DiagnosticError("patch expression for " + sk.funs[i].name + " has the wrong sort");
    defs[sk.funs[i].name] = {sk.funs[i].params, exprs[i]};
  }
  Program out = sk.program;
  std::function<StmtRef(const StmtRef&)> rw = [&](const StmtRef& s) -> StmtRef {
    if (!s) return s;
    auto n = std::make_shared<Stmt>(*s);
    n->repairLoc.reset();
    if (s->expr) n->expr = term_subst_apps(s->expr, defs);
    n->a = rw(s->a);
    n->b = rw(s->b);
    return n;
  };
  out.body = rw(out.body);
  return out;
}

VerifyResult verify_bounded(const Program& q, const HyperLtlFormula& f, const VerifyConfig& cfg) {
  VerifyResult res;
  FiniteModelBackend pruner(cfg.domain);
  ExploreResult ex = explore_paths(q, cfg.bounds, &pruner);
  bool complete = !ex.pathLimitHit;
  bool anyCut = false;
  for (const auto& path : ex.paths) anyCut |= path.depthExhausted;
  res.exact = complete && !anyCut;
  res.pathCount = ex.paths.size();

  auto decide = [&](const TermRef& enc) -> std::optional<bool> {
    if (cfg.external) {
      SatResult r = cfg.external->check_sat(mk_not(enc));
      if (r.verdict == Sat::Unsat) return true;
      if (r.verdict == Sat::Sat) return false;
      return std::nullopt;
    }
    BoundedEvaluator ev(cfg.domain);
    return ev.decide(enc);
  };

  if (res.exact) {
    TermRef enc = build_enc(f, ex.paths, q);
    auto v = decide(enc);
    if (!v) {
      res.note = "solver returned unknown";
      return res;
    }
    res.verdict = *v ? BoundedVerdict::HoldsBounded : BoundedVerdict::Violated;
    return res;
  }

  if (f.universal_only()) {
    // Any path subset gives a necessary condition: falsity refutes q.
    TermRef enc = build_enc(f, ex.paths, q);
    auto v = decide(enc);
    if (!v) {
      res.note = "solver returned unknown";
      return res;
    }
    res.verdict = *v ? BoundedVerdict::HoldsBounded : BoundedVerdict::Violated;
    if (*v) res.note = "bounded paths only; satisfaction is not certified beyond the bound";
    return res;
  }

  std::vector<SymbolicPath> maximal = ex.maximal_paths();
  TermRef enc = build_enc(f, maximal, q);
  auto v = decide(enc);
  if (!v) {
    res.note = "solver returned unknown";
    return res;
  }
  if (f.existential_only()) {
    if (*v) {
      res.verdict = BoundedVerdict::HoldsBounded;  // sound: witnesses are maximal paths
      return res;
    }
    res.verdict = BoundedVerdict::Inconclusive;
    res.note = "no witness among the explored maximal paths";
    return res;
  }
  // Alternating prefix with cut paths: only a positive bounded answer is kept.
  if (*v) {
    res.verdict = BoundedVerdict::HoldsBounded;
    res.note = "alternating prefix over the maximal subset";
  } else {
    res.verdict = BoundedVerdict::Inconclusive;
    res.note = "alternating prefix and cut paths; the encoding is not conclusive";
  }
  return res;
}

namespace {

const char* verdict_name(BoundedVerdict v) {
  switch (v) {
    case BoundedVerdict::HoldsBounded: return "holds-bounded";
    case BoundedVerdict::Violated: return "violated";
    case BoundedVerdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

}  // namespace

LiteralPool collect_literal_pool(const Program& p, const HyperLtlFormula& f,
                                 const LiteralPool& extra) {
  LiteralPool pool;
  std::set<int64_t> seenInts;
  std::set<std::string> seenStrs;
  std::function<void(const TermRef&)> scanTerm = [&](const TermRef& t) {
    if (t->op == Op::IntConst && t->ival != 0 && t->ival != 1 && seenInts.insert(t->ival).second)
      pool.ints.push_back(t->ival);
    if (t->op == Op::StrConst && seenStrs.insert(t->sval).second) pool.strings.push_back(t->sval);
    for (const auto& k : t->kids) scanTerm(k);
  };
  std::function<void(const StmtRef&)> scanStmt = [&](const StmtRef& s) {
    if (!s) return;
    if (s->expr) scanTerm(s->expr);
    scanStmt(s->a);
    scanStmt(s->b);
  };
  scanStmt(p.body);
  for (const auto& a : f.atoms()) scanTerm(a);
  for (int64_t v : extra.ints)
    if (seenInts.insert(v).second) pool.ints.push_back(v);
  for (const auto& s : extra.strings)
    if (seenStrs.insert(s).second) pool.strings.push_back(s);
  return pool;
}

namespace {

struct LoopState {
  Skeleton sk;
  std::vector<SymbolicPath> encPaths;
  std::vector<SymbolicPath> allPaths;
  SygusProblem baseProblem;
  TermRef enc;
  std::map<std::string, FunDef> originalsByName;
};

std::map<std::string, FunDef> defs_for(const Skeleton& sk, const std::vector<TermRef>& exprs) {
  std::map<std::string, FunDef> defs;
  for (size_t i = 0; i < sk.funs.size(); ++i)
    defs[sk.funs[i].name] = {sk.funs[i].params, exprs[i]};
  return defs;
}

}  // namespace

std::string RepairReport::to_json(bool pretty) const {
  nlohmann::ordered_json j;
  const char* oc = outcome == NoRepairNeeded     ? "no-repair-needed"
                   : outcome == Repaired         ? "repaired"
                   : outcome == NoRepairInGrammar ? "no-repair-in-grammar"
                                                  : "solver-failed";
  j["outcome"] = oc;
  j["iterations"] = improvementIterations;
  j["locations"] = locations;
  j["seconds"] = totalSeconds;
  j["solver_seconds"] = solverSeconds;
  j["solution_size"] = solutionSize;
  j["stop_reason"] = stopReason;
  j["best_so_far_on_unknown"] = bestSoFarOnUnknown;
  j["bounded_verdict"] = boundedVerdict;
  j["oracle_verdict"] = oracleVerdict;
  j["domain_size"] = domainSize;
  if (!constraintFile.empty()) j["constraint_file"] = constraintFile;
  nlohmann::ordered_json log = nlohmann::ordered_json::array();
  for (const auto& it : iterations) {
    nlohmann::ordered_json e;
    e["iteration"] = it.iteration;
    e["exprs"] = it.exprs;
    e["size"] = it.sizeNodes;
    e["solver_seconds"] = it.solverSeconds;
    e["preserved_inputs"] = it.preservedCount;
    e["preserved_grew"] = it.preservedGrew;
    log.push_back(std::move(e));
  }
  j["log"] = std::move(log);
  j["final_exprs"] = finalExprs;
  j["patched_program"] = finalSource;
  return pretty ? j.dump(2) : j.dump();
}

std::string RepairReport::to_table_row(const std::string& name) const {
  std::ostringstream os;
  os << name;
  os.width(0);
  os << "  #Iter=" << improvementIterations << "  #Locations=" << locations << "  t="
     << totalSeconds << "s  Size=" << solutionSize;
  return os.str();
}

namespace {

RepairReport run_repair(const Program& p, const HyperLtlFormula& f, const RepairConfig& cfg,
                        bool iterative) {
  auto t0 = std::chrono::steady_clock::now();
  RepairReport rep;
  auto elapsed = [&]() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  // A program that already satisfies the property (bounded) needs no repair.
  VerifyConfig vcfg{cfg.bounds, cfg.domain, nullptr};
  VerifyResult pre = verify_bounded(p, f, vcfg);
  rep.locations = static_cast<int>(p.repair_locations().size());
  if (pre.verdict == BoundedVerdict::HoldsBounded) {
    rep.outcome = RepairReport::NoRepairNeeded;
    rep.stopReason = "program already satisfies the property within bounds";
    rep.finalSource = pretty_print(p);
    std::vector<std::pair<int, const Stmt*>> locs = p.repair_locations();
    size_t sz = 0;
    for (const auto& [loc, stmt] : locs) {
      rep.finalExprs.push_back(pretty_print_expr(stmt->expr));
      sz += term_count_nodes(stmt->expr);
    }
    rep.solutionSize = sz;
    rep.boundedVerdict = verdict_name(pre.verdict);
    rep.oracleVerdict = "skipped";
    rep.totalSeconds = elapsed();
    return rep;
  }

  Skeleton sk = instrument(p, &f, cfg.argOverrides);
  rep.locations = static_cast<int>(sk.funs.size());

  LiteralPool pool = collect_literal_pool(p, f, cfg.extraLiterals);
  if (cfg.stringPool) pool.strings = *cfg.stringPool;
  if (cfg.intPool) {
    pool.ints.clear();
    for (int64_t v : *cfg.intPool)
      if (v != 0 && v != 1) pool.ints.push_back(v);
  }
  for (size_t i = 0; i < sk.funs.size(); ++i) {
    auto ov = cfg.grammarOverrides.find(static_cast<int>(i));
    sk.funs[i].grammar = ov != cfg.grammarOverrides.end()
                             ? ov->second
                             : default_grammar(sk.funs[i].ret, sk.funs[i].params, pool);
  }

  FiniteModelBackend pruner(cfg.domain);
  ExploreResult ex = explore_paths(sk.program, cfg.bounds, &pruner);
  std::vector<SymbolicPath> encPaths = f.universal_only() ? ex.paths : ex.maximal_paths();

  TermRef enc = build_enc(f, encPaths, sk.program);

  SygusProblem base;
  base.funs = sk.funs;
  base.constraint = enc;

  SygusEngine engine(cfg.solverCmd, cfg.runDir, cfg.timeoutSeconds);
  BoundedEvaluator recheck(cfg.domain);

  Program original = apply_patch(sk, [&] {
    std::vector<TermRef> es;
    for (const auto& d : sk.originals) es.push_back(d.body);
    return es;
  }());
  std::vector<SymbolicPath> pathsOriginal = substitute_paths(ex.paths, defs_for(sk, [&] {
                                              std::vector<TermRef> es;
                                              for (const auto& d : sk.originals)
                                                es.push_back(d.body);
                                              return es;
                                            }()));

  size_t domainSize = cfg.domain.enumeration_size(p);
  rep.domainSize = domainSize;

  auto preserved_count = [&](const std::vector<TermRef>& exprs) -> size_t {
    Program q = apply_patch(sk, exprs);
    return oracle_preserved_inputs(original, q, p.outputs, cfg.domain).count;
  };

  auto log_candidate = [&](int iter, const std::vector<TermRef>& exprs, double secs,
                           size_t prevPreserved, bool* grewOut) -> size_t {
    IterationLog il;
    il.iteration = iter;
    size_t sz = 0;
    for (const auto& e : exprs) {
      il.exprs.push_back(pretty_print_expr(e));
      sz += term_count_nodes(e);
    }
    il.sizeNodes = sz;
    il.solverSeconds = secs;
    il.preservedCount = preserved_count(exprs);
    il.preservedGrew = iter > 0 && il.preservedCount > prevPreserved;
    if (grewOut) *grewOut = il.preservedGrew;
    rep.iterations.push_back(il);
    return il.preservedCount;
  };

  // Initial candidate from the satisfaction constraint alone.
  SygusOutcome initial = engine.solve(base);
  rep.solverSeconds += initial.seconds;
  rep.constraintFile = cfg.runDir + "/problem0.sy";
  if (initial.status == SygusOutcome::Infeasible) {
    rep.outcome = RepairReport::NoRepairInGrammar;
    rep.stopReason = "satisfaction constraint infeasible within grammar and bounds";
    rep.totalSeconds = elapsed();
    return rep;
  }
  if (initial.status != SygusOutcome::Solved) {
    rep.outcome = RepairReport::SolverFailed;
    rep.stopReason = initial.error.empty() ? "solver returned unknown" : initial.error;
    rep.totalSeconds = elapsed();
    return rep;
  }
  FunctionEnv env0;
  env0.defs = defs_for(sk, initial.solutions);
  if (!recheck.decide(enc, &env0))
    throw DiagnosticError("solver answer failed the independent re-check of the constraint");

  std::vector<TermRef> current = initial.solutions;
  size_t prevPreserved = log_candidate(0, current, initial.seconds, 0, nullptr);
  rep.stopReason = "single query";

  if (iterative) {
    int k = 0;
    while (k < cfg.maxIterations) {
      std::vector<SymbolicPath> pathsPrev = substitute_paths(ex.paths, defs_for(sk, current));
      TermRef iter = build_iter(pathsOriginal, pathsPrev, ex.paths, p.outputs, sk.program,
                                cfg.prunePathCombinations);
      SygusProblem improved = base;
      // The improvement conjunct is far cheaper to refute; order it first.
      improved.constraint = mk_and({iter, enc});
      SygusOutcome next = engine.solve(improved);
      rep.solverSeconds += next.seconds;
      if (next.status == SygusOutcome::Infeasible) {
        rep.stopReason = "improvement constraint infeasible: optimal within grammar and bounds";
        break;
      }
      if (next.status != SygusOutcome::Solved) {
        rep.stopReason = "solver gave up mid-loop; returning the best candidate so far";
        rep.bestSoFarOnUnknown = true;
        break;
      }
      FunctionEnv envK;
      envK.defs = defs_for(sk, next.solutions);
      if (!recheck.decide(improved.constraint, &envK))
        throw DiagnosticError("solver answer failed the independent re-check of the constraint");
      current = next.solutions;
      ++k;
      bool grew = false;
      prevPreserved = log_candidate(k, current, next.seconds, prevPreserved, &grew);
      rep.stopReason = "improvement accepted";
    }
    if (k == cfg.maxIterations) rep.stopReason = "iteration cap reached";
    rep.improvementIterations = k;
  }

  Program patched = apply_patch(sk, current);
  rep.outcome = RepairReport::Repaired;
  rep.finalSource = pretty_print(patched);
  for (const auto& e : current) rep.finalExprs.push_back(pretty_print_expr(e));
  rep.solutionSize = RepairCandidate{current, 0, 0}.size_nodes();

  // Re-verify at a strictly larger unrolling bound, and against the oracle.
  VerifyConfig finalCfg{cfg.bounds, cfg.domain, nullptr};
  finalCfg.bounds.unrollPerLoop = cfg.bounds.unrollPerLoop * cfg.finalUnrollFactor;
  VerifyResult post = verify_bounded(patched, f, finalCfg);
  rep.boundedVerdict = verdict_name(post.verdict);
  OracleVerdict ov = oracle_check_hyperltl(patched, f, cfg.domain);
  rep.oracleVerdict = ov.kind == OracleVerdict::True    ? "true"
                      : ov.kind == OracleVerdict::False ? "false"
                                                        : "inconclusive";
  rep.totalSeconds = elapsed();
  return rep;
}

}  // namespace

RepairReport iterative_repair(const Program& p, const HyperLtlFormula& f,
                              const RepairConfig& cfg) {
  return run_repair(p, f, cfg, true);
}

RepairReport direct_repair(const Program& p, const HyperLtlFormula& f, const RepairConfig& cfg) {
  return run_repair(p, f, cfg, false);
}

}  // namespace hyperfix

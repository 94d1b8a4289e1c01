#include <random>

#include "doctest.h"
#include "hyperfix/repair.hpp"
#include "hyperfix/semantics.hpp"
#include "hyperfix/symexec.hpp"

using namespace hyperfix;

namespace {

Value eval_symbolic(const TermRef& e, const Program& p, const Store& st) {
  return eval_expr(e, p, st);
}

Store store_of(const Program& p, std::vector<Value> vals) {
  Store st;
  st.vals = std::move(vals);
  return st;
}

}  // namespace

TEST_CASE("straight-line program yields one maximal path") {
  Program p = parse_program("int x;\nx = x + 1\nobserve");
  ExploreResult r = explore_paths(p, {});
  REQUIRE(r.paths.size() == 1);
  const SymbolicPath& path = r.paths[0];
  CHECK(path.maximal);
  CHECK(path.alpha->is_true());
  REQUIRE(path.obs.size() == 1);
  CHECK(term_to_smt2(path.obs[0].vals[0]) == "(+ x 1)");
}

TEST_CASE("instrumented skeleton has the two expected paths") {
  Program p = parse_program(R"(
string phase; string title; string session; string decision; string print;
output print, decision;
observe
@repair
decision = decision
if (decision == "Accept") {
  print = title + session
} else {
  print = title
}
observe
)");
  HyperLtlFormula f = parse_formula(
      "forall p1. forall p2. ((phase[p1] != \"Done\") && (phase[p2] != \"Done\") && "
      "(title[p1] == title[p2])) -> X (print[p1] == print[p2])",
      p.vars);
  std::map<int, std::vector<std::string>> args{{0, {"phase", "title", "session", "decision"}}};
  Skeleton sk = instrument(p, &f, args);
  ExploreResult r = explore_paths(sk.program, {});
  REQUIRE(r.paths.size() == 2);
  // Canonical order: else branch ('0') before then branch ('1').
  CHECK(r.paths[0].choices == "0");
  CHECK(r.paths[1].choices == "1");
  CHECK(term_to_smt2(r.paths[1].alpha) == "(= (f0 phase title session decision) \"Accept\")");
  CHECK(term_to_smt2(r.paths[0].alpha) == "(distinct (f0 phase title session decision) \"Accept\")");
  int printIdx = p.var_index("print");
  int decisionIdx = p.var_index("decision");
  CHECK(term_to_smt2(r.paths[1].obs[1].vals[printIdx]) == "(str.++ title session)");
  CHECK(term_to_smt2(r.paths[0].obs[1].vals[printIdx]) == "title");
  CHECK(term_to_smt2(r.paths[0].obs[1].vals[decisionIdx]) ==
        "(f0 phase title session decision)");
  // Both observation sequences start at the initial store.
  CHECK(term_to_smt2(r.paths[0].obs[0].vals[printIdx]) == "print");
}

TEST_CASE("loop unrolling: maximal paths partition the domain, cut path flagged") {
  Program p = parse_program("int x;\nwhile (x < 2) { x = x + 1 }\nobserve");
  ExploreBounds b;
  b.unrollPerLoop = 3;
  b.pruneUnsat = false;
  ExploreResult r = explore_paths(p, b);
  int maximal = 0, cut = 0;
  for (const auto& path : r.paths) {
    if (path.maximal) ++maximal;
    if (path.depthExhausted) ++cut;
  }
  // Exit after 0, 1, 2 or 3 iterations, plus the branch cut at the bound.
  CHECK(maximal == 4);
  CHECK(cut == 1);

  // Oracle cross-check on Int [-1,3]: the enabled maximal path replays run_obs.
  FiniteDomain dom;
  dom.ints = {-1, 0, 1, 2, 3};
  for (const auto& st : dom.enumerate_stores(p)) {
    ObservationSequence concrete = run_obs(p, st, 1000);
    REQUIRE(concrete.terminated);
    int enabled = 0;
    for (const auto& path : r.paths) {
      if (!path.maximal) continue;
      if (eval_symbolic(path.alpha, p, st).i == 0) continue;
      ++enabled;
      REQUIRE(path.obs.size() == concrete.obs.size());
      for (size_t i = 0; i < path.obs.size(); ++i)
        CHECK(eval_symbolic(path.obs[i].vals[0], p, st) == concrete.obs[i].vals[0]);
    }
    CHECK(enabled == 1);
  }
}

TEST_CASE("path satisfiability: contradictions, sat witnesses, uninterpreted symbols") {
  FiniteDomain dom;
  FiniteModelBackend backend(dom);
  TermRef x = mk_var("x", Sort::Int);
  TermRef contradiction =
      mk_and({mk_binary(Op::Ge, x, mk_int(0)), mk_binary(Op::Le, x, mk_int(-1))});
  CHECK(path_satisfiable(contradiction, backend).verdict == Sat::Unsat);

  TermRef s = mk_var("s", Sort::String);
  TermRef strings = mk_and({mk_eq(s, mk_str("a")), mk_eq(s, mk_str("ab"))});
  CHECK(path_satisfiable(strings, backend).verdict == Sat::Unsat);

  // Both branch conditions of the skeleton are satisfiable: the symbol is
  // uninterpreted, so a value picks the branch.
  TermRef app = mk_app("f0", Sort::String, {mk_var("phase", Sort::String)});
  CHECK(path_satisfiable(mk_eq(app, mk_str("Accept")), backend).verdict == Sat::Sat);
  CHECK(path_satisfiable(mk_ne(app, mk_str("Accept")), backend).verdict == Sat::Sat);

  // Structural complement of guards.
  TermRef g = mk_binary(Op::Lt, x, mk_int(2));
  CHECK(path_satisfiable(mk_and({g, mk_not(g)}), backend).verdict == Sat::Unsat);
}

namespace {

Program random_loopfree_program(std::mt19937& rng, int maxStmts = 6) {
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  std::vector<std::string> names{"x", "y", "z"};
  std::string text = "int x; int y; int z;\noutput x, y;\n";
  std::function<std::string(int)> genExpr = [&](int depth) -> std::string {
    if (depth == 0 || pick(2) == 0) {
      switch (pick(3)) {
        case 0: return names[pick(3)];
        default: return std::to_string(pick(4) - 1);
      }
    }
    std::string a = genExpr(depth - 1), b = genExpr(depth - 1);
    return "(" + a + (pick(2) ? " + " : " - ") + b + ")";
  };
  auto genGuard = [&]() {
    const char* ops[] = {"==", "!=", "<=", "<", ">=", ">"};
    return genExpr(1) + " " + ops[pick(6)] + " " + genExpr(1);
  };
  std::function<std::string(int, int)> genStmts = [&](int depth, int count) {
    std::string out;
    for (int i = 0; i < count; ++i) {
      switch (pick(depth > 0 ? 4 : 3)) {
        case 0: out += names[pick(3)] + " = " + genExpr(2) + "\n"; break;
        case 1: out += "observe\n"; break;
        case 2: out += names[pick(3)] + " = " + genExpr(1) + "\n"; break;
        default:
          out += "if (" + genGuard() + ") {\n" + genStmts(depth - 1, 1 + pick(2)) +
                 "} else {\n" + genStmts(depth - 1, 1 + pick(2)) + "}\n";
      }
    }
    return out;
  };
  return parse_program(text + genStmts(2, 1 + pick(maxStmts)));
}

}  // namespace

TEST_CASE("concretization soundness on random programs and stores") {
  std::mt19937 rng(2024);
  FiniteDomain dom;  // Int [0,2]
  int checked = 0;
  for (int trial = 0; trial < 120 && checked < 600; ++trial) {
    Program p = random_loopfree_program(rng);
    ExploreBounds b;
    b.pruneUnsat = false;
    ExploreResult r = explore_paths(p, b);
    auto stores = dom.enumerate_stores(p);
    std::shuffle(stores.begin(), stores.end(), rng);
    size_t take = std::min<size_t>(stores.size(), 5);
    for (size_t si = 0; si < take; ++si) {
      const Store& st = stores[si];
      ObservationSequence concrete = run_obs(p, st, 10000);
      REQUIRE(concrete.terminated);
      // Coverage and exclusivity: exactly one maximal path is enabled.
      const SymbolicPath* enabled = nullptr;
      for (const auto& path : r.paths) {
        REQUIRE(path.maximal);
        if (eval_symbolic(path.alpha, p, st).i != 0) {
          CHECK(enabled == nullptr);
          enabled = &path;
        }
      }
      REQUIRE(enabled != nullptr);
      REQUIRE(enabled->obs.size() == concrete.obs.size());
      for (size_t i = 0; i < enabled->obs.size(); ++i)
        for (size_t v = 0; v < p.vars.size(); ++v)
          CHECK(eval_symbolic(enabled->obs[i].vals[v], p, st) == concrete.obs[i].vals[v]);
      ++checked;
    }
  }
  CHECK(checked >= 500);
}

TEST_CASE("exclusivity: distinct maximal path conditions are pairwise contradictory") {
  std::mt19937 rng(77);
  FiniteDomain dom;
  FiniteModelBackend backend(dom);
  for (int trial = 0; trial < 20; ++trial) {
    Program p = random_loopfree_program(rng);
    ExploreBounds b;
    b.pruneUnsat = false;
    ExploreResult r = explore_paths(p, b);
    for (size_t i = 0; i < r.paths.size(); ++i)
      for (size_t j = i + 1; j < r.paths.size(); ++j) {
        SatResult sat = backend.check_sat(mk_and({r.paths[i].alpha, r.paths[j].alpha}));
        CHECK(sat.verdict == Sat::Unsat);
      }
  }
}

TEST_CASE("substituting the original expressions restores concrete paths") {
  Program p = parse_program(R"(
int x; int y;
output y;
@repair
y = x + 1
observe
)");
  Skeleton sk = instrument(p);
  ExploreResult r = explore_paths(sk.program, {});
  std::map<std::string, FunDef> defs{{sk.funs[0].name, sk.originals[0]}};
  auto restored = substitute_paths(r.paths, defs);
  REQUIRE(restored.size() == 1);
  CHECK(term_to_smt2(restored[0].obs[0].vals[p.var_index("y")]) == "(+ x 1)");
}

TEST_CASE("syntactic contradiction pruning sees shared hole-free prefixes") {
  Program p = parse_program(R"(
int x; int y;
output y;
if (x <= 0) { y = 0 } else { y = 1 }
@repair
y = y
observe
)");
  Skeleton sk = instrument(p);
  ExploreResult r = explore_paths(sk.program, {});
  REQUIRE(r.paths.size() == 2);
  CHECK(paths_syntactically_contradict(r.paths[0], r.paths[1]));
  CHECK(!paths_syntactically_contradict(r.paths[0], r.paths[0]));
}

#include <random>

#include "doctest.h"
#include "hyperfix/lang.hpp"

using namespace hyperfix;

namespace {

const char* kEdasProgram = R"(
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
)";

int count_kind(const StmtRef& s, StmtKind k) {
  if (!s) return 0;
  int n = s->kind == k ? 1 : 0;
  return n + count_kind(s->a, k) + count_kind(s->b, k);
}

}  // namespace

TEST_CASE("smallest program") {
  Program p = parse_program("skip");
  CHECK(p.body->kind == StmtKind::Skip);
  CHECK(p.vars.empty());
}

TEST_CASE("display body parses with two observes and one if") {
  Program p = parse_program(kEdasProgram);
  CHECK(count_kind(p.body, StmtKind::Observe) == 2);
  CHECK(count_kind(p.body, StmtKind::If) == 1);
  CHECK(p.outputs == std::vector<std::string>{"print", "decision"});
  auto locs = p.repair_locations();
  REQUIRE(locs.size() == 1);
  CHECK(locs[0].second->kind == StmtKind::Assign);
  CHECK(locs[0].second->var == "decision");
}

TEST_CASE("ill-sorted guard is rejected") {
  CHECK_THROWS_AS(parse_program("int x; if (x) { skip }"), DiagnosticError);
}

TEST_CASE("diagnostics carry positions") {
  try {
    parse_program("int x;\nx = \"a\"");
    FAIL("expected a sort error");
  } catch (const DiagnosticError& e) {
    CHECK(e.line == 2);
  }
}

TEST_CASE("undeclared variables and duplicate declarations are errors") {
  CHECK_THROWS_AS(parse_program("x = 1"), DiagnosticError);
  CHECK_THROWS_AS(parse_program("int x; int x;"), DiagnosticError);
  CHECK_THROWS_AS(parse_program("int x; output y;"), DiagnosticError);
}

TEST_CASE("programs without observe are legal") {
  Program p = parse_program("int x; x = 1\nx = x + 1");
  CHECK(count_kind(p.body, StmtKind::Observe) == 0);
}

TEST_CASE("formula: edas property desugars implication over negated atoms") {
  HyperLtlFormula f = parse_formula(
      "forall p1. forall p2. ((phase[p1] != \"Done\") && (phase[p2] != \"Done\") && "
      "(title[p1] == title[p2])) -> X (print[p1] == print[p2])");
  REQUIRE(f.prefix.size() == 2);
  CHECK(f.prefix[0].universal);
  CHECK(f.prefix[1].universal);
  // Desugared body: disjunction of negated premise atoms and the X part.
  REQUIRE(f.body->kind == LtlKind::Or);
  auto atoms = f.atoms();
  CHECK(atoms.size() == 4);
  // Negation was pushed into the atoms: the phase tests flip to equality.
  CHECK(atoms[0]->op == Op::Eq);
  CHECK(atoms[2]->op == Op::Ne);
}

TEST_CASE("formula: negation outside atoms is a safety-fragment violation") {
  CHECK_THROWS_AS(parse_formula("forall p. X !(X (x[p] == 0))"), DiagnosticError);
  CHECK_THROWS_AS(parse_formula("forall p. !((x[p] == 0) W (x[p] == 1))"), DiagnosticError);
}

TEST_CASE("formula: G expands to weak-until false") {
  HyperLtlFormula f = parse_formula("forall p. G (x[p] >= 0)");
  REQUIRE(f.body->kind == LtlKind::WeakUntil);
  CHECK(f.body->b->kind == LtlKind::False);
  CHECK(f.body->a->kind == LtlKind::Atom);
}

TEST_CASE("formula: prefix errors") {
  CHECK_THROWS_AS(parse_formula("forall p. forall p. (x[p] == 0)"), DiagnosticError);
  CHECK_THROWS_AS(parse_formula("forall p. (x[q] == 0)"), DiagnosticError);
  CHECK_THROWS_AS(parse_formula("(x[p] == 0)"), DiagnosticError);
}

TEST_CASE("formula: declared sorts override inference") {
  std::vector<VarDecl> decls{{"s", Sort::String}, {"t", Sort::String}};
  HyperLtlFormula f = parse_formula("forall p1. forall p2. (s[p1] == t[p2])", decls);
  CHECK(f.atoms()[0]->kids[0]->sort == Sort::String);
  CHECK_THROWS_AS(parse_formula("forall p. (u[p] == 0)", decls), DiagnosticError);
}

// Random AST round-trip: parse(pretty_print(P)) is structurally equal to P.
namespace {

struct AstGen {
  std::mt19937 rng;
  Program p;

  explicit AstGen(uint32_t seed) : rng(seed) {
    p.vars = {{"x", Sort::Int}, {"y", Sort::Int}, {"s", Sort::String}, {"b", Sort::Bool}};
    p.outputs = {"x", "s"};
  }

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  TermRef gen_int(int depth) {
    if (depth == 0 || pick(2) == 0) {
      switch (pick(3)) {
        case 0: return mk_int(pick(5));
        case 1: return mk_var("x", Sort::Int);
        default: return mk_var("y", Sort::Int);
      }
    }
    switch (pick(4)) {
      case 0: return mk_binary(Op::Add, gen_int(depth - 1), gen_int(depth - 1));
      case 1: return mk_binary(Op::Sub, gen_int(depth - 1), gen_int(depth - 1));
      case 2: return mk_binary(Op::Mul, gen_int(depth - 1), gen_int(depth - 1));
      default: return mk_ite(gen_bool(depth - 1), gen_int(depth - 1), gen_int(depth - 1));
    }
  }

  TermRef gen_str(int depth) {
    if (depth == 0 || pick(2) == 0)
      return pick(2) ? mk_var("s", Sort::String) : mk_str(pick(2) ? "a" : "bc");
    return mk_binary(Op::Concat, gen_str(depth - 1), gen_str(depth - 1));
  }

  TermRef gen_bool(int depth) {
    if (depth == 0 || pick(2) == 0) {
      switch (pick(4)) {
        case 0: return mk_bool(pick(2));
        case 1: return mk_var("b", Sort::Bool);
        case 2: return mk_binary(Op::Le, gen_int(0), gen_int(0));
        default: return mk_eq(gen_str(0), gen_str(0));
      }
    }
    switch (pick(3)) {
      case 0: return mk_nary_raw(Op::And, {gen_bool(depth - 1), gen_bool(depth - 1)});
      case 1: return mk_nary_raw(Op::Or, {gen_bool(depth - 1), gen_bool(depth - 1)});
      default: return mk_not(gen_bool(depth - 1));
    }
  }

  StmtRef gen_stmt(int depth, bool allowRepair) {
    int choice = pick(depth == 0 ? 4 : 6);
    StmtRef s;
    switch (choice) {
      case 0: s = mk_skip(); break;
      case 1: s = mk_observe(); break;
      case 2:
        s = mk_assign(pick(2) ? "x" : "y", gen_int(2));
        break;
      case 3: s = mk_assign("s", gen_str(2)); break;
      case 4:
        s = mk_if(gen_bool(2), gen_stmt(depth - 1, false), gen_stmt(depth - 1, false));
        break;
      default: s = mk_while(gen_bool(2), gen_stmt(depth - 1, false)); break;
    }
    bool marked = false;
    if (allowRepair && pick(4) == 0 &&
        (s->kind == StmtKind::Assign || s->kind == StmtKind::If || s->kind == StmtKind::While)) {
      s = stmt_with_repair(s, 0);
      marked = true;
    }
    (void)marked;
    if (depth > 0 && pick(2) == 0) return mk_seq(s, gen_stmt(depth - 1, allowRepair));
    return s;
  }

  Program gen() {
    Program out = p;
    out.body = gen_stmt(3, true);
    return normalize_program(std::move(out));
  }
};

}  // namespace

TEST_CASE("round-trip: parse(pretty_print(P)) equals P for random ASTs") {
  for (uint32_t seed = 0; seed < 200; ++seed) {
    AstGen gen(seed);
    Program p = gen.gen();
    std::string text = pretty_print(p);
    Program q = parse_program(text);
    INFO("seed ", seed, " program:\n", text);
    CHECK(program_equal(p, q));
    // Location stability: markers and their order survive printing.
    auto lp = p.repair_locations();
    auto lq = q.repair_locations();
    REQUIRE(lp.size() == lq.size());
    for (size_t i = 0; i < lp.size(); ++i) CHECK(lp[i].first == lq[i].first);
  }
}

TEST_CASE("desugaring soundness: random formulas contain only safety connectives") {
  const char* samples[] = {
      "forall p. (x[p] == 0) -> ((y[p] >= 1) <-> (x[p] <= 2))",
      "forall p1. exists p2. !((x[p1] != x[p2]) && (y[p1] > 0)) || X (x[p1] == 0)",
      "forall p. ((x[p] == 0) W (y[p] == 1)) && G (x[p] >= 0)",
  };
  std::function<void(const LtlRef&)> checkNode = [&](const LtlRef& l) {
    if (!l) return;
    switch (l->kind) {
      case LtlKind::Atom:
        CHECK(l->atom->op != Op::Not);  // negation folded into the predicate
        break;
      default: break;
    }
    checkNode(l->a);
    checkNode(l->b);
  };
  for (const char* s : samples) {
    HyperLtlFormula f = parse_formula(s);
    checkNode(f.body);
  }
}

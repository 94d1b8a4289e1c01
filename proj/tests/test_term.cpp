#include "doctest.h"
#include "hyperfix/term.hpp"

using namespace hyperfix;

TEST_CASE("hash consing gives pointer equality for equal structure") {
  TermRef a = mk_binary(Op::Add, mk_var("x", Sort::Int), mk_int(1));
  TermRef b = mk_binary(Op::Add, mk_var("x", Sort::Int), mk_int(1));
  CHECK(a.get() == b.get());
  TermRef c = mk_binary(Op::Add, mk_var("y", Sort::Int), mk_int(1));
  CHECK(a.get() != c.get());
}

TEST_CASE("constructors enforce sorts") {
  CHECK_THROWS_AS(mk_binary(Op::Add, mk_str("a"), mk_int(1)), DiagnosticError);
  CHECK_THROWS_AS(mk_unary(Op::Not, mk_int(0)), DiagnosticError);
  CHECK_THROWS_AS(mk_eq(mk_int(1), mk_str("a")), DiagnosticError);
  CHECK_THROWS_AS(mk_ite(mk_int(1), mk_int(1), mk_int(2)), DiagnosticError);
}

TEST_CASE("n-ary normalization drops neutral elements") {
  TermRef x = mk_var("b", Sort::Bool);
  CHECK(mk_and({}).get() == mk_true().get());
  CHECK(mk_or({}).get() == mk_false().get());
  CHECK(mk_and({x, mk_true()}).get() == x.get());
  CHECK(mk_and({x, mk_false()}).get() == mk_false().get());
  CHECK(mk_or({x, mk_false()}).get() == x.get());
  // The raw constructor preserves the shape for grammar candidates.
  TermRef raw = mk_nary_raw(Op::And, {x, mk_true()});
  CHECK(raw->op == Op::And);
  CHECK(term_count_nodes(raw) == 3);
}

TEST_CASE("smt2 printing") {
  TermRef t = mk_quant(
      Op::Forall, {{"x!p1", Sort::Int}},
      mk_implies(mk_binary(Op::Le, mk_var("x", Sort::Int, "p1"), mk_int(2)),
                 mk_eq(mk_str("a\"b"), mk_var("s", Sort::String))));
  CHECK(term_to_smt2(t) == "(forall ((x!p1 Int)) (=> (<= x!p1 2) (= \"a\"\"b\" s)))");
  CHECK(term_to_smt2(mk_int(-3)) == "(- 3)");
}

TEST_CASE("substitution respects binders and checks capture") {
  TermRef body = mk_eq(mk_var("x", Sort::Int), mk_var("y", Sort::Int));
  TermRef q = mk_quant(Op::Forall, {{"x", Sort::Int}}, body);
  TermRef r = term_subst_vars(q, {{"y", mk_int(7)}, {"x", mk_int(9)}});
  CHECK(term_to_smt2(r) == "(forall ((x Int)) (= x 7))");
  CHECK_THROWS_AS(term_subst_vars(q, {{"y", mk_var("x", Sort::Int)}}), DiagnosticError);
}

TEST_CASE("app substitution beta-reduces") {
  TermRef app = mk_app("f", Sort::Int, {mk_var("a", Sort::Int), mk_int(2)});
  std::map<std::string, FunDef> defs{
      {"f",
       {{{"u", Sort::Int}, {"v", Sort::Int}},
        mk_binary(Op::Add, mk_var("u", Sort::Int), mk_var("v", Sort::Int))}}};
  CHECK(term_to_smt2(term_subst_apps(app, defs)) == "(+ a 2)");
}

TEST_CASE("simplify folds ground facts and identical comparisons") {
  TermRef x = mk_var("x", Sort::Int);
  CHECK(term_simplify(mk_eq(x, x))->is_true());
  CHECK(term_simplify(mk_ne(x, x))->is_false());
  CHECK(term_simplify(mk_eq(mk_str("a"), mk_str("ab")))->is_false());
  CHECK(term_simplify(mk_binary(Op::Concat, mk_str("a"), mk_str("b")))->sval == "ab");
  CHECK(term_simplify(mk_ite(mk_true(), x, mk_int(0))).get() == x.get());
  TermRef imp = mk_implies(mk_eq(mk_int(1), mk_int(2)), mk_var("b", Sort::Bool));
  CHECK(term_simplify(imp)->is_true());
}

TEST_CASE("node counting") {
  TermRef t = mk_ite(mk_eq(mk_var("x", Sort::Int), mk_int(1)), mk_int(2), mk_var("x", Sort::Int));
  CHECK(term_count_nodes(t) == 6);
}

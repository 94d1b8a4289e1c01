#include <random>

#include "doctest.h"
#include "hyperfix/semantics.hpp"

using namespace hyperfix;

namespace {

const char* kEdasProgram = R"(
string phase; string title; string session; string decision; string print;
output print, decision;

observe
decision = decision
if (decision == "Accept") {
  print = title + session
} else {
  print = title
}
observe
)";

const char* kEdasProperty =
    "forall p1. forall p2. ((phase[p1] != \"Done\") && (phase[p2] != \"Done\") && "
    "(title[p1] == title[p2])) -> X (print[p1] == print[p2])";

Store store_of(const Program& p, const std::map<std::string, Value>& m) {
  Store st;
  st.vals.resize(p.vars.size());
  for (size_t i = 0; i < p.vars.size(); ++i) st.vals[i] = m.at(p.vars[i].name);
  return st;
}

}  // namespace

TEST_CASE("run_obs: single observe snapshots the store") {
  Program p = parse_program("int x;\nobserve");
  Store st = store_of(p, {{"x", Value::of_int(5)}});
  ObservationSequence seq = run_obs(p, st, 100);
  CHECK(seq.terminated);
  REQUIRE(seq.obs.size() == 1);
  CHECK(seq.obs[0].vals[0].i == 5);
}

TEST_CASE("run_obs: the display function prints title+session on accept") {
  Program p = parse_program(kEdasProgram);
  Store st = store_of(p, {{"phase", Value::of_string("Rev")},
                          {"title", Value::of_string("T")},
                          {"session", Value::of_string("S1")},
                          {"decision", Value::of_string("Accept")},
                          {"print", Value::of_string("")}});
  ObservationSequence seq = run_obs(p, st, 1000);
  REQUIRE(seq.obs.size() == 2);
  CHECK(seq.obs[1].vals[p.var_index("print")].s == "TS1");
}

TEST_CASE("run_obs: divergent loop without observe exhausts fuel") {
  Program p = parse_program("int x;\nwhile (true) { skip }");
  ObservationSequence seq = run_obs(p, store_of(p, {{"x", Value::of_int(0)}}), 100);
  CHECK(!seq.terminated);
  CHECK(seq.obs.empty());
}

TEST_CASE("run_obs: determinism and fuel monotonicity") {
  Program p = parse_program(R"(
int x; int y;
while (x < 3) { x = x + 1; observe }
y = x * 2
observe
)");
  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    Store st = store_of(p, {{"x", Value::of_int(static_cast<int64_t>(rng() % 5) - 1)},
                            {"y", Value::of_int(static_cast<int64_t>(rng() % 3))}});
    ObservationSequence a = run_obs(p, st, 10000);
    ObservationSequence b = run_obs(p, st, 10000);
    REQUIRE(a.terminated);
    CHECK(a.obs.size() == b.obs.size());
    for (size_t i = 0; i < a.obs.size(); ++i) CHECK(a.obs[i] == b.obs[i]);
    // Find the minimal sufficient fuel, then all larger budgets agree.
    int64_t k = 1;
    while (!run_obs(p, st, k).terminated) ++k;
    for (int64_t extra : {0, 1, 5, 100}) {
      ObservationSequence c = run_obs(p, st, k + extra);
      CHECK(c.terminated);
      CHECK(c.obs.size() == a.obs.size());
    }
  }
}

TEST_CASE("auto lexicon: empty string, literals, pairwise concatenations") {
  Program p = parse_program(kEdasProgram);
  HyperLtlFormula f = parse_formula(kEdasProperty, p.vars);
  auto lex = FiniteDomain::auto_lexicon(p, &f);
  std::vector<std::string> expected{"",           "Accept",     "Done",      "AcceptAccept",
                                    "AcceptDone", "DoneAccept", "DoneDone"};
  CHECK(lex == expected);
}

TEST_CASE("oracle: the display function violates the noninterference property") {
  Program p = parse_program(kEdasProgram);
  HyperLtlFormula f = parse_formula(kEdasProperty, p.vars);
  FiniteDomain dom;
  dom.strings = {"", "Accept", "Done", "Rev"};
  dom.perVar["print"] = {Value::of_string("")};
  OracleVerdict v = oracle_check_hyperltl(p, f, dom);
  CHECK(v.kind == OracleVerdict::False);
}

TEST_CASE("oracle: programs without observe satisfy every safety formula") {
  Program p = parse_program("int x;\nx = x + 1");
  HyperLtlFormula f = parse_formula("forall p1. forall p2. (x[p1] == x[p2]) W false", p.vars);
  FiniteDomain dom;
  OracleVerdict v = oracle_check_hyperltl(p, f, dom);
  CHECK(v.kind == OracleVerdict::True);
}

TEST_CASE("oracle: copied variable satisfies determinism-style property") {
  Program p = parse_program("int x; int y;\nx = y\nobserve");
  HyperLtlFormula f =
      parse_formula("forall p1. forall p2. (y[p1] == y[p2]) -> (x[p1] == x[p2])", p.vars);
  FiniteDomain dom;  // Int [0,2] default
  CHECK(oracle_check_hyperltl(p, f, dom).kind == OracleVerdict::True);
  // And the converse with distinct sources is violated.
  Program q = parse_program("int x; int y; int z;\nx = y + z\nobserve");
  HyperLtlFormula g =
      parse_formula("forall p1. forall p2. (y[p1] == y[p2]) -> (x[p1] == x[p2])", q.vars);
  CHECK(oracle_check_hyperltl(q, g, dom).kind == OracleVerdict::False);
}

TEST_CASE("oracle: inconclusive on fuel exhaustion") {
  Program p = parse_program("int x;\nwhile (true) { x = x + 1 }\nobserve");
  HyperLtlFormula f = parse_formula("forall p. (x[p] >= 0)", p.vars);
  FiniteDomain dom;
  CHECK(oracle_check_hyperltl(p, f, dom, 50).kind == OracleVerdict::Inconclusive);
}

TEST_CASE("preserved inputs: reflexivity gives the full store set") {
  Program p = parse_program(kEdasProgram);
  FiniteDomain dom;
  dom.strings = {"", "Accept", "Done"};
  PreservedSet s = oracle_preserved_inputs(p, p, p.outputs, dom);
  CHECK(s.count == dom.enumeration_size(p));
}

TEST_CASE("preserved inputs: constant disagreement is empty") {
  Program p = parse_program("int x;\noutput x;\nx = 0\nobserve");
  Program q = parse_program("int x;\noutput x;\nx = 1\nobserve");
  FiniteDomain dom;
  PreservedSet s = oracle_preserved_inputs(p, q, p.outputs, dom);
  CHECK(s.count == 0);
}

TEST_CASE("preserved inputs: overwriting the decision keeps exactly the agreeing stores") {
  Program p = parse_program(kEdasProgram);
  std::string patched(kEdasProgram);
  size_t pos = patched.find("decision = decision");
  patched.replace(pos, std::string("decision = decision").size(), "decision = \"Reject\"");
  Program q = parse_program(patched);
  FiniteDomain dom;
  dom.strings = {"", "Accept", "Reject", "Done"};
  dom.perVar["print"] = {Value::of_string("")};
  PreservedSet s = oracle_preserved_inputs(p, q, {"print"}, dom);
  // Independent count: print agrees iff decision != "Accept" or session == "".
  auto stores = dom.enumerate_stores(p);
  size_t expected = 0;
  for (const auto& st : stores) {
    bool acc = st.vals[p.var_index("decision")].s == "Accept";
    bool emptySession = st.vals[p.var_index("session")].s.empty();
    if (!acc || emptySession) ++expected;
  }
  CHECK(s.count == expected);
  CHECK(expected > 0);

  // On the full output set the overwritten decision also has to match.
  PreservedSet s2 = oracle_preserved_inputs(p, q, p.outputs, dom);
  size_t expected2 = 0;
  for (const auto& st : stores) {
    bool rej = st.vals[p.var_index("decision")].s == "Reject";
    if (rej) ++expected2;
  }
  CHECK(s2.count == expected2);
}

TEST_CASE("unequal observation counts never compare equal") {
  Program p = parse_program("int x;\noutput x;\nobserve");
  Program q = parse_program("int x;\noutput x;\nobserve\nobserve");
  FiniteDomain dom;
  PreservedSet s = oracle_preserved_inputs(p, q, p.outputs, dom);
  CHECK(s.count == 0);
}

TEST_CASE("better-repair oracle on the naive versus guarded patch") {
  Program p = parse_program(kEdasProgram);
  auto patch = [&](const std::string& rhs) {
    std::string text(kEdasProgram);
    size_t pos = text.find("decision = decision");
    text.replace(pos, std::string("decision = decision").size(), "decision = " + rhs);
    return parse_program(text);
  };
  Program naive = patch("\"Reject\"");
  Program guarded = patch("ite(phase == \"Done\", decision, \"Reject\")");
  Program best = patch("ite(decision == \"Accept\" && phase != \"Done\", \"Reject\", decision)");
  HyperLtlFormula f = parse_formula(kEdasProperty, p.vars);
  FiniteDomain dom;
  dom.strings = {"", "Accept", "Reject", "Done"};
  dom.perVar["print"] = {Value::of_string("")};

  CHECK(oracle_better_repair(p, naive, guarded, f, p.outputs, dom).kind == OracleVerdict::True);
  CHECK(oracle_better_repair(p, guarded, best, f, p.outputs, dom).kind == OracleVerdict::True);
  CHECK(oracle_better_repair(p, guarded, naive, f, p.outputs, dom).kind == OracleVerdict::False);
  CHECK(oracle_better_repair(p, naive, naive, f, p.outputs, dom).kind == OracleVerdict::False);
}

TEST_CASE("fully-transparent oracle accepts the identity when nothing is violated") {
  Program p = parse_program("int x; int y;\noutput x;\nx = y\nobserve");
  HyperLtlFormula f =
      parse_formula("forall p1. forall p2. (y[p1] == y[p2]) -> (x[p1] == x[p2])", p.vars);
  FiniteDomain dom;
  CHECK(oracle_fully_transparent(p, p, f, p.outputs, dom).kind == OracleVerdict::True);
}

TEST_CASE("fully-transparent oracle: every deviation must join a violating tuple") {
  // P leaks y into the output; every input participates in a violation, so a
  // constant repair is fully transparent.
  Program p = parse_program("int x; int y;\noutput x;\nx = y\nobserve");
  Program q = parse_program("int x; int y;\noutput x;\nx = 0\nobserve");
  HyperLtlFormula f = parse_formula("forall p1. forall p2. (x[p1] == x[p2])", p.vars);
  FiniteDomain dom;
  CHECK(oracle_check_hyperltl(p, f, dom).kind == OracleVerdict::False);
  CHECK(oracle_fully_transparent(p, q, f, p.outputs, dom).kind == OracleVerdict::True);

  // Against a property P already satisfies, any behavioral change is illegal:
  // q2 satisfies f2 but deviates on inputs that join no violation of p2.
  Program p2 = parse_program("int x; int y;\noutput x;\nx = 1\nobserve");
  Program q2 = parse_program("int x; int y;\noutput x;\nx = 0\nobserve");
  HyperLtlFormula f2 = parse_formula("forall p1. forall p2. (x[p1] == x[p2])", p2.vars);
  CHECK(oracle_fully_transparent(p2, q2, f2, p2.outputs, dom).kind == OracleVerdict::False);
  CHECK(oracle_fully_transparent(p2, p2, f2, p2.outputs, dom).kind == OracleVerdict::True);
}

TEST_CASE("verdict and preserved-set JSON are canonical") {
  Program p = parse_program("int x;\noutput x;\nx = x\nobserve");
  FiniteDomain dom;
  dom.ints = {0, 1};
  PreservedSet s = oracle_preserved_inputs(p, p, p.outputs, dom);
  std::string js = preserved_set_to_json(s, p, dom);
  CHECK(js == preserved_set_to_json(s, p, dom));
  CHECK(js.find("\"count\": 2") != std::string::npos);
  OracleVerdict v{OracleVerdict::True, ""};
  CHECK(oracle_verdict_to_json(v).find("true") != std::string::npos);
}

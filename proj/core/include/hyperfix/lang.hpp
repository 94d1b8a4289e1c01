#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hyperfix/term.hpp"

namespace hyperfix {

struct VarDecl {
  std::string name;
  Sort sort;
};

enum class StmtKind : uint8_t { Skip, Assign, If, While, Observe, Seq };

struct Stmt;
using StmtRef = std::shared_ptr<const Stmt>;

struct Stmt {
  StmtKind kind;
  int id = -1;                      // stable pre-order id, assigned by the parser/builder
  std::optional<int> repairLoc;     // set on Assign/If/While marked with @repair
  std::string var;                  // Assign target
  TermRef expr;                     // Assign rhs / If,While guard
  StmtRef a, b;                     // If: then/else; While: body in a; Seq: a;b
};

StmtRef mk_skip();
StmtRef mk_observe();
StmtRef mk_assign(const std::string& var, TermRef rhs);
StmtRef mk_if(TermRef guard, StmtRef thenB, StmtRef elseB);
StmtRef mk_while(TermRef guard, StmtRef body);
StmtRef mk_seq(StmtRef a, StmtRef b);
StmtRef stmt_with_repair(StmtRef s, int loc);

struct Program {
  std::vector<VarDecl> vars;
  std::vector<std::string> outputs;  // X_out
  StmtRef body;

  int var_index(const std::string& name) const;  // -1 if undeclared
  Sort var_sort(const std::string& name) const;
  /// Repair-location ids in source order paired with the carrying statement.
  std::vector<std::pair<int, const Stmt*>> repair_locations() const;
};

/// Renumber statement ids in pre-order and repair locations in source order.
Program normalize_program(Program p);

bool stmt_equal(const StmtRef& a, const StmtRef& b);
bool program_equal(const Program& a, const Program& b);

// --- HyperLTL ---------------------------------------------------------------

enum class LtlKind : uint8_t { True, False, Atom, And, Or, Next, WeakUntil };

struct Ltl;
using LtlRef = std::shared_ptr<const Ltl>;

struct Ltl {
  LtlKind kind;
  TermRef atom;  // Atom: theory predicate over indexed variables
  LtlRef a, b;
};

LtlRef ltl_true();
LtlRef ltl_false();
LtlRef ltl_atom(TermRef pred);
LtlRef ltl_and(LtlRef a, LtlRef b);
LtlRef ltl_or(LtlRef a, LtlRef b);
LtlRef ltl_next(LtlRef a);
LtlRef ltl_weak_until(LtlRef a, LtlRef b);

struct TraceQuantifier {
  bool universal;
  std::string var;
};

struct HyperLtlFormula {
  std::vector<TraceQuantifier> prefix;
  LtlRef body;

  bool universal_only() const;
  bool existential_only() const;
  /// Distinct theory atoms of the body in first-occurrence order.
  std::vector<TermRef> atoms() const;
};

// --- Parsing & printing -----------------------------------------------------

/// Parses the declaration header + C-like statements; performs sort checking.
/// `@repair` before an assignment or a branch/loop statement marks a repair
/// location; ids are assigned in source order.
Program parse_program(const std::string& text);

/// Parses a quantifier prefix plus a safety LTL body. Derived forms
/// (G, ->, <->, true, false) are expanded; negation is pushed into atoms.
/// Rejects any input whose desugaring would negate a temporal operator.
/// Variable sorts default to Int and are inferred from comparisons.
HyperLtlFormula parse_formula(const std::string& text);
/// Same, with variable sorts taken from the program's declarations.
HyperLtlFormula parse_formula(const std::string& text, const std::vector<VarDecl>& decls);

std::string pretty_print(const Program& p);
std::string pretty_print_expr(const TermRef& e);
std::string pretty_print_formula(const HyperLtlFormula& f);
std::string pretty_print_ltl(const LtlRef& l);

}  // namespace hyperfix

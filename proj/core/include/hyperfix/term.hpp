#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hyperfix/sorts.hpp"

namespace hyperfix {

// One node kind covers program expressions, theory atoms and first-order
// constraints. Program expressions never contain Forall/Exists; quantifiers
// appear only in constraint terms built by the encoders.
enum class Op : uint8_t {
  IntConst,
  BoolConst,
  StrConst,
  Var,
  Add,
  Sub,
  Mul,
  Concat,
  Eq,
  Ne,
  Le,
  Lt,
  Ge,
  Gt,
  Not,
  And,      // n-ary
  Or,       // n-ary
  Implies,  // binary
  Ite,
  App,      // application of a named (synthesis) function symbol
  Forall,   // typed binder block
  Exists,
  Nonterminal,  // grammar production placeholder; never evaluated
};

class Term;
using TermRef = std::shared_ptr<const Term>;

struct Binder {
  std::string name;
  Sort sort;
  bool operator==(const Binder& o) const { return name == o.name && sort == o.sort; }
};

class Term {
 public:
  Op op;
  Sort sort;
  int64_t ival = 0;        // IntConst value; BoolConst 0/1
  std::string sval;        // StrConst value; Var/App/Nonterminal name
  std::string trace;       // Var only: trace-variable index ("" = plain)
  std::vector<TermRef> kids;
  std::vector<Binder> binders;  // Forall/Exists
  size_t hash_ = 0;

  bool is_const() const { return op == Op::IntConst || op == Op::BoolConst || op == Op::StrConst; }
  bool is_true() const { return op == Op::BoolConst && ival == 1; }
  bool is_false() const { return op == Op::BoolConst && ival == 0; }
};

// Hash-consed constructors: structurally equal terms are pointer-equal, so
// encodings naturally share sub-DAGs and equality checks are O(1).
TermRef mk_int(int64_t v);
TermRef mk_bool(bool v);
TermRef mk_str(const std::string& v);
TermRef mk_var(const std::string& name, Sort sort, const std::string& trace = "");
TermRef mk_unary(Op op, TermRef a);
TermRef mk_binary(Op op, TermRef a, TermRef b);
TermRef mk_nary(Op op, std::vector<TermRef> kids);  // And/Or; empty => true/false
/// And/Or interned verbatim (no neutral/absorbing-element normalization);
/// grammar machinery uses this so candidate shapes are preserved exactly.
TermRef mk_nary_raw(Op op, std::vector<TermRef> kids);
TermRef mk_ite(TermRef c, TermRef t, TermRef e);
TermRef mk_app(const std::string& fn, Sort ret, std::vector<TermRef> args);
TermRef mk_quant(Op op, std::vector<Binder> binders, TermRef body);
TermRef mk_nonterminal(const std::string& name, Sort sort);

inline TermRef mk_true() { return mk_bool(true); }
inline TermRef mk_false() { return mk_bool(false); }
inline TermRef mk_not(TermRef a) { return mk_unary(Op::Not, a); }
inline TermRef mk_and(std::vector<TermRef> v) { return mk_nary(Op::And, std::move(v)); }
inline TermRef mk_or(std::vector<TermRef> v) { return mk_nary(Op::Or, std::move(v)); }
inline TermRef mk_implies(TermRef a, TermRef b) { return mk_binary(Op::Implies, a, b); }
inline TermRef mk_eq(TermRef a, TermRef b) { return mk_binary(Op::Eq, a, b); }
inline TermRef mk_ne(TermRef a, TermRef b) { return mk_binary(Op::Ne, a, b); }

bool is_comparison(Op op);
/// Complement of a relational operator (Eq<->Ne, Le<->Gt, ...).
Op negate_comparison(Op op);

size_t term_count_nodes(const TermRef& t);        // AST size; every node counts 1
size_t term_count_distinct_nodes(const TermRef& t);  // DAG size

/// Free variables (name, trace, sort); bound occurrences excluded.
void term_free_vars(const TermRef& t, std::vector<Binder>& out,
                    std::vector<std::string>* traces = nullptr);
/// All function-symbol applications, deduplicated by symbol name.
std::map<std::string, const Term*> term_apps(const TermRef& t);

/// Replace free variables by terms. Bound names shadow; throws on capture.
TermRef term_subst_vars(const TermRef& t,
                        const std::function<TermRef(const Term&)>& lookup);
TermRef term_subst_vars(const TermRef& t, const std::map<std::string, TermRef>& map);

/// Index every plain variable with the given trace variable (x -> x_pi).
TermRef term_index_vars(const TermRef& t, const std::string& traceVar);

struct FunDef {
  std::vector<Binder> params;
  TermRef body;
};
/// Beta-reduce applications of the given symbols.
TermRef term_subst_apps(const TermRef& t, const std::map<std::string, FunDef>& defs);

/// SMT-LIB 2 s-expression rendering (sorts Int/Bool/String, str.++ for concat).
std::string term_to_smt2(const TermRef& t);
void term_to_smt2(const TermRef& t, std::string& out);

/// Bottom-up constant folding: ground comparisons and arithmetic/concat on
/// constants, comparisons of identical subterms, ite with a decided guard,
/// double negation. Used where terms feed evaluation or solving; grammar
/// candidates are never simplified.
TermRef term_simplify(const TermRef& t);

}  // namespace hyperfix

#pragma once

#include <map>
#include <string>
#include <vector>

#include "hyperfix/semantics.hpp"
#include "hyperfix/term.hpp"

namespace hyperfix {

/// Interpretations for synthesis function symbols during evaluation;
/// applications are evaluated by binding parameters, no substitution needed.
struct FunctionEnv {
  std::map<std::string, FunDef> defs;
};

/// Decides sentences whose quantifiers range over a finite domain and
/// evaluates ground terms. Binder names of the form `x!tag` draw their values
/// from the domain of the base variable `x`; quantified variables that do not
/// occur free in the body are skipped.
class BoundedEvaluator {
 public:
  explicit BoundedEvaluator(const FiniteDomain& dom) : dom_(&dom) {}

  /// Truth of a sentence (free variables are not allowed).
  bool decide(const TermRef& sentence, const FunctionEnv* funs = nullptr);

  /// Satisfiability search over the free variables; quantified subformulas are
  /// expanded over the domain. Returns true and fills `model` on success.
  bool find_model(const TermRef& formula, const FunctionEnv* funs,
                  std::map<std::string, Value>* model);

  Value eval_closed(const TermRef& t, const FunctionEnv* funs = nullptr);

 private:
  struct Env;
  Value eval(const TermRef& t, Env& env, const FunctionEnv* funs);
  bool eval_bool(const TermRef& t, Env& env, const FunctionEnv* funs);
  std::vector<Value> domain_for_binder(const std::string& name, Sort sort) const;
  const std::vector<int>& active_binders(const Term* quant);

  const FiniteDomain* dom_;
  std::map<const Term*, std::vector<int>> activeCache_;
};

}  // namespace hyperfix

#include "hyperfix/eval.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace hyperfix {

struct BoundedEvaluator::Env {
  // Newest-first scope; names include the trace suffix (x!pi1).
  std::vector<std::pair<std::string, Value>> vars;

  const Value* find(const std::string& name) const {
    for (auto it = vars.rbegin(); it != vars.rend(); ++it)
      if (it->first == name) return &it->second;
    return nullptr;
  }
};

namespace {
std::string qualified_name(const Term& v) {
  return v.trace.empty() ? v.sval : v.sval + "!" + v.trace;
}

void collect_free(const TermRef& t, std::set<std::string>& bound, std::set<std::string>& out) {
  if (t->op == Op::Var) {
    std::string n = qualified_name(*t);
    if (!bound.count(n)) out.insert(std::move(n));
    return;
  }
  if (t->op == Op::Forall || t->op == Op::Exists) {
    std::vector<std::string> added;
    for (const auto& b : t->binders)
      if (bound.insert(b.name).second) added.push_back(b.name);
    collect_free(t->kids[0], bound, out);
    for (const auto& n : added) bound.erase(n);
    return;
  }
  for (const auto& k : t->kids) collect_free(k, bound, out);
}
}  // namespace

std::vector<Value> BoundedEvaluator::domain_for_binder(const std::string& name, Sort sort) const {
  std::string base = name.substr(0, name.find('!'));
  VarDecl d{base, sort};
  return dom_->values_for(d);
}

const std::vector<int>& BoundedEvaluator::active_binders(const Term* quant) {
  auto it = activeCache_.find(quant);
  if (it != activeCache_.end()) return it->second;
  std::set<std::string> bound, free;
  collect_free(quant->kids[0], bound, free);
  std::vector<int> active;
  for (size_t i = 0; i < quant->binders.size(); ++i)
    if (free.count(quant->binders[i].name)) active.push_back(static_cast<int>(i));
  return activeCache_.emplace(quant, std::move(active)).first->second;
}

bool BoundedEvaluator::eval_bool(const TermRef& t, Env& env, const FunctionEnv* funs) {
  switch (t->op) {
    case Op::BoolConst:
      return t->ival != 0;
    case Op::Not:
      return !eval_bool(t->kids[0], env, funs);
    case Op::And:
      for (const auto& k : t->kids)
        if (!eval_bool(k, env, funs)) return false;
      return true;
    case Op::Or:
      for (const auto& k : t->kids)
        if (eval_bool(k, env, funs)) return true;
      return false;
    case Op::Implies:
      return !eval_bool(t->kids[0], env, funs) || eval_bool(t->kids[1], env, funs);
    case Op::Forall:
    case Op::Exists: {
      bool isForall = t->op == Op::Forall;
      const std::vector<int>& active = active_binders(t.get());
      std::vector<std::vector<Value>> axes;
      axes.reserve(active.size());
      for (int bi : active)
        axes.push_back(domain_for_binder(t->binders[bi].name, t->binders[bi].sort));
      size_t base = env.vars.size();
      for (int bi : active) env.vars.emplace_back(t->binders[bi].name, Value{});
      std::function<bool(size_t)> rec = [&](size_t i) -> bool {
        if (i == active.size()) return eval_bool(t->kids[0], env, funs);
        for (const auto& v : axes[i]) {
          env.vars[base + i].second = v;
          bool r = rec(i + 1);
          if (isForall && !r) return false;
          if (!isForall && r) return true;
        }
        return isForall;
      };
      bool result = rec(0);
      env.vars.resize(base);
      return result;
    }
    default: {
      Value v = eval(t, env, funs);
      if (v.sort != Sort::Bool) throw DiagnosticError("expected Bool in evaluation");
      return v.i != 0;
    }
  }
}

Value BoundedEvaluator::eval(const TermRef& t, Env& env, const FunctionEnv* funs) {
  switch (t->op) {
    case Op::IntConst: return Value::of_int(t->ival);
    case Op::BoolConst: return Value::of_bool(t->ival != 0);
    case Op::StrConst: return Value::of_string(t->sval);
    case Op::Var: {
      const Value* v = env.find(qualified_name(*t));
      if (!v) throw DiagnosticError("unbound variable in evaluation: " + qualified_name(*t));
      return *v;
    }
    case Op::Add: return Value::of_int(eval(t->kids[0], env, funs).i + eval(t->kids[1], env, funs).i);
    case Op::Sub: return Value::of_int(eval(t->kids[0], env, funs).i - eval(t->kids[1], env, funs).i);
    case Op::Mul: return Value::of_int(eval(t->kids[0], env, funs).i * eval(t->kids[1], env, funs).i);
    case Op::Concat:
      return Value::of_string(eval(t->kids[0], env, funs).s + eval(t->kids[1], env, funs).s);
    case Op::Eq: return Value::of_bool(eval(t->kids[0], env, funs) == eval(t->kids[1], env, funs));
    case Op::Ne:
      return Value::of_bool(!(eval(t->kids[0], env, funs) == eval(t->kids[1], env, funs)));
    case Op::Le: return Value::of_bool(eval(t->kids[0], env, funs).i <= eval(t->kids[1], env, funs).i);
    case Op::Lt: return Value::of_bool(eval(t->kids[0], env, funs).i < eval(t->kids[1], env, funs).i);
    case Op::Ge: return Value::of_bool(eval(t->kids[0], env, funs).i >= eval(t->kids[1], env, funs).i);
    case Op::Gt: return Value::of_bool(eval(t->kids[0], env, funs).i > eval(t->kids[1], env, funs).i);
    case Op::Ite:
      return eval_bool(t->kids[0], env, funs) ? eval(t->kids[1], env, funs)
                                              : eval(t->kids[2], env, funs);
    case Op::App: {
      if (!funs) throw DiagnosticError("no interpretation for function symbol " + t->sval);
      auto it = funs->defs.find(t->sval);
      if (it == funs->defs.end())
        throw DiagnosticError("no interpretation for function symbol " + t->sval);
      const FunDef& d = it->second;
      if (d.params.size() != t->kids.size())
        throw DiagnosticError("arity mismatch evaluating " + t->sval);
      Env inner;
      inner.vars.reserve(d.params.size());
      for (size_t i = 0; i < d.params.size(); ++i)
        inner.vars.emplace_back(d.params[i].name, eval(t->kids[i], env, funs));
      return eval(d.body, inner, funs);
    }
    case Op::Not:
    case Op::And:
    case Op::Or:
    case Op::Implies:
    case Op::Forall:
    case Op::Exists:
      return Value::of_bool(eval_bool(t, env, funs));
    case Op::Nonterminal:
      throw DiagnosticError("grammar placeholder in evaluated term: " + t->sval);
  }
  throw DiagnosticError("eval: unreachable");
}

bool BoundedEvaluator::decide(const TermRef& sentence, const FunctionEnv* funs) {
  Env env;
  return eval_bool(sentence, env, funs);
}

Value BoundedEvaluator::eval_closed(const TermRef& t, const FunctionEnv* funs) {
  Env env;
  return eval(t, env, funs);
}

bool BoundedEvaluator::find_model(const TermRef& formula, const FunctionEnv* funs,
                                  std::map<std::string, Value>* model) {
  std::set<std::string> bound, freeNames;
  collect_free(formula, bound, freeNames);
  // Free variable sorts are recovered from any occurrence.
  std::map<std::string, Sort> sorts;
  std::function<void(const TermRef&)> scan = [&](const TermRef& t) {
    if (t->op == Op::Var) {
      std::string n = qualified_name(*t);
      if (freeNames.count(n)) sorts[n] = t->sort;
    }
    for (const auto& k : t->kids) scan(k);
  };
  scan(formula);

  std::vector<std::pair<std::string, std::vector<Value>>> axes;
  for (const auto& [name, sort] : sorts) axes.emplace_back(name, domain_for_binder(name, sort));

  Env env;
  for (const auto& [name, vals] : axes) env.vars.emplace_back(name, vals.front());

  std::function<bool(size_t)> rec = [&](size_t i) -> bool {
    if (i == axes.size()) return eval_bool(formula, env, funs);
    for (const auto& v : axes[i].second) {
      env.vars[i].second = v;
      if (rec(i + 1)) return true;
    }
    return false;
  };
  if (!rec(0)) return false;
  if (model)
    for (const auto& [name, value] : env.vars) (*model)[name] = value;
  return true;
}

}  // namespace hyperfix

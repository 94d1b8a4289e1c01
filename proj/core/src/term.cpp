#include "hyperfix/term.hpp"

#include <algorithm>
#include <cassert>
#include <mutex>
#include <set>
#include <unordered_set>

namespace hyperfix {

namespace {

size_t hash_combine(size_t h, size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

size_t compute_hash(const Term& t) {
  size_t h = static_cast<size_t>(t.op) * 1315423911ULL;
  h = hash_combine(h, static_cast<size_t>(t.sort));
  h = hash_combine(h, std::hash<int64_t>{}(t.ival));
  h = hash_combine(h, std::hash<std::string>{}(t.sval));
  h = hash_combine(h, std::hash<std::string>{}(t.trace));
  for (const auto& k : t.kids) h = hash_combine(h, k->hash_);
  for (const auto& b : t.binders) {
    h = hash_combine(h, std::hash<std::string>{}(b.name));
    h = hash_combine(h, static_cast<size_t>(b.sort));
  }
  return h;
}

bool structurally_equal(const Term& a, const Term& b) {
  if (a.op != b.op || a.sort != b.sort || a.ival != b.ival || a.sval != b.sval ||
      a.trace != b.trace || a.kids.size() != b.kids.size() || a.binders.size() != b.binders.size())
    return false;
  for (size_t i = 0; i < a.kids.size(); ++i)
    if (a.kids[i].get() != b.kids[i].get()) return false;  // kids are interned
  for (size_t i = 0; i < a.binders.size(); ++i)
    if (!(a.binders[i] == b.binders[i])) return false;
  return true;
}

struct InternHash {
  size_t operator()(const TermRef& t) const { return t->hash_; }
};
struct InternEq {
  bool operator()(const TermRef& a, const TermRef& b) const {
    return structurally_equal(*a, *b);
  }
};

class Interner {
 public:
  TermRef intern(Term&& t) {
    t.hash_ = compute_hash(t);
    auto candidate = std::make_shared<Term>(std::move(t));
    std::lock_guard<std::mutex> lock(mu_);
    auto [it, inserted] = table_.insert(candidate);
    return *it;
  }
  static Interner& instance() {
    static Interner i;
    return i;
  }

 private:
  std::mutex mu_;
  std::unordered_set<TermRef, InternHash, InternEq> table_;
};

TermRef intern(Term&& t) { return Interner::instance().intern(std::move(t)); }

Sort result_sort(Op op, const std::vector<TermRef>& kids) {
  switch (op) {
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
      if (kids[0]->sort != Sort::Int || kids[1]->sort != Sort::Int)
        throw DiagnosticError("arithmetic operator expects Int operands");
      return Sort::Int;
    case Op::Concat:
      if (kids[0]->sort != Sort::String || kids[1]->sort != Sort::String)
        throw DiagnosticError("string concatenation expects String operands");
      return Sort::String;
    case Op::Eq:
    case Op::Ne:
      if (kids[0]->sort != kids[1]->sort)
        throw DiagnosticError("equality operands must have the same sort");
      return Sort::Bool;
    case Op::Le:
    case Op::Lt:
    case Op::Ge:
    case Op::Gt:
      if (kids[0]->sort != Sort::Int || kids[1]->sort != Sort::Int)
        throw DiagnosticError("order comparison expects Int operands");
      return Sort::Bool;
    case Op::Not:
      if (kids[0]->sort != Sort::Bool) throw DiagnosticError("! expects a Bool operand");
      return Sort::Bool;
    case Op::And:
    case Op::Or:
    case Op::Implies:
      for (const auto& k : kids)
        if (k->sort != Sort::Bool) throw DiagnosticError("boolean connective expects Bool operands");
      return Sort::Bool;
    default:
      throw DiagnosticError("result_sort: unexpected operator");
  }
}

}  // namespace

TermRef mk_int(int64_t v) {
  Term t;
  t.op = Op::IntConst;
  t.sort = Sort::Int;
  t.ival = v;
  return intern(std::move(t));
}

TermRef mk_bool(bool v) {
  Term t;
  t.op = Op::BoolConst;
  t.sort = Sort::Bool;
  t.ival = v ? 1 : 0;
  return intern(std::move(t));
}

TermRef mk_str(const std::string& v) {
  Term t;
  t.op = Op::StrConst;
  t.sort = Sort::String;
  t.sval = v;
  return intern(std::move(t));
}

TermRef mk_var(const std::string& name, Sort sort, const std::string& trace) {
  Term t;
  t.op = Op::Var;
  t.sort = sort;
  t.sval = name;
  t.trace = trace;
  return intern(std::move(t));
}

TermRef mk_unary(Op op, TermRef a) {
  Term t;
  t.op = op;
  t.kids = {std::move(a)};
  t.sort = result_sort(op, t.kids);
  return intern(std::move(t));
}

TermRef mk_binary(Op op, TermRef a, TermRef b) {
  Term t;
  t.op = op;
  t.kids = {std::move(a), std::move(b)};
  t.sort = result_sort(op, t.kids);
  return intern(std::move(t));
}

TermRef mk_nary(Op op, std::vector<TermRef> kids) {
  assert(op == Op::And || op == Op::Or);
  // Neutral and absorbing constants never survive construction.
  std::vector<TermRef> keep;
  keep.reserve(kids.size());
  for (auto& k : kids) {
    if (op == Op::And) {
      if (k->is_true()) continue;
      if (k->is_false()) return mk_false();
    } else {
      if (k->is_false()) continue;
      if (k->is_true()) return mk_true();
    }
    keep.push_back(std::move(k));
  }
  if (keep.empty()) return op == Op::And ? mk_true() : mk_false();
  if (keep.size() == 1) return keep[0];
  Term t;
  t.op = op;
  t.kids = std::move(keep);
  t.sort = result_sort(op, t.kids);
  return intern(std::move(t));
}

TermRef mk_nary_raw(Op op, std::vector<TermRef> kids) {
  assert(op == Op::And || op == Op::Or);
  if (kids.empty()) return op == Op::And ? mk_true() : mk_false();
  if (kids.size() == 1) return kids[0];
  Term t;
  t.op = op;
  t.kids = std::move(kids);
  t.sort = result_sort(op, t.kids);
  return intern(std::move(t));
}

TermRef mk_ite(TermRef c, TermRef t_, TermRef e) {
  if (c->sort != Sort::Bool) throw DiagnosticError("ite condition must be Bool");
  if (t_->sort != e->sort) throw DiagnosticError("ite branches must have the same sort");
  Term t;
  t.op = Op::Ite;
  t.sort = t_->sort;
  t.kids = {std::move(c), std::move(t_), std::move(e)};
  return intern(std::move(t));
}

TermRef mk_app(const std::string& fn, Sort ret, std::vector<TermRef> args) {
  Term t;
  t.op = Op::App;
  t.sort = ret;
  t.sval = fn;
  t.kids = std::move(args);
  return intern(std::move(t));
}

TermRef mk_quant(Op op, std::vector<Binder> binders, TermRef body) {
  assert(op == Op::Forall || op == Op::Exists);
  if (body->sort != Sort::Bool) throw DiagnosticError("quantifier body must be Bool");
  if (binders.empty()) return body;
  Term t;
  t.op = op;
  t.sort = Sort::Bool;
  t.binders = std::move(binders);
  t.kids = {std::move(body)};
  return intern(std::move(t));
}

TermRef mk_nonterminal(const std::string& name, Sort sort) {
  Term t;
  t.op = Op::Nonterminal;
  t.sort = sort;
  t.sval = name;
  return intern(std::move(t));
}

bool is_comparison(Op op) {
  switch (op) {
    case Op::Eq:
    case Op::Ne:
    case Op::Le:
    case Op::Lt:
    case Op::Ge:
    case Op::Gt:
      return true;
    default:
      return false;
  }
}

Op negate_comparison(Op op) {
  switch (op) {
    case Op::Eq: return Op::Ne;
    case Op::Ne: return Op::Eq;
    case Op::Le: return Op::Gt;
    case Op::Gt: return Op::Le;
    case Op::Ge: return Op::Lt;
    case Op::Lt: return Op::Ge;
    default:
      throw DiagnosticError("negate_comparison: not a comparison");
  }
}

size_t term_count_nodes(const TermRef& t) {
  size_t n = 1;
  for (const auto& k : t->kids) n += term_count_nodes(k);
  return n;
}

size_t term_count_distinct_nodes(const TermRef& t) {
  std::set<const Term*> seen;
  std::function<void(const TermRef&)> go = [&](const TermRef& u) {
    if (!seen.insert(u.get()).second) return;
    for (const auto& k : u->kids) go(k);
  };
  go(t);
  return seen.size();
}

namespace {
void free_vars_rec(const TermRef& t, std::set<std::pair<std::string, std::string>>& bound,
                   std::set<std::pair<std::string, std::string>>& seen,
                   std::vector<Binder>& out, std::vector<std::string>* traces) {
  if (t->op == Op::Var) {
    auto key = std::make_pair(t->sval, t->trace);
    if (bound.count(key) || seen.count(key)) return;
    seen.insert(key);
    out.push_back({t->sval, t->sort});
    if (traces) traces->push_back(t->trace);
    return;
  }
  if (t->op == Op::Forall || t->op == Op::Exists) {
    std::vector<std::pair<std::string, std::string>> added;
    for (const auto& b : t->binders) {
      auto key = std::make_pair(b.name, std::string());
      if (bound.insert(key).second) added.push_back(key);
    }
    free_vars_rec(t->kids[0], bound, seen, out, traces);
    for (const auto& k : added) bound.erase(k);
    return;
  }
  for (const auto& k : t->kids) free_vars_rec(k, bound, seen, out, traces);
}
}  // namespace

void term_free_vars(const TermRef& t, std::vector<Binder>& out, std::vector<std::string>* traces) {
  std::set<std::pair<std::string, std::string>> bound, seen;
  free_vars_rec(t, bound, seen, out, traces);
}

std::map<std::string, const Term*> term_apps(const TermRef& t) {
  std::map<std::string, const Term*> out;
  std::function<void(const TermRef&)> go = [&](const TermRef& u) {
    if (u->op == Op::App) out.emplace(u->sval, u.get());
    for (const auto& k : u->kids) go(k);
  };
  go(t);
  return out;
}

namespace {
TermRef rebuild(const Term& t, std::vector<TermRef> kids) {
  Term n;
  n.op = t.op;
  n.sort = t.sort;
  n.ival = t.ival;
  n.sval = t.sval;
  n.trace = t.trace;
  n.binders = t.binders;
  n.kids = std::move(kids);
  return Interner::instance().intern(std::move(n));
}
}  // namespace

TermRef term_subst_vars(const TermRef& t, const std::function<TermRef(const Term&)>& lookup) {
  std::function<TermRef(const TermRef&, std::set<std::string>&)> go =
      [&](const TermRef& u, std::set<std::string>& shadowed) -> TermRef {
    if (u->op == Op::Var) {
      if (u->trace.empty() && shadowed.count(u->sval)) return u;
      TermRef r = lookup(*u);
      if (!r) return u;
      if (r->sort != u->sort) throw DiagnosticError("substitution changes sort of " + u->sval);
      // Capture check: the replacement must not mention a shadowed binder.
      if (!shadowed.empty()) {
        std::vector<Binder> fv;
        term_free_vars(r, fv);
        for (const auto& b : fv)
          if (shadowed.count(b.name))
            throw DiagnosticError("substitution would capture bound variable " + b.name);
      }
      return r;
    }
    if (u->op == Op::Forall || u->op == Op::Exists) {
      std::vector<std::string> added;
      for (const auto& b : u->binders)
        if (shadowed.insert(b.name).second) added.push_back(b.name);
      TermRef body = go(u->kids[0], shadowed);
      for (const auto& n : added) shadowed.erase(n);
      if (body.get() == u->kids[0].get()) return u;
      return rebuild(*u, {body});
    }
    bool changed = false;
    std::vector<TermRef> kids;
    kids.reserve(u->kids.size());
    for (const auto& k : u->kids) {
      TermRef nk = go(k, shadowed);
      changed |= nk.get() != k.get();
      kids.push_back(std::move(nk));
    }
    if (!changed) return u;
    return rebuild(*u, std::move(kids));
  };
  std::set<std::string> shadowed;
  return go(t, shadowed);
}

TermRef term_subst_vars(const TermRef& t, const std::map<std::string, TermRef>& map) {
  return term_subst_vars(t, [&](const Term& v) -> TermRef {
    if (!v.trace.empty()) return nullptr;
    auto it = map.find(v.sval);
    return it == map.end() ? nullptr : it->second;
  });
}

TermRef term_index_vars(const TermRef& t, const std::string& traceVar) {
  return term_subst_vars(t, [&](const Term& v) -> TermRef {
    if (!v.trace.empty()) return nullptr;
    return mk_var(v.sval, v.sort, traceVar);
  });
}

TermRef term_subst_apps(const TermRef& t, const std::map<std::string, FunDef>& defs) {
  std::function<TermRef(const TermRef&)> go = [&](const TermRef& u) -> TermRef {
    bool changed = false;
    std::vector<TermRef> kids;
    kids.reserve(u->kids.size());
    for (const auto& k : u->kids) {
      TermRef nk = go(k);
      changed |= nk.get() != k.get();
      kids.push_back(std::move(nk));
    }
    if (u->op == Op::App) {
      auto it = defs.find(u->sval);
      if (it != defs.end()) {
        const FunDef& d = it->second;
        if (d.params.size() != kids.size())
          throw DiagnosticError("arity mismatch substituting " + u->sval);
        std::map<std::string, TermRef> m;
        for (size_t i = 0; i < kids.size(); ++i) {
          if (d.params[i].sort != kids[i]->sort)
            throw DiagnosticError("sort mismatch substituting " + u->sval);
          m[d.params[i].name] = kids[i];
        }
        return term_subst_vars(d.body, m);
      }
    }
    if (!changed) return u;
    return rebuild(*u, std::move(kids));
  };
  return go(t);
}

namespace {
const char* smt2_op_name(Op op) {
  switch (op) {
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Concat: return "str.++";
    case Op::Eq: return "=";
    case Op::Ne: return "distinct";
    case Op::Le: return "<=";
    case Op::Lt: return "<";
    case Op::Ge: return ">=";
    case Op::Gt: return ">";
    case Op::Not: return "not";
    case Op::And: return "and";
    case Op::Or: return "or";
    case Op::Implies: return "=>";
    case Op::Ite: return "ite";
    default: return nullptr;
  }
}

void smt2_escape_string(const std::string& s, std::string& out) {
  out += '"';
  for (char c : s) {
    out += c;
    if (c == '"') out += '"';
  }
  out += '"';
}
}  // namespace

void term_to_smt2(const TermRef& t, std::string& out) {
  switch (t->op) {
    case Op::IntConst:
      if (t->ival < 0) {
        out += "(- " + std::to_string(-t->ival) + ")";
      } else {
        out += std::to_string(t->ival);
      }
      return;
    case Op::BoolConst:
      out += t->ival ? "true" : "false";
      return;
    case Op::StrConst:
      smt2_escape_string(t->sval, out);
      return;
    case Op::Var:
      out += t->sval;
      if (!t->trace.empty()) {
        out += '!';
        out += t->trace;
      }
      return;
    case Op::Nonterminal:
      out += t->sval;
      return;
    case Op::App:
      if (t->kids.empty()) {
        out += t->sval;
        return;
      }
      out += '(';
      out += t->sval;
      for (const auto& k : t->kids) {
        out += ' ';
        term_to_smt2(k, out);
      }
      out += ')';
      return;
    case Op::Forall:
    case Op::Exists: {
      out += t->op == Op::Forall ? "(forall (" : "(exists (";
      for (size_t i = 0; i < t->binders.size(); ++i) {
        if (i) out += ' ';
        out += '(';
        out += t->binders[i].name;
        out += ' ';
        out += to_string(t->binders[i].sort);
        out += ')';
      }
      out += ") ";
      term_to_smt2(t->kids[0], out);
      out += ')';
      return;
    }
    default: {
      const char* name = smt2_op_name(t->op);
      out += '(';
      out += name;
      for (const auto& k : t->kids) {
        out += ' ';
        term_to_smt2(k, out);
      }
      out += ')';
      return;
    }
  }
}

std::string term_to_smt2(const TermRef& t) {
  std::string out;
  term_to_smt2(t, out);
  return out;
}


namespace {
bool ground_cmp(Op op, const TermRef& a, const TermRef& b, bool& out) {
  if (a.get() == b.get()) {
    switch (op) {
      case Op::Eq:
      case Op::Le:
      case Op::Ge: out = true; return true;
      case Op::Ne:
      case Op::Lt:
      case Op::Gt: out = false; return true;
      default: return false;
    }
  }
  if (!a->is_const() || !b->is_const()) return false;
  if (a->sort == Sort::String) {
    if (op == Op::Eq) out = a->sval == b->sval;
    else if (op == Op::Ne) out = a->sval != b->sval;
    else return false;
    return true;
  }
  int64_t x = a->ival, y = b->ival;
  switch (op) {
    case Op::Eq: out = x == y; return true;
    case Op::Ne: out = x != y; return true;
    case Op::Le: out = x <= y; return true;
    case Op::Lt: out = x < y; return true;
    case Op::Ge: out = x >= y; return true;
    case Op::Gt: out = x > y; return true;
    default: return false;
  }
}
}  // namespace

TermRef term_simplify(const TermRef& t) {
  if (t->kids.empty()) return t;
  std::vector<TermRef> kids;
  kids.reserve(t->kids.size());
  bool changed = false;
  for (const auto& k : t->kids) {
    TermRef nk = term_simplify(k);
    changed |= nk.get() != k.get();
    kids.push_back(std::move(nk));
  }
  switch (t->op) {
    case Op::And:
    case Op::Or:
      return mk_nary(t->op, std::move(kids));
    case Op::Not:
      if (kids[0]->op == Op::BoolConst) return mk_bool(kids[0]->ival == 0);
      if (kids[0]->op == Op::Not) return kids[0]->kids[0];
      break;
    case Op::Implies:
      if (kids[0]->is_false() || kids[1]->is_true()) return mk_true();
      if (kids[0]->is_true()) return kids[1];
      break;
    case Op::Ite:
      if (kids[0]->is_true()) return kids[1];
      if (kids[0]->is_false()) return kids[2];
      if (kids[1].get() == kids[2].get()) return kids[1];
      break;
    case Op::Add:
      if (kids[0]->op == Op::IntConst && kids[1]->op == Op::IntConst)
        return mk_int(kids[0]->ival + kids[1]->ival);
      break;
    case Op::Sub:
      if (kids[0]->op == Op::IntConst && kids[1]->op == Op::IntConst)
        return mk_int(kids[0]->ival - kids[1]->ival);
      break;
    case Op::Mul:
      if (kids[0]->op == Op::IntConst && kids[1]->op == Op::IntConst)
        return mk_int(kids[0]->ival * kids[1]->ival);
      break;
    case Op::Concat:
      if (kids[0]->op == Op::StrConst && kids[1]->op == Op::StrConst)
        return mk_str(kids[0]->sval + kids[1]->sval);
      break;
    default:
      if (is_comparison(t->op)) {
        bool v;
        if (ground_cmp(t->op, kids[0], kids[1], v)) return mk_bool(v);
      }
      break;
  }
  if (!changed) return t;
  Term n = *t;
  n.kids = std::move(kids);
  switch (n.op) {
    case Op::Not: return mk_unary(n.op, n.kids[0]);
    case Op::Ite: return mk_ite(n.kids[0], n.kids[1], n.kids[2]);
    case Op::App: return mk_app(n.sval, n.sort, n.kids);
    case Op::Forall:
    case Op::Exists: return mk_quant(n.op, n.binders, n.kids[0]);
    case Op::Implies: return mk_implies(n.kids[0], n.kids[1]);
    default: return mk_binary(n.op, n.kids[0], n.kids[1]);
  }
}

}  // namespace hyperfix

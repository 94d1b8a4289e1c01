#include "hyperfix/semantics.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "json.hpp"

namespace hyperfix {

std::string Value::repr() const {
  switch (sort) {
    case Sort::Int: return std::to_string(i);
    case Sort::Bool: return i ? "true" : "false";
    case Sort::String: return "\"" + s + "\"";
  }
  return "?";
}

namespace {

int64_t as_int(const Value& v) { return v.i; }
bool as_bool(const Value& v) { return v.i != 0; }

}  // namespace

Value eval_expr(const TermRef& e, const Program& p, const Store& st) {
  switch (e->op) {
    case Op::IntConst: return Value::of_int(e->ival);
    case Op::BoolConst: return Value::of_bool(e->ival != 0);
    case Op::StrConst: return Value::of_string(e->sval);
    case Op::Var: {
      if (!e->trace.empty())
        throw DiagnosticError("indexed variable in program expression: " + e->sval);
      int i = p.var_index(e->sval);
      if (i < 0) throw DiagnosticError("undeclared variable in expression: " + e->sval);
      return st.vals[i];
    }
    case Op::Add: return Value::of_int(as_int(eval_expr(e->kids[0], p, st)) +
                                       as_int(eval_expr(e->kids[1], p, st)));
    case Op::Sub: return Value::of_int(as_int(eval_expr(e->kids[0], p, st)) -
                                       as_int(eval_expr(e->kids[1], p, st)));
    case Op::Mul: return Value::of_int(as_int(eval_expr(e->kids[0], p, st)) *
                                       as_int(eval_expr(e->kids[1], p, st)));
    case Op::Concat:
      return Value::of_string(eval_expr(e->kids[0], p, st).s + eval_expr(e->kids[1], p, st).s);
    case Op::Eq: return Value::of_bool(eval_expr(e->kids[0], p, st) == eval_expr(e->kids[1], p, st));
    case Op::Ne: return Value::of_bool(!(eval_expr(e->kids[0], p, st) == eval_expr(e->kids[1], p, st)));
    case Op::Le: return Value::of_bool(as_int(eval_expr(e->kids[0], p, st)) <=
                                       as_int(eval_expr(e->kids[1], p, st)));
    case Op::Lt: return Value::of_bool(as_int(eval_expr(e->kids[0], p, st)) <
                                       as_int(eval_expr(e->kids[1], p, st)));
    case Op::Ge: return Value::of_bool(as_int(eval_expr(e->kids[0], p, st)) >=
                                       as_int(eval_expr(e->kids[1], p, st)));
    case Op::Gt: return Value::of_bool(as_int(eval_expr(e->kids[0], p, st)) >
                                       as_int(eval_expr(e->kids[1], p, st)));
    case Op::Not: return Value::of_bool(!as_bool(eval_expr(e->kids[0], p, st)));
    case Op::And: {
      for (const auto& k : e->kids)
        if (!as_bool(eval_expr(k, p, st))) return Value::of_bool(false);
      return Value::of_bool(true);
    }
    case Op::Or: {
      for (const auto& k : e->kids)
        if (as_bool(eval_expr(k, p, st))) return Value::of_bool(true);
      return Value::of_bool(false);
    }
    case Op::Implies:
      return Value::of_bool(!as_bool(eval_expr(e->kids[0], p, st)) ||
                            as_bool(eval_expr(e->kids[1], p, st)));
    case Op::Ite:
      return as_bool(eval_expr(e->kids[0], p, st)) ? eval_expr(e->kids[1], p, st)
                                                   : eval_expr(e->kids[2], p, st);
    case Op::App:
      throw DiagnosticError("cannot execute a program with unresolved function symbol " + e->sval);
    default:
      throw DiagnosticError("eval_expr: unexpected operator");
  }
}

ObservationSequence run_obs(const Program& p, const Store& sigma, int64_t fuel) {
  ObservationSequence out;
  Store st = sigma;
  std::vector<const Stmt*> stack{p.body.get()};
  int64_t steps = 0;
  auto charge = [&]() -> bool {
    if (steps >= fuel) return false;
    ++steps;
    return true;
  };
  while (!stack.empty()) {
    const Stmt* s = stack.back();
    stack.pop_back();
    switch (s->kind) {
      case StmtKind::Seq:
        stack.push_back(s->b.get());
        stack.push_back(s->a.get());
        break;
      case StmtKind::Skip:
        // <skip; P> -> <P> is a reduction step; a trailing skip is terminal.
        if (!stack.empty() && !charge()) {
          out.terminated = false;
          return out;
        }
        break;
      case StmtKind::Assign: {
        if (!charge()) {
          out.terminated = false;
          return out;
        }
        int idx = p.var_index(s->var);
        st.vals[idx] = eval_expr(s->expr, p, st);
        break;
      }
      case StmtKind::Observe:
        if (!charge()) {
          out.terminated = false;
          return out;
        }
        out.obs.push_back(st);
        break;
      case StmtKind::If:
        if (!charge()) {
          out.terminated = false;
          return out;
        }
        stack.push_back(as_bool(eval_expr(s->expr, p, st)) ? s->a.get() : s->b.get());
        break;
      case StmtKind::While:
        if (!charge()) {
          out.terminated = false;
          return out;
        }
        if (as_bool(eval_expr(s->expr, p, st))) {
          stack.push_back(s);
          stack.push_back(s->a.get());
        }
        break;
    }
  }
  out.terminated = true;
  return out;
}

// --- FiniteDomain --------------------------------------------------------------

namespace {
void collect_string_literals(const TermRef& t, std::vector<std::string>& out,
                             std::set<std::string>& seen) {
  if (t->op == Op::StrConst && seen.insert(t->sval).second) out.push_back(t->sval);
  for (const auto& k : t->kids) collect_string_literals(k, out, seen);
}

void collect_stmt_literals(const StmtRef& s, std::vector<std::string>& out,
                           std::set<std::string>& seen) {
  if (!s) return;
  if (s->expr) collect_string_literals(s->expr, out, seen);
  collect_stmt_literals(s->a, out, seen);
  collect_stmt_literals(s->b, out, seen);
}
}  // namespace

std::vector<std::string> FiniteDomain::auto_lexicon(const Program& p, const HyperLtlFormula* f) {
  std::vector<std::string> base;
  std::set<std::string> seen;
  collect_stmt_literals(p.body, base, seen);
  if (f) {
    for (const auto& a : f->atoms()) collect_string_literals(a, base, seen);
  }
  std::vector<std::string> out;
  std::set<std::string> outSeen;
  auto add = [&](const std::string& s) {
    if (outSeen.insert(s).second) out.push_back(s);
  };
  add("");
  for (const auto& s : base) add(s);
  for (const auto& a : base)
    for (const auto& b : base) add(a + b);
  return out;
}

std::vector<Value> FiniteDomain::values_for(const VarDecl& v) const {
  auto it = perVar.find(v.name);
  if (it != perVar.end()) {
    for (const auto& val : it->second)
      if (val.sort != v.sort)
        throw DiagnosticError("domain override for " + v.name + " has wrong sort");
    return it->second;
  }
  std::vector<Value> out;
  switch (v.sort) {
    case Sort::Int:
      for (int64_t x : ints) out.push_back(Value::of_int(x));
      break;
    case Sort::Bool:
      out.push_back(Value::of_bool(false));
      out.push_back(Value::of_bool(true));
      break;
    case Sort::String:
      for (const auto& s : strings) out.push_back(Value::of_string(s));
      break;
  }
  if (out.empty()) throw DiagnosticError("empty domain for variable " + v.name);
  return out;
}

size_t FiniteDomain::enumeration_size(const Program& p) const {
  size_t total = 1;
  for (const auto& v : p.vars) {
    size_t n = values_for(v).size();
    if (total > kMaxEnumeration / n)
      throw DiagnosticError("enumeration domain exceeds " + std::to_string(kMaxEnumeration) +
                            " stores");
    total *= n;
  }
  return total;
}

std::vector<Store> FiniteDomain::enumerate_stores(const Program& p) const {
  size_t total = enumeration_size(p);
  std::vector<std::vector<Value>> axes;
  axes.reserve(p.vars.size());
  for (const auto& v : p.vars) axes.push_back(values_for(v));
  std::vector<Store> out;
  out.reserve(total);
  Store cur;
  cur.vals.resize(p.vars.size());
  std::function<void(size_t)> rec = [&](size_t i) {
    if (i == p.vars.size()) {
      out.push_back(cur);
      return;
    }
    for (const auto& v : axes[i]) {
      cur.vals[i] = v;
      rec(i + 1);
    }
  };
  rec(0);
  return out;
}

// --- HyperLTL oracle ------------------------------------------------------------

namespace {

// Traces with values packed to integers for fast comparisons; strings interned
// per oracle run.
struct ValueIntern {
  std::map<std::string, int64_t> ids;
  int64_t intern(const std::string& s) {
    auto [it, inserted] = ids.emplace(s, static_cast<int64_t>(ids.size()));
    return it->second;
  }
};

struct PackedTraces {
  size_t numVars = 0;
  // traces[t] is a flat [step * numVars + var] array.
  std::vector<std::vector<int64_t>> traces;
  std::vector<size_t> lengths;
};

int64_t pack_value(const Value& v, ValueIntern& in) {
  return v.sort == Sort::String ? in.intern(v.s) : v.i;
}

// One compiled body atom. Fast paths cover var-vs-var and var-vs-const
// comparisons; anything else falls back to full term evaluation on Values.
struct CompiledAtom {
  enum Shape { VarVar, VarConst, General } shape = General;
  Op op = Op::Eq;
  int varA = -1, trA = -1;
  int varB = -1, trB = -1;
  int64_t packedConst = 0;
  TermRef term;
};

struct BodyEval {
  const Program& p;
  const std::vector<std::string>& prefixVars;
  const PackedTraces& packed;
  const std::vector<ObservationSequence>* rawTraces;  // for the general path
  std::vector<CompiledAtom> atoms;
  std::map<const Term*, int> atomIndex;

  int trace_index(const std::string& tv) const {
    for (size_t i = 0; i < prefixVars.size(); ++i)
      if (prefixVars[i] == tv) return static_cast<int>(i);
    throw DiagnosticError("unbound trace variable in body: " + tv);
  }

  void compile_atom(const TermRef& a, ValueIntern& intern) {
    if (atomIndex.count(a.get())) return;
    CompiledAtom c;
    c.term = a;
    if (is_comparison(a->op)) {
      const TermRef& l = a->kids[0];
      const TermRef& r = a->kids[1];
      if (l->op == Op::Var && !l->trace.empty() && r->op == Op::Var && !r->trace.empty()) {
        c.shape = CompiledAtom::VarVar;
        c.op = a->op;
        c.varA = p.var_index(l->sval);
        c.trA = trace_index(l->trace);
        c.varB = p.var_index(r->sval);
        c.trB = trace_index(r->trace);
        if (c.varA >= 0 && c.varB >= 0) {
          atomIndex[a.get()] = static_cast<int>(atoms.size());
          atoms.push_back(c);
          return;
        }
      }
      const TermRef* v = nullptr;
      const TermRef* k = nullptr;
      bool swapped = false;
      if (l->op == Op::Var && !l->trace.empty() && r->is_const()) {
        v = &l;
        k = &r;
      } else if (r->op == Op::Var && !r->trace.empty() && l->is_const()) {
        v = &r;
        k = &l;
        swapped = true;
      }
      if (v) {
        c.shape = CompiledAtom::VarConst;
        c.op = swapped ? [&] {
          switch (a->op) {  // mirror the relation around the constant
            case Op::Le: return Op::Ge;
            case Op::Lt: return Op::Gt;
            case Op::Ge: return Op::Le;
            case Op::Gt: return Op::Lt;
            default: return a->op;
          }
        }() : a->op;
        c.varA = p.var_index((*v)->sval);
        c.trA = trace_index((*v)->trace);
        c.packedConst = pack_value((*k)->op == Op::StrConst ? Value::of_string((*k)->sval)
                                   : (*k)->op == Op::IntConst ? Value::of_int((*k)->ival)
                                                              : Value::of_bool((*k)->ival != 0),
                                   intern);
        if (c.varA >= 0) {
          atomIndex[a.get()] = static_cast<int>(atoms.size());
          atoms.push_back(c);
          return;
        }
      }
    }
    c.shape = CompiledAtom::General;
    atomIndex[a.get()] = static_cast<int>(atoms.size());
    atoms.push_back(c);
  }

  static bool apply_cmp(Op op, int64_t a, int64_t b) {
    switch (op) {
      case Op::Eq: return a == b;
      case Op::Ne: return a != b;
      case Op::Le: return a <= b;
      case Op::Lt: return a < b;
      case Op::Ge: return a >= b;
      case Op::Gt: return a > b;
      default: return false;
    }
  }

  bool eval_atom(int idx, const std::vector<int>& assign, size_t i) const {
    const CompiledAtom& c = atoms[idx];
    switch (c.shape) {
      case CompiledAtom::VarVar: {
        int64_t a = packed.traces[assign[c.trA]][i * packed.numVars + c.varA];
        int64_t b = packed.traces[assign[c.trB]][i * packed.numVars + c.varB];
        return apply_cmp(c.op, a, b);
      }
      case CompiledAtom::VarConst: {
        int64_t a = packed.traces[assign[c.trA]][i * packed.numVars + c.varA];
        return apply_cmp(c.op, a, c.packedConst);
      }
      case CompiledAtom::General: {
        // Materialize indexed variables from the raw traces and evaluate.
        TermRef grounded = term_subst_vars(c.term, [&](const Term& v) -> TermRef {
          if (v.trace.empty()) return nullptr;
          int ti = trace_index(v.trace);
          int vi = p.var_index(v.sval);
          const Value& val = (*rawTraces)[assign[ti]].obs[i].vals[vi];
          switch (val.sort) {
            case Sort::Int: return mk_int(val.i);
            case Sort::Bool: return mk_bool(val.i != 0);
            case Sort::String: return mk_str(val.s);
          }
          return nullptr;
        });
        Program empty;
        Store st;
        return eval_expr(grounded, empty, st).i != 0;
      }
    }
    return false;
  }

  size_t min_len(const std::vector<int>& assign) const {
    size_t m = SIZE_MAX;
    for (int t : assign) m = std::min(m, packed.lengths[t]);
    return m;
  }

  bool eval(const LtlRef& l, const std::vector<int>& assign, size_t i, size_t minLen) const {
    if (i >= minLen) return true;  // past the shortest trace everything holds
    switch (l->kind) {
      case LtlKind::True: return true;
      case LtlKind::False: return false;
      case LtlKind::Atom: return eval_atom(atomIndex.at(l->atom.get()), assign, i);
      case LtlKind::And: return eval(l->a, assign, i, minLen) && eval(l->b, assign, i, minLen);
      case LtlKind::Or: return eval(l->a, assign, i, minLen) || eval(l->b, assign, i, minLen);
      case LtlKind::Next: return eval(l->a, assign, i + 1, minLen);
      case LtlKind::WeakUntil: {
        for (size_t j = i; j < minLen; ++j) {
          if (eval(l->b, assign, j, minLen)) return true;
          if (!eval(l->a, assign, j, minLen)) return false;
        }
        return true;
      }
    }
    return false;
  }
};

struct TraceUniverse {
  std::vector<ObservationSequence> traces;  // deduplicated, canonical order
  PackedTraces packed;
  ValueIntern intern;
  bool inconclusive = false;
};

TraceUniverse build_traces(const Program& p, const FiniteDomain& dom, int64_t fuel) {
  TraceUniverse u;
  u.packed.numVars = p.vars.size();
  std::map<std::vector<int64_t>, int> dedup;  // packed trace (with length marker)
  for (const auto& st : dom.enumerate_stores(p)) {
    ObservationSequence seq = run_obs(p, st, fuel);
    if (!seq.terminated) {
      u.inconclusive = true;
      return u;
    }
    std::vector<int64_t> key;
    key.reserve(seq.obs.size() * p.vars.size());
    for (const auto& ob : seq.obs)
      for (const auto& v : ob.vals) key.push_back(pack_value(v, u.intern));
    key.push_back(static_cast<int64_t>(seq.obs.size()));  // guard against stride aliasing
    if (dedup.emplace(key, static_cast<int>(u.traces.size())).second) {
      key.pop_back();
      u.packed.lengths.push_back(seq.obs.size());
      u.packed.traces.push_back(std::move(key));
      u.traces.push_back(std::move(seq));
    }
  }
  return u;
}

}  // namespace

OracleVerdict oracle_check_hyperltl(const Program& p, const HyperLtlFormula& f,
                                    const FiniteDomain& dom, int64_t fuel) {
  TraceUniverse u = build_traces(p, dom, fuel);
  if (u.inconclusive)
    return {OracleVerdict::Inconclusive, "an enumerated execution exhausted its fuel"};

  std::vector<std::string> prefixVars;
  for (const auto& q : f.prefix) prefixVars.push_back(q.var);

  BodyEval be{p, prefixVars, u.packed, &u.traces, {}, {}};
  for (const auto& a : f.atoms()) be.compile_atom(a, u.intern);

  size_t n = f.prefix.size();
  std::vector<int> assign(n, 0);
  size_t numTraces = u.traces.size();

  std::function<bool(size_t)> go = [&](size_t qi) -> bool {
    if (qi == n) {
      return be.eval(f.body, assign, 0, be.min_len(assign));
    }
    if (f.prefix[qi].universal) {
      for (size_t t = 0; t < numTraces; ++t) {
        assign[qi] = static_cast<int>(t);
        if (!go(qi + 1)) return false;
      }
      return true;
    }
    for (size_t t = 0; t < numTraces; ++t) {
      assign[qi] = static_cast<int>(t);
      if (go(qi + 1)) return true;
    }
    return false;
  };

  // No traces at all only happens with an empty store enumeration, which the
  // domain forbids; with traces present but all empty, the shortest-trace rule
  // makes every body true and quantifiers range over the nonempty trace set.
  bool ok = go(0);
  return {ok ? OracleVerdict::True : OracleVerdict::False, ""};
}

bool PreservedSet::subset_of(const PreservedSet& o) const {
  if (mask.size() != o.mask.size()) return false;
  for (size_t i = 0; i < mask.size(); ++i)
    if (mask[i] && !o.mask[i]) return false;
  return true;
}

bool PreservedSet::strict_subset_of(const PreservedSet& o) const {
  return subset_of(o) && count < o.count;
}

namespace {
bool obs_equal_on(const ObservationSequence& a, const ObservationSequence& b,
                  const std::vector<int>& outIdx) {
  if (a.obs.size() != b.obs.size()) return false;
  for (size_t i = 0; i < a.obs.size(); ++i)
    for (int v : outIdx)
      if (!(a.obs[i].vals[v] == b.obs[i].vals[v])) return false;
  return true;
}

std::vector<int> out_indices(const Program& p, const std::vector<std::string>& xOut) {
  std::vector<int> idx;
  for (const auto& name : xOut) {
    int i = p.var_index(name);
    if (i < 0) throw DiagnosticError("X_out variable not declared: " + name);
    idx.push_back(i);
  }
  return idx;
}
}  // namespace

PreservedSet oracle_preserved_inputs(const Program& p, const Program& q,
                                     const std::vector<std::string>& xOut,
                                     const FiniteDomain& dom, int64_t fuel) {
  if (p.vars.size() != q.vars.size())
    throw DiagnosticError("preserved-inputs oracle requires identical variable declarations");
  std::vector<int> outIdx = out_indices(p, xOut);
  PreservedSet set;
  auto stores = dom.enumerate_stores(p);
  set.mask.resize(stores.size(), 0);
  for (size_t i = 0; i < stores.size(); ++i) {
    ObservationSequence a = run_obs(p, stores[i], fuel);
    ObservationSequence b = run_obs(q, stores[i], fuel);
    if (!a.terminated || !b.terminated)
      throw DiagnosticError("preserved-inputs oracle: execution exhausted fuel");
    if (obs_equal_on(a, b, outIdx)) {
      set.mask[i] = 1;
      ++set.count;
    }
  }
  return set;
}

OracleVerdict oracle_fully_transparent(const Program& p, const Program& q,
                                       const HyperLtlFormula& f,
                                       const std::vector<std::string>& xOut,
                                       const FiniteDomain& dom, int64_t fuel) {
  if (!f.universal_only())
    return {OracleVerdict::Inconclusive, "full transparency is defined for universal formulas only"};
  OracleVerdict sat = oracle_check_hyperltl(q, f, dom, fuel);
  if (sat.kind != OracleVerdict::True)
    return {OracleVerdict::False, "candidate does not satisfy the formula on the domain"};

  PreservedSet preserved = oracle_preserved_inputs(p, q, xOut, dom, fuel);
  auto stores = dom.enumerate_stores(p);

  // Precompute p-traces per store (not deduplicated; slots must match stores).
  std::vector<ObservationSequence> ptr;
  ptr.reserve(stores.size());
  for (const auto& st : stores) {
    ObservationSequence t = run_obs(p, st, fuel);
    if (!t.terminated) return {OracleVerdict::Inconclusive, "fuel exhausted"};
    ptr.push_back(std::move(t));
  }

  size_t n = f.prefix.size();
  std::vector<std::string> prefixVars;
  for (const auto& qv : f.prefix) prefixVars.push_back(qv.var);

  // Packed view over per-store traces.
  TraceUniverse u;
  u.packed.numVars = p.vars.size();
  for (const auto& t : ptr) {
    std::vector<int64_t> key;
    for (const auto& ob : t.obs)
      for (const auto& v : ob.vals) key.push_back(pack_value(v, u.intern));
    u.packed.lengths.push_back(t.obs.size());
    u.packed.traces.push_back(std::move(key));
  }
  u.traces = ptr;

  BodyEval be{p, prefixVars, u.packed, &u.traces, {}, {}};
  for (const auto& a : f.atoms()) be.compile_atom(a, u.intern);

  std::vector<int> assign(n, 0);
  for (size_t si = 0; si < stores.size(); ++si) {
    if (preserved.mask[si]) continue;
    // The deviating input must occur in some violating n-tuple of p-traces.
    bool witnessed = false;
    std::function<bool(size_t, bool)> tuple = [&](size_t qi, bool usedSigma) -> bool {
      if (qi == n) {
        if (!usedSigma) return false;
        return !be.eval(f.body, assign, 0, be.min_len(assign));
      }
      for (size_t t = 0; t < stores.size(); ++t) {
        assign[qi] = static_cast<int>(t);
        if (tuple(qi + 1, usedSigma || t == si)) return true;
      }
      return false;
    };
    witnessed = tuple(0, false);
    if (!witnessed)
      return {OracleVerdict::False,
              "input " + std::to_string(si) + " deviates but joins no violating tuple"};
  }
  return {OracleVerdict::True, ""};
}

OracleVerdict oracle_better_repair(const Program& p, const Program& s, const Program& q,
                                   const HyperLtlFormula& f,
                                   const std::vector<std::string>& xOut,
                                   const FiniteDomain& dom, int64_t fuel) {
  OracleVerdict sat = oracle_check_hyperltl(q, f, dom, fuel);
  if (sat.kind == OracleVerdict::Inconclusive) return sat;
  if (sat.kind != OracleVerdict::True)
    return {OracleVerdict::False, "candidate does not satisfy the formula on the domain"};
  PreservedSet pq = oracle_preserved_inputs(p, q, xOut, dom, fuel);
  PreservedSet ps = oracle_preserved_inputs(p, s, xOut, dom, fuel);
  if (!ps.strict_subset_of(pq))
    return {OracleVerdict::False, "preserved-input set does not strictly grow"};
  return {OracleVerdict::True, ""};
}

std::string oracle_verdict_to_json(const OracleVerdict& v) {
  nlohmann::ordered_json j;
  j["verdict"] = v.kind == OracleVerdict::True    ? "true"
                 : v.kind == OracleVerdict::False ? "false"
                                                  : "inconclusive";
  if (!v.note.empty()) j["note"] = v.note;
  return j.dump(2);
}

std::string preserved_set_to_json(const PreservedSet& s, const Program& p,
                                  const FiniteDomain& dom) {
  nlohmann::ordered_json j;
  j["count"] = s.count;
  auto stores = dom.enumerate_stores(p);
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (size_t i = 0; i < stores.size(); ++i) {
    if (!s.mask[i]) continue;
    nlohmann::ordered_json st;
    for (size_t v = 0; v < p.vars.size(); ++v) {
      const Value& val = stores[i].vals[v];
      switch (val.sort) {
        case Sort::Int: st[p.vars[v].name] = val.i; break;
        case Sort::Bool: st[p.vars[v].name] = (val.i != 0); break;
        case Sort::String: st[p.vars[v].name] = val.s; break;
      }
    }
    arr.push_back(std::move(st));
  }
  j["stores"] = std::move(arr);
  return j.dump(2);
}

}  // namespace hyperfix

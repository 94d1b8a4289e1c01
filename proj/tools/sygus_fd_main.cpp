// sygus-fd: a SyGuS-IF solver over finite domains. Enumerates candidate terms
// from the declared grammars in size order (production order breaks ties) and
// accepts the first vector whose constraint evaluates to true with every
// quantifier ranging over the configured finite domain. Answers are exact for
// that domain; `infeasible` means exhaustion up to --max-size.
//
// Constraints are compiled to slot-indexed nodes over int64 values (strings
// interned); a candidate's semantics is tabulated over its argument tuples
// first, which both deduplicates extensionally equal candidates and makes
// function applications table lookups.

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <unordered_map>
#include <sstream>
#include <unordered_set>

#include "CLI11.hpp"
#include "hyperfix/bench.hpp"
#include "hyperfix/eval.hpp"
#include "hyperfix/sygus.hpp"

using namespace hyperfix;

namespace {

struct Options {
  std::string file;
  std::string domainFile;
  int maxSize = 14;
  double timeoutSeconds = 0;  // 0 = none
  bool stats = false;
};

class FastEval {
 public:
  FastEval(const SygusProblem& prob, const FiniteDomain& dom) : prob_(prob), dom_(dom) {
    TermRef c = prob.constraint;
    if (!prob.declaredVars.empty()) c = mk_quant(Op::Forall, prob.declaredVars, c);

    // Signature axes: the image of the argument expressions at the call
    // sites, so concatenations and arithmetic stay within the tables.
    std::vector<std::vector<std::set<int64_t>>> argValues(prob.funs.size());
    for (size_t i = 0; i < prob.funs.size(); ++i)
      argValues[i].resize(prob.funs[i].params.size());
    collect_arg_images(c, argValues);

    for (size_t fi = 0; fi < prob.funs.size(); ++fi) {
      const auto& f = prob.funs[fi];
      FunTable ft;
      ft.name = f.name;
      size_t stride = 1;
      for (size_t pi = 0; pi < f.params.size(); ++pi) {
        Axis ax;
        ax.sort = f.params[pi].sort;
        if (argValues[fi][pi].empty()) {
          for (const auto& v : values_for(f.params[pi].name, f.params[pi].sort))
            ax.values.push_back(pack(v));
          std::sort(ax.values.begin(), ax.values.end());
          ax.values.erase(std::unique(ax.values.begin(), ax.values.end()), ax.values.end());
        } else {
          ax.values.assign(argValues[fi][pi].begin(), argValues[fi][pi].end());
        }
        for (size_t i = 0; i < ax.values.size(); ++i) ax.index[ax.values[i]] = i;
        ax.build_dense();
        ax.stride = stride;
        stride *= ax.values.size();
        ft.axes.push_back(std::move(ax));
      }
      ft.tuples = stride;
      funs_.push_back(std::move(ft));
    }
    root_ = compile(c);
    precompute(root_);
  }

  size_t fun_count() const { return funs_.size(); }
  size_t tuple_count(size_t fi) const { return funs_[fi].tuples; }

  /// Tabulates the candidate's values over its argument tuples. The body is
  /// compiled once (constants interned, parameters resolved to indices) so
  /// the per-tuple evaluation is pure integer work.
  std::vector<int64_t> signature(size_t fi, const TermRef& body) {
    const FunTable& ft = funs_[fi];
    mini_.clear();
    int root = mini_compile(body, fi);
    std::vector<int64_t> sig(ft.tuples);
    args_.assign(ft.axes.size(), 0);
    std::function<void(size_t, size_t)> rec = [&](size_t ai, size_t base) {
      if (ai == ft.axes.size()) {
        sig[base] = mini_eval(root);
        return;
      }
      const Axis& ax = ft.axes[ai];
      for (size_t i = 0; i < ax.values.size(); ++i) {
        args_[ai] = ax.values[i];
        rec(ai + 1, base + i * ax.stride);
      }
    };
    rec(0, 0);
    return sig;
  }

  bool check(const std::vector<std::vector<int64_t>>& sigs) {
    sigs_ = &sigs;
    return eval(root_) != 0;
  }

 private:
  struct Axis {
    Sort sort;
    std::vector<int64_t> values;
    std::map<int64_t, size_t> index;
    std::vector<int32_t> dense;  // value -> tuple index, offset by denseBase
    int64_t denseBase = 0;
    size_t stride = 1;

    void build_dense() {
      if (values.empty()) return;
      int64_t lo = *std::min_element(values.begin(), values.end());
      int64_t hi = *std::max_element(values.begin(), values.end());
      if (hi - lo > 65536) return;
      denseBase = lo;
      dense.assign(static_cast<size_t>(hi - lo + 1), -1);
      for (size_t i = 0; i < values.size(); ++i) dense[values[i] - lo] = static_cast<int32_t>(i);
    }
    int32_t find(int64_t v) const {
      if (!dense.empty()) {
        int64_t off = v - denseBase;
        if (off < 0 || off >= static_cast<int64_t>(dense.size())) return -1;
        return dense[off];
      }
      auto it = index.find(v);
      return it == index.end() ? -1 : static_cast<int32_t>(it->second);
    }
  };
  struct FunTable {
    std::string name;
    std::vector<Axis> axes;
    size_t tuples = 1;
  };

  struct Node {
    Op op;
    Sort sort = Sort::Bool;
    int64_t cval = 0;
    int slot = -1;                 // Var
    int fun = -1;                  // App
    int pre = -1;                  // index into pre_ when tabulated
    bool appDep = false;
    std::vector<int> kids;
    std::vector<int> freeSlots;    // sorted
    // Quantifiers: active binder slots with their value lists.
    std::vector<std::pair<int, std::vector<int64_t>>> binders;
  };

  // Candidate-independent subterm tabulated over its enclosing binders.
  struct Pre {
    std::vector<int64_t> values;
    std::vector<std::pair<int, size_t>> dims;  // (slot, stride)
  };

  std::vector<Value> values_for(const std::string& qualified, Sort sort) const {
    std::string base = qualified.substr(0, qualified.find('!'));
    return dom_.values_for({base, sort});
  }

  static bool contains_app(const TermRef& t) {
    if (t->op == Op::App) return true;
    for (const auto& k : t->kids)
      if (contains_app(k)) return true;
    return false;
  }

  // Enumerates the value image of every application argument expression.
  void collect_arg_images(const TermRef& t,
                          std::vector<std::vector<std::set<int64_t>>>& out) {
    if (t->op == Op::App) {
      int fi = -1;
      for (size_t i = 0; i < prob_.funs.size(); ++i)
        if (prob_.funs[i].name == t->sval) fi = static_cast<int>(i);
      if (fi < 0) throw DiagnosticError("unknown function symbol " + t->sval);
      for (size_t pi = 0; pi < t->kids.size(); ++pi) {
        const TermRef& arg = t->kids[pi];
        if (contains_app(arg))
          throw DiagnosticError(
              "argument of " + t->sval +
              " depends on another synthesis symbol; narrow the argument lists so "
              "holes do not feed each other");
        if (seenArgs_.count(std::make_pair(arg.get(), std::make_pair(fi, pi)))) continue;
        seenArgs_.insert(std::make_pair(arg.get(), std::make_pair(fi, pi)));
        std::vector<Binder> fv;
        std::vector<std::string> traces;
        term_free_vars(arg, fv, &traces);
        std::vector<std::pair<std::string, std::vector<Value>>> axes;
        size_t total = 1;
        for (size_t i = 0; i < fv.size(); ++i) {
          std::string qn = traces[i].empty() ? fv[i].name : fv[i].name + "!" + traces[i];
          auto vals = values_for(qn, fv[i].sort);
          total *= vals.size();
          if (total > (size_t{1} << 22))
            throw DiagnosticError("argument image of " + t->sval + " is too large to enumerate");
          axes.emplace_back(qn, std::move(vals));
        }
        BoundedEvaluator ev(dom_);
        std::map<std::string, TermRef> env;
        std::function<void(size_t)> rec = [&](size_t i) {
          if (i == axes.size()) {
            TermRef ground = term_subst_vars(arg, [&](const Term& v) -> TermRef {
              std::string qn = v.trace.empty() ? v.sval : v.sval + "!" + v.trace;
              auto it = env.find(qn);
              return it == env.end() ? nullptr : it->second;
            });
            // Ground now; evaluate directly.
            Value val = ev.eval_closed(term_simplify(ground));
            out[fi][pi].insert(pack(val));
            return;
          }
          for (const auto& v : axes[i].second) {
            switch (v.sort) {
              case Sort::Int: env[axes[i].first] = mk_int(v.i); break;
              case Sort::Bool: env[axes[i].first] = mk_bool(v.i != 0); break;
              case Sort::String: env[axes[i].first] = mk_str(v.s); break;
            }
            rec(i + 1);
          }
        };
        rec(0);
      }
    }
    for (const auto& k : t->kids) collect_arg_images(k, out);
  }

  int64_t intern(const std::string& s) {
    auto [it, fresh] = strIds_.emplace(s, static_cast<int64_t>(strIds_.size()));
    if (fresh) strs_.push_back(s);
    return it->second;
  }

  int64_t pack(const Value& v) { return v.sort == Sort::String ? intern(v.s) : v.i; }

  int64_t concat(int64_t a, int64_t b) {
    uint64_t key = (static_cast<uint64_t>(a) << 32) | static_cast<uint64_t>(b);
    auto it = concatFast_.find(key);
    if (it != concatFast_.end()) return it->second;
    int64_t id = intern(strs_[a] + strs_[b]);
    concatFast_.emplace(key, id);
    return id;
  }

  int slot_for(const std::string& qualified, Sort sort) {
    auto it = slots_.find(qualified);
    if (it != slots_.end()) return it->second;
    int s = static_cast<int>(slots_.size());
    slots_.emplace(qualified, s);
    slotSorts_.push_back(sort);
    env_.push_back(0);
    counter_.push_back(0);
    slotValues_.emplace_back();
    return s;
  }

  static std::string qualified(const Term& v) {
    return v.trace.empty() ? v.sval : v.sval + "!" + v.trace;
  }

  void free_vars(const TermRef& t, std::set<std::string>& bound, std::set<std::string>& out) {
    if (t->op == Op::Var) {
      std::string n = qualified(*t);
      if (!bound.count(n)) out.insert(n);
      return;
    }
    if (t->op == Op::Forall || t->op == Op::Exists) {
      std::vector<std::string> added;
      for (const auto& b : t->binders)
        if (bound.insert(b.name).second) added.push_back(b.name);
      free_vars(t->kids[0], bound, out);
      for (const auto& n : added) bound.erase(n);
      return;
    }
    for (const auto& k : t->kids) free_vars(k, bound, out);
  }

  static void merge_sorted(std::vector<int>& into, const std::vector<int>& add) {
    std::vector<int> out;
    std::set_union(into.begin(), into.end(), add.begin(), add.end(), std::back_inserter(out));
    into = std::move(out);
  }

  int compile(const TermRef& t) {
    Node n;
    n.op = t->op;
    n.sort = t->sort;
    switch (t->op) {
      case Op::IntConst: n.cval = t->ival; break;
      case Op::BoolConst: n.cval = t->ival; break;
      case Op::StrConst: n.cval = intern(t->sval); break;
      case Op::Var:
        n.slot = slot_for(qualified(*t), t->sort);
        n.freeSlots = {n.slot};
        break;
      case Op::App: {
        for (size_t i = 0; i < funs_.size(); ++i)
          if (funs_[i].name == t->sval) n.fun = static_cast<int>(i);
        if (n.fun < 0) throw DiagnosticError("unknown function symbol " + t->sval);
        n.appDep = true;
        for (const auto& k : t->kids) {
          int c = compile(k);
          n.appDep |= nodes_[c].appDep;
          merge_sorted(n.freeSlots, nodes_[c].freeSlots);
          n.kids.push_back(c);
        }
        break;
      }
      case Op::Forall:
      case Op::Exists: {
        std::set<std::string> bound, free;
        free_vars(t->kids[0], bound, free);
        for (const auto& b : t->binders) {
          if (!free.count(b.name)) continue;
          int slot = slot_for(b.name, b.sort);
          std::vector<int64_t> vals;
          for (const auto& v : values_for(b.name, b.sort)) vals.push_back(pack(v));
          slotValues_[slot] = vals;
          n.binders.emplace_back(slot, std::move(vals));
        }
        int c = compile(t->kids[0]);
        n.kids.push_back(c);
        n.appDep = nodes_[c].appDep;
        n.freeSlots = nodes_[c].freeSlots;
        for (const auto& [slot, vals] : n.binders) {
          auto it = std::lower_bound(n.freeSlots.begin(), n.freeSlots.end(), slot);
          if (it != n.freeSlots.end() && *it == slot) n.freeSlots.erase(it);
        }
        break;
      }
      case Op::Nonterminal:
        throw DiagnosticError("grammar placeholder in constraint");
      default:
        for (const auto& k : t->kids) {
          int c = compile(k);
          n.appDep |= nodes_[c].appDep;
          merge_sorted(n.freeSlots, nodes_[c].freeSlots);
          n.kids.push_back(c);
        }
        break;
    }
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size() - 1);
  }

  static constexpr size_t kPreBudget = size_t{1} << 22;

  // Tabulates node `id` over its free binder slots. Returns false when the
  // table would not fit the budget or a slot has no declared values.
  bool tabulate(int id) {
    size_t total = 1;
    for (int s : nodes_[id].freeSlots) {
      if (slotValues_[s].empty()) return false;
      if (total > kPreBudget / slotValues_[s].size()) return false;
      total *= slotValues_[s].size();
    }
    if (preUsed_ + total > kPreBudget) return false;
    Pre p;
    size_t stride = 1;
    for (int s : nodes_[id].freeSlots) {
      p.dims.emplace_back(s, stride);
      stride *= slotValues_[s].size();
    }
    p.values.resize(total);
    std::function<void(size_t, size_t)> rec = [&](size_t di, size_t base) {
      if (di == p.dims.size()) {
        p.values[base] = eval(id);
        return;
      }
      int slot = p.dims[di].first;
      for (size_t i = 0; i < slotValues_[slot].size(); ++i) {
        env_[slot] = slotValues_[slot][i];
        counter_[slot] = i;
        rec(di + 1, base + i * p.dims[di].second);
      }
    };
    rec(0, 0);
    preUsed_ += total;
    pre_.push_back(std::move(p));
    nodes_[id].pre = static_cast<int>(pre_.size() - 1);
    return true;
  }

  // Tabulate maximal candidate-independent subterms over their free binder
  // slots; they become array lookups in every later candidate check. Inside
  // mixed And/Or nodes the independent children are fused into one leaf that
  // is checked before any candidate-dependent child.
  void precompute(int id) {
    if (nodes_[id].op == Op::Var || nodes_[id].kids.empty()) return;
    if (!nodes_[id].appDep) {
      if (tabulate(id)) return;
      for (int k : nodes_[id].kids) precompute(k);
      return;
    }
    if (nodes_[id].op == Op::And || nodes_[id].op == Op::Or) {
      std::vector<int> ind, dep;
      for (int k : nodes_[id].kids) (nodes_[k].appDep ? dep : ind).push_back(k);
      if (!ind.empty()) {
        int lead;
        if (ind.size() == 1) {
          lead = ind[0];
        } else {
          Node m;
          m.op = nodes_[id].op;
          m.sort = Sort::Bool;
          m.kids = ind;
          for (int k : ind) merge_sorted(m.freeSlots, nodes_[k].freeSlots);
          nodes_.push_back(std::move(m));
          lead = static_cast<int>(nodes_.size() - 1);
        }
        precompute(lead);
        std::vector<int> kids{lead};
        kids.insert(kids.end(), dep.begin(), dep.end());
        nodes_[id].kids = std::move(kids);
        for (size_t i = 1; i < nodes_[id].kids.size(); ++i) precompute(nodes_[id].kids[i]);
        return;
      }
    }
    auto kids = nodes_[id].kids;
    for (int k : kids) precompute(k);
  }

  int64_t eval(int id) {
    const Node& n = nodes_[id];
    if (n.pre >= 0) {
      const Pre& p = pre_[n.pre];
      size_t idx = 0;
      for (const auto& [slot, stride] : p.dims) idx += counter_[slot] * stride;
      return p.values[idx];
    }
    switch (n.op) {
      case Op::IntConst:
      case Op::BoolConst:
      case Op::StrConst: return n.cval;
      case Op::Var: return env_[n.slot];
      case Op::Add: return eval(n.kids[0]) + eval(n.kids[1]);
      case Op::Sub: return eval(n.kids[0]) - eval(n.kids[1]);
      case Op::Mul: return eval(n.kids[0]) * eval(n.kids[1]);
      case Op::Concat: return concat(eval(n.kids[0]), eval(n.kids[1]));
      case Op::Eq: return eval(n.kids[0]) == eval(n.kids[1]);
      case Op::Ne: return eval(n.kids[0]) != eval(n.kids[1]);
      case Op::Le: return eval(n.kids[0]) <= eval(n.kids[1]);
      case Op::Lt: return eval(n.kids[0]) < eval(n.kids[1]);
      case Op::Ge: return eval(n.kids[0]) >= eval(n.kids[1]);
      case Op::Gt: return eval(n.kids[0]) > eval(n.kids[1]);
      case Op::Not: return eval(n.kids[0]) == 0;
      case Op::And:
        for (int k : n.kids)
          if (!eval(k)) return 0;
        return 1;
      case Op::Or:
        for (int k : n.kids)
          if (eval(k)) return 1;
        return 0;
      case Op::Implies: return !eval(n.kids[0]) || eval(n.kids[1]);
      case Op::Ite: return eval(n.kids[0]) ? eval(n.kids[1]) : eval(n.kids[2]);
      case Op::App: {
        const FunTable& ft = funs_[n.fun];
        size_t idx = 0;
        for (size_t i = 0; i < n.kids.size(); ++i) {
          const Axis& ax = ft.axes[i];
          int32_t pos = ax.find(eval(n.kids[i]));
          if (pos < 0) throw DiagnosticError("function argument outside its finite domain");
          idx += static_cast<size_t>(pos) * ax.stride;
        }
        return (*sigs_)[n.fun][idx];
      }
      case Op::Forall:
      case Op::Exists: {
        bool isForall = n.op == Op::Forall;
        std::function<bool(size_t)> rec = [&](size_t bi) -> bool {
          if (bi == n.binders.size()) return eval(n.kids[0]) != 0;
          int slot = n.binders[bi].first;
          const auto& vals = n.binders[bi].second;
          for (size_t i = 0; i < vals.size(); ++i) {
            env_[slot] = vals[i];
            counter_[slot] = i;
            bool r = rec(bi + 1);
            if (isForall && !r) return false;
            if (!isForall && r) return true;
          }
          return isForall;
        };
        return rec(0);
      }
      default:
        throw DiagnosticError("eval: unexpected operator");
    }
  }

  struct MiniNode {
    Op op;
    int64_t cval = 0;  // constant value / parameter index
    int k0 = -1, k1 = -1, k2 = -1;
  };

  int mini_compile(const TermRef& t, size_t fi) {
    MiniNode m;
    m.op = t->op;
    switch (t->op) {
      case Op::IntConst:
      case Op::BoolConst: m.cval = t->ival; break;
      case Op::StrConst: m.cval = intern(t->sval); break;
      case Op::Var: {
        const auto& params = prob_.funs[fi].params;
        int idx = -1;
        for (size_t i = 0; i < params.size(); ++i)
          if (params[i].name == t->sval) idx = static_cast<int>(i);
        if (idx < 0) throw DiagnosticError("candidate references unknown parameter " + t->sval);
        m.cval = idx;
        break;
      }
      default:
        if (t->kids.size() > 3 || t->kids.empty())
          throw DiagnosticError("unsupported operator in candidate body");
        m.k0 = mini_compile(t->kids[0], fi);
        if (t->kids.size() > 1) m.k1 = mini_compile(t->kids[1], fi);
        if (t->kids.size() > 2) m.k2 = mini_compile(t->kids[2], fi);
        break;
    }
    mini_.push_back(m);
    return static_cast<int>(mini_.size() - 1);
  }

  int64_t mini_eval(int id) {
    const MiniNode& m = mini_[id];
    switch (m.op) {
      case Op::IntConst:
      case Op::BoolConst:
      case Op::StrConst: return m.cval;
      case Op::Var: return args_[m.cval];
      case Op::Add: return mini_eval(m.k0) + mini_eval(m.k1);
      case Op::Sub: return mini_eval(m.k0) - mini_eval(m.k1);
      case Op::Mul: return mini_eval(m.k0) * mini_eval(m.k1);
      case Op::Concat: return concat(mini_eval(m.k0), mini_eval(m.k1));
      case Op::Eq: return mini_eval(m.k0) == mini_eval(m.k1);
      case Op::Ne: return mini_eval(m.k0) != mini_eval(m.k1);
      case Op::Le: return mini_eval(m.k0) <= mini_eval(m.k1);
      case Op::Lt: return mini_eval(m.k0) < mini_eval(m.k1);
      case Op::Ge: return mini_eval(m.k0) >= mini_eval(m.k1);
      case Op::Gt: return mini_eval(m.k0) > mini_eval(m.k1);
      case Op::Not: return mini_eval(m.k0) == 0;
      case Op::And: return mini_eval(m.k0) && (m.k1 < 0 || mini_eval(m.k1));
      case Op::Or: return mini_eval(m.k0) || (m.k1 >= 0 && mini_eval(m.k1));
      case Op::Ite: return mini_eval(m.k0) ? mini_eval(m.k1) : mini_eval(m.k2);
      default:
        throw DiagnosticError("unsupported operator in candidate body");
    }
  }

  const SygusProblem& prob_;
  const FiniteDomain& dom_;
  std::vector<FunTable> funs_;
  std::vector<Node> nodes_;
  int root_ = -1;
  std::map<std::string, int> slots_;
  std::vector<Sort> slotSorts_;
  std::vector<int64_t> env_;
  std::vector<size_t> counter_;
  std::vector<std::vector<int64_t>> slotValues_;
  std::vector<Pre> pre_;
  size_t preUsed_ = 0;
  std::unordered_map<std::string, int64_t> strIds_;
  std::vector<std::string> strs_;
  std::unordered_map<uint64_t, int64_t> concatFast_;
  std::vector<MiniNode> mini_;
  std::vector<int64_t> args_;
  std::set<std::pair<const Term*, std::pair<int, size_t>>> seenArgs_;
  const std::vector<std::vector<int64_t>>* sigs_ = nullptr;
};

// Grammar enumeration filtered by observational equivalence: every operator
// is pointwise over the function's argument tuples, so keeping the first
// (smallest, earliest) member of each semantic class preserves exactly which
// classes exist at each size and in which order they are first reached.
// Compositions recurse into the already-reduced sublists, which keeps the
// enumerated space proportional to the number of semantic classes.
class ReducedEnumerator {
 public:
  ReducedEnumerator(const Grammar& g, FastEval& fe, size_t fi)
      : g_(&g), fe_(&fe), fi_(fi) {}

  const std::vector<TermRef>& terms(const std::string& nt, int size) {
    auto key = std::make_pair(nt, size);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    memo_.emplace(key, std::vector<TermRef>{});  // settle recursion on (nt,size)
    std::vector<TermRef> out;
    auto& seenSet = seen_[nt];
    auto consider = [&](const TermRef& t) {
      std::vector<int64_t> sig = fe_->signature(fi_, t);
      uint64_t h = 1469598103934665603ull;
      for (int64_t v : sig) {
        h ^= static_cast<uint64_t>(v) + 0x9e3779b97f4a7c15ull;
        h *= 1099511628211ull;
      }
      if (seenSet.insert(h).second) out.push_back(t);
    };
    if (size >= 1 && size <= GrammarEnumerator::kMaxSize) {
      const GrammarRule* rule = g_->find(nt);
      if (!rule) throw DiagnosticError("enumeration from unknown nonterminal " + nt);
      for (const auto& alt : rule->alts) {
        std::vector<const Term*> slots;
        collect_slots(alt, slots);
        int skeleton = static_cast<int>(term_count_nodes(alt)) - static_cast<int>(slots.size());
        int remaining = size - skeleton;
        if (slots.empty()) {
          if (remaining == 0) consider(alt);
          continue;
        }
        if (remaining < static_cast<int>(slots.size())) continue;
        std::vector<int> partSizes(slots.size());
        std::vector<TermRef> pieces(slots.size());
        std::function<void(size_t, int)> assign = [&](size_t si, int left) {
          if (si == slots.size() - 1) {
            partSizes[si] = left;
            std::function<void(size_t)> fill = [&](size_t fi2) {
              if (fi2 == slots.size()) {
                size_t idx = 0;
                consider(instantiate_tpl(alt, pieces, idx));
                return;
              }
              for (const auto& cand : terms(slots[fi2]->sval, partSizes[fi2])) {
                pieces[fi2] = cand;
                fill(fi2 + 1);
              }
            };
            fill(0);
            return;
          }
          int rest = static_cast<int>(slots.size() - si - 1);
          for (int s = 1; s <= left - rest; ++s) {
            partSizes[si] = s;
            assign(si + 1, left - s);
          }
        };
        assign(0, remaining);
      }
    }
    memo_[key] = std::move(out);
    return memo_[key];
  }

 private:
  static void collect_slots(const TermRef& t, std::vector<const Term*>& out) {
    if (t->op == Op::Nonterminal) {
      out.push_back(t.get());
      return;
    }
    for (const auto& k : t->kids) collect_slots(k, out);
  }

  static TermRef instantiate_tpl(const TermRef& tpl, const std::vector<TermRef>& pieces,
                                 size_t& idx) {
    if (tpl->op == Op::Nonterminal) return pieces[idx++];
    if (tpl->kids.empty()) return tpl;
    std::vector<TermRef> kids;
    kids.reserve(tpl->kids.size());
    for (const auto& k : tpl->kids) kids.push_back(instantiate_tpl(k, pieces, idx));
    switch (tpl->op) {
      case Op::Not: return mk_unary(tpl->op, kids[0]);
      case Op::And:
      case Op::Or: return mk_nary_raw(tpl->op, std::move(kids));
      case Op::Ite: return mk_ite(kids[0], kids[1], kids[2]);
      case Op::App: return mk_app(tpl->sval, tpl->sort, std::move(kids));
      default: return mk_binary(tpl->op, kids[0], kids[1]);
    }
  }

  const Grammar* g_;
  FastEval* fe_;
  size_t fi_;
  std::map<std::pair<std::string, int>, std::vector<TermRef>> memo_;
  std::map<std::string, std::unordered_set<uint64_t>> seen_;
};

int solve(const Options& opt) {
  std::ifstream f(opt.file);
  if (!f) {
    std::cerr << "cannot read " << opt.file << "\n";
    return 2;
  }
  std::ostringstream os;
  os << f.rdbuf();
  SygusProblem prob = parse_sygus(os.str());
  prob.validate();

  FiniteDomain dom;
  if (!opt.domainFile.empty()) {
    std::ifstream d(opt.domainFile);
    if (!d) {
      std::cerr << "cannot read " << opt.domainFile << "\n";
      return 2;
    }
    std::ostringstream ds;
    ds << d.rdbuf();
    dom = domain_from_json(ds.str());
  } else {
    std::set<std::string> strs{""};
    std::function<void(const TermRef&)> scan = [&](const TermRef& t) {
      if (t->op == Op::StrConst) strs.insert(t->sval);
      for (const auto& k : t->kids) scan(k);
    };
    scan(prob.constraint);
    dom.strings.assign(strs.begin(), strs.end());
  }

  FastEval fe(prob, dom);

  std::vector<ReducedEnumerator> enums;
  enums.reserve(prob.funs.size());
  for (size_t i = 0; i < prob.funs.size(); ++i)
    enums.emplace_back(prob.funs[i].grammar, fe, i);

  size_t tried = 0, checked = 0;
  auto start = std::chrono::steady_clock::now();
  auto timed_out = [&]() {
    if (opt.timeoutSeconds <= 0) return false;
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() >
           opt.timeoutSeconds;
  };

  size_t n = prob.funs.size();
  std::vector<TermRef> pick(n);
  std::vector<std::vector<int64_t>> sigs(n);
  std::unordered_set<uint64_t> seen;  // FNV of the signature vector
  struct TimeoutSignal {};

  std::function<bool(size_t, int)> fill = [&](size_t fi, int budget) -> bool {
    if (fi == n) {
      if (budget != 0) return false;
      ++tried;
      if ((tried & 0xff) == 0 && timed_out()) throw TimeoutSignal{};
      uint64_t h = 1469598103934665603ull;
      for (const auto& s : sigs)
        for (int64_t v : s) {
          h ^= static_cast<uint64_t>(v) + 0x9e3779b97f4a7c15ull;
          h *= 1099511628211ull;
        }
      if (!seen.insert(h).second) return false;
      ++checked;
      return fe.check(sigs);
    }
    int rest = static_cast<int>(n - fi - 1);
    int cap = std::min(budget - rest, opt.maxSize);
    for (int s = 1; s <= cap; ++s) {
      for (const auto& t : enums[fi].terms(prob.funs[fi].grammar.start().name, s)) {
        pick[fi] = t;
        sigs[fi] = fe.signature(fi, t);
        if (fill(fi + 1, budget - s)) return true;
      }
    }
    return false;
  };

  try {
    for (int total = static_cast<int>(n); total <= opt.maxSize * static_cast<int>(n); ++total) {
      if (fill(0, total)) {
        for (size_t i = 0; i < n; ++i) {
          std::string out = "(define-fun " + prob.funs[i].name + " (";
          for (size_t j = 0; j < prob.funs[i].params.size(); ++j) {
            if (j) out += ' ';
            out += "(" + prob.funs[i].params[j].name + " " +
                   to_string(prob.funs[i].params[j].sort) + ")";
          }
          out += ") " + std::string(to_string(prob.funs[i].ret)) + " " + term_to_smt2(pick[i]) +
                 ")";
          std::cout << out << "\n";
        }
        if (opt.stats)
          std::cerr << "candidates: " << tried << " tried, " << checked << " checked\n";
        return 0;
      }
    }
  } catch (const TimeoutSignal&) {
    std::cout << "unknown\n";
    if (opt.stats)
      std::cerr << "timeout: " << tried << " tried, " << checked << " checked\n";
    return 0;
  }
  std::cout << "infeasible\n";
  if (opt.stats)
    std::cerr << "exhausted: " << tried << " tried, " << checked << " checked\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SyGuS-IF solver over finite domains (size-ordered enumeration)"};
  Options opt;
  app.add_option("file", opt.file, "SyGuS-IF v2 problem file")->required();
  app.add_option("--domain", opt.domainFile, "finite domain description (JSON)");
  app.add_option("--max-size", opt.maxSize, "per-function term size cap");
  app.add_option("--timeout", opt.timeoutSeconds, "wall-clock budget in seconds");
  app.add_flag("--stats", opt.stats, "print enumeration statistics to stderr");
  CLI11_PARSE(app, argc, argv);
  try {
    return solve(opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

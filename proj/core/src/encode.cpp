#include "hyperfix/encode.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace hyperfix {

namespace {

TermRef negate_pred(const TermRef& t) {
  if (is_comparison(t->op)) return mk_binary(negate_comparison(t->op), t->kids[0], t->kids[1]);
  if (t->op == Op::Not) return t->kids[0];
  if (t->op == Op::BoolConst) return mk_bool(t->ival == 0);
  return mk_not(t);
}

std::vector<Binder> indexed_binders(const Program& p, const std::string& tag) {
  std::vector<Binder> out;
  out.reserve(p.vars.size());
  for (const auto& v : p.vars) out.push_back({v.name + "!" + tag, v.sort});
  return out;
}

}  // namespace

size_t PathAssignment::min_length() const {
  size_t m = SIZE_MAX;
  for (const auto& [tv, beta] : entries) m = std::min(m, beta->size());
  return m;
}

TermRef build_acc(const Nsa& nsa, const PathAssignment& delta, const Program& p, AccStats* stats) {
  if (delta.entries.empty())
    throw DiagnosticError("build_acc requires a nonempty trace assignment");
  size_t minLen = delta.min_length();

  // theta[x_pi / Delta(pi)(i)(x)[y / y_pi]], memoized per (atom, i).
  std::map<std::pair<const Term*, size_t>, TermRef> atomMemo;
  auto instantiate = [&](const TermRef& atom, size_t i) -> TermRef {
    auto key = std::make_pair(atom.get(), i);
    auto it = atomMemo.find(key);
    if (it != atomMemo.end()) return it->second;
    TermRef inst = term_subst_vars(atom, [&](const Term& v) -> TermRef {
      if (v.trace.empty()) return nullptr;
      for (const auto& [tv, beta] : delta.entries) {
        if (tv != v.trace) continue;
        int vi = p.var_index(v.sval);
        if (vi < 0) throw DiagnosticError("atom references undeclared variable " + v.sval);
        return term_index_vars((*beta)[i].vals[vi], tv);
      }
      throw DiagnosticError("atom references trace variable outside the assignment: " + v.trace);
    });
    inst = term_simplify(inst);
    atomMemo.emplace(key, inst);
    return inst;
  };

  // Letters reaching the same successor are grouped and atoms on which the
  // group is closed under flipping are projected out: the same boolean
  // function as the plain transition disjunction, without don't-care atoms.
  size_t numAtoms = nsa.atoms.size();
  struct LetterGroup {
    int to;
    uint32_t careMask;
    std::vector<uint32_t> letters;  // projected to careMask, deduplicated
  };
  std::vector<std::vector<LetterGroup>> groups(nsa.numStates);
  for (int q = 0; q < nsa.numStates; ++q) {
    std::map<int, std::set<uint32_t>> byTarget;
    for (int ti : nsa.bySource[q])
      byTarget[nsa.transitions[ti].to].insert(nsa.transitions[ti].letter);
    for (auto& [to, letters] : byTarget) {
      std::set<uint32_t> cur = letters;
      uint32_t care = numAtoms >= 32 ? ~uint32_t{0} : (uint32_t{1} << numAtoms) - 1;
      bool changed = true;
      while (changed) {
        changed = false;
        for (size_t a = 0; a < numAtoms; ++a) {
          uint32_t bit = uint32_t{1} << a;
          if (!(care & bit)) continue;
          bool closed = true;
          for (uint32_t m : cur)
            if (!cur.count(m ^ bit)) {
              closed = false;
              break;
            }
          if (closed) {
            care &= ~bit;
            std::set<uint32_t> next;
            for (uint32_t m : cur) next.insert(m & care);
            cur = std::move(next);
            changed = true;
          }
        }
      }
      groups[q].push_back({to, care, {cur.begin(), cur.end()}});
    }
  }

  std::map<std::pair<int, size_t>, TermRef> memo;  // (state, step) -> acc term
  std::function<TermRef(int, size_t)> acc = [&](int q, size_t i) -> TermRef {
    if (i >= minLen) return mk_true();
    auto key = std::make_pair(q, i);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    std::vector<TermRef> options;
    for (const auto& g : groups[q]) {
      std::vector<TermRef> letterAlts;
      for (uint32_t m : g.letters) {
        std::vector<TermRef> conj;
        for (size_t a = 0; a < numAtoms; ++a) {
          if (!(g.careMask & (uint32_t{1} << a))) continue;
          TermRef inst = instantiate(nsa.atoms[a], i);
          conj.push_back((m >> a) & 1 ? inst : negate_pred(inst));
        }
        letterAlts.push_back(mk_and(std::move(conj)));
      }
      options.push_back(mk_and({mk_or(std::move(letterAlts)), acc(g.to, i + 1)}));
    }
    TermRef result = mk_or(std::move(options));
    memo.emplace(key, result);
    return result;
  };

  std::vector<TermRef> init;
  for (int q : nsa.initial) init.push_back(acc(q, 0));
  TermRef result = mk_or(std::move(init));
  if (stats) stats->memoNodes = memo.size();
  return result;
}

TermRef build_enc(const HyperLtlFormula& f, const std::vector<SymbolicPath>& paths,
                  const Program& p) {
  Nsa nsa = ltl_to_nsa(f.body);

  std::function<TermRef(size_t, PathAssignment&)> rec = [&](size_t qi,
                                                            PathAssignment& delta) -> TermRef {
    if (qi == f.prefix.size()) return build_acc(nsa, delta, p);
    const auto& q = f.prefix[qi];
    std::vector<Binder> binders = indexed_binders(p, q.var);
    std::vector<TermRef> parts;
    parts.reserve(paths.size());
    for (const auto& path : paths) {
      TermRef cond = term_index_vars(path.alpha, q.var);
      delta.entries.emplace_back(q.var, &path.obs);
      TermRef rest = rec(qi + 1, delta);
      delta.entries.pop_back();
      parts.push_back(q.universal ? mk_implies(cond, rest)
                                  : mk_and({cond, rest}));
    }
    TermRef body = q.universal ? mk_and(std::move(parts)) : mk_or(std::move(parts));
    return mk_quant(q.universal ? Op::Forall : Op::Exists, std::move(binders), body);
  };

  PathAssignment delta;
  return rec(0, delta);
}

namespace {

// Output-disagreement window over the shared input copies: some position
// below both lengths where an X_out projection differs.
TermRef mismatch(const SymbolicPath& a, const SymbolicPath& b,
                 const std::vector<int>& outIdx, const std::string& tag) {
  size_t n = std::min(a.obs.size(), b.obs.size());
  std::vector<TermRef> parts;
  for (size_t i = 0; i < n; ++i)
    for (int v : outIdx) {
      const TermRef& x = a.obs[i].vals[v];
      const TermRef& y = b.obs[i].vals[v];
      if (x.get() == y.get()) continue;  // identical expressions never differ
      parts.push_back(term_simplify(
          mk_ne(term_index_vars(x, tag), term_index_vars(y, tag))));
    }
  return mk_or(std::move(parts));
}

TermRef agreement(const SymbolicPath& a, const SymbolicPath& b, const std::vector<int>& outIdx,
                  const std::string& tag) {
  size_t n = std::min(a.obs.size(), b.obs.size());
  std::vector<TermRef> parts;
  for (size_t i = 0; i < n; ++i)
    for (int v : outIdx) {
      const TermRef& x = a.obs[i].vals[v];
      const TermRef& y = b.obs[i].vals[v];
      if (x.get() == y.get()) continue;
      parts.push_back(term_simplify(
          mk_eq(term_index_vars(x, tag), term_index_vars(y, tag))));
    }
  return mk_and(std::move(parts));
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

TermRef build_trans(const HyperLtlFormula& f, const std::vector<SymbolicPath>& pathsP,
                    const std::vector<SymbolicPath>& pathsQ,
                    const std::vector<std::string>& xOut, const Program& p) {
  if (!f.universal_only())
    throw DiagnosticError(
        "transparent repair is defined for universal-only formulas; existential "
        "quantification has no notion of an execution taking part in a violation");
  std::vector<int> outIdx = out_indices(p, xOut);
  Nsa nsa = ltl_to_nsa(f.body);
  const std::string in = "in";

  // Premise: some P-path and Q-path both enabled on the shared input with an
  // observable output difference.
  std::vector<TermRef> premiseParts;
  for (const auto& pp : pathsP)
    for (const auto& pq : pathsQ) {
      premiseParts.push_back(mk_and({term_index_vars(pp.alpha, in),
                                     term_index_vars(pq.alpha, in),
                                     mismatch(pp, pq, outIdx, in)}));
    }
  TermRef premise = mk_or(std::move(premiseParts));

  // Conclusion: an n-tuple of P-paths with enabled conditions, one of whose
  // inputs equals the shared input, whose observations violate the body.
  size_t n = f.prefix.size();
  std::vector<Binder> binders;
  for (const auto& q : f.prefix) {
    auto more = indexed_binders(p, q.var);
    binders.insert(binders.end(), more.begin(), more.end());
  }

  std::vector<TermRef> tuples;
  std::vector<const SymbolicPath*> tuple(n);
  std::function<void(size_t)> enumerate = [&](size_t qi) {
    if (qi == n) {
      std::vector<TermRef> conj;
      PathAssignment delta;
      for (size_t j = 0; j < n; ++j) {
        conj.push_back(term_index_vars(tuple[j]->alpha, f.prefix[j].var));
        delta.entries.emplace_back(f.prefix[j].var, &tuple[j]->obs);
      }
      std::vector<TermRef> anyEq;
      for (size_t j = 0; j < n; ++j) {
        std::vector<TermRef> eqs;
        for (const auto& v : p.vars)
          eqs.push_back(mk_eq(mk_var(v.name, v.sort, in), mk_var(v.name, v.sort, f.prefix[j].var)));
        anyEq.push_back(mk_and(std::move(eqs)));
      }
      conj.push_back(mk_or(std::move(anyEq)));
      conj.push_back(mk_not(build_acc(nsa, delta, p)));
      tuples.push_back(mk_and(std::move(conj)));
      return;
    }
    for (const auto& path : pathsP) {
      tuple[qi] = &path;
      enumerate(qi + 1);
    }
  };
  enumerate(0);

  TermRef conclusion = mk_quant(Op::Exists, std::move(binders), mk_or(std::move(tuples)));
  return mk_quant(Op::Forall, indexed_binders(p, in), mk_implies(premise, conclusion));
}

TermRef build_iter(const std::vector<SymbolicPath>& pathsP,
                   const std::vector<SymbolicPath>& pathsS,
                   const std::vector<SymbolicPath>& pathsQ,
                   const std::vector<std::string>& xOut, const Program& p, bool prune,
                   SmtBackend* pruneSolver, IterStats* stats) {
  if (xOut.empty()) throw DiagnosticError("build_iter requires a nonempty X_out");
  std::vector<int> outIdx = out_indices(p, xOut);
  const std::string in = "in";

  auto triple_pruned = [&](const SymbolicPath& a, const SymbolicPath& b,
                           const SymbolicPath& c) -> bool {
    if (!prune) return false;
    if (paths_syntactically_contradict(a, b) || paths_syntactically_contradict(a, c) ||
        paths_syntactically_contradict(b, c))
      return true;
    if (pruneSolver) {
      TermRef combined = mk_and({a.alpha, b.alpha, c.alpha});
      if (pruneSolver->check_sat(combined).verdict == Sat::Unsat) return true;
    }
    return false;
  };

  std::vector<TermRef> universalParts;
  std::vector<TermRef> existentialParts;
  for (const auto& pp : pathsP)
    for (const auto& ps : pathsS)
      for (const auto& pq : pathsQ) {
        if (stats) ++stats->triplesTotal;
        if (triple_pruned(pp, ps, pq)) {
          if (stats) ++stats->triplesPruned;
          continue;
        }
        TermRef conds = mk_and({term_index_vars(pp.alpha, in), term_index_vars(ps.alpha, in),
                                term_index_vars(pq.alpha, in)});
        universalParts.push_back(
            mk_implies(mk_and({conds, mismatch(pp, pq, outIdx, in)}),
                       mismatch(pp, ps, outIdx, in)));
        existentialParts.push_back(mk_and(
            {conds, mismatch(pp, ps, outIdx, in), agreement(pp, pq, outIdx, in)}));
      }

  TermRef universal =
      mk_quant(Op::Forall, indexed_binders(p, in), mk_and(std::move(universalParts)));
  TermRef existential =
      mk_quant(Op::Exists, indexed_binders(p, in), mk_or(std::move(existentialParts)));
  // The existential strict-gain conjunct refutes most candidates cheaply.
  return mk_and({existential, universal});
}

}  // namespace hyperfix

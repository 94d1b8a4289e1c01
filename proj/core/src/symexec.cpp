#include "hyperfix/symexec.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace hyperfix {

namespace {

bool has_app(const TermRef& t) {
  if (t->op == Op::App) return true;
  for (const auto& k : t->kids)
    if (has_app(k)) return true;
  return false;
}

TermRef negate_guard(const TermRef& g) {
  if (is_comparison(g->op)) return mk_binary(negate_comparison(g->op), g->kids[0], g->kids[1]);
  if (g->op == Op::Not) return g->kids[0];
  return mk_not(g);
}

struct Explorer {
  const Program& p;
  const ExploreBounds& bounds;
  ExploreResult& out;

  // Current path state (mutated along the DFS with undo).
  SymbolicStore nu;
  std::vector<TermRef> alpha;
  std::vector<SymbolicStore> beta;
  std::string choices;
  std::vector<BranchChoice> branches;
  std::map<int, int> unrolls;

  TermRef eval_sym(const TermRef& e) {
    return term_subst_vars(e, [&](const Term& v) -> TermRef {
      if (!v.trace.empty()) return nullptr;
      int i = p.var_index(v.sval);
      if (i < 0) throw DiagnosticError("undeclared variable in symbolic execution: " + v.sval);
      return nu.vals[i];
    });
  }

  void emit(bool maximal, bool cut) {
    if (out.paths.size() >= bounds.maxPaths) {
      out.pathLimitHit = true;
      return;
    }
    SymbolicPath path;
    path.alphaParts = alpha;
    path.alpha = mk_and(alpha);
    path.obs = beta;
    path.maximal = maximal && !cut;
    path.depthExhausted = cut;
    path.choices = choices;
    path.branches = branches;
    out.paths.push_back(std::move(path));
  }

  // Continuation is a stack of statements still to run (top at the back).
  void run(std::vector<const Stmt*>& cont) {
    if (out.pathLimitHit) return;
    while (!cont.empty()) {
      const Stmt* s = cont.back();
      cont.pop_back();
      switch (s->kind) {
        case StmtKind::Seq:
          cont.push_back(s->b.get());
          cont.push_back(s->a.get());
          continue;
        case StmtKind::Skip:
          continue;
        case StmtKind::Assign: {
          int i = p.var_index(s->var);
          nu.vals[i] = eval_sym(s->expr);
          continue;
        }
        case StmtKind::Observe: {
          if (static_cast<int>(beta.size()) >= bounds.maxObserves) {
            emit(false, true);
            return;
          }
          beta.push_back(nu);
          continue;
        }
        case StmtKind::If: {
          TermRef g = eval_sym(s->expr);
          branch(cont, s, g, s->a.get(), s->b.get());
          return;
        }
        case StmtKind::While: {
          TermRef g = eval_sym(s->expr);
          int used = unrolls[s->id];
          // Enter branch (bounded), then exit branch.
          {
            auto saved = snapshot(cont);
            if (used < bounds.unrollPerLoop) {
              push_choice(s, g, true);
              unrolls[s->id] = used + 1;
              auto c2 = saved.cont;
              c2.push_back(s);
              c2.push_back(s->a.get());
              run(c2);
              unrolls[s->id] = used;
              restore(saved);
            } else {
              // Budget exhausted: the would-be unrolling is a cut path.
              push_choice(s, g, true);
              emit(false, true);
              restore(saved);
            }
          }
          {
            auto saved = snapshot(cont);
            push_choice(s, negate_guard(g), false);
            auto c2 = saved.cont;
            run(c2);
            restore(saved);
          }
          return;
        }
      }
    }
    emit(true, false);
  }

  struct Snapshot {
    SymbolicStore nu;
    size_t alphaSize, betaSize, choiceSize, branchSize;
    std::vector<const Stmt*> cont;
  };

  Snapshot snapshot(const std::vector<const Stmt*>& cont) {
    return {nu, alpha.size(), beta.size(), choices.size(), branches.size(), cont};
  }
  void restore(const Snapshot& s) {
    nu = s.nu;
    alpha.resize(s.alphaSize);
    beta.resize(s.betaSize);
    choices.resize(s.choiceSize);
    branches.resize(s.branchSize);
  }

  void push_choice(const Stmt* s, TermRef cond, bool taken) {
    alpha.push_back(cond);
    choices.push_back(taken ? '1' : '0');
    branches.push_back({s->id, taken, has_app(cond), cond});
  }

  void branch(std::vector<const Stmt*>& cont, const Stmt* s, const TermRef& g, const Stmt* thenB,
              const Stmt* elseB) {
    {
      auto saved = snapshot(cont);
      push_choice(s, g, true);
      auto c2 = saved.cont;
      c2.push_back(thenB);
      run(c2);
      restore(saved);
    }
    {
      auto saved = snapshot(cont);
      push_choice(s, negate_guard(g), false);
      auto c2 = saved.cont;
      c2.push_back(elseB);
      run(c2);
      restore(saved);
    }
  }
};

}  // namespace

ExploreResult explore_paths(const Program& p, const ExploreBounds& bounds, SmtBackend* solver) {
  if (bounds.unrollPerLoop <= 0 || bounds.maxObserves <= 0 || bounds.maxPaths == 0)
    throw DiagnosticError("exploration bounds must be positive");
  ExploreResult out;
  Explorer ex{p, bounds, out};
  ex.nu.vals.reserve(p.vars.size());
  for (const auto& v : p.vars) ex.nu.vals.push_back(mk_var(v.name, v.sort));
  std::vector<const Stmt*> cont{p.body.get()};
  ex.run(cont);

  if (bounds.pruneUnsat) {
    FiniteDomain fallbackDom;
    FiniteModelBackend fallback(fallbackDom);
    SmtBackend* backend = solver ? solver : static_cast<SmtBackend*>(&fallback);
    out.syntacticPruningOnly = solver == nullptr;
    std::vector<SymbolicPath> kept;
    kept.reserve(out.paths.size());
    for (auto& path : out.paths) {
      SatResult r = backend->check_sat(path.alpha);
      if (r.verdict == Sat::Unsat) {
        ++out.prunedUnsat;
        continue;
      }
      if (r.verdict == Sat::Unknown) ++out.satUnknown;
      kept.push_back(std::move(path));
    }
    out.paths = std::move(kept);
  }

  std::sort(out.paths.begin(), out.paths.end(),
            [](const SymbolicPath& a, const SymbolicPath& b) { return a.choices < b.choices; });
  return out;
}

std::vector<SymbolicPath> ExploreResult::maximal_paths() const {
  std::vector<SymbolicPath> out;
  for (const auto& p : paths)
    if (p.maximal) out.push_back(p);
  return out;
}

SatResult path_satisfiable(const TermRef& alpha, SmtBackend& backend) {
  return backend.check_sat(alpha);
}

std::vector<SymbolicPath> substitute_paths(const std::vector<SymbolicPath>& paths,
                                           const std::map<std::string, FunDef>& defs) {
  std::vector<SymbolicPath> out;
  out.reserve(paths.size());
  for (const auto& p : paths) {
    SymbolicPath n = p;
    n.alphaParts.clear();
    std::vector<TermRef> parts;
    for (const auto& a : p.alphaParts) {
      TermRef sub = term_simplify(term_subst_apps(a, defs));
      n.alphaParts.push_back(sub);
      parts.push_back(sub);
    }
    n.alpha = mk_and(std::move(parts));
    for (auto& store : n.obs)
      for (auto& v : store.vals) v = term_simplify(term_subst_apps(v, defs));
    out.push_back(std::move(n));
  }
  return out;
}

bool paths_syntactically_contradict(const SymbolicPath& a, const SymbolicPath& b) {
  size_t n = std::min(a.branches.size(), b.branches.size());
  for (size_t i = 0; i < n; ++i) {
    const BranchChoice& x = a.branches[i];
    const BranchChoice& y = b.branches[i];
    if (x.stmtId != y.stmtId) return false;  // control diverged earlier, give up
    if (x.taken != y.taken) return x.stmtId == y.stmtId && !x.guardHasHole && !y.guardHasHole;
    // Same decision: identical guards by construction; keep scanning.
  }
  return false;
}

std::string paths_to_string(const std::vector<SymbolicPath>& paths, const Program& p) {
  std::ostringstream os;
  for (size_t k = 0; k < paths.size(); ++k) {
    const auto& path = paths[k];
    os << "PATH " << k << ": alpha := " << pretty_print_expr(path.alpha) << "; beta := [";
    for (size_t i = 0; i < path.obs.size(); ++i) {
      if (i) os << "; ";
      os << "{";
      for (size_t v = 0; v < p.vars.size(); ++v) {
        if (v) os << ", ";
        os << p.vars[v].name << " -> " << pretty_print_expr(path.obs[i].vals[v]);
      }
      os << "}";
    }
    os << "]; maximal: " << (path.maximal ? "yes" : "no");
    if (path.depthExhausted) os << " (depth exhausted)";
    os << "\n";
  }
  return os.str();
}

}  // namespace hyperfix

#include "hyperfix/solve.hpp"

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>

namespace hyperfix {

namespace {

void flatten_conjuncts(const TermRef& t, std::vector<TermRef>& out) {
  if (t->op == Op::And) {
    for (const auto& k : t->kids) flatten_conjuncts(k, out);
  } else {
    out.push_back(t);
  }
}

// Structural complement: Not(X) vs X, or complementary comparisons on
// pointer-identical operands.
bool complements(const TermRef& a, const TermRef& b) {
  if (a->op == Op::Not && a->kids[0].get() == b.get()) return true;
  if (b->op == Op::Not && b->kids[0].get() == a.get()) return true;
  if (is_comparison(a->op) && is_comparison(b->op) && negate_comparison(a->op) == b->op &&
      a->kids[0].get() == b->kids[0].get() && a->kids[1].get() == b->kids[1].get())
    return true;
  return false;
}

struct Interval {
  int64_t lo = std::numeric_limits<int64_t>::min();
  int64_t hi = std::numeric_limits<int64_t>::max();
  bool empty() const { return lo > hi; }
};

// Sound-unsat conflict analysis on a conjunction.
bool provably_unsat(const std::vector<TermRef>& cs) {
  for (size_t i = 0; i < cs.size(); ++i) {
    if (cs[i]->is_false()) return true;
    for (size_t j = i + 1; j < cs.size(); ++j)
      if (complements(cs[i], cs[j])) return true;
  }
  std::map<const Term*, Interval> ints;               // per-variable/app bounds
  std::map<const Term*, std::set<int64_t>> intNe;     // excluded points
  std::map<const Term*, std::optional<std::string>> strEq;
  std::map<const Term*, std::set<std::string>> strNe;

  for (const auto& c : cs) {
    if (!is_comparison(c->op)) continue;
    TermRef l = c->kids[0], r = c->kids[1];
    Op op = c->op;
    auto mirror = [](Op o) {
      switch (o) {
        case Op::Le: return Op::Ge;
        case Op::Lt: return Op::Gt;
        case Op::Ge: return Op::Le;
        case Op::Gt: return Op::Lt;
        default: return o;
      }
    };
    if (l->is_const() && !r->is_const()) {
      std::swap(l, r);
      op = mirror(op);
    }
    bool atomLhs = l->op == Op::Var || l->op == Op::App;
    if (!atomLhs || !r->is_const()) {
      // Ground comparison between constants: evaluate directly.
      if (l->is_const() && r->is_const()) {
        bool truth;
        if (l->sort == Sort::Int) {
          int64_t a = l->ival, b = r->ival;
          switch (op) {
            case Op::Eq: truth = a == b; break;
            case Op::Ne: truth = a != b; break;
            case Op::Le: truth = a <= b; break;
            case Op::Lt: truth = a < b; break;
            case Op::Ge: truth = a >= b; break;
            default: truth = a > b; break;
          }
        } else if (l->sort == Sort::String) {
          truth = (op == Op::Eq) == (l->sval == r->sval);
          if (op != Op::Eq && op != Op::Ne) truth = true;  // not applicable
        } else {
          truth = (op == Op::Eq) == (l->ival == r->ival);
        }
        if (!truth) return true;
      }
      continue;
    }
    const Term* key = l.get();
    if (l->sort == Sort::Int) {
      int64_t k = r->ival;
      Interval& iv = ints[key];
      switch (op) {
        case Op::Eq:
          iv.lo = std::max(iv.lo, k);
          iv.hi = std::min(iv.hi, k);
          break;
        case Op::Ne: intNe[key].insert(k); break;
        case Op::Le: iv.hi = std::min(iv.hi, k); break;
        case Op::Lt: iv.hi = std::min(iv.hi, k - 1); break;
        case Op::Ge: iv.lo = std::max(iv.lo, k); break;
        case Op::Gt: iv.lo = std::max(iv.lo, k + 1); break;
        default: break;
      }
      if (iv.empty()) return true;
    } else if (l->sort == Sort::String && r->op == Op::StrConst) {
      if (op == Op::Eq) {
        auto& cur = strEq[key];
        if (cur && *cur != r->sval) return true;
        cur = r->sval;
      } else if (op == Op::Ne) {
        strNe[key].insert(r->sval);
      }
    } else if (l->sort == Sort::Bool && r->op == Op::BoolConst) {
      Interval& iv = ints[key];
      int64_t k = r->ival;
      if (op == Op::Eq) {
        iv.lo = std::max(iv.lo, k);
        iv.hi = std::min(iv.hi, k);
      } else if (op == Op::Ne) {
        iv.lo = std::max(iv.lo, 1 - k);
        iv.hi = std::min(iv.hi, 1 - k);
      }
      if (iv.empty()) return true;
    }
  }
  for (const auto& [key, iv] : ints) {
    auto it = intNe.find(key);
    if (it == intNe.end()) continue;
    if (iv.lo == iv.hi && it->second.count(iv.lo)) return true;
  }
  for (const auto& [key, eq] : strEq) {
    auto it = strNe.find(key);
    if (it != strNe.end() && eq && it->second.count(*eq)) return true;
  }
  return false;
}

// Replace applications by fresh variables for the model search. Returns false
// if some symbol is applied to more than one distinct argument tuple (treating
// occurrences independently would be unsound for satisfiability).
bool abstract_apps(const TermRef& t, TermRef& out) {
  std::map<std::string, const Term*> tuples;
  bool multi = false;
  std::function<void(const TermRef&)> scan = [&](const TermRef& u) {
    if (u->op == Op::App) {
      auto [it, fresh] = tuples.emplace(u->sval, u.get());
      if (!fresh && it->second != u.get()) multi = true;
    }
    for (const auto& k : u->kids) scan(k);
  };
  scan(t);
  if (multi) return false;
  if (tuples.empty()) {
    out = t;
    return true;
  }
  std::function<TermRef(const TermRef&)> rw = [&](const TermRef& u) -> TermRef {
    if (u->op == Op::App) return mk_var("app!" + u->sval, u->sort);
    if (u->kids.empty()) return u;
    std::vector<TermRef> kids;
    bool changed = false;
    for (const auto& k : u->kids) {
      TermRef nk = rw(k);
      changed |= nk.get() != k.get();
      kids.push_back(std::move(nk));
    }
    if (!changed) return u;
    Term n = *u;
    n.kids = std::move(kids);
    // re-intern through a constructor-independent path
    switch (n.op) {
      case Op::Not: return mk_unary(n.op, n.kids[0]);
      case Op::And:
      case Op::Or: return mk_nary(n.op, n.kids);
      case Op::Ite: return mk_ite(n.kids[0], n.kids[1], n.kids[2]);
      case Op::Forall:
      case Op::Exists: return mk_quant(n.op, n.binders, n.kids[0]);
      default: return mk_binary(n.op, n.kids[0], n.kids[1]);
    }
  };
  out = rw(t);
  return true;
}

}  // namespace

SatResult FiniteModelBackend::check_sat(const TermRef& formula) {
  auto start = std::chrono::steady_clock::now();
  auto elapsed = [&]() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  std::vector<TermRef> conjuncts;
  flatten_conjuncts(formula, conjuncts);
  if (provably_unsat(conjuncts)) return {Sat::Unsat, "conflict analysis", elapsed()};

  TermRef abstracted;
  if (abstract_apps(formula, abstracted)) {
    BoundedEvaluator ev(dom_);
    if (ev.find_model(abstracted, nullptr, nullptr))
      return {Sat::Sat, "finite model", elapsed()};
    return {Sat::Unknown, "no model over the finite domain", elapsed()};
  }
  return {Sat::Unknown, "symbol applied to several argument tuples", elapsed()};
}

std::string ExternalSmtBackend::to_script(const TermRef& formula) {
  std::string out = "(set-logic ALL)\n";
  std::vector<Binder> vars;
  std::vector<std::string> traces;
  term_free_vars(formula, vars, &traces);
  for (size_t i = 0; i < vars.size(); ++i) {
    std::string name = traces[i].empty() ? vars[i].name : vars[i].name + "!" + traces[i];
    out += "(declare-const " + name + " " + to_string(vars[i].sort) + ")\n";
  }
  for (const auto& [name, app] : term_apps(formula)) {
    out += "(declare-fun " + name + " (";
    for (size_t i = 0; i < app->kids.size(); ++i) {
      if (i) out += ' ';
      out += to_string(app->kids[i]->sort);
    }
    out += ") " + std::string(to_string(app->sort)) + ")\n";
  }
  out += "(assert " + term_to_smt2(formula) + ")\n(check-sat)\n";
  return out;
}

SatResult ExternalSmtBackend::check_sat(const TermRef& formula) {
  namespace fs = std::filesystem;
  fs::create_directories(workDir_);
  std::string path = workDir_ + "/query" + std::to_string(counter_++) + ".smt2";
  {
    std::ofstream f(path);
    f << to_script(formula);
  }
  std::string cmd = cmd_;
  size_t pos = cmd.find("{file}");
  if (pos != std::string::npos)
    cmd.replace(pos, 6, path);
  else
    cmd += " " + path;
  RunResult r = run_command(cmd, timeout_);
  SatResult res;
  res.seconds = r.seconds;
  if (r.timedOut) {
    res.verdict = Sat::Unknown;
    res.info = "timeout";
    return res;
  }
  if (r.output.find("unsat") != std::string::npos) {
    res.verdict = Sat::Unsat;
  } else if (r.output.find("sat") != std::string::npos) {
    res.verdict = Sat::Sat;
  } else {
    res.verdict = Sat::Unknown;
    res.info = r.output.substr(0, 200);
  }
  return res;
}

RunResult run_command(const std::string& command, double timeoutSeconds) {
  RunResult res;
  auto start = std::chrono::steady_clock::now();
  std::string wrapped =
      "timeout " + std::to_string(timeoutSeconds) + "s /bin/sh -c '" + command + "' 2>&1";
  std::array<char, 4096> buf;
  FILE* pipe = popen(wrapped.c_str(), "r");
  if (!pipe) {
    res.output = "failed to start process";
    return res;
  }
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) res.output.append(buf.data(), n);
  int status = pclose(pipe);
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (WIFEXITED(status)) {
    res.exitCode = WEXITSTATUS(status);
    res.timedOut = res.exitCode == 124;  // coreutils timeout convention
  }
  return res;
}

}  // namespace hyperfix

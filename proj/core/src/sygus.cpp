#include "hyperfix/sygus.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace hyperfix {

// --- Grammar -------------------------------------------------------------------

const GrammarRule* Grammar::find(const std::string& name) const {
  for (const auto& r : rules)
    if (r.name == name) return &r;
  return nullptr;
}

const GrammarRule& Grammar::start() const {
  if (rules.empty()) throw DiagnosticError("empty grammar");
  return rules.front();
}

namespace {
void collect_placeholders(const TermRef& t, std::vector<const Term*>& out) {
  if (t->op == Op::Nonterminal) {
    out.push_back(t.get());
    return;
  }
  for (const auto& k : t->kids) collect_placeholders(k, out);
}
}  // namespace

void Grammar::validate() const {
  if (rules.empty()) throw DiagnosticError("empty grammar");
  for (const auto& r : rules) {
    if (r.alts.empty()) throw DiagnosticError("nonterminal " + r.name + " has no productions");
    for (const auto& a : r.alts) {
      if (a->sort != r.sort)
        throw DiagnosticError("production of " + r.name + " has sort " +
                              std::string(to_string(a->sort)));
      std::vector<const Term*> ph;
      collect_placeholders(a, ph);
      for (const Term* n : ph) {
        const GrammarRule* ref = find(n->sval);
        if (!ref) throw DiagnosticError("production references unknown nonterminal " + n->sval);
        if (ref->sort != n->sort)
          throw DiagnosticError("nonterminal " + n->sval + " used at the wrong sort");
      }
    }
  }
  // Productivity fixpoint: the start symbol must generate a finite term.
  std::set<std::string> productive;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& r : rules) {
      if (productive.count(r.name)) continue;
      for (const auto& a : r.alts) {
        std::vector<const Term*> ph;
        collect_placeholders(a, ph);
        bool all = true;
        for (const Term* n : ph)
          if (!productive.count(n->sval)) {
            all = false;
            break;
          }
        if (all) {
          productive.insert(r.name);
          changed = true;
          break;
        }
      }
    }
  }
  if (!productive.count(start().name))
    throw DiagnosticError("grammar start symbol " + start().name + " generates no finite term");
}

Grammar default_grammar(Sort ret, const std::vector<Binder>& args, const LiteralPool& lits) {
  std::vector<TermRef> intArgs, boolArgs, strArgs;
  for (const auto& a : args) {
    switch (a.sort) {
      case Sort::Int: intArgs.push_back(mk_var(a.name, Sort::Int)); break;
      case Sort::Bool: boolArgs.push_back(mk_var(a.name, Sort::Bool)); break;
      case Sort::String: strArgs.push_back(mk_var(a.name, Sort::String)); break;
    }
  }
  bool haveStrings = !strArgs.empty() || !lits.strings.empty();
  bool haveInts = ret == Sort::Int || !intArgs.empty();

  TermRef I = mk_nonterminal("I", Sort::Int);
  TermRef B = mk_nonterminal("B", Sort::Bool);
  TermRef S = mk_nonterminal("S", Sort::String);
  TermRef A = mk_nonterminal("A", Sort::String);

  GrammarRule ruleI{"I", Sort::Int, {}};
  ruleI.alts = intArgs;
  ruleI.alts.push_back(mk_int(0));
  ruleI.alts.push_back(mk_int(1));
  for (int64_t v : lits.ints)
    if (v != 0 && v != 1) ruleI.alts.push_back(mk_int(v));
  ruleI.alts.push_back(mk_binary(Op::Add, I, I));
  ruleI.alts.push_back(mk_binary(Op::Sub, I, I));
  ruleI.alts.push_back(mk_ite(B, I, I));

  GrammarRule ruleB{"B", Sort::Bool, {}};
  ruleB.alts = boolArgs;
  if (ret == Sort::Bool) {
    ruleB.alts.push_back(mk_true());
    ruleB.alts.push_back(mk_false());
  }
  ruleB.alts.push_back(mk_nary(Op::And, {B, B}));
  ruleB.alts.push_back(mk_nary(Op::Or, {B, B}));
  ruleB.alts.push_back(mk_not(B));
  if (haveInts) {
    ruleB.alts.push_back(mk_eq(I, I));
    ruleB.alts.push_back(mk_binary(Op::Le, I, I));
    ruleB.alts.push_back(mk_binary(Op::Ge, I, I));
  }
  if (haveStrings) {
    ruleB.alts.push_back(mk_eq(A, A));
    ruleB.alts.push_back(mk_ne(A, A));
  }

  GrammarRule ruleS{"S", Sort::String, {}};
  ruleS.alts = strArgs;
  for (const auto& s : lits.strings) ruleS.alts.push_back(mk_str(s));
  ruleS.alts.push_back(mk_binary(Op::Concat, S, S));
  ruleS.alts.push_back(mk_ite(B, S, S));

  GrammarRule ruleA{"A", Sort::String, {}};
  ruleA.alts = strArgs;
  for (const auto& s : lits.strings) ruleA.alts.push_back(mk_str(s));

  Grammar g;
  switch (ret) {
    case Sort::Int:
      g.rules.push_back(ruleI);
      g.rules.push_back(ruleB);
      if (haveStrings) g.rules.push_back(ruleA);
      break;
    case Sort::Bool:
      g.rules.push_back(ruleB);
      if (haveInts) g.rules.push_back(ruleI);
      if (haveStrings) g.rules.push_back(ruleA);
      break;
    case Sort::String:
      g.rules.push_back(ruleS);
      g.rules.push_back(ruleB);
      if (haveStrings) g.rules.push_back(ruleA);
      if (!intArgs.empty()) g.rules.push_back(ruleI);
      break;
  }
  g.validate();
  return g;
}

void SygusProblem::validate() const {
  std::set<std::string> names;
  for (const auto& f : funs) {
    if (!names.insert(f.name).second)
      throw DiagnosticError("duplicate synthesis symbol " + f.name);
    f.grammar.validate();
    if (f.grammar.start().sort != f.ret)
      throw DiagnosticError("grammar start sort does not match return sort of " + f.name);
  }
  for (const auto& [name, app] : term_apps(constraint))
    if (!names.count(name))
      throw DiagnosticError("constraint applies undeclared synthesis symbol " + name);
}

// --- Serialization ---------------------------------------------------------------

namespace {
void grammar_to_sygus(const Grammar& g, std::string& out, const std::string& indent) {
  out += indent + "(";
  for (size_t i = 0; i < g.rules.size(); ++i) {
    if (i) out += ' ';
    out += "(" + g.rules[i].name + " " + to_string(g.rules[i].sort) + ")";
  }
  out += ")\n" + indent + "(";
  for (size_t i = 0; i < g.rules.size(); ++i) {
    const auto& r = g.rules[i];
    if (i) out += "\n" + indent + " ";
    out += "(" + r.name + " " + to_string(r.sort) + " (";
    for (size_t j = 0; j < r.alts.size(); ++j) {
      if (j) out += ' ';
      term_to_smt2(r.alts[j], out);
    }
    out += "))";
  }
  out += ")";
}
}  // namespace

std::string serialize_sygus(const SygusProblem& p) {
  p.validate();
  std::string out = "(set-logic " + p.logic + ")\n";
  for (const auto& f : p.funs) {
    out += "(synth-fun " + f.name + " (";
    for (size_t i = 0; i < f.params.size(); ++i) {
      if (i) out += ' ';
      out += "(" + f.params[i].name + " " + to_string(f.params[i].sort) + ")";
    }
    out += ") " + std::string(to_string(f.ret)) + "\n";
    grammar_to_sygus(f.grammar, out, "  ");
    out += ")\n";
  }
  for (const auto& v : p.declaredVars)
    out += "(declare-var " + v.name + " " + to_string(v.sort) + ")\n";
  out += "(constraint " + term_to_smt2(p.constraint) + ")\n(check-synth)\n";
  return out;
}

// --- S-expression reader -----------------------------------------------------------

namespace {

struct Sexp {
  enum Kind { List, Symbol, String, Numeral } kind = List;
  std::string text;
  std::vector<Sexp> kids;
};

struct SexpReader {
  const std::string& src;
  size_t pos = 0;

  void skip_ws() {
    for (;;) {
      while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
      if (pos < src.size() && src[pos] == ';') {
        while (pos < src.size() && src[pos] != '\n') ++pos;
        continue;
      }
      break;
    }
  }

  bool eof() {
    skip_ws();
    return pos >= src.size();
  }

  Sexp read() {
    skip_ws();
    if (pos >= src.size()) throw DiagnosticError("unexpected end of s-expression input");
    char c = src[pos];
    if (c == '(') {
      ++pos;
      Sexp s;
      s.kind = Sexp::List;
      for (;;) {
        skip_ws();
        if (pos >= src.size()) throw DiagnosticError("unbalanced '('");
        if (src[pos] == ')') {
          ++pos;
          return s;
        }
        s.kids.push_back(read());
      }
    }
    if (c == '"') {
      ++pos;
      Sexp s;
      s.kind = Sexp::String;
      while (pos < src.size()) {
        if (src[pos] == '"') {
          if (pos + 1 < src.size() && src[pos + 1] == '"') {  // doubled quote
            s.text += '"';
            pos += 2;
            continue;
          }
          ++pos;
          return s;
        }
        s.text += src[pos++];
      }
      throw DiagnosticError("unterminated string in s-expression");
    }
    Sexp s;
    size_t start = pos;
    while (pos < src.size() && !std::isspace(static_cast<unsigned char>(src[pos])) &&
           src[pos] != '(' && src[pos] != ')' && src[pos] != ';')
      ++pos;
    s.text = src.substr(start, pos - start);
    s.kind = std::all_of(s.text.begin(), s.text.end(),
                         [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })
                 ? Sexp::Numeral
                 : Sexp::Symbol;
    return s;
  }
};

struct TermScope {
  std::map<std::string, Sort> vars;
  std::map<std::string, Sort> nonterminals;
  const std::map<std::string, std::pair<std::vector<Sort>, Sort>>* funs = nullptr;
};

TermRef sexp_to_term(const Sexp& s, const TermScope& scope);

TermRef apply_op(const std::string& head, std::vector<TermRef> args, const TermScope& scope) {
  auto bin_chain = [&](Op op) {
    TermRef acc = args[0];
    for (size_t i = 1; i < args.size(); ++i) acc = mk_binary(op, acc, args[i]);
    return acc;
  };
  if (head == "and") return mk_nary_raw(Op::And, std::move(args));
  if (head == "or") return mk_nary_raw(Op::Or, std::move(args));
  if (head == "not") return mk_not(args.at(0));
  if (head == "=>") {
    TermRef acc = args.back();
    for (size_t i = args.size() - 1; i-- > 0;) acc = mk_implies(args[i], acc);
    return acc;
  }
  if (head == "=") return mk_eq(args.at(0), args.at(1));
  if (head == "distinct") return mk_ne(args.at(0), args.at(1));
  if (head == "<=") return mk_binary(Op::Le, args.at(0), args.at(1));
  if (head == "<") return mk_binary(Op::Lt, args.at(0), args.at(1));
  if (head == ">=") return mk_binary(Op::Ge, args.at(0), args.at(1));
  if (head == ">") return mk_binary(Op::Gt, args.at(0), args.at(1));
  if (head == "+") return bin_chain(Op::Add);
  if (head == "*") return bin_chain(Op::Mul);
  if (head == "-") {
    if (args.size() == 1) {
      if (args[0]->op == Op::IntConst) return mk_int(-args[0]->ival);
      return mk_binary(Op::Sub, mk_int(0), args[0]);
    }
    return bin_chain(Op::Sub);
  }
  if (head == "str.++") return bin_chain(Op::Concat);
  if (head == "ite") return mk_ite(args.at(0), args.at(1), args.at(2));
  if (scope.funs) {
    auto it = scope.funs->find(head);
    if (it != scope.funs->end()) {
      const auto& [paramSorts, ret] = it->second;
      if (paramSorts.size() != args.size())
        throw DiagnosticError("arity mismatch applying " + head);
      return mk_app(head, ret, std::move(args));
    }
  }
  throw DiagnosticError("unknown operator or function: " + head);
}

TermRef sexp_to_term(const Sexp& s, const TermScope& scope) {
  switch (s.kind) {
    case Sexp::Numeral:
      return mk_int(std::stoll(s.text));
    case Sexp::String:
      return mk_str(s.text);
    case Sexp::Symbol: {
      if (s.text == "true") return mk_true();
      if (s.text == "false") return mk_false();
      auto nt = scope.nonterminals.find(s.text);
      if (nt != scope.nonterminals.end()) return mk_nonterminal(s.text, nt->second);
      auto v = scope.vars.find(s.text);
      if (v != scope.vars.end()) return mk_var(s.text, v->second);
      if (scope.funs) {
        auto f = scope.funs->find(s.text);
        if (f != scope.funs->end() && f->second.first.empty())
          return mk_app(s.text, f->second.second, {});
      }
      throw DiagnosticError("unbound symbol in term: " + s.text);
    }
    case Sexp::List: {
      if (s.kids.empty()) throw DiagnosticError("empty application");
      const Sexp& head = s.kids[0];
      if (head.kind == Sexp::Symbol && (head.text == "forall" || head.text == "exists")) {
        if (s.kids.size() != 3) throw DiagnosticError("malformed quantifier");
        std::vector<Binder> binders;
        TermScope inner = scope;
        for (const auto& b : s.kids[1].kids) {
          if (b.kids.size() != 2) throw DiagnosticError("malformed binder");
          Sort sort = sort_from_string(b.kids[1].text);
          binders.push_back({b.kids[0].text, sort});
          inner.vars[b.kids[0].text] = sort;
        }
        return mk_quant(head.text == "forall" ? Op::Forall : Op::Exists, std::move(binders),
                        sexp_to_term(s.kids[2], inner));
      }
      if (head.kind == Sexp::Symbol && head.text == "let") {
        if (s.kids.size() != 3) throw DiagnosticError("malformed let");
        std::map<std::string, TermRef> subst;
        TermScope inner = scope;
        for (const auto& b : s.kids[1].kids) {
          TermRef bound = sexp_to_term(b.kids[1], scope);
          subst[b.kids[0].text] = bound;
          inner.vars[b.kids[0].text] = bound->sort;
        }
        TermRef body = sexp_to_term(s.kids[2], inner);
        return term_subst_vars(body, subst);
      }
      if (head.kind != Sexp::Symbol) throw DiagnosticError("application head must be a symbol");
      std::vector<TermRef> args;
      for (size_t i = 1; i < s.kids.size(); ++i) args.push_back(sexp_to_term(s.kids[i], scope));
      return apply_op(head.text, std::move(args), scope);
    }
  }
  throw DiagnosticError("sexp_to_term: unreachable");
}

}  // namespace

SygusProblem parse_sygus(const std::string& text) {
  SexpReader r{text};
  SygusProblem p;
  std::map<std::string, std::pair<std::vector<Sort>, Sort>> funSigs;
  while (!r.eof()) {
    Sexp s = r.read();
    if (s.kind != Sexp::List || s.kids.empty() || s.kids[0].kind != Sexp::Symbol)
      throw DiagnosticError("expected a top-level command");
    const std::string& cmd = s.kids[0].text;
    if (cmd == "set-logic") {
      p.logic = s.kids.at(1).text;
    } else if (cmd == "synth-fun") {
      SynthFun f;
      f.name = s.kids.at(1).text;
      for (const auto& b : s.kids.at(2).kids)
        f.params.push_back({b.kids.at(0).text, sort_from_string(b.kids.at(1).text)});
      f.ret = sort_from_string(s.kids.at(3).text);
      if (s.kids.size() != 6)
        throw DiagnosticError("synth-fun " + f.name + " must carry a grammar");
      TermScope scope;
      for (const auto& param : f.params) scope.vars[param.name] = param.sort;
      for (const auto& d : s.kids[4].kids)
        scope.nonterminals[d.kids.at(0).text] = sort_from_string(d.kids.at(1).text);
      for (const auto& ruleSexp : s.kids[5].kids) {
        GrammarRule rule;
        rule.name = ruleSexp.kids.at(0).text;
        rule.sort = sort_from_string(ruleSexp.kids.at(1).text);
        for (const auto& alt : ruleSexp.kids.at(2).kids)
          rule.alts.push_back(sexp_to_term(alt, scope));
        f.grammar.rules.push_back(std::move(rule));
      }
      funSigs[f.name] = {{}, f.ret};
      for (const auto& param : f.params) funSigs[f.name].first.push_back(param.sort);
      p.funs.push_back(std::move(f));
    } else if (cmd == "declare-var") {
      p.declaredVars.push_back({s.kids.at(1).text, sort_from_string(s.kids.at(2).text)});
    } else if (cmd == "constraint") {
      TermScope scope;
      scope.funs = &funSigs;
      for (const auto& v : p.declaredVars) scope.vars[v.name] = v.sort;
      TermRef c = sexp_to_term(s.kids.at(1), scope);
      p.constraint = p.constraint->is_true() ? c : mk_and({p.constraint, c});
    } else if (cmd == "check-synth") {
      // end of problem
    } else {
      throw DiagnosticError("unsupported SyGuS command: " + cmd);
    }
  }
  return p;
}

SolverAnswer parse_solver_answer(const std::string& text) {
  SolverAnswer ans;
  if (text.find("infeasible") != std::string::npos) {
    ans.status = SolverAnswer::Infeasible;
    return ans;
  }
  SexpReader r{text};
  std::vector<Sexp> defs;
  try {
    while (!r.eof()) {
      Sexp s = r.read();
      if (s.kind == Sexp::Symbol) continue;  // status tokens like "unsat"
      if (s.kind != Sexp::List) continue;
      if (!s.kids.empty() && s.kids[0].kind == Sexp::Symbol && s.kids[0].text == "define-fun") {
        defs.push_back(std::move(s));
      } else {
        for (auto& k : s.kids)
          if (k.kind == Sexp::List && !k.kids.empty() && k.kids[0].text == "define-fun")
            defs.push_back(std::move(k));
      }
    }
  } catch (const DiagnosticError&) {
    ans.status = SolverAnswer::Unknown;
    return ans;
  }
  if (defs.empty()) {
    ans.status = SolverAnswer::Unknown;
    return ans;
  }
  for (const auto& d : defs) {
    FunDef def;
    std::string name = d.kids.at(1).text;
    TermScope scope;
    for (const auto& b : d.kids.at(2).kids) {
      Sort sort = sort_from_string(b.kids.at(1).text);
      def.params.push_back({b.kids.at(0).text, sort});
      scope.vars[b.kids.at(0).text] = sort;
    }
    def.body = sexp_to_term(d.kids.at(4), scope);
    ans.defs.emplace_back(std::move(name), std::move(def));
  }
  ans.status = SolverAnswer::Solved;
  return ans;
}

// --- Derivability -------------------------------------------------------------------

namespace {
bool template_match(const Grammar& g, const TermRef& tpl, const TermRef& t,
                    std::map<std::pair<std::string, const Term*>, int>& memo);

bool derivable_from(const Grammar& g, const std::string& nt, const TermRef& t,
                    std::map<std::pair<std::string, const Term*>, int>& memo) {
  auto key = std::make_pair(nt, t.get());
  auto it = memo.find(key);
  if (it != memo.end()) return it->second == 1;  // in-progress (2) counts as no
  memo[key] = 2;
  const GrammarRule* rule = g.find(nt);
  if (!rule) throw DiagnosticError("derivability query for unknown nonterminal " + nt);
  for (const auto& alt : rule->alts) {
    if (template_match(g, alt, t, memo)) {
      memo[key] = 1;
      return true;
    }
  }
  memo[key] = 0;
  return false;
}

bool template_match(const Grammar& g, const TermRef& tpl, const TermRef& t,
                    std::map<std::pair<std::string, const Term*>, int>& memo) {
  if (tpl->op == Op::Nonterminal) return derivable_from(g, tpl->sval, t, memo);
  if (tpl->op != t->op || tpl->sort != t->sort || tpl->ival != t->ival ||
      tpl->sval != t->sval || tpl->trace != t->trace || tpl->kids.size() != t->kids.size())
    return false;
  for (size_t i = 0; i < tpl->kids.size(); ++i)
    if (!template_match(g, tpl->kids[i], t->kids[i], memo)) return false;
  return true;
}
}  // namespace

bool grammar_derivable(const Grammar& g, const TermRef& term) {
  std::map<std::pair<std::string, const Term*>, int> memo;
  return derivable_from(g, g.start().name, term, memo);
}

// --- Enumeration ---------------------------------------------------------------------

namespace {
TermRef instantiate(const TermRef& tpl, const std::vector<TermRef>& pieces, size_t& idx) {
  if (tpl->op == Op::Nonterminal) return pieces[idx++];
  if (tpl->kids.empty()) return tpl;
  std::vector<TermRef> kids;
  kids.reserve(tpl->kids.size());
  for (const auto& k : tpl->kids) kids.push_back(instantiate(k, pieces, idx));
  switch (tpl->op) {
    case Op::Not: return mk_unary(tpl->op, kids[0]);
    case Op::And:
    case Op::Or: return mk_nary_raw(tpl->op, std::move(kids));
    case Op::Ite: return mk_ite(kids[0], kids[1], kids[2]);
    case Op::App: return mk_app(tpl->sval, tpl->sort, std::move(kids));
    default: return mk_binary(tpl->op, kids[0], kids[1]);
  }
}
}  // namespace

const std::vector<TermRef>& GrammarEnumerator::terms(const std::string& nt, int size) {
  auto key = std::make_pair(nt, size);
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;
  std::vector<TermRef> out;
  if (size >= 1 && size <= kMaxSize) {
    const GrammarRule* rule = g_->find(nt);
    if (!rule) throw DiagnosticError("enumeration from unknown nonterminal " + nt);
    for (const auto& alt : rule->alts) {
      std::vector<const Term*> slots;
      collect_placeholders(alt, slots);
      int skeleton = static_cast<int>(term_count_nodes(alt)) - static_cast<int>(slots.size());
      int remaining = size - skeleton;
      if (slots.empty()) {
        if (remaining == 0) out.push_back(alt);
        continue;
      }
      if (remaining < static_cast<int>(slots.size())) continue;
      // Partition `remaining` over the slots, earlier slots smallest first.
      std::vector<int> partSizes(slots.size());
      std::vector<TermRef> pieces(slots.size());
      std::function<void(size_t, int)> assign = [&](size_t si, int left) {
        if (si == slots.size() - 1) {
          partSizes[si] = left;
          // Cross product over the cached term lists.
          std::function<void(size_t)> fill = [&](size_t fi) {
            if (fi == slots.size()) {
              size_t idx = 0;
              out.push_back(instantiate(alt, pieces, idx));
              return;
            }
            for (const auto& cand : terms(slots[fi]->sval, partSizes[fi])) {
              pieces[fi] = cand;
              fill(fi + 1);
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
  return memo_.emplace(key, std::move(out)).first->second;
}

size_t RepairCandidate::size_nodes() const {
  size_t n = 0;
  for (const auto& e : exprs) n += term_count_nodes(e);
  return n;
}

// --- External engine -------------------------------------------------------------------

SygusOutcome SygusEngine::solve(const SygusProblem& p) {
  namespace fs = std::filesystem;
  SygusOutcome out;
  fs::create_directories(runDir_);
  std::string base = runDir_ + "/problem" + std::to_string(counter_++);
  std::string file = base + ".sy";
  {
    std::ofstream f(file);
    f << serialize_sygus(p);
  }
  std::string cmd = cmd_;
  size_t pos = cmd.find("{file}");
  if (pos != std::string::npos)
    cmd.replace(pos, 6, file);
  else
    cmd += " " + file;

  RunResult r = run_command(cmd, timeout_);
  out.seconds = r.seconds;
  out.raw = r.output;
  {
    std::ofstream t(base + ".out");
    t << r.output;
  }
  transcripts_.push_back(base + ".out");
  if (r.timedOut) {
    out.status = SygusOutcome::Unknown;
    out.error = "solver timeout";
    return out;
  }

  SolverAnswer ans = parse_solver_answer(r.output);
  if (ans.status == SolverAnswer::Infeasible) {
    out.status = SygusOutcome::Infeasible;
    return out;
  }
  if (ans.status == SolverAnswer::Unknown) {
    out.status = SygusOutcome::Unknown;
    if (r.exitCode != 0) out.error = "solver exited with code " + std::to_string(r.exitCode);
    return out;
  }

  out.solutions.resize(p.funs.size());
  std::vector<bool> filled(p.funs.size(), false);
  for (const auto& [name, def] : ans.defs) {
    int idx = -1;
    for (size_t i = 0; i < p.funs.size(); ++i)
      if (p.funs[i].name == name) idx = static_cast<int>(i);
    if (idx < 0) {
      out.status = SygusOutcome::Unknown;
      out.error = "solver defined unknown symbol " + name;
      return out;
    }
    const SynthFun& f = p.funs[idx];
    if (def.params.size() != f.params.size()) {
      out.status = SygusOutcome::Unknown;
      out.error = "solver changed the arity of " + name;
      return out;
    }
    // Normalize the solver's parameter names to the problem's.
    std::map<std::string, TermRef> rename;
    for (size_t i = 0; i < def.params.size(); ++i) {
      if (def.params[i].sort != f.params[i].sort) {
        out.status = SygusOutcome::Unknown;
        out.error = "solver changed a parameter sort of " + name;
        return out;
      }
      rename[def.params[i].name] = mk_var(f.params[i].name, f.params[i].sort);
    }
    TermRef body = term_subst_vars(def.body, rename);
    if (body->sort != f.ret) {
      out.status = SygusOutcome::Unknown;
      out.error = "solver returned a body of the wrong sort for " + name;
      return out;
    }
    if (!grammar_derivable(f.grammar, body))
      throw DiagnosticError("solver contract breach: returned term for " + name +
                            " is not derivable from its grammar: " + term_to_smt2(body));
    out.solutions[idx] = body;
    filled[idx] = true;
  }
  for (size_t i = 0; i < filled.size(); ++i)
    if (!filled[i]) {
      out.status = SygusOutcome::Unknown;
      out.error = "solver did not define " + p.funs[i].name;
      return out;
    }
  out.status = SygusOutcome::Solved;
  return out;
}

}  // namespace hyperfix

#include <cctype>
#include <functional>
#include <map>
#include <set>

#include "hyperfix/lang.hpp"

namespace hyperfix {

namespace {

enum class Tok { Ident, Int, Str, Punct, End };

struct Token {
  Tok kind;
  std::string text;
  int64_t ival = 0;
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }
  Token next() {
    Token t = tok_;
    advance();
    return t;
  }
  bool at(const char* punct) const { return tok_.kind == Tok::Punct && tok_.text == punct; }
  bool at_ident(const char* kw) const { return tok_.kind == Tok::Ident && tok_.text == kw; }
  bool accept(const char* punct) {
    if (!at(punct)) return false;
    advance();
    return true;
  }
  bool accept_ident(const char* kw) {
    if (!at_ident(kw)) return false;
    advance();
    return true;
  }
  void expect(const char* punct) {
    if (!accept(punct)) fail(std::string("expected '") + punct + "'");
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw DiagnosticError(msg + " (got '" + (tok_.kind == Tok::End ? "<eof>" : tok_.text) + "')",
                          tok_.line, tok_.col);
  }

 private:
  void advance() {
    skip_ws();
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= src_.size()) {
      tok_ = {Tok::End, "", 0, line_, col_};
      return;
    }
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '@') {
      size_t start = pos_;
      int l = line_, co = col_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' ||
              src_[pos_] == '@'))
        take();
      tok_ = {Tok::Ident, src_.substr(start, pos_ - start), 0, l, co};
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      int l = line_, co = col_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) take();
      tok_ = {Tok::Int, src_.substr(start, pos_ - start), 0, l, co};
      tok_.ival = std::stoll(tok_.text);
      return;
    }
    if (c == '"') {
      int l = line_, co = col_;
      take();
      std::string val;
      while (pos_ < src_.size() && src_[pos_] != '"') {
        if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) take();
        val += src_[pos_];
        take();
      }
      if (pos_ >= src_.size()) throw DiagnosticError("unterminated string literal", l, co);
      take();
      tok_ = {Tok::Str, val, 0, l, co};
      return;
    }
    int l = line_, co = col_;
    if (src_.compare(pos_, 3, "<->") == 0) {
      tok_ = {Tok::Punct, "<->", 0, l, co};
      take();
      take();
      take();
      return;
    }
    static const char* two[] = {"==", "!=", "<=", ">=", "&&", "||", "->", nullptr};
    for (int i = 0; two[i]; ++i) {
      if (src_.compare(pos_, 2, two[i]) == 0) {
        tok_ = {Tok::Punct, two[i], 0, l, co};
        take();
        take();
        return;
      }
    }
    tok_ = {Tok::Punct, std::string(1, c), 0, l, co};
    take();
  }

  void skip_ws() {
    for (;;) {
      while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) take();
      if (pos_ + 1 < src_.size() && src_[pos_] == '/' && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') take();
        continue;
      }
      break;
    }
  }

  void take() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

// Signals that an undeclared formula variable needs a different sort than the
// Int default; the formula is re-parsed with the variable pinned.
struct SortClash {
  std::string name;
  Sort want;
};

// Sort-checked expression parser shared by programs and formula atoms.
class ExprParser {
 public:
  using Lookup = std::function<TermRef(const std::string&, const std::string&, int, int)>;
  // coerce(operand, want): returns a re-sorted operand when legal, else null.
  using Coerce = std::function<TermRef(const TermRef&, Sort)>;

  ExprParser(Lexer& lx, Lookup lookup, bool allowTraceIndex, Coerce coerce = nullptr)
      : lx_(lx), lookup_(std::move(lookup)), coerce_(std::move(coerce)),
        allowTraceIndex_(allowTraceIndex) {}

  TermRef parse() { return parse_or(); }

 private:
  bool unify(TermRef& a, TermRef& b) {
    if (a->sort == b->sort) return true;
    if (coerce_) {
      if (TermRef fixed = coerce_(a, b->sort)) {
        a = fixed;
        return true;
      }
      if (TermRef fixed = coerce_(b, a->sort)) {
        b = fixed;
        return true;
      }
    }
    return false;
  }

  TermRef parse_or() {
    TermRef e = parse_and();
    if (!lx_.at("||")) return e;
    std::vector<TermRef> kids{e};
    while (lx_.accept("||")) kids.push_back(parse_and());
    return mk_or(std::move(kids));
  }

  TermRef parse_and() {
    TermRef e = parse_cmp();
    if (!lx_.at("&&")) return e;
    std::vector<TermRef> kids{e};
    while (lx_.accept("&&")) kids.push_back(parse_cmp());
    return mk_and(std::move(kids));
  }

  TermRef parse_cmp() {
    TermRef e = parse_add();
    struct {
      const char* p;
      Op op;
    } ops[] = {{"==", Op::Eq}, {"!=", Op::Ne}, {"<=", Op::Le}, {">=", Op::Ge},
               {"<", Op::Lt},  {">", Op::Gt}};
    for (auto& o : ops) {
      if (lx_.at(o.p)) {
        Token t = lx_.next();
        TermRef rhs = parse_add();
        if (!unify(e, rhs))
          throw DiagnosticError(std::string("operands of '") + o.p + "' have different sorts (" +
                                    to_string(e->sort) + " vs " + to_string(rhs->sort) + ")",
                                t.line, t.col);
        try {
          return mk_binary(o.op, e, rhs);
        } catch (const DiagnosticError& d) {
          throw DiagnosticError(d.what(), t.line, t.col);
        }
      }
    }
    return e;
  }

  TermRef parse_add() {
    TermRef e = parse_mul();
    for (;;) {
      if (lx_.at("+")) {
        Token t = lx_.next();
        TermRef rhs = parse_mul();
        if (!unify(e, rhs))
          throw DiagnosticError("'+' operands must both be Int or both be String", t.line, t.col);
        if (e->sort == Sort::String) {
          e = mk_binary(Op::Concat, e, rhs);
        } else if (e->sort == Sort::Int) {
          e = mk_binary(Op::Add, e, rhs);
        } else {
          throw DiagnosticError("'+' is not defined on Bool", t.line, t.col);
        }
      } else if (lx_.at("-")) {
        Token t = lx_.next();
        TermRef rhs = parse_mul();
        try {
          e = mk_binary(Op::Sub, e, rhs);
        } catch (const DiagnosticError& d) {
          throw DiagnosticError(d.what(), t.line, t.col);
        }
      } else {
        return e;
      }
    }
  }

  TermRef parse_mul() {
    TermRef e = parse_unary();
    while (lx_.at("*")) {
      Token t = lx_.next();
      TermRef rhs = parse_unary();
      try {
        e = mk_binary(Op::Mul, e, rhs);
      } catch (const DiagnosticError& d) {
        throw DiagnosticError(d.what(), t.line, t.col);
      }
    }
    return e;
  }

  TermRef parse_unary() {
    if (lx_.at("!")) {
      Token t = lx_.next();
      TermRef e = parse_unary();
      if (e->sort != Sort::Bool) {
        if (coerce_) {
          if (TermRef fixed = coerce_(e, Sort::Bool)) return mk_not(fixed);
        }
        throw DiagnosticError("'!' expects a Bool operand", t.line, t.col);
      }
      return mk_not(e);
    }
    if (lx_.at("-")) {
      Token t = lx_.next();
      TermRef e = parse_unary();
      if (e->sort != Sort::Int) throw DiagnosticError("unary '-' expects Int", t.line, t.col);
      return mk_binary(Op::Sub, mk_int(0), e);
    }
    return parse_primary();
  }

  TermRef parse_primary() {
    const Token& t = lx_.peek();
    switch (t.kind) {
      case Tok::Int: {
        Token v = lx_.next();
        return mk_int(v.ival);
      }
      case Tok::Str: {
        Token v = lx_.next();
        return mk_str(v.text);
      }
      case Tok::Ident: {
        if (lx_.accept_ident("true")) return mk_true();
        if (lx_.accept_ident("false")) return mk_false();
        if (lx_.at_ident("ite")) {
          Token kw = lx_.next();
          lx_.expect("(");
          TermRef c = parse();
          lx_.expect(",");
          TermRef a = parse();
          lx_.expect(",");
          TermRef b = parse();
          lx_.expect(")");
          if (a->sort != b->sort && !unify(a, b))
            throw DiagnosticError("ite branches must have the same sort", kw.line, kw.col);
          try {
            return mk_ite(c, a, b);
          } catch (const DiagnosticError& d) {
            throw DiagnosticError(d.what(), kw.line, kw.col);
          }
        }
        Token id = lx_.next();
        if (lx_.at("(")) {  // function-symbol application (instrumented skeletons)
          lx_.expect("(");
          std::vector<TermRef> args;
          if (!lx_.at(")")) {
            do {
              args.push_back(parse());
            } while (lx_.accept(","));
          }
          lx_.expect(")");
          // Provisional sort; the statement parser re-sorts it against the
          // assignment target or guard position.
          return mk_app(id.text, Sort::String, std::move(args));
        }
        std::string traceVar;
        if (allowTraceIndex_ && lx_.accept("[")) {
          Token tv = lx_.next();
          if (tv.kind != Tok::Ident)
            throw DiagnosticError("expected trace variable in index", tv.line, tv.col);
          traceVar = tv.text;
          lx_.expect("]");
        }
        return lookup_(id.text, traceVar, id.line, id.col);
      }
      default:
        if (lx_.accept("(")) {
          TermRef e = parse();
          lx_.expect(")");
          return e;
        }
        lx_.fail("expected expression");
    }
  }

  Lexer& lx_;
  Lookup lookup_;
  Coerce coerce_;
  bool allowTraceIndex_;
};

// --- Program parser ----------------------------------------------------------

class ProgramParser {
 public:
  explicit ProgramParser(const std::string& text) : lx_(text) {}

  Program parse() {
    Program p;
    parse_decls(p);
    StmtRef body = parse_stmts(p, true);
    p.body = body ? body : mk_skip();
    return normalize_program(std::move(p));
  }

 private:
  void parse_decls(Program& p) {
    for (;;) {
      if (lx_.at_ident("int") || lx_.at_ident("bool") || lx_.at_ident("string")) {
        Token kw = lx_.next();
        Sort s = sort_from_string(kw.text);
        do {
          Token id = lx_.next();
          if (id.kind != Tok::Ident)
            throw DiagnosticError("expected variable name", id.line, id.col);
          if (p.var_index(id.text) >= 0)
            throw DiagnosticError("duplicate declaration of " + id.text, id.line, id.col);
          p.vars.push_back({id.text, s});
        } while (lx_.accept(","));
        lx_.expect(";");
      } else if (lx_.at_ident("output")) {
        lx_.next();
        do {
          Token id = lx_.next();
          if (id.kind != Tok::Ident)
            throw DiagnosticError("expected output variable name", id.line, id.col);
          if (p.var_index(id.text) < 0)
            throw DiagnosticError("output names undeclared variable " + id.text, id.line, id.col);
          p.outputs.push_back(id.text);
        } while (lx_.accept(","));
        lx_.expect(";");
      } else {
        return;
      }
    }
  }

  TermRef parse_expr(Program& p) {
    ExprParser ep(
        lx_,
        [&](const std::string& name, const std::string& trace, int line, int col) -> TermRef {
          if (!trace.empty())
            throw DiagnosticError("trace indexing is not allowed in programs", line, col);
          int i = p.var_index(name);
          if (i < 0) throw DiagnosticError("undeclared variable: " + name, line, col);
          return mk_var(name, p.vars[i].sort);
        },
        false);
    return ep.parse();
  }

  StmtRef parse_stmts(Program& p, bool topLevel) {
    std::vector<StmtRef> seq;
    for (;;) {
      while (lx_.accept(";")) {
      }
      if (lx_.peek().kind == Tok::End || lx_.at("}")) break;
      seq.push_back(parse_stmt(p));
    }
    if (seq.empty()) return nullptr;
    StmtRef s = seq.back();
    for (size_t i = seq.size() - 1; i-- > 0;) s = mk_seq(seq[i], s);
    return s;
  }

  StmtRef parse_stmt(Program& p) {
    bool repair = false;
    if (lx_.at_ident("@repair")) {
      lx_.next();
      repair = true;
    }
    Token t = lx_.peek();
    StmtRef s;
    if (lx_.accept_ident("skip")) {
      s = mk_skip();
    } else if (lx_.accept_ident("observe")) {
      s = mk_observe();
    } else if (lx_.accept_ident("if")) {
      lx_.expect("(");
      TermRef g = guard_expr(p, t);
      lx_.expect(")");
      StmtRef thenB = parse_block(p);
      StmtRef elseB = lx_.accept_ident("else") ? parse_block(p) : mk_skip();
      s = mk_if(g, thenB, elseB);
    } else if (lx_.accept_ident("while")) {
      lx_.expect("(");
      TermRef g = guard_expr(p, t);
      lx_.expect(")");
      s = mk_while(g, parse_block(p));
    } else if (t.kind == Tok::Ident) {
      Token id = lx_.next();
      int vi = p.var_index(id.text);
      if (vi < 0) throw DiagnosticError("undeclared variable: " + id.text, id.line, id.col);
      lx_.expect("=");
      TermRef rhs = parse_expr(p);
      if (rhs->op == Op::App && rhs->sort != p.vars[vi].sort)
        rhs = mk_app(rhs->sval, p.vars[vi].sort, rhs->kids);
      if (rhs->sort != p.vars[vi].sort)
        throw DiagnosticError("assignment to " + id.text + " has sort " +
                                  std::string(to_string(rhs->sort)) + ", expected " +
                                  to_string(p.vars[vi].sort),
                              id.line, id.col);
      s = mk_assign(id.text, rhs);
    } else {
      lx_.fail("expected statement");
    }
    if (repair) {
      if (s->kind != StmtKind::Assign && s->kind != StmtKind::If && s->kind != StmtKind::While)
        throw DiagnosticError("@repair applies to assignments, if, or while", t.line, t.col);
      s = stmt_with_repair(s, 0);  // ids renumbered by normalize_program
    }
    return s;
  }

  TermRef guard_expr(Program& p, const Token& at) {
    TermRef g = parse_expr(p);
    if (g->op == Op::App && g->sort != Sort::Bool) g = mk_app(g->sval, Sort::Bool, g->kids);
    if (g->sort != Sort::Bool)
      throw DiagnosticError("condition must be Bool, found " + std::string(to_string(g->sort)),
                            at.line, at.col);
    return g;
  }

  StmtRef parse_block(Program& p) {
    lx_.expect("{");
    StmtRef body = parse_stmts(p, false);
    lx_.expect("}");
    return body ? body : mk_skip();
  }

  Lexer lx_;
};

// --- Formula parser ----------------------------------------------------------

// Surface form before desugaring / negation pushing.
struct Pre;
using PreRef = std::shared_ptr<Pre>;
struct Pre {
  enum Kind { True, False, Atom, Not, And, Or, Implies, Iff, Next, WeakUntil, Globally } kind;
  TermRef atom;
  PreRef a, b;
};

PreRef mk_pre(Pre::Kind k, PreRef a = nullptr, PreRef b = nullptr) {
  auto p = std::make_shared<Pre>();
  p->kind = k;
  p->a = std::move(a);
  p->b = std::move(b);
  return p;
}

TermRef negate_atom(const TermRef& a) {
  if (is_comparison(a->op)) return mk_binary(negate_comparison(a->op), a->kids[0], a->kids[1]);
  if (a->op == Op::Not) return a->kids[0];
  if (a->op == Op::And) {
    std::vector<TermRef> kids;
    for (const auto& k : a->kids) kids.push_back(negate_atom(k));
    return mk_or(std::move(kids));
  }
  if (a->op == Op::Or) {
    std::vector<TermRef> kids;
    for (const auto& k : a->kids) kids.push_back(negate_atom(k));
    return mk_and(std::move(kids));
  }
  if (a->op == Op::BoolConst) return mk_bool(a->ival == 0);
  return mk_not(a);
}

class FormulaParser {
 public:
  FormulaParser(const std::string& text, const std::map<std::string, Sort>* declared,
                std::map<std::string, Sort>* pins)
      : lx_(text), declared_(declared), pins_(pins) {}

  HyperLtlFormula parse() {
    HyperLtlFormula f;
    std::set<std::string> seen;
    while (lx_.at_ident("forall") || lx_.at_ident("exists")) {
      bool uni = lx_.at_ident("forall");
      lx_.next();
      Token id = lx_.next();
      if (id.kind != Tok::Ident) throw DiagnosticError("expected trace variable", id.line, id.col);
      if (!seen.insert(id.text).second)
        throw DiagnosticError("trace variable " + id.text + " occurs twice in the prefix", id.line,
                              id.col);
      f.prefix.push_back({uni, id.text});
      lx_.expect(".");
    }
    if (f.prefix.empty())
      throw DiagnosticError("formula needs at least one trace quantifier", 1, 1);
    for (const auto& q : f.prefix) traceVars_.insert(q.var);
    PreRef pre = parse_iff();
    if (lx_.peek().kind != Tok::End) lx_.fail("trailing input after formula");
    f.body = desugar(pre, false);
    return f;
  }

 private:
  PreRef parse_iff() {
    PreRef e = parse_implies();
    while (lx_.accept("<->")) e = mk_pre(Pre::Iff, e, parse_implies());
    return e;
  }

  PreRef parse_implies() {
    PreRef e = parse_or();
    if (lx_.accept("->")) return mk_pre(Pre::Implies, e, parse_implies());
    return e;
  }

  PreRef parse_or() {
    PreRef e = parse_and();
    while (lx_.accept("||")) e = mk_pre(Pre::Or, e, parse_and());
    return e;
  }

  PreRef parse_and() {
    PreRef e = parse_unary();
    while (lx_.accept("&&")) e = mk_pre(Pre::And, e, parse_unary());
    return e;
  }

  PreRef parse_unary() {
    if (lx_.accept("!")) return mk_pre(Pre::Not, parse_unary());
    if (lx_.at_ident("X")) {
      lx_.next();
      return with_weak_until(mk_pre(Pre::Next, parse_unary()));
    }
    if (lx_.at_ident("G")) {
      lx_.next();
      return with_weak_until(mk_pre(Pre::Globally, parse_unary()));
    }
    return with_weak_until(parse_primary());
  }

  PreRef with_weak_until(PreRef e) {
    if (lx_.at_ident("W")) {
      lx_.next();
      return mk_pre(Pre::WeakUntil, e, parse_unary());
    }
    return e;
  }

  PreRef parse_primary() {
    if (lx_.accept("(")) {
      PreRef e = parse_iff();
      lx_.expect(")");
      return e;
    }
    if (lx_.accept_ident("true")) return mk_pre(Pre::True);
    if (lx_.accept_ident("false")) return mk_pre(Pre::False);
    TermRef atom = parse_atom_expr();
    auto p = mk_pre(Pre::Atom);
    p->atom = atom;
    return p;
  }

  TermRef parse_atom_expr() {
    ExprParser ep(
        lx_,
        [&](const std::string& name, const std::string& trace, int line, int col) -> TermRef {
          if (trace.empty())
            throw DiagnosticError("formula variable " + name + " must be trace-indexed (x[p])",
                                  line, col);
          if (!traceVars_.count(trace))
            throw DiagnosticError("unbound trace variable " + trace, line, col);
          return mk_var(name, lookup_sort(name, line, col), trace);
        },
        true,
        [&](const TermRef& operand, Sort want) -> TermRef {
          // Only undeclared (defaulted) bare variables may be re-sorted.
          if (declared_ || operand->op != Op::Var || operand->trace.empty()) return nullptr;
          if (pins_->count(operand->sval)) return nullptr;  // already pinned
          (*pins_)[operand->sval] = want;
          throw SortClash{operand->sval, want};
        });
    TermRef e = ep.parse();
    if (e->sort != Sort::Bool) {
      if (!declared_ && e->op == Op::Var && !pins_->count(e->sval)) {
        (*pins_)[e->sval] = Sort::Bool;
        throw SortClash{e->sval, Sort::Bool};
      }
      lx_.fail("atom must be a Bool-sorted predicate");
    }
    if (e->op == Op::App) lx_.fail("function applications are not allowed in formulas");
    return e;
  }

  Sort lookup_sort(const std::string& name, int line, int col) {
    if (declared_) {
      auto it = declared_->find(name);
      if (it == declared_->end())
        throw DiagnosticError("formula references undeclared program variable " + name, line, col);
      return it->second;
    }
    auto it = pins_->find(name);
    return it == pins_->end() ? Sort::Int : it->second;
  }

  LtlRef desugar(const PreRef& p, bool neg) {
    switch (p->kind) {
      case Pre::True: return neg ? ltl_false() : ltl_true();
      case Pre::False: return neg ? ltl_true() : ltl_false();
      case Pre::Atom: return ltl_atom(neg ? negate_atom(p->atom) : p->atom);
      case Pre::Not: return desugar(p->a, !neg);
      case Pre::And: {
        LtlRef a = desugar(p->a, neg), b = desugar(p->b, neg);
        return neg ? ltl_or(a, b) : ltl_and(a, b);
      }
      case Pre::Or: {
        LtlRef a = desugar(p->a, neg), b = desugar(p->b, neg);
        return neg ? ltl_and(a, b) : ltl_or(a, b);
      }
      case Pre::Implies: {
        // a -> b == !a || b; negated: a && !b.
        if (!neg) return ltl_or(desugar(p->a, true), desugar(p->b, false));
        return ltl_and(desugar(p->a, false), desugar(p->b, true));
      }
      case Pre::Iff: {
        // a <-> b == (a && b) || (!a && !b); negated: (a && !b) || (!a && b).
        LtlRef pp = ltl_and(desugar(p->a, false), desugar(p->b, neg));
        LtlRef nn = ltl_and(desugar(p->a, true), desugar(p->b, !neg));
        return ltl_or(pp, nn);
      }
      case Pre::Next:
        if (neg)
          throw DiagnosticError("negation of a temporal operator (X) leaves the safety fragment");
        return ltl_next(desugar(p->a, false));
      case Pre::WeakUntil:
        if (neg)
          throw DiagnosticError("negation of a temporal operator (W) leaves the safety fragment");
        return ltl_weak_until(desugar(p->a, false), desugar(p->b, false));
      case Pre::Globally:
        if (neg)
          throw DiagnosticError("negation of a temporal operator (G) leaves the safety fragment");
        return ltl_weak_until(desugar(p->a, false), ltl_false());  // G f == f W false
    }
    throw DiagnosticError("desugar: unreachable");
  }

  Lexer lx_;
  const std::map<std::string, Sort>* declared_;
  std::map<std::string, Sort>* pins_;
  std::set<std::string> traceVars_;
};

}  // namespace

Program parse_program(const std::string& text) { return ProgramParser(text).parse(); }

HyperLtlFormula parse_formula(const std::string& text) {
  // Without declarations, variables default to Int; each SortClash pins one
  // variable and restarts, so the loop terminates.
  std::map<std::string, Sort> pins;
  for (;;) {
    try {
      FormulaParser fp(text, nullptr, &pins);
      return fp.parse();
    } catch (const SortClash&) {
      continue;
    }
  }
}

HyperLtlFormula parse_formula(const std::string& text, const std::vector<VarDecl>& decls) {
  std::map<std::string, Sort> declared;
  for (const auto& d : decls) declared[d.name] = d.sort;
  std::map<std::string, Sort> unusedPins;
  FormulaParser fp(text, &declared, &unusedPins);
  return fp.parse();
}

}  // namespace hyperfix

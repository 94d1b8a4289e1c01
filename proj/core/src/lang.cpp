#include "hyperfix/lang.hpp"

#include <functional>
#include <set>
#include <sstream>

namespace hyperfix {

namespace {
StmtRef make(StmtKind k) {
  auto s = std::make_shared<Stmt>();
  s->kind = k;
  return s;
}
}  // namespace

StmtRef mk_skip() { return make(StmtKind::Skip); }
StmtRef mk_observe() { return make(StmtKind::Observe); }

StmtRef mk_assign(const std::string& var, TermRef rhs) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::Assign;
  s->var = var;
  s->expr = std::move(rhs);
  return s;
}

StmtRef mk_if(TermRef guard, StmtRef thenB, StmtRef elseB) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::If;
  s->expr = std::move(guard);
  s->a = std::move(thenB);
  s->b = std::move(elseB);
  return s;
}

StmtRef mk_while(TermRef guard, StmtRef body) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::While;
  s->expr = std::move(guard);
  s->a = std::move(body);
  return s;
}

StmtRef mk_seq(StmtRef a, StmtRef b) {
  auto s = std::make_shared<Stmt>();
  s->kind = StmtKind::Seq;
  s->a = std::move(a);
  s->b = std::move(b);
  return s;
}

StmtRef stmt_with_repair(StmtRef s, int loc) {
  auto n = std::make_shared<Stmt>(*s);
  n->repairLoc = loc;
  return n;
}

int Program::var_index(const std::string& name) const {
  for (size_t i = 0; i < vars.size(); ++i)
    if (vars[i].name == name) return static_cast<int>(i);
  return -1;
}

Sort Program::var_sort(const std::string& name) const {
  int i = var_index(name);
  if (i < 0) throw DiagnosticError("undeclared variable: " + name);
  return vars[i].sort;
}

std::vector<std::pair<int, const Stmt*>> Program::repair_locations() const {
  std::vector<std::pair<int, const Stmt*>> out;
  std::function<void(const StmtRef&)> go = [&](const StmtRef& s) {
    if (!s) return;
    if (s->repairLoc) out.emplace_back(*s->repairLoc, s.get());
    go(s->a);
    go(s->b);
  };
  go(body);
  std::sort(out.begin(), out.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  return out;
}

Program normalize_program(Program p) {
  int nextId = 0;
  int nextLoc = 0;
  std::function<StmtRef(const StmtRef&)> go = [&](const StmtRef& s) -> StmtRef {
    if (!s) return s;
    auto n = std::make_shared<Stmt>(*s);
    n->id = nextId++;
    if (n->repairLoc) n->repairLoc = nextLoc++;
    n->a = go(s->a);
    n->b = go(s->b);
    return n;
  };
  p.body = go(p.body);
  return p;
}

bool stmt_equal(const StmtRef& a, const StmtRef& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind || a->repairLoc != b->repairLoc) return false;
  switch (a->kind) {
    case StmtKind::Skip:
    case StmtKind::Observe:
      return true;
    case StmtKind::Assign:
      return a->var == b->var && a->expr.get() == b->expr.get();
    case StmtKind::If:
      return a->expr.get() == b->expr.get() && stmt_equal(a->a, b->a) && stmt_equal(a->b, b->b);
    case StmtKind::While:
      return a->expr.get() == b->expr.get() && stmt_equal(a->a, b->a);
    case StmtKind::Seq:
      return stmt_equal(a->a, b->a) && stmt_equal(a->b, b->b);
  }
  return false;
}

bool program_equal(const Program& a, const Program& b) {
  if (a.vars.size() != b.vars.size() || a.outputs != b.outputs) return false;
  for (size_t i = 0; i < a.vars.size(); ++i)
    if (a.vars[i].name != b.vars[i].name || a.vars[i].sort != b.vars[i].sort) return false;
  return stmt_equal(a.body, b.body);
}

// --- HyperLTL ---------------------------------------------------------------

namespace {
std::shared_ptr<Ltl> mk_ltl(LtlKind k) {
  auto l = std::make_shared<Ltl>();
  l->kind = k;
  return l;
}
}  // namespace

LtlRef ltl_true() { return mk_ltl(LtlKind::True); }
LtlRef ltl_false() { return mk_ltl(LtlKind::False); }

LtlRef ltl_atom(TermRef pred) {
  if (pred->sort != Sort::Bool) throw DiagnosticError("LTL atom must be Bool");
  auto l = mk_ltl(LtlKind::Atom);
  l->atom = std::move(pred);
  return l;
}

LtlRef ltl_and(LtlRef a, LtlRef b) {
  auto l = mk_ltl(LtlKind::And);
  l->a = std::move(a);
  l->b = std::move(b);
  return l;
}

LtlRef ltl_or(LtlRef a, LtlRef b) {
  auto l = mk_ltl(LtlKind::Or);
  l->a = std::move(a);
  l->b = std::move(b);
  return l;
}

LtlRef ltl_next(LtlRef a) {
  auto l = mk_ltl(LtlKind::Next);
  l->a = std::move(a);
  return l;
}

LtlRef ltl_weak_until(LtlRef a, LtlRef b) {
  auto l = mk_ltl(LtlKind::WeakUntil);
  l->a = std::move(a);
  l->b = std::move(b);
  return l;
}

bool HyperLtlFormula::universal_only() const {
  for (const auto& q : prefix)
    if (!q.universal) return false;
  return true;
}

bool HyperLtlFormula::existential_only() const {
  for (const auto& q : prefix)
    if (q.universal) return false;
  return true;
}

std::vector<TermRef> HyperLtlFormula::atoms() const {
  std::vector<TermRef> out;
  std::set<const Term*> seen;
  std::function<void(const LtlRef&)> go = [&](const LtlRef& l) {
    if (!l) return;
    if (l->kind == LtlKind::Atom) {
      if (seen.insert(l->atom.get()).second) out.push_back(l->atom);
      return;
    }
    go(l->a);
    go(l->b);
  };
  go(body);
  return out;
}

// --- Pretty printing ---------------------------------------------------------

namespace {

int precedence(Op op) {
  switch (op) {
    case Op::Or: return 1;
    case Op::And: return 2;
    case Op::Eq:
    case Op::Ne:
    case Op::Le:
    case Op::Lt:
    case Op::Ge:
    case Op::Gt: return 3;
    case Op::Add:
    case Op::Sub:
    case Op::Concat: return 4;
    case Op::Mul: return 5;
    case Op::Not: return 6;
    default: return 7;
  }
}

const char* infix_name(Op op) {
  switch (op) {
    case Op::Add:
    case Op::Concat: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Eq: return "==";
    case Op::Ne: return "!=";
    case Op::Le: return "<=";
    case Op::Lt: return "<";
    case Op::Ge: return ">=";
    case Op::Gt: return ">";
    case Op::And: return "&&";
    case Op::Or: return "||";
    default: return nullptr;
  }
}

void print_expr(const TermRef& t, std::string& out, int parentPrec) {
  switch (t->op) {
    case Op::IntConst:
      out += std::to_string(t->ival);
      return;
    case Op::BoolConst:
      out += t->ival ? "true" : "false";
      return;
    case Op::StrConst: {
      out += '"';
      for (char c : t->sval) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
      }
      out += '"';
      return;
    }
    case Op::Var:
      out += t->sval;
      if (!t->trace.empty()) {
        out += '[';
        out += t->trace;
        out += ']';
      }
      return;
    case Op::Not: {
      out += '!';
      print_expr(t->kids[0], out, precedence(Op::Not));
      return;
    }
    case Op::Ite: {
      out += "ite(";
      print_expr(t->kids[0], out, 0);
      out += ", ";
      print_expr(t->kids[1], out, 0);
      out += ", ";
      print_expr(t->kids[2], out, 0);
      out += ')';
      return;
    }
    case Op::App: {
      out += t->sval;
      out += '(';
      for (size_t i = 0; i < t->kids.size(); ++i) {
        if (i) out += ", ";
        print_expr(t->kids[i], out, 0);
      }
      out += ')';
      return;
    }
    default: {
      int p = precedence(t->op);
      bool paren = p < parentPrec;
      if (paren) out += '(';
      const char* name = infix_name(t->op);
      for (size_t i = 0; i < t->kids.size(); ++i) {
        if (i) {
          out += ' ';
          out += name;
          out += ' ';
        }
        // Left-assoc rendering: right child binds one tighter.
        print_expr(t->kids[i], out, i == 0 ? p : p + 1);
      }
      if (paren) out += ')';
      return;
    }
  }
}

void print_stmt(const StmtRef& s, std::string& out, int indent) {
  auto pad = [&]() { out.append(indent * 2, ' '); };
  switch (s->kind) {
    case StmtKind::Seq:
      print_stmt(s->a, out, indent);
      print_stmt(s->b, out, indent);
      return;
    case StmtKind::Skip:
      pad();
      out += "skip\n";
      return;
    case StmtKind::Observe:
      pad();
      out += "observe\n";
      return;
    case StmtKind::Assign:
      if (s->repairLoc) {
        pad();
        out += "@repair\n";
      }
      pad();
      out += s->var;
      out += " = ";
      print_expr(s->expr, out, 0);
      out += '\n';
      return;
    case StmtKind::If: {
      if (s->repairLoc) {
        pad();
        out += "@repair\n";
      }
      pad();
      out += "if (";
      print_expr(s->expr, out, 0);
      out += ") {\n";
      print_stmt(s->a, out, indent + 1);
      pad();
      if (s->b && s->b->kind == StmtKind::Skip) {
        out += "}\n";
      } else {
        out += "} else {\n";
        print_stmt(s->b, out, indent + 1);
        pad();
        out += "}\n";
      }
      return;
    }
    case StmtKind::While: {
      if (s->repairLoc) {
        pad();
        out += "@repair\n";
      }
      pad();
      out += "while (";
      print_expr(s->expr, out, 0);
      out += ") {\n";
      print_stmt(s->a, out, indent + 1);
      pad();
      out += "}\n";
      return;
    }
  }
}

}  // namespace

std::string pretty_print_expr(const TermRef& e) {
  std::string out;
  print_expr(e, out, 0);
  return out;
}

std::string pretty_print(const Program& p) {
  std::string out;
  for (const auto& v : p.vars) {
    out += v.sort == Sort::Int ? "int " : v.sort == Sort::Bool ? "bool " : "string ";
    out += v.name;
    out += ";\n";
  }
  if (!p.outputs.empty()) {
    out += "output ";
    for (size_t i = 0; i < p.outputs.size(); ++i) {
      if (i) out += ", ";
      out += p.outputs[i];
    }
    out += ";\n";
  }
  out += '\n';
  print_stmt(p.body, out, 0);
  return out;
}

std::string pretty_print_ltl(const LtlRef& l) {
  switch (l->kind) {
    case LtlKind::True: return "true";
    case LtlKind::False: return "false";
    case LtlKind::Atom: return "(" + pretty_print_expr(l->atom) + ")";
    case LtlKind::And: return "(" + pretty_print_ltl(l->a) + " && " + pretty_print_ltl(l->b) + ")";
    case LtlKind::Or: return "(" + pretty_print_ltl(l->a) + " || " + pretty_print_ltl(l->b) + ")";
    case LtlKind::Next: return "X " + pretty_print_ltl(l->a);
    case LtlKind::WeakUntil:
      return "(" + pretty_print_ltl(l->a) + " W " + pretty_print_ltl(l->b) + ")";
  }
  return "?";
}

std::string pretty_print_formula(const HyperLtlFormula& f) {
  std::string out;
  for (const auto& q : f.prefix) {
    out += q.universal ? "forall " : "exists ";
    out += q.var;
    out += ". ";
  }
  out += pretty_print_ltl(f.body);
  return out;
}

}  // namespace hyperfix

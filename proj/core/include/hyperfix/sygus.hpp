#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hyperfix/solve.hpp"
#include "hyperfix/term.hpp"

namespace hyperfix {

/// Context-free grammar over terms; production templates may contain
/// Nonterminal placeholders. The first rule is the start symbol.
struct GrammarRule {
  std::string name;
  Sort sort;
  std::vector<TermRef> alts;
};

struct Grammar {
  std::vector<GrammarRule> rules;

  const GrammarRule* find(const std::string& name) const;
  const GrammarRule& start() const;
  /// Every production well-sorted, every placeholder resolves, and the start
  /// symbol generates at least one finite term.
  void validate() const;
};

/// Literals available to the default grammars, in enumeration order.
struct LiteralPool {
  std::vector<int64_t> ints;          // beyond the always-present 0 and 1
  std::vector<std::string> strings;
};

/// Piece-wise-linear style grammar for Int/Bool locations; string grammars
/// use the argument variables, the pool constants, concatenation and ite with
/// atomic (dis)equality tests. Bool adds true/false only when Bool is the
/// start sort, so degenerate argument lists still generate terms.
Grammar default_grammar(Sort ret, const std::vector<Binder>& args, const LiteralPool& lits);

struct SynthFun {
  std::string name;
  std::vector<Binder> params;
  Sort ret;
  Grammar grammar;
};

struct SygusProblem {
  std::string logic = "ALL";
  std::vector<SynthFun> funs;
  std::vector<Binder> declaredVars;  // implicitly universal
  TermRef constraint = mk_true();

  void validate() const;
};

/// Deterministic SyGuS-IF v2 rendering; serializing twice is byte-identical.
std::string serialize_sygus(const SygusProblem& p);

/// Minimal SyGuS-IF reader covering what serialize_sygus emits; used for the
/// round-trip check and by the finite-domain search tool.
SygusProblem parse_sygus(const std::string& text);

/// Parses solver answers: a sequence of (define-fun ...) forms, or the
/// markers infeasible / fail / unknown.
struct SolverAnswer {
  enum Status { Solved, Infeasible, Unknown } status = Unknown;
  std::vector<std::pair<std::string, FunDef>> defs;
};
SolverAnswer parse_solver_answer(const std::string& text);

bool grammar_derivable(const Grammar& g, const TermRef& term);

/// Size-ordered term enumeration from a grammar; candidate order is the
/// documented tie-break (production order, then slot partitions with earlier
/// slots smallest). Used by the finite-domain search tool and by tests.
class GrammarEnumerator {
 public:
  explicit GrammarEnumerator(const Grammar& g) : g_(&g) {}
  const std::vector<TermRef>& terms(const std::string& nt, int size);
  static constexpr int kMaxSize = 64;

 private:
  const Grammar* g_;
  std::map<std::pair<std::string, int>, std::vector<TermRef>> memo_;
};

struct RepairCandidate {
  std::vector<TermRef> exprs;  // one per repair location / synthesis symbol
  double solverSeconds = 0;
  int iteration = 0;

  size_t size_nodes() const;  // AST node count across all expressions
};

struct SygusOutcome {
  enum Status { Solved, Infeasible, Unknown } status = Unknown;
  std::vector<TermRef> solutions;  // aligned with SygusProblem::funs
  double seconds = 0;
  std::string raw;                 // solver transcript
  std::string error;               // set on contract violations
};

/// External solver driver: serializes the problem, invokes the configured
/// command ({file} placeholder), parses define-funs back, and enforces the
/// solver contract (arity, sorts, grammar-derivability).
class SygusEngine {
 public:
  SygusEngine(std::string cmdTemplate, std::string runDir, double timeoutSeconds = 120)
      : cmd_(std::move(cmdTemplate)), runDir_(std::move(runDir)), timeout_(timeoutSeconds) {}

  SygusOutcome solve(const SygusProblem& p);

  const std::vector<std::string>& transcripts() const { return transcripts_; }

 private:
  std::string cmd_;
  std::string runDir_;
  double timeout_;
  int counter_ = 0;
  std::vector<std::string> transcripts_;
};

}  // namespace hyperfix

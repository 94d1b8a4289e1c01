#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hyperfix/encode.hpp"
#include "hyperfix/semantics.hpp"
#include "hyperfix/sygus.hpp"

namespace hyperfix {

/// Program with each repair location replaced by a fresh function symbol
/// application, plus the replaced expressions and per-location signatures.
struct Skeleton {
  Program program;
  std::vector<SynthFun> funs;          // grammars filled in later by the caller
  std::vector<FunDef> originals;       // e_P, one per location (params = fun params)
  std::vector<int> locationStmtIds;
};

/// Replaces each marked assignment's right-hand side or branch/loop guard by
/// f_i(args); the argument list is every declared variable assigned or read
/// before the location plus the formula's variables (declaration order),
/// narrowed by an override when given.
Skeleton instrument(const Program& p, const HyperLtlFormula* f = nullptr,
                    const std::map<int, std::vector<std::string>>& argOverrides = {});

/// Substitutes concrete expressions for the function symbols (beta-reduced)
/// and strips the repair markers; the result is a plain hole-free program.
Program apply_patch(const Skeleton& sk, const std::vector<TermRef>& exprs);

enum class BoundedVerdict { HoldsBounded, Violated, Inconclusive };

struct VerifyResult {
  BoundedVerdict verdict = BoundedVerdict::Inconclusive;
  std::string note;
  bool exact = false;  // all paths maximal and within bounds (no cuts)
  size_t pathCount = 0;
};

struct VerifyConfig {
  ExploreBounds bounds;
  FiniteDomain domain;            // interpretation domain for the decision
  SmtBackend* external = nullptr; // optional external solver for the decision
};

/// Path exploration plus a decision of the satisfaction encoding. With all
/// paths maximal the verdict is exact; with cut paths, `Violated` is sound for
/// universal-only formulas and `HoldsBounded` for existential-only ones.
VerifyResult verify_bounded(const Program& q, const HyperLtlFormula& f, const VerifyConfig& cfg);

struct RepairConfig {
  ExploreBounds bounds;
  int maxIterations = 10;
  double timeoutSeconds = 120;
  FiniteDomain domain;
  std::string solverCmd;                              // SyGuS command template
  std::string runDir = "hyperfix-run";
  std::map<int, Grammar> grammarOverrides;            // per location id
  std::map<int, std::vector<std::string>> argOverrides;
  LiteralPool extraLiterals;                          // appended to the auto pool
  std::optional<std::vector<std::string>> stringPool; // full override when set
  std::optional<std::vector<int64_t>> intPool;
  bool prunePathCombinations = true;
  int finalUnrollFactor = 2;  // final re-verification explores at factor * unroll
};

struct IterationLog {
  int iteration = 0;               // 0 = initial candidate
  std::vector<std::string> exprs;  // pretty-printed candidate expressions
  size_t sizeNodes = 0;
  double solverSeconds = 0;
  size_t preservedCount = 0;       // oracle evidence on the configured domain
  bool preservedGrew = false;
};

struct RepairReport {
  enum Outcome {
    NoRepairNeeded,
    Repaired,
    NoRepairInGrammar,   // initial constraint infeasible within grammar/bounds
    SolverFailed,        // unknown on the initial query
  } outcome = SolverFailed;

  std::vector<IterationLog> iterations;
  int improvementIterations = 0;  // accepted improvement rounds
  std::string stopReason;
  bool bestSoFarOnUnknown = false;

  std::string finalSource;
  std::vector<std::string> finalExprs;
  size_t solutionSize = 0;
  double totalSeconds = 0;
  double solverSeconds = 0;
  int locations = 0;

  std::string boundedVerdict;       // re-verification at the larger bound
  std::string oracleVerdict;        // brute-force check on the domain
  size_t domainSize = 0;
  std::string constraintFile;       // last emitted problem (for diagnostics)

  std::string to_json(bool pretty = true) const;
  std::string to_table_row(const std::string& name) const;
};

/// String and integer literals of the program and formula (plus extras), in
/// first-occurrence order; feeds the default grammars.
LiteralPool collect_literal_pool(const Program& p, const HyperLtlFormula& f,
                                 const LiteralPool& extra = {});

/// The iterative repair loop: instrument, explore the skeleton's paths once,
/// solve the satisfaction constraint for an initial candidate, then repeatedly
/// strengthen with the improvement constraint until it becomes infeasible, the
/// iteration cap is reached, or the solver gives up (best-so-far).
RepairReport iterative_repair(const Program& p, const HyperLtlFormula& f, const RepairConfig& cfg);

/// Non-iterative variant: a single satisfaction query, then re-verification.
RepairReport direct_repair(const Program& p, const HyperLtlFormula& f, const RepairConfig& cfg);

}  // namespace hyperfix

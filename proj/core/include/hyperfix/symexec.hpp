#pragma once

#include <map>
#include <string>
#include <vector>

#include "hyperfix/lang.hpp"
#include "hyperfix/solve.hpp"

namespace hyperfix {

/// Total map from program variables (by declaration index) to expressions over
/// the initial-variable symbols; function-symbol applications may appear.
struct SymbolicStore {
  std::vector<TermRef> vals;
};

/// One branch decision along a path; shared-prefix positions identify the
/// same guard occurrence across paths of a common skeleton.
struct BranchChoice {
  int stmtId;
  bool taken;
  bool guardHasHole;
  TermRef guard;  // symbolic guard at the decision point
};

struct SymbolicPath {
  TermRef alpha = mk_true();
  std::vector<TermRef> alphaParts;       // conjuncts in decision order
  std::vector<SymbolicStore> obs;        // beta
  bool maximal = false;
  bool depthExhausted = false;
  std::string choices;                   // '1' = then/enter, '0' = else/exit
  std::vector<BranchChoice> branches;
};

struct ExploreBounds {
  int unrollPerLoop = 3;
  int maxObserves = 64;
  size_t maxPaths = 4096;
  bool pruneUnsat = true;
};

struct ExploreResult {
  std::vector<SymbolicPath> paths;       // sorted by choice string
  bool syntacticPruningOnly = false;     // no solver backend was available
  bool pathLimitHit = false;
  int prunedUnsat = 0;
  int satUnknown = 0;

  std::vector<SymbolicPath> maximal_paths() const;
  /// Paths usable for universal reasoning: every explored path, maximal or not.
  const std::vector<SymbolicPath>& all_paths() const { return paths; }
};

/// Explores every path reachable within the bounds; paths cut by a bound carry
/// depthExhausted. With a solver backend, paths with provably unsatisfiable
/// conditions are dropped; without one, pruning degrades to the conflict rules
/// of the finite-model backend and the result is flagged.
ExploreResult explore_paths(const Program& p, const ExploreBounds& bounds,
                            SmtBackend* solver = nullptr);

SatResult path_satisfiable(const TermRef& alpha, SmtBackend& backend);

/// Substitute concrete bodies for function symbols in every path (P[e]);
/// branch metadata is preserved so path-combination pruning stays valid.
std::vector<SymbolicPath> substitute_paths(const std::vector<SymbolicPath>& paths,
                                           const std::map<std::string, FunDef>& defs);

/// Two paths of one skeleton contradict syntactically when they take opposite
/// branches on a shared hole-free guard occurrence.
bool paths_syntactically_contradict(const SymbolicPath& a, const SymbolicPath& b);

std::string paths_to_string(const std::vector<SymbolicPath>& paths, const Program& p);

}  // namespace hyperfix

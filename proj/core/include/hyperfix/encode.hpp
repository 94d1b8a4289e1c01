#pragma once

#include <string>
#include <vector>

#include "hyperfix/nsa.hpp"
#include "hyperfix/symexec.hpp"

namespace hyperfix {

/// Trace variables bound to symbolic observation sequences (prefix order).
struct PathAssignment {
  std::vector<std::pair<std::string, const std::vector<SymbolicStore>*>> entries;

  size_t min_length() const;
};

struct AccStats {
  size_t memoNodes = 0;  // distinct acc_{q,i} sub-terms; <= |Q| * (minlen+1)
};

/// Word acceptance of the automaton on the observation sequences in delta:
/// a disjunction over initial states of acc_{q,0}; acc_{q,i} is true once i
/// reaches the shortest sequence, otherwise a disjunction over transitions
/// whose letter is checked by instantiating each atom with the step-i store
/// expression, re-indexed by the owning trace variable. Intermediate nodes
/// are memoized, so the result is a DAG.
TermRef build_acc(const Nsa& nsa, const PathAssignment& delta, const Program& p,
                  AccStats* stats = nullptr);

/// Fig-style recursive encoding of the quantifier prefix over a path set:
/// existential quantifiers pick a path disjunctively, universal ones conjoin
/// implications; the base case is build_acc. Empty path sets collapse to the
/// empty conjunction/disjunction.
TermRef build_enc(const HyperLtlFormula& f, const std::vector<SymbolicPath>& paths,
                  const Program& p);

/// Fully-transparent-repair constraint: inputs on which the two path sets can
/// produce different outputs must participate in some n-tuple of original
/// paths violating the body. Universal-only formulas required.
TermRef build_trans(const HyperLtlFormula& f, const std::vector<SymbolicPath>& pathsP,
                    const std::vector<SymbolicPath>& pathsQ,
                    const std::vector<std::string>& xOut, const Program& p);

struct IterStats {
  size_t triplesTotal = 0;
  size_t triplesPruned = 0;
};

/// Strict-improvement constraint over path triples with min-length output
/// comparison windows; triples whose shared hole-free branch prefix
/// contradicts are pruned syntactically (optionally settled by a solver).
TermRef build_iter(const std::vector<SymbolicPath>& pathsP,
                   const std::vector<SymbolicPath>& pathsS,
                   const std::vector<SymbolicPath>& pathsQ,
                   const std::vector<std::string>& xOut, const Program& p,
                   bool prune = true, SmtBackend* pruneSolver = nullptr,
                   IterStats* stats = nullptr);

}  // namespace hyperfix

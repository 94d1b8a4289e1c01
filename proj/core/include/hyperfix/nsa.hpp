#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hyperfix/lang.hpp"

namespace hyperfix {

/// Nondeterministic safety automaton over the alphabet 2^F, F the body's
/// theory atoms in canonical (first-occurrence) order. Letters are bitmasks
/// assigning every atom. A finite word is accepted iff some run exists on it.
struct Nsa {
  std::vector<TermRef> atoms;              // F, canonical order; |F| <= 16
  int numStates = 0;
  std::vector<int> initial;
  struct Transition {
    int from;
    uint32_t letter;
    int to;
  };
  std::vector<Transition> transitions;     // sorted (from, letter, to)
  std::vector<std::vector<int>> bySource;  // transition indices per source state

  size_t alphabet_size() const { return size_t{1} << atoms.size(); }
};

/// Formula-expansion tableau for the safety fragment (atoms, And, Or, Next,
/// WeakUntil; W unfolded as psi2 | (psi1 & X(psi1 W psi2))). States are
/// canonicalized obligation sets; unreachable states are dropped.
Nsa ltl_to_nsa(const LtlRef& body);

bool nsa_accepts(const Nsa& a, const std::vector<uint32_t>& word);

std::string nsa_to_string(const Nsa& a);

}  // namespace hyperfix

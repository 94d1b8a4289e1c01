#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hyperfix/lang.hpp"

namespace hyperfix {

struct Value {
  Sort sort = Sort::Int;
  int64_t i = 0;       // Int value / Bool 0-1
  std::string s;       // String payload

  static Value of_int(int64_t v) { return {Sort::Int, v, {}}; }
  static Value of_bool(bool v) { return {Sort::Bool, v ? 1 : 0, {}}; }
  static Value of_string(std::string v) { return {Sort::String, 0, std::move(v)}; }

  bool operator==(const Value& o) const {
    return sort == o.sort && i == o.i && s == o.s;
  }
  bool operator<(const Value& o) const {
    if (sort != o.sort) return sort < o.sort;
    if (i != o.i) return i < o.i;
    return s < o.s;
  }
  std::string repr() const;
};

/// Total map from the program's declared variables to values (by index).
struct Store {
  std::vector<Value> vals;
  bool operator==(const Store& o) const { return vals == o.vals; }
};

struct ObservationSequence {
  std::vector<Store> obs;
  bool terminated = true;  // false = fuel exhausted
};

/// Evaluate a program expression (no quantifiers, no holes) under a store.
Value eval_expr(const TermRef& e, const Program& p, const Store& st);

/// Deterministic small-step run collecting one store snapshot per observe.
ObservationSequence run_obs(const Program& p, const Store& sigma, int64_t fuel);

// --- Finite enumeration domains ----------------------------------------------

class FiniteDomain {
 public:
  std::vector<int64_t> ints{0, 1, 2};
  std::vector<std::string> strings{""};
  std::map<std::string, std::vector<Value>> perVar;  // optional per-variable values

  static constexpr size_t kMaxEnumeration = 1000000;

  /// Lexicon rule: "" first, then the string literals of program + formula in
  /// first-occurrence order, then their pairwise concatenations, deduplicated.
  static std::vector<std::string> auto_lexicon(const Program& p, const HyperLtlFormula* f);

  std::vector<Value> values_for(const VarDecl& v) const;
  /// Total number of stores; throws when it exceeds kMaxEnumeration.
  size_t enumeration_size(const Program& p) const;
  std::vector<Store> enumerate_stores(const Program& p) const;
};

// --- Oracles ------------------------------------------------------------------

struct OracleVerdict {
  enum Kind { True, False, Inconclusive } kind;
  std::string note;
  bool ok() const { return kind == True; }
};

/// Brute-force HyperLTL satisfaction over the traces of p enumerated on dom.
OracleVerdict oracle_check_hyperltl(const Program& p, const HyperLtlFormula& f,
                                    const FiniteDomain& dom, int64_t fuel = 10000);

/// Indices into FiniteDomain::enumerate_stores order.
struct PreservedSet {
  std::vector<uint8_t> mask;
  size_t count = 0;

  bool subset_of(const PreservedSet& o) const;
  bool strict_subset_of(const PreservedSet& o) const;
  bool operator==(const PreservedSet& o) const { return mask == o.mask; }
};

/// Stores where obs(P, s) and obs(Q, s) agree on X_out position-wise; sequences
/// of different lengths disagree beyond the shorter prefix.
PreservedSet oracle_preserved_inputs(const Program& p, const Program& q,
                                     const std::vector<std::string>& xOut,
                                     const FiniteDomain& dom, int64_t fuel = 10000);

/// Def-style check: q satisfies f, and every input where q's output deviates
/// from p participates in some n-tuple of p-traces violating the body.
OracleVerdict oracle_fully_transparent(const Program& p, const Program& q,
                                       const HyperLtlFormula& f,
                                       const std::vector<std::string>& xOut,
                                       const FiniteDomain& dom, int64_t fuel = 10000);

/// Def-style check: q satisfies f, preserved(p,q) >= preserved(p,s) pointwise,
/// and the inclusion is strict.
OracleVerdict oracle_better_repair(const Program& p, const Program& s, const Program& q,
                                   const HyperLtlFormula& f,
                                   const std::vector<std::string>& xOut,
                                   const FiniteDomain& dom, int64_t fuel = 10000);

/// Canonically sorted JSON for test fixtures (verdict or preserved inputs).
std::string oracle_verdict_to_json(const OracleVerdict& v);
std::string preserved_set_to_json(const PreservedSet& s, const Program& p,
                                  const FiniteDomain& dom);

}  // namespace hyperfix

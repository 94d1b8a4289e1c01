#include <functional>
#include <random>

#include "doctest.h"
#include "hyperfix/nsa.hpp"

using namespace hyperfix;

namespace {

// Reference semantics on finite words: past the end everything holds
// (shortest-trace rule); weak-until scans within the word.
bool eval_word(const LtlRef& l, const std::vector<uint32_t>& w, size_t i,
               const std::map<const Term*, int>& atomBit) {
  if (i >= w.size()) return true;
  switch (l->kind) {
    case LtlKind::True: return true;
    case LtlKind::False: return false;
    case LtlKind::Atom: return (w[i] >> atomBit.at(l->atom.get())) & 1;
    case LtlKind::And:
      return eval_word(l->a, w, i, atomBit) && eval_word(l->b, w, i, atomBit);
    case LtlKind::Or:
      return eval_word(l->a, w, i, atomBit) || eval_word(l->b, w, i, atomBit);
    case LtlKind::Next: return eval_word(l->a, w, i + 1, atomBit);
    case LtlKind::WeakUntil: {
      for (size_t j = i; j < w.size(); ++j) {
        if (eval_word(l->b, w, j, atomBit)) return true;
        if (!eval_word(l->a, w, j, atomBit)) return false;
      }
      return true;
    }
  }
  return false;
}

std::map<const Term*, int> bits_of(const Nsa& a) {
  std::map<const Term*, int> m;
  for (size_t i = 0; i < a.atoms.size(); ++i) m[a.atoms[i].get()] = static_cast<int>(i);
  return m;
}

LtlRef atom(const char* name) { return ltl_atom(mk_var(name, Sort::Bool, "p")); }

// All bodies with up to `maxAtoms` distinct atoms and `maxNodes` subformulas.
void enumerate_bodies(int maxNodes, std::vector<LtlRef>& out) {
  std::vector<std::vector<LtlRef>> bySize(maxNodes + 1);
  bySize[1] = {ltl_true(), ltl_false(), atom("a"), atom("b"), atom("c")};
  for (int n = 2; n <= maxNodes; ++n) {
    for (const auto& sub : bySize[n - 1]) bySize[n].push_back(ltl_next(sub));
    for (int k = 1; k < n - 1; ++k) {
      for (const auto& x : bySize[k])
        for (const auto& y : bySize[n - 1 - k]) {
          bySize[n].push_back(ltl_and(x, y));
          bySize[n].push_back(ltl_or(x, y));
          bySize[n].push_back(ltl_weak_until(x, y));
        }
    }
  }
  for (int n = 1; n <= maxNodes; ++n)
    for (const auto& f : bySize[n]) out.push_back(f);
}

}  // namespace

TEST_CASE("true: one state accepting everything") {
  Nsa a = ltl_to_nsa(ltl_true());
  CHECK(a.numStates == 1);
  CHECK(nsa_accepts(a, {}));
  CHECK(nsa_accepts(a, {0, 0, 0, 0}));
}

TEST_CASE("false accepts only the empty word") {
  Nsa a = ltl_to_nsa(ltl_false());
  CHECK(nsa_accepts(a, {}));
  CHECK(!nsa_accepts(a, {0}));
}

TEST_CASE("next(a): any first letter, then a is required") {
  LtlRef body = ltl_next(atom("a"));
  Nsa a = ltl_to_nsa(body);
  auto bits = bits_of(a);
  REQUIRE(a.atoms.size() == 1);
  CHECK(nsa_accepts(a, {}));
  CHECK(nsa_accepts(a, {0}));      // obligation not yet due
  CHECK(nsa_accepts(a, {0, 1}));
  CHECK(!nsa_accepts(a, {0, 0}));
  CHECK(nsa_accepts(a, {1, 1, 0}));  // after step 1 everything is allowed
}

TEST_CASE("a W false behaves like always-a") {
  LtlRef body = ltl_weak_until(atom("a"), ltl_false());
  Nsa a = ltl_to_nsa(body);
  CHECK(nsa_accepts(a, {1, 1, 1}));
  CHECK(!nsa_accepts(a, {1, 0}));
  CHECK(!nsa_accepts(a, {0}));
  CHECK(nsa_accepts(a, {}));
}

TEST_CASE("alphabet guard rejects more than 16 atoms") {
  LtlRef body = ltl_true();
  for (int i = 0; i < 17; ++i) {
    body = ltl_and(body, ltl_atom(mk_var("v" + std::to_string(i), Sort::Bool, "p")));
  }
  CHECK_THROWS_AS(ltl_to_nsa(body), DiagnosticError);
}

TEST_CASE("agreement with direct evaluation (<=5 nodes here; the acceptance suite runs <=6)") {
  std::vector<LtlRef> bodies;
  enumerate_bodies(5, bodies);
  size_t tested = 0;
  for (const auto& body : bodies) {
    Nsa a = ltl_to_nsa(body);
    if (a.atoms.size() > 3) continue;
    auto bits = bits_of(a);
    size_t letters = size_t{1} << a.atoms.size();
    std::function<void(std::vector<uint32_t>&)> walk = [&](std::vector<uint32_t>& w) {
      bool direct = eval_word(body, w, 0, bits);
      bool automaton = nsa_accepts(a, w);
      if (direct != automaton) {
        CAPTURE(pretty_print_ltl(body));
        CAPTURE(w.size());
        REQUIRE(direct == automaton);
      }
      ++tested;
      if (w.size() == 4) return;
      for (uint32_t l = 0; l < letters; ++l) {
        w.push_back(l);
        walk(w);
        w.pop_back();
      }
    };
    std::vector<uint32_t> w;
    walk(w);
  }
  CHECK(tested > 100000);  // several million word checks across ~3000 bodies
}

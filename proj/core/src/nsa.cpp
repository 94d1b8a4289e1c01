#include "hyperfix/nsa.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace hyperfix {

namespace {

// Pool of structurally distinct subformulas so obligation sets can be small
// sorted vectors of ids.
struct FormulaPool {
  std::vector<LtlRef> nodes;
  std::map<std::tuple<int, const Term*, int, int>, int> index;  // (kind, atom, a, b)

  int id(const LtlRef& l) {
    int ia = l->a ? id(l->a) : -1;
    int ib = l->b ? id(l->b) : -1;
    auto key = std::make_tuple(static_cast<int>(l->kind), l->atom.get(), ia, ib);
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    int n = static_cast<int>(nodes.size());
    nodes.push_back(l);
    index.emplace(key, n);
    return n;
  }
};

using Obligations = std::vector<int>;  // sorted, unique

Obligations normalized(std::set<int> s) { return Obligations(s.begin(), s.end()); }

}  // namespace

Nsa ltl_to_nsa(const LtlRef& body) {
  FormulaPool pool;
  int root = pool.id(body);

  // Atom set F in first-occurrence order.
  std::vector<TermRef> atoms;
  std::map<const Term*, int> atomBit;
  std::function<void(const LtlRef&)> collect = [&](const LtlRef& l) {
    if (!l) return;
    if (l->kind == LtlKind::Atom) {
      if (!atomBit.count(l->atom.get())) {
        atomBit[l->atom.get()] = static_cast<int>(atoms.size());
        atoms.push_back(l->atom);
      }
      return;
    }
    collect(l->a);
    collect(l->b);
  };
  collect(body);
  if (atoms.size() > 16)
    throw DiagnosticError("body has " + std::to_string(atoms.size()) +
                          " distinct atoms; the 2^F alphabet is capped at |F| <= 16");

  // Next-obligation alternatives, defined over pool ids.
  std::function<void(int, uint32_t, std::vector<std::set<int>>&)> alts =
      [&](int f, uint32_t letter, std::vector<std::set<int>>& out) {
        const LtlRef& l = pool.nodes[f];
        switch (l->kind) {
          case LtlKind::True:
            out.push_back({});
            return;
          case LtlKind::False:
            return;
          case LtlKind::Atom:
            if (letter & (uint32_t{1} << atomBit.at(l->atom.get()))) out.push_back({});
            return;
          case LtlKind::And: {
            std::vector<std::set<int>> a, b;
            alts(pool.id(l->a), letter, a);
            if (a.empty()) return;
            alts(pool.id(l->b), letter, b);
            for (const auto& x : a)
              for (const auto& y : b) {
                std::set<int> u = x;
                u.insert(y.begin(), y.end());
                out.push_back(std::move(u));
              }
            return;
          }
          case LtlKind::Or: {
            alts(pool.id(l->a), letter, out);
            alts(pool.id(l->b), letter, out);
            return;
          }
          case LtlKind::Next:
            out.push_back({pool.id(l->a)});
            return;
          case LtlKind::WeakUntil: {
            // psi1 W psi2 == psi2 | (psi1 & X(psi1 W psi2))
            alts(pool.id(l->b), letter, out);
            std::vector<std::set<int>> a;
            alts(pool.id(l->a), letter, a);
            for (auto& x : a) {
              x.insert(f);
              out.push_back(std::move(x));
            }
            return;
          }
        }
      };

  // Explore obligation-set states from {body}.
  std::map<Obligations, int> stateIndex;
  std::vector<Obligations> states;
  auto state_id = [&](const Obligations& o) {
    auto it = stateIndex.find(o);
    if (it != stateIndex.end()) return std::make_pair(it->second, false);
    int n = static_cast<int>(states.size());
    states.push_back(o);
    stateIndex.emplace(o, n);
    return std::make_pair(n, true);
  };

  Nsa nsa;
  nsa.atoms = atoms;
  Obligations init{root};
  state_id(init);
  nsa.initial = {0};

  size_t alphabet = size_t{1} << atoms.size();
  std::vector<std::set<std::pair<uint32_t, int>>> trans;  // per state, dedup
  for (size_t s = 0; s < states.size(); ++s) {
    trans.resize(states.size());
    Obligations obl = states[s];
    for (uint32_t letter = 0; letter < alphabet; ++letter) {
      // Combine alternatives across all obligations in the set.
      std::vector<std::set<int>> acc{{}};
      bool dead = false;
      for (int f : obl) {
        std::vector<std::set<int>> fAlts;
        alts(f, letter, fAlts);
        if (fAlts.empty()) {
          dead = true;
          break;
        }
        // Deduplicate alternatives of a single obligation.
        std::set<Obligations> fSet;
        for (auto& x : fAlts) fSet.insert(normalized(std::move(x)));
        std::vector<std::set<int>> next;
        for (const auto& cur : acc)
          for (const auto& add : fSet) {
            std::set<int> u = cur;
            u.insert(add.begin(), add.end());
            next.push_back(std::move(u));
          }
        acc = std::move(next);
      }
      if (dead) continue;
      std::set<Obligations> nexts;
      for (auto& x : acc) nexts.insert(normalized(std::move(x)));
      for (const auto& nx : nexts) {
        auto [id, fresh] = state_id(nx);
        trans.resize(states.size());
        trans[s].emplace(letter, id);
      }
    }
  }

  nsa.numStates = static_cast<int>(states.size());
  for (size_t s = 0; s < states.size(); ++s)
    for (const auto& [letter, to] : trans[s])
      nsa.transitions.push_back({static_cast<int>(s), letter, to});
  std::sort(nsa.transitions.begin(), nsa.transitions.end(), [](const auto& a, const auto& b) {
    return std::tie(a.from, a.letter, a.to) < std::tie(b.from, b.letter, b.to);
  });
  nsa.bySource.assign(nsa.numStates, {});
  for (size_t i = 0; i < nsa.transitions.size(); ++i)
    nsa.bySource[nsa.transitions[i].from].push_back(static_cast<int>(i));
  return nsa;
}

bool nsa_accepts(const Nsa& a, const std::vector<uint32_t>& word) {
  std::set<int> cur(a.initial.begin(), a.initial.end());
  if (cur.empty()) return false;
  for (uint32_t letter : word) {
    std::set<int> next;
    for (int s : cur)
      for (int ti : a.bySource[s]) {
        const auto& t = a.transitions[ti];
        if (t.letter == letter) next.insert(t.to);
      }
    if (next.empty()) return false;
    cur = std::move(next);
  }
  return true;
}

std::string nsa_to_string(const Nsa& a) {
  std::ostringstream os;
  os << "atoms:";
  for (size_t i = 0; i < a.atoms.size(); ++i)
    os << " [" << i << "] " << pretty_print_expr(a.atoms[i]);
  os << "\nstates: " << a.numStates << "\ninitial:";
  for (int s : a.initial) os << " " << s;
  os << "\n";
  for (const auto& t : a.transitions) {
    os << "  " << t.from << " --";
    for (size_t i = 0; i < a.atoms.size(); ++i) os << ((t.letter >> i) & 1 ? '1' : '0');
    os << "--> " << t.to << "\n";
  }
  return os.str();
}

}  // namespace hyperfix

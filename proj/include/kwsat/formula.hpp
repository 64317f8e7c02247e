#pragma once

// Multiset CNF formulas for the cardinality-constrained MaxSAT problem:
// maximize the satisfied clause mass over assignments that set at most k
// variables to true.  A clause is a pair of disjoint variable sets (positive
// and negated occurrences); the formula maps each distinct clause to its
// multiplicity.  Variables are dense 0-based ids internally and 1-based in
// the text format.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "kwsat/rational.hpp"

namespace kwsat {

using VarId = std::uint32_t;

struct Clause {
  std::vector<VarId> pos;  // sorted, duplicate-free
  std::vector<VarId> neg;  // sorted, duplicate-free, disjoint from pos

  bool operator==(const Clause&) const = default;

  // Lexicographic order over the merged literal sequence, each literal keyed
  // by (variable, sign) with the positive sign first.  This is the order
  // clauses appear in on disk, so map iteration yields canonical output.
  std::strong_ordering operator<=>(const Clause& o) const {
    std::size_t i = 0, j = 0, oi = 0, oj = 0;
    auto next = [](const Clause& c, std::size_t& p, std::size_t& n)
        -> std::pair<VarId, int> {
      // returns the smaller-keyed remaining literal; caller checks emptiness
      if (p < c.pos.size() && (n >= c.neg.size() || c.pos[p] <= c.neg[n]))
        return {c.pos[p++], 0};
      return {c.neg[n++], 1};
    };
    while (true) {
      const bool mine = i < pos.size() || j < neg.size();
      const bool theirs = oi < o.pos.size() || oj < o.neg.size();
      if (!mine || !theirs) {
        if (mine == theirs) return std::strong_ordering::equal;
        return mine ? std::strong_ordering::greater : std::strong_ordering::less;
      }
      const auto a = next(*this, i, j);
      const auto b = next(o, oi, oj);
      if (a.first != b.first)
        return a.first < b.first ? std::strong_ordering::less
                                 : std::strong_ordering::greater;
      if (a.second != b.second)
        return a.second < b.second ? std::strong_ordering::less
                                   : std::strong_ordering::greater;
    }
  }

  Count width() const { return pos.size() + neg.size(); }
  bool mentions(VarId v) const {
    return std::binary_search(pos.begin(), pos.end(), v) ||
           std::binary_search(neg.begin(), neg.end(), v);
  }
};

// Normalizing constructor helper: sorts, deduplicates, rejects tautologies.
inline Clause make_clause(std::vector<VarId> pos, std::vector<VarId> neg) {
  auto tidy = [](std::vector<VarId>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  tidy(pos);
  tidy(neg);
  std::vector<VarId> both;
  std::set_intersection(pos.begin(), pos.end(), neg.begin(), neg.end(),
                        std::back_inserter(both));
  if (!both.empty())
    throw std::invalid_argument("tautological clause: variable " +
                                std::to_string(both.front() + 1) +
                                " occurs in both polarities");
  return Clause{std::move(pos), std::move(neg)};
}

struct Formula {
  VarId n_vars = 0;
  std::map<Clause, Count> clauses;  // distinct clause -> multiplicity >= 1

  bool operator==(const Formula&) const = default;

  // Adds mult copies, merging with an existing identical clause.
  void add(Clause c, Count mult) {
    if (mult == 0) return;
    clauses[std::move(c)] += mult;
  }
};

// An assignment is identified with the set of variables made true.
struct Solution {
  std::vector<VarId> true_vars;  // sorted, duplicate-free

  bool operator==(const Solution&) const = default;
  Count size() const { return true_vars.size(); }
  bool contains(VarId v) const {
    return std::binary_search(true_vars.begin(), true_vars.end(), v);
  }
};

inline Solution make_solution(std::vector<VarId> vars) {
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return Solution{std::move(vars)};
}

// Total multiplicity over all clauses.
inline Count clause_mass(const Formula& phi) {
  Count m = 0;
  for (const auto& [c, mult] : phi.clauses) m += mult;
  return m;
}

// Mass of clauses with at least one negated literal.
inline Count negative_clause_mass(const Formula& phi) {
  Count m = 0;
  for (const auto& [c, mult] : phi.clauses)
    if (!c.neg.empty()) m += mult;
  return m;
}

inline Count distinct_clause_count(const Formula& phi) { return phi.clauses.size(); }

// Satisfied clause mass under solution y: a clause holds iff some positive
// variable is true or some negated variable is false.
inline Count val(const Formula& phi, const Solution& y) {
  for (VarId v : y.true_vars)
    if (v >= phi.n_vars)
      throw std::invalid_argument("solution variable " + std::to_string(v + 1) +
                                  " outside formula universe");
  Count total = 0;
  for (const auto& [c, mult] : phi.clauses) {
    bool sat = false;
    for (VarId v : c.pos)
      if (y.contains(v)) {
        sat = true;
        break;
      }
    if (!sat)
      for (VarId v : c.neg)
        if (!y.contains(v)) {
          sat = true;
          break;
        }
    if (sat) total += mult;
  }
  return total;
}

// Number of clause copies mentioning v in either polarity.
inline Count degree(const Formula& phi, VarId v) {
  Count d = 0;
  for (const auto& [c, mult] : phi.clauses)
    if (c.mentions(v)) d += mult;
  return d;
}

// degree() for every variable in one pass.
inline std::vector<Count> variable_degrees(const Formula& phi) {
  std::vector<Count> deg(phi.n_vars, 0);
  for (const auto& [c, mult] : phi.clauses) {
    for (VarId v : c.pos) deg[v] += mult;
    for (VarId v : c.neg) deg[v] += mult;
  }
  return deg;
}

// Variables with at least one negated occurrence, ascending.
inline std::vector<VarId> negative_vars(const Formula& phi) {
  std::vector<char> seen(phi.n_vars, 0);
  for (const auto& [c, mult] : phi.clauses)
    for (VarId v : c.neg) seen[v] = 1;
  std::vector<VarId> out;
  for (VarId v = 0; v < phi.n_vars; ++v)
    if (seen[v]) out.push_back(v);
  return out;
}

// Variables with any occurrence at all, ascending.
inline std::vector<VarId> occurring_vars(const Formula& phi) {
  std::vector<char> seen(phi.n_vars, 0);
  for (const auto& [c, mult] : phi.clauses) {
    for (VarId v : c.pos) seen[v] = 1;
    for (VarId v : c.neg) seen[v] = 1;
  }
  std::vector<VarId> out;
  for (VarId v = 0; v < phi.n_vars; ++v)
    if (seen[v]) out.push_back(v);
  return out;
}

// Removes the given variables and all their literals.  Clauses that become
// empty are dropped; clauses that become identical are merged.
inline Formula delete_variables(const Formula& phi, const std::vector<VarId>& vars) {
  std::vector<char> gone(phi.n_vars, 0);
  for (VarId v : vars) {
    if (v >= phi.n_vars)
      throw std::invalid_argument("variable " + std::to_string(v + 1) +
                                  " outside formula universe");
    gone[v] = 1;
  }
  Formula out;
  out.n_vars = phi.n_vars;
  for (const auto& [c, mult] : phi.clauses) {
    Clause kept;
    for (VarId v : c.pos)
      if (!gone[v]) kept.pos.push_back(v);
    for (VarId v : c.neg)
      if (!gone[v]) kept.neg.push_back(v);
    if (kept.pos.empty() && kept.neg.empty()) continue;
    out.add(std::move(kept), mult);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Text format.  Lines:
//   c <free-form comment>
//   p mksat <n_vars> <n_clause_lines>
//   <multiplicity> <lit> ... <lit> 0
// Literals are nonzero 1-based ids, negative for negated occurrences.
// Duplicate clause lines merge by summing multiplicities.
// ---------------------------------------------------------------------------

inline Formula parse_formula(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  long long n_vars = 0, n_lines = 0, seen_lines = 0;
  Formula phi;

  auto err = [&](const std::string& msg) {
    throw parse_error("line " + std::to_string(lineno) + ": " + msg);
  };

  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;  // blank line
    if (tok == "c") continue;
    if (tok == "p") {
      if (have_header) err("duplicate header");
      std::string kind;
      if (!(ls >> kind) || kind != "mksat") err("expected 'p mksat <vars> <clauses>'");
      if (!(ls >> n_vars >> n_lines) || n_vars < 0 || n_lines < 0)
        err("bad header counts");
      std::string extra;
      if (ls >> extra) err("trailing tokens after header");
      have_header = true;
      phi.n_vars = static_cast<VarId>(n_vars);
      continue;
    }
    if (!have_header) err("clause before header");

    long long mult;
    {
      std::istringstream cs(line);
      if (!(cs >> mult)) err("bad multiplicity");
      if (mult < 1) err("multiplicity must be >= 1");
      std::vector<VarId> pos, neg;
      long long lit;
      bool terminated = false;
      while (cs >> lit) {
        if (lit == 0) {
          terminated = true;
          std::string extra;
          if (cs >> extra) err("tokens after clause terminator");
          break;
        }
        const long long v = lit < 0 ? -lit : lit;
        if (v > n_vars) err("literal " + std::to_string(lit) + " outside universe");
        (lit > 0 ? pos : neg).push_back(static_cast<VarId>(v - 1));
      }
      if (!terminated) err("clause line missing trailing 0");
      ++seen_lines;
      if (seen_lines > n_lines) err("more clause lines than header declares");
      try {
        phi.add(make_clause(std::move(pos), std::move(neg)),
                static_cast<Count>(mult));
      } catch (const std::invalid_argument& e) {
        err(e.what());
      }
    }
  }
  ++lineno;
  if (!have_header) err("missing header");
  if (seen_lines != n_lines) err("fewer clause lines than header declares");
  return phi;
}

// Canonical serialization: clause lines in the map's (lexicographic) order,
// one line per distinct clause.  parse(serialize(phi)) == phi.
inline std::string serialize_formula(const Formula& phi) {
  std::ostringstream out;
  out << "p mksat " << phi.n_vars << ' ' << phi.clauses.size() << '\n';
  for (const auto& [c, mult] : phi.clauses) {
    out << mult;
    std::size_t i = 0, j = 0;
    while (i < c.pos.size() || j < c.neg.size()) {
      if (i < c.pos.size() && (j >= c.neg.size() || c.pos[i] <= c.neg[j])) {
        out << ' ' << c.pos[i] + 1;
        ++i;
      } else {
        out << ' ' << '-' << c.neg[j] + 1;
        ++j;
      }
    }
    out << " 0\n";
  }
  return out.str();
}

}  // namespace kwsat

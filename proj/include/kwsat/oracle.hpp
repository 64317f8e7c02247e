#pragma once

// Solvers used to estimate the optimum inside the pipeline and to evaluate
// kernels.  Greedy adds the variable with the largest value gain for k
// rounds and, on monotone (negation-free) formulas, is a (1 - 1/e)
// approximation.  BestOfBaselines takes the better of the empty solution,
// every singleton, and Greedy.  Every oracle returns a feasible solution
// together with its exact value, so the estimate never exceeds the optimum
// (which the clause-count reduction's deviation bound relies on), and
// BestOfBaselines is never below OPT/(k+1): each clause satisfied by an
// optimum Y* is satisfied by the empty set or by some singleton {v}, v in Y*.

#include <string>
#include <utility>
#include <vector>

#include "kwsat/brute_force.hpp"
#include "kwsat/formula.hpp"

namespace kwsat {

enum class OracleKind { exact, greedy, best_of_baselines };

inline std::string to_string(OracleKind k) {
  switch (k) {
    case OracleKind::exact: return "exact";
    case OracleKind::greedy: return "greedy";
    case OracleKind::best_of_baselines: return "best-of";
  }
  return "?";
}

inline OracleKind oracle_from_string(const std::string& s) {
  if (s == "exact") return OracleKind::exact;
  if (s == "greedy") return OracleKind::greedy;
  if (s == "best-of") return OracleKind::best_of_baselines;
  throw param_error("unknown oracle '" + s + "' (want exact|greedy|best-of)");
}

inline std::pair<Solution, Count> greedy_solve(const Formula& phi, Count k) {
  IncrementalEval eval(phi);
  std::vector<char> in(phi.n_vars, 0);
  std::vector<VarId> chosen;
  for (Count round = 0; round < k; ++round) {
    const Count base = eval.value();
    Count best_val = base;
    VarId best_var = 0;
    bool found = false;
    for (VarId v = 0; v < phi.n_vars; ++v) {
      if (in[v]) continue;
      eval.push(v);
      if (eval.value() > best_val) {  // strict: ties keep the smaller id
        best_val = eval.value();
        best_var = v;
        found = true;
      }
      eval.pop(v);
    }
    if (!found) break;  // no strictly positive gain left
    eval.push(best_var);
    in[best_var] = 1;
    chosen.push_back(best_var);
  }
  std::sort(chosen.begin(), chosen.end());
  return {Solution{std::move(chosen)}, eval.value()};
}

// Best of: empty set, all singletons (ascending), greedy.  First maximum in
// that order wins.
inline std::pair<Solution, Count> best_of_baselines(const Formula& phi, Count k) {
  Solution best{};
  Count best_val = val(phi, best);
  if (k >= 1) {
    for (VarId v = 0; v < phi.n_vars; ++v) {
      Solution cand{{v}};
      const Count cv = val(phi, cand);
      if (cv > best_val) {
        best_val = cv;
        best = std::move(cand);
      }
    }
    auto [gy, gv] = greedy_solve(phi, k);
    if (gv > best_val) {
      best_val = gv;
      best = std::move(gy);
    }
  }
  return {best, best_val};
}

inline std::pair<Solution, Count> approx_solve(const Formula& phi, Count k,
                                               OracleKind kind,
                                               Count budget = default_enum_budget) {
  switch (kind) {
    case OracleKind::exact: return brute_force_opt(phi, k, budget);
    case OracleKind::greedy: return greedy_solve(phi, k);
    case OracleKind::best_of_baselines: return best_of_baselines(phi, k);
  }
  throw std::logic_error("unreachable oracle kind");
}

}  // namespace kwsat

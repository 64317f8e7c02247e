#pragma once

// Exhaustive reference solver.  Enumerates every solution of size at most k
// in lexicographic order over sorted variable sequences (so the empty set
// first, and [x1 x2] before [x2]); satisfied mass is maintained
// incrementally while variables are pushed and popped, which keeps the whole
// enumeration linear in (#subsets x average degree).

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "kwsat/formula.hpp"
#include "kwsat/rational.hpp"

namespace kwsat {

// Tracks val(phi, Y) for one formula while Y changes one variable at a time.
class IncrementalEval {
 public:
  explicit IncrementalEval(const Formula& phi) {
    by_pos_.resize(phi.n_vars);
    by_neg_.resize(phi.n_vars);
    std::size_t idx = 0;
    for (const auto& [c, mult] : phi.clauses) {
      mult_.push_back(mult);
      pos_true_.push_back(0);
      neg_true_.push_back(0);
      neg_size_.push_back(static_cast<std::uint32_t>(c.neg.size()));
      for (VarId v : c.pos) by_pos_[v].push_back(idx);
      for (VarId v : c.neg) by_neg_[v].push_back(idx);
      // under the empty assignment a clause holds iff it has a negated literal
      if (!c.neg.empty()) value_ += mult;
      ++idx;
    }
  }

  Count value() const { return value_; }

  void push(VarId v) {
    for (std::size_t i : by_pos_[v]) {
      const bool was = sat(i);
      ++pos_true_[i];
      if (!was && sat(i)) value_ += mult_[i];
    }
    for (std::size_t i : by_neg_[v]) {
      const bool was = sat(i);
      ++neg_true_[i];
      if (was && !sat(i)) value_ -= mult_[i];
    }
  }

  void pop(VarId v) {
    for (std::size_t i : by_pos_[v]) {
      const bool was = sat(i);
      --pos_true_[i];
      if (was && !sat(i)) value_ -= mult_[i];
    }
    for (std::size_t i : by_neg_[v]) {
      const bool was = sat(i);
      --neg_true_[i];
      if (!was && sat(i)) value_ += mult_[i];
    }
  }

 private:
  bool sat(std::size_t i) const {
    return pos_true_[i] > 0 || neg_true_[i] < neg_size_[i];
  }

  std::vector<std::vector<std::size_t>> by_pos_, by_neg_;
  std::vector<Count> mult_;
  std::vector<std::uint32_t> pos_true_, neg_true_, neg_size_;
  Count value_ = 0;
};

// Visits every subset of `vars` with size <= k, lexicographically by sorted
// id sequence (empty set first; [v0] before [v0 v1] before [v1]).  push/pop
// fire exactly around each variable's containment, so callers can maintain
// incremental evaluators in lockstep; visit sees the current sorted subset.
template <typename Push, typename Pop, typename Visit>
void walk_solutions(std::span<const VarId> vars, Count k, Push&& push,
                    Pop&& pop, Visit&& visit) {
  std::vector<VarId> current;
  visit(static_cast<const std::vector<VarId>&>(current));
  if (k == 0) return;
  auto rec = [&](auto&& self, std::size_t from) -> void {
    for (std::size_t i = from; i < vars.size(); ++i) {
      current.push_back(vars[i]);
      push(vars[i]);
      visit(static_cast<const std::vector<VarId>&>(current));
      if (current.size() < k) self(self, i + 1);
      pop(vars[i]);
      current.pop_back();
    }
  };
  rec(rec, 0);
}

template <typename Visit>
void for_each_solution(std::span<const VarId> vars, Count k, Visit&& visit) {
  walk_solutions(
      vars, k, [](VarId) {}, [](VarId) {}, std::forward<Visit>(visit));
}

// Optimum over solutions drawn from the given candidate variables only.
// Ties break toward the lexicographically smallest sorted id sequence,
// which is the first maximum in enumeration order.
inline std::pair<Solution, Count> brute_force_opt_over(
    const Formula& phi, Count k, std::span<const VarId> candidates,
    Count budget = default_enum_budget) {
  if (subsets_up_to(candidates.size(), k) > BigInt(budget))
    throw budget_exceeded("solution enumeration over " +
                          std::to_string(candidates.size()) + " variables, k=" +
                          std::to_string(k) + " exceeds budget " +
                          std::to_string(budget));
  IncrementalEval eval(phi);
  std::vector<VarId> best;
  Count best_val = 0;
  bool first = true;
  std::vector<VarId> current;

  auto consider = [&] {
    if (first || eval.value() > best_val) {
      first = false;
      best_val = eval.value();
      best = current;
    }
  };

  consider();
  if (k > 0) {
    auto rec = [&](auto&& self, std::size_t from) -> void {
      for (std::size_t i = from; i < candidates.size(); ++i) {
        current.push_back(candidates[i]);
        eval.push(candidates[i]);
        consider();
        if (current.size() < k) self(self, i + 1);
        eval.pop(candidates[i]);
        current.pop_back();
      }
    };
    rec(rec, 0);
  }
  return {Solution{std::move(best)}, best_val};
}

// Optimum over the full variable universe.
inline std::pair<Solution, Count> brute_force_opt(
    const Formula& phi, Count k, Count budget = default_enum_budget) {
  std::vector<VarId> all(phi.n_vars);
  for (VarId v = 0; v < phi.n_vars; ++v) all[v] = v;
  return brute_force_opt_over(phi, k, all, budget);
}

}  // namespace kwsat

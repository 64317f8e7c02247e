#pragma once

// The (1 - eps)-approximate kernel for K_{a,b}-free Max k-Weight SAT, as a
// chain of four stages.  Each stage is exposed on its own so tests can pin
// its guarantee independently; run_kernel wires them together with the
// accuracy budget split evenly, eps_i = eps/3 per lossy stage, which
// composes to (1 - eps/3)^3 >= 1 - eps.
//
//   stage 0  drop clauses with more than k negated literals (exact)
//   stage I  prune variables whose negated occurrences are spread thinly,
//            then drop all clauses still carrying an unpruned negated literal
//   stage II keep only the q highest-degree positive variables, either
//            outright (high-degree case) or by repeatedly deleting one petal
//            of a large sunflower (low-degree case)
//   stage III rescale clause multiplicities by s ~ eps * OPT / poly(n)
//
// Variable ids are never renumbered: deleted variables simply stop
// occurring, so solutions on the kernel are solutions on the input.

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "kwsat/bigraph.hpp"
#include "kwsat/brute_force.hpp"
#include "kwsat/formula.hpp"
#include "kwsat/oracle.hpp"
#include "kwsat/rational.hpp"

namespace kwsat {

struct PipelineParams {
  Count k = 1;
  Rational eps;     // admissible range: 0 < eps < 1/4
  unsigned a = 1;   // forbidden pattern: complete a-by-b bipartite subgraph
  unsigned b = 1;
};

inline void validate_params(const PipelineParams& p) {
  if (p.a == 0 || p.b == 0) throw param_error("pattern sides a, b must be >= 1");
  if (!(p.eps > 0 && p.eps < Rational(1, 4)))
    throw param_error("eps must lie strictly inside (0, 1/4), got " +
                      format_rational(p.eps));
}

// ---------------------------------------------------------------------------
// Stage 0: a clause with k+1 or more negated literals is satisfied by every
// solution of size <= k, because at least one of its negated variables must
// stay false.  Removing such clauses shifts every value by exactly the
// removed mass.
// ---------------------------------------------------------------------------

inline std::pair<Formula, Count> drop_heavy_negative_clauses(const Formula& phi,
                                                             Count k) {
  Formula out;
  out.n_vars = phi.n_vars;
  Count deleted = 0;
  for (const auto& [c, mult] : phi.clauses) {
    if (c.neg.size() >= k + 1)
      deleted += mult;
    else
      out.add(c, mult);
  }
  return {out, deleted};
}

// ---------------------------------------------------------------------------
// Stage I: negative-side reduction.
// ---------------------------------------------------------------------------

// Normalized negative degree of v with respect to the live set: every clause
// copy with literal -v contributes 1/|neg(C) cap live|.  Requires v live, so
// the denominator is never zero.
inline Rational nndeg(const Formula& phi, const std::vector<VarId>& live, VarId v) {
  if (!std::binary_search(live.begin(), live.end(), v))
    throw std::invalid_argument("nndeg queried for a variable outside the live set");
  Rational out = 0;
  for (const auto& [c, mult] : phi.clauses) {
    if (!std::binary_search(c.neg.begin(), c.neg.end(), v)) continue;
    Count live_neg = 0;
    for (VarId u : c.neg)
      if (std::binary_search(live.begin(), live.end(), u)) ++live_neg;
    out += Rational(mult, live_neg);
  }
  return out;
}

// Incremental view of nndeg for all live variables at once.  remove(v)
// shrinks the live set and redistributes v's clauses onto their remaining
// live negated variables, exactly re-deriving the defining sum.
class NndegTable {
 public:
  explicit NndegTable(const Formula& phi)
      : live_(phi.n_vars, 1), values_(phi.n_vars, Rational(0)),
        by_neg_(phi.n_vars) {
    for (const auto& [c, mult] : phi.clauses) {
      if (c.neg.empty()) continue;
      const std::size_t idx = neg_.size();
      neg_.push_back(c.neg);
      mult_.push_back(mult);
      live_neg_.push_back(static_cast<Count>(c.neg.size()));
      for (VarId v : c.neg) {
        by_neg_[v].push_back(idx);
        values_[v] += Rational(mult, c.neg.size());
      }
    }
  }

  bool is_live(VarId v) const { return live_[v]; }
  const Rational& value(VarId v) const { return values_[v]; }

  void remove(VarId v) {
    if (!live_[v]) throw std::invalid_argument("variable removed twice");
    live_[v] = 0;
    for (std::size_t i : by_neg_[v]) {
      const Count before = live_neg_[i];
      live_neg_[i] = before - 1;
      values_[v] -= Rational(mult_[i], before);
      if (before > 1) {
        const Rational bump =
            Rational(mult_[i], before - 1) - Rational(mult_[i], before);
        for (VarId u : neg_[i])
          if (live_[u]) values_[u] += bump;
      }
    }
  }

  // Live variable of maximum value strictly above tau; smallest id on ties.
  std::optional<VarId> argmax_above(const Rational& tau) const {
    std::optional<VarId> best;
    for (VarId v = 0; v < live_.size(); ++v) {
      if (!live_[v]) continue;
      if (values_[v] > tau && (!best || values_[v] > values_[*best])) best = v;
    }
    return best;
  }

 private:
  std::vector<char> live_;
  std::vector<Rational> values_;
  std::vector<std::vector<std::size_t>> by_neg_;
  std::vector<std::vector<VarId>> neg_;
  std::vector<Count> mult_;
  std::vector<Count> live_neg_;
};

struct Stage1Trace {
  Rational tau;                   // pick threshold, frozen at stage entry
  std::vector<VarId> picked;      // removal order
  Count deleted_clause_mass = 0;  // mass dropped in the final sweep

  bool operator==(const Stage1Trace&) const = default;
};

// Repeatedly removes the variable of maximum normalized negative degree
// while that maximum exceeds tau = eps1/(2k) * (negative clause mass), then
// deletes every clause with a negated literal on a surviving variable.
// Requires the heavy-clause drop to have run first (so k = 0 implies no
// negative clauses remain).
inline std::pair<Formula, Stage1Trace> step1_reduce_negative(
    const Formula& phi, Count k, const Rational& eps1) {
  if (eps1 <= 0) throw param_error("eps1 must be positive");
  Stage1Trace tr;
  const Count neg_mass = negative_clause_mass(phi);
  if (neg_mass == 0) {
    tr.tau = 0;
    return {phi, tr};
  }
  if (k == 0)
    throw param_error("negative-side reduction with k = 0 requires the "
                      "heavy-negative-clause drop to run first");
  tr.tau = eps1 / Rational(2 * k) * Rational(neg_mass);

  NndegTable table(phi);
  std::vector<char> picked_mask(phi.n_vars, 0);
  while (auto v = table.argmax_above(tr.tau)) {
    table.remove(*v);
    picked_mask[*v] = 1;
    tr.picked.push_back(*v);
  }

  Formula out;
  out.n_vars = phi.n_vars;
  for (const auto& [c, mult] : phi.clauses) {
    bool live_neg = false;
    for (VarId u : c.neg)
      if (!picked_mask[u]) {
        live_neg = true;
        break;
      }
    if (live_neg)
      tr.deleted_clause_mass += mult;
    else
      out.add(c, mult);
  }
  return {out, tr};
}

// ---------------------------------------------------------------------------
// Stage II: positive-side reduction.
// ---------------------------------------------------------------------------

enum class Stage2Case { identity, low_degree, sunflower };

inline std::string to_string(Stage2Case c) {
  switch (c) {
    case Stage2Case::identity: return "identity";
    case Stage2Case::low_degree: return "I";
    case Stage2Case::sunflower: return "II";
  }
  return "?";
}

struct Stage2Trace {
  Stage2Case kind = Stage2Case::identity;
  BigInt q;                     // k + a (2bk/eps2)^b, rounded up
  Count tau2 = 0;               // q-th highest positive degree (cases I, II)
  BigInt opt_tilde;             // ceil(k tau2 / eps2), case II only
  std::vector<VarId> deleted;   // case II: deletion order; case I: ascending

  bool operator==(const Stage2Trace&) const = default;
};

// The graph the sunflower rule operates on: alive positive variables of
// degree <= cap on the left, every clause copy of the current formula on the
// right.  Also returns the left-index-to-variable map.
inline std::pair<Bigraph, std::vector<VarId>> low_degree_positive_bigraph(
    const Formula& cur, const std::vector<char>& alive_positive, Count cap) {
  const auto deg = variable_degrees(cur);
  std::vector<VarId> lefts;
  for (VarId v = 0; v < cur.n_vars; ++v)
    if (alive_positive[v] && deg[v] <= cap) lefts.push_back(v);

  constexpr auto none = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> left_index(cur.n_vars, none);
  for (std::uint32_t i = 0; i < lefts.size(); ++i) left_index[lefts[i]] = i;

  Bigraph g;
  g.n_left = lefts.size();
  g.adj.assign(g.n_left, {});
  std::uint32_t r = 0;
  for (const auto& [c, mult] : cur.clauses)
    for (Count copy = 0; copy < mult; ++copy) {
      // positive variables have no negated occurrences, so c.pos suffices
      for (VarId v : c.pos)
        if (left_index[v] != none) g.adj[left_index[v]].push_back(r);
      ++r;
    }
  g.n_right = r;
  return {std::move(g), std::move(lefts)};
}

// One application of the sunflower rule: look for w pairwise-compatible
// petals among the low-degree alive positives and name the victim, the petal
// of minimum degree (smallest id on ties).  Empty when no such sunflower
// exists, which is the rule's stopping condition.
inline std::optional<std::pair<VarId, Sunflower>> sunflower_prune_once(
    const Formula& cur, const std::vector<char>& alive_positive, Count cap,
    const BigInt& w) {
  auto [g, lefts] = low_degree_positive_bigraph(cur, alive_positive, cap);
  if (w > BigInt(lefts.size())) return std::nullopt;
  auto sf = find_sunflower(g, w.convert_to<Count>());
  if (!sf) return std::nullopt;
  const auto deg = variable_degrees(cur);
  VarId victim = lefts[sf->petals.front()];
  for (std::uint32_t p : sf->petals) {
    const VarId v = lefts[p];
    if (deg[v] < deg[victim]) victim = v;
  }
  return std::make_pair(victim, std::move(*sf));
}

// Keeps the q positive variables of highest degree.  If even the q-th degree
// is high (>= 2b/eps2) the others can be deleted outright; otherwise
// low-degree positive variables are removed one sunflower petal at a time
// until no sunflower with opt_tilde + 1 petals remains.
inline std::pair<Formula, Stage2Trace> step2_reduce_positive(
    const Formula& phi, Count k, unsigned a, unsigned b, const Rational& eps2) {
  if (eps2 <= 0) throw param_error("eps2 must be positive");
  if (a == 0 || b == 0) throw param_error("pattern sides a, b must be >= 1");

  Stage2Trace tr;
  std::vector<char> is_neg(phi.n_vars, 0);
  for (VarId v : negative_vars(phi)) is_neg[v] = 1;
  std::vector<VarId> positives;
  for (VarId v = 0; v < phi.n_vars; ++v)
    if (!is_neg[v]) positives.push_back(v);

  tr.q = k == 0 ? BigInt(0)
                : ceil_rational(Rational(k) +
                                Rational(a) * pow_rational(
                                    Rational(BigInt(2) * b * k) / eps2, b));
  if (k == 0 || BigInt(positives.size()) <= tr.q) return {phi, tr};

  const std::size_t q = tr.q.convert_to<std::size_t>();
  auto deg = variable_degrees(phi);
  std::vector<VarId> by_degree = positives;
  std::stable_sort(by_degree.begin(), by_degree.end(),
                   [&](VarId x, VarId y) { return deg[x] > deg[y]; });
  tr.tau2 = deg[by_degree[q - 1]];

  if (Rational(tr.tau2) >= Rational(2 * b) / eps2) {
    tr.kind = Stage2Case::low_degree;
    std::vector<char> keep(phi.n_vars, 0);
    for (std::size_t i = 0; i < q; ++i) keep[by_degree[i]] = 1;
    for (VarId v : positives)
      if (!keep[v]) tr.deleted.push_back(v);
    return {delete_variables(phi, tr.deleted), tr};
  }

  tr.kind = Stage2Case::sunflower;
  tr.opt_tilde = ceil_rational(Rational(k) * Rational(tr.tau2) / eps2);

  Formula cur = phi;
  std::vector<char> alive(phi.n_vars, 0);
  for (VarId v : positives) alive[v] = 1;
  while (auto hit = sunflower_prune_once(cur, alive, tr.tau2, tr.opt_tilde + 1)) {
    cur = delete_variables(cur, {hit->first});
    alive[hit->first] = 0;
    tr.deleted.push_back(hit->first);
  }
  return {cur, tr};
}

// ---------------------------------------------------------------------------
// Stage III: clause-count reduction by multiplicity scaling.
// ---------------------------------------------------------------------------

struct Stage3Trace {
  Rational s = 0;        // scale factor; multiplicities become floor(m/s)
  bool applied = false;  // false when s <= 1 or the formula is empty
  BigInt opt_tilde = 0;  // oracle estimate the scale was derived from

  bool operator==(const Stage3Trace&) const = default;
};

inline std::pair<Formula, Stage3Trace> step3_scale_multiplicities(
    const Formula& phi, Count k, unsigned a, unsigned b, const Rational& eps3,
    OracleKind oracle = OracleKind::best_of_baselines,
    Count budget = default_enum_budget) {
  if (eps3 <= 0) throw param_error("eps3 must be positive");
  if (a == 0 || b == 0) throw param_error("pattern sides a, b must be >= 1");

  Stage3Trace tr;
  const Count n_eff = occurring_vars(phi).size();
  if (n_eff == 0) return {phi, tr};
  const auto [sol, est] = approx_solve(phi, k, oracle, budget);
  tr.opt_tilde = est;
  if (est == 0) return {phi, tr};  // unreachable on nonempty formulas; belt
  const BigInt denom = BigInt(10) * b * pow_bigint(BigInt(2) * n_eff, a);
  tr.s = eps3 * Rational(est) / Rational(denom);
  if (tr.s <= 1) return {phi, tr};

  tr.applied = true;
  Formula out;
  out.n_vars = phi.n_vars;
  for (const auto& [c, mult] : phi.clauses) {
    const BigInt kept = (BigInt(mult) * den(tr.s)) / num(tr.s);
    if (kept > 0) out.add(c, kept.convert_to<Count>());
  }
  return {out, tr};
}

// ---------------------------------------------------------------------------
// Composition.
// ---------------------------------------------------------------------------

struct KernelTrace {
  Count stage0_deleted = 0;
  Stage1Trace stage1;
  Stage2Trace stage2;
  Stage3Trace stage3;

  bool operator==(const KernelTrace&) const = default;
};

struct KernelRun {
  // phi[0] is the input; phi[i] the formula after stage i-1 of {0, I, II, III}
  std::array<Formula, 5> phi;
  KernelTrace trace;
};

inline KernelRun run_kernel_stages(const Formula& phi, const PipelineParams& p,
                                   OracleKind oracle = OracleKind::best_of_baselines,
                                   Count budget = default_enum_budget) {
  validate_params(p);
  const Rational eps_i = p.eps / 3;
  KernelRun run;
  run.phi[0] = phi;
  std::tie(run.phi[1], run.trace.stage0_deleted) =
      drop_heavy_negative_clauses(run.phi[0], p.k);
  std::tie(run.phi[2], run.trace.stage1) =
      step1_reduce_negative(run.phi[1], p.k, eps_i);
  std::tie(run.phi[3], run.trace.stage2) =
      step2_reduce_positive(run.phi[2], p.k, p.a, p.b, eps_i);
  std::tie(run.phi[4], run.trace.stage3) =
      step3_scale_multiplicities(run.phi[3], p.k, p.a, p.b, eps_i, oracle, budget);
  return run;
}

inline std::pair<Formula, KernelTrace> run_kernel(
    const Formula& phi, const PipelineParams& p,
    OracleKind oracle = OracleKind::best_of_baselines,
    Count budget = default_enum_budget) {
  KernelRun run = run_kernel_stages(phi, p, oracle, budget);
  return {std::move(run.phi[4]), std::move(run.trace)};
}

// Closed-form size guarantees of a finished run, checked exactly.  The
// variable bound is guaranteed on K_{a,b}-free inputs; on other inputs the
// comparison is still recorded, it just need not hold.
struct SizeBounds {
  Count stage1_picked = 0;
  Rational stage1_lhs;           // picked count times tau
  Rational stage1_rhs_harmonic;  // negative mass times H_{k+1}
  Rational stage1_rhs_log;       // negative mass times (ln(k+1) + 1), certified upper
  bool stage1_ok = false;

  Count kernel_occurring = 0;
  BigInt vars_bound;  // t + q (+ a (opt_tilde tau2)^b in the sunflower case)
  bool vars_ok = false;

  Count kernel_mass = 0;
  std::optional<BigInt> mass_bound;  // floor(stage-III input mass / s) when applied
  bool mass_ok = false;
};

inline SizeBounds compute_size_bounds(const KernelRun& run,
                                      const PipelineParams& p) {
  SizeBounds out;
  const KernelTrace& tr = run.trace;

  // Picked-variable count: i_fin * tau stays strictly below the negative
  // clause mass times H_{k+1} (and hence times ln(k+1) + 1) whenever any
  // variable was picked at all.
  const Count neg_mass = negative_clause_mass(run.phi[1]);  // stage-I input
  out.stage1_picked = tr.stage1.picked.size();
  out.stage1_lhs = Rational(out.stage1_picked) * tr.stage1.tau;
  out.stage1_rhs_harmonic = Rational(neg_mass) * harmonic(p.k + 1);
  out.stage1_rhs_log =
      Rational(neg_mass) * (ln_upper(Rational(p.k + 1)) + 1);
  out.stage1_ok =
      tr.stage1.picked.empty() || out.stage1_lhs < out.stage1_rhs_harmonic;

  // Variable count: negative variables entering stage II, plus the kept
  // positive block, plus (sunflower case) the low-degree remainder bound.
  // A k = 0 run leaves stage II as an identity with q = 0; record the
  // trivially true bound instead, since no reduction is claimed there.
  const BigInt t = BigInt(negative_vars(run.phi[2]).size());
  const BigInt positives =
      BigInt(run.phi[2].n_vars) - t;  // positive variables entering stage II
  BigInt block = tr.stage2.q;
  if (tr.stage2.kind == Stage2Case::identity && block < positives)
    block = positives;
  out.vars_bound = t + block;
  if (tr.stage2.kind == Stage2Case::sunflower)
    out.vars_bound +=
        BigInt(p.a) * pow_bigint(tr.stage2.opt_tilde * tr.stage2.tau2, p.b);
  out.kernel_occurring = occurring_vars(run.phi[4]).size();
  out.vars_ok = BigInt(out.kernel_occurring) <= out.vars_bound;

  // Clause mass: scaling caps the total at floor(previous mass / s).
  out.kernel_mass = clause_mass(run.phi[4]);
  if (tr.stage3.applied) {
    const Count before = clause_mass(run.phi[3]);
    out.mass_bound = (BigInt(before) * den(tr.stage3.s)) / num(tr.stage3.s);
    out.mass_ok = BigInt(out.kernel_mass) <= *out.mass_bound;
  } else {
    out.mass_ok = true;  // nothing was scaled, no bound claimed
  }
  return out;
}

// Turns a kernel solution back into a solution of the original instance:
// the better of the kernel solution itself (ids are stable, so it is already
// feasible) and a fresh oracle answer on the original, with the empty set as
// a final fallback.  First maximum wins.
inline Solution lift_solution(const Formula& original, Count k,
                              const Solution& y_kernel,
                              OracleKind oracle = OracleKind::exact,
                              Count budget = default_enum_budget) {
  if (y_kernel.size() > k)
    throw std::invalid_argument("kernel solution uses more than k variables");
  std::vector<Solution> candidates;
  candidates.push_back(y_kernel);
  candidates.push_back(approx_solve(original, k, oracle, budget).first);
  candidates.push_back(Solution{});
  Solution best = candidates.front();
  Count best_val = val(original, best);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const Count v = val(original, candidates[i]);
    if (v > best_val) {
      best_val = v;
      best = candidates[i];
    }
  }
  return best;
}

// The full approximation scheme: kernelize, solve the kernel exhaustively
// over its occurring variables, lift.  Guarantees value >= (1 - eps) OPT on
// K_{a,b}-free inputs.
inline std::pair<Solution, Count> fptas_solve(const Formula& phi,
                                              const PipelineParams& p,
                                              Count budget = default_enum_budget) {
  auto [kernel, trace] = run_kernel(phi, p, OracleKind::best_of_baselines, budget);
  const auto occurring = occurring_vars(kernel);
  auto [y_kernel, kernel_val] = brute_force_opt_over(kernel, p.k, occurring, budget);
  Solution lifted = lift_solution(phi, p.k, y_kernel, OracleKind::exact, budget);
  return {lifted, val(phi, lifted)};
}

// ---------------------------------------------------------------------------
// Multiset-to-set transform.
// ---------------------------------------------------------------------------

// Replicates every clause copy ceil(k/eps) times and tags each replica with
// its own fresh positive variable, giving an equivalent instance (up to an
// eps-fraction of the optimum) whose clauses are pairwise distinct.
inline Formula to_set_instance(const Formula& phi, Count k, const Rational& eps) {
  if (eps <= 0) throw param_error("eps must be positive");
  const BigInt r_big = k == 0 ? BigInt(0) : ceil_rational(Rational(k) / eps);
  const BigInt total_fresh = BigInt(clause_mass(phi)) * r_big;
  const BigInt max_vars = BigInt(std::numeric_limits<VarId>::max()) - 1;
  if (BigInt(phi.n_vars) + total_fresh > max_vars)
    throw budget_exceeded("set-form instance would need " +
                          (BigInt(phi.n_vars) + total_fresh).str() + " variables");
  const Count r = r_big.convert_to<Count>();

  Formula out;
  out.n_vars = phi.n_vars + (total_fresh == 0
                                 ? 0
                                 : total_fresh.convert_to<VarId>());
  VarId fresh = phi.n_vars;
  for (const auto& [c, mult] : phi.clauses)
    for (Count copy = 0; copy < mult; ++copy)
      for (Count rep = 0; rep < r; ++rep) {
        Clause tagged = c;
        tagged.pos.push_back(fresh++);  // fresh ids exceed all original ids
        out.add(std::move(tagged), 1);
      }
  return out;
}

}  // namespace kwsat

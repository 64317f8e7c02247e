#include "kwsat/pipeline.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "kwsat/json_io.hpp"
#include "support/test_support.hpp"

using namespace kwsat;

namespace {

Clause C(std::vector<VarId> pos, std::vector<VarId> neg = {}) {
  return make_clause(std::move(pos), std::move(neg));
}

std::vector<VarId> all_vars(const Formula& phi) {
  std::vector<VarId> out(phi.n_vars);
  for (VarId v = 0; v < phi.n_vars; ++v) out[v] = v;
  return out;
}

// exact optimum for desk-scale checks
Count opt_value(const Formula& phi, Count k) { return brute_force_opt(phi, k).second; }

}  // namespace

// --- stage 0 -----------------------------------------------------------------

TEST_CASE("heavy negative clauses are always satisfied, so dropping is exact") {
  Formula phi;
  phi.n_vars = 3;
  phi.add(C({}, {0, 1}), 4);  // two negated literals
  phi.add(C({}, {0}), 2);
  phi.add(C({2}), 1);

  SECTION("k = 1 drops the width-2 negative clause") {
    const auto [out, deleted] = drop_heavy_negative_clauses(phi, 1);
    CHECK(deleted == 4);
    CHECK(out.clauses.size() == 2);
    // the removed mass is a constant value offset for every feasible solution
    for_each_solution(all_vars(phi), 1, [&, &out = out](const std::vector<VarId>& y) {
      CHECK(val(phi, Solution{y}) == val(out, Solution{y}) + 4);
    });
  }
  SECTION("k = 2 keeps everything") {
    const auto [out, deleted] = drop_heavy_negative_clauses(phi, 2);
    CHECK(deleted == 0);
    CHECK(out == phi);
  }
  SECTION("k = 0 drops every clause with a negated literal") {
    const auto [out, deleted] = drop_heavy_negative_clauses(phi, 0);
    CHECK(deleted == 6);
    CHECK(negative_clause_mass(out) == 0);
  }
}

// --- stage I -----------------------------------------------------------------

TEST_CASE("normalized negative degree on a pinned example") {
  Formula phi;
  phi.n_vars = 2;
  phi.add(C({}, {0}), 3);     // (-u) : 3
  phi.add(C({}, {0, 1}), 2);  // (-u v -v) : 2
  const std::vector<VarId> both{0, 1};
  CHECK(nndeg(phi, both, 0) == Rational(4));  // 3/1 + 2/2
  CHECK(nndeg(phi, both, 1) == Rational(1));  // 2/2
  const std::vector<VarId> only_v{1};
  CHECK(nndeg(phi, only_v, 1) == Rational(2));  // 2/1 after u leaves
  CHECK_THROWS_AS(nndeg(phi, only_v, 0), std::invalid_argument);

  NndegTable table(phi);
  CHECK(table.value(0) == Rational(4));
  CHECK(table.value(1) == Rational(1));
  CHECK(table.argmax_above(Rational(1, 24)) == 0);
  table.remove(0);
  CHECK(!table.is_live(0));
  CHECK(table.value(1) == Rational(2));
  CHECK(table.argmax_above(Rational(3)) == std::nullopt);
  CHECK(table.argmax_above(Rational(1)) == 1);
  CHECK_THROWS_AS(table.remove(0), std::invalid_argument);
}

TEST_CASE("nndeg table tracks the defining sum through random removals") {
  Rng rng(112233);
  for (int trial = 0; trial < 25; ++trial) {
    const VarId n = 2 + static_cast<VarId>(rng.below(6));
    const Formula phi =
        testsupport::random_formula(rng, n, 3 + rng.below(9), 4, 4, Rational(3, 5));
    NndegTable table(phi);
    std::vector<VarId> live = all_vars(phi);
    while (live.size() > 1) {
      for (VarId v : live) CHECK(table.value(v) == nndeg(phi, live, v));
      const std::size_t pick = rng.below(live.size());
      table.remove(live[pick]);
      live.erase(live.begin() + pick);
    }
  }
}

TEST_CASE("negative-side reduction on a one-clause example") {
  Formula phi;
  phi.n_vars = 1;
  phi.add(C({}, {0}), 1);
  const auto [out, tr] = step1_reduce_negative(phi, 1, Rational(1, 12));
  CHECK(tr.tau == Rational(1, 24));
  CHECK(tr.picked == std::vector<VarId>{0});
  CHECK(tr.deleted_clause_mass == 0);
  CHECK(out == phi);  // the picked variable covers its own clause
}

TEST_CASE("negative-side reduction picks by maximum and sweeps the rest") {
  Formula phi;
  phi.n_vars = 4;
  phi.add(C({}, {0}), 24);     // nndeg(u) = 24
  phi.add(C({}, {1, 2}), 23);  // nndeg(v) = nndeg(w) = 11.5
  phi.add(C({}, {3}), 1);      // nndeg(z) = 1, not strictly above tau
  REQUIRE(negative_clause_mass(phi) == 48);

  const auto [out, tr] = step1_reduce_negative(phi, 2, Rational(1, 12));
  CHECK(tr.tau == Rational(1));  // (1/12) / 4 * 48
  // u first (24), then the id tie v before w, then w jumps to 23
  CHECK(tr.picked == std::vector<VarId>{0, 1, 2});
  CHECK(tr.deleted_clause_mass == 1);

  Formula expect;
  expect.n_vars = 4;
  expect.add(C({}, {0}), 24);
  expect.add(C({}, {1, 2}), 23);
  CHECK(out == expect);

  // swept clauses are satisfied by every solution avoiding their variables;
  // the value identity val(phi) = val(out) + val(deleted) holds pointwise
  Formula deleted;
  deleted.n_vars = 4;
  deleted.add(C({}, {3}), 1);
  for_each_solution(all_vars(phi), 2, [&, &out = out](const std::vector<VarId>& y) {
    CHECK(val(phi, Solution{y}) ==
          val(out, Solution{y}) + val(deleted, Solution{y}));
  });
}

TEST_CASE("negative-side reduction degenerate inputs") {
  Formula monotone;
  monotone.n_vars = 2;
  monotone.add(C({0, 1}), 7);
  const auto [same, tr] = step1_reduce_negative(monotone, 0, Rational(1, 12));
  CHECK(same == monotone);
  CHECK(tr.tau == 0);
  CHECK(tr.picked.empty());

  Formula negative;
  negative.n_vars = 1;
  negative.add(C({}, {0}), 1);
  CHECK_THROWS_AS(step1_reduce_negative(negative, 0, Rational(1, 12)), param_error);
  CHECK_THROWS_AS(step1_reduce_negative(negative, 1, Rational(0)), param_error);
}

TEST_CASE("negative-side reduction properties on random formulas") {
  Rng rng(445566);
  for (int trial = 0; trial < 30; ++trial) {
    const VarId n = 2 + static_cast<VarId>(rng.below(6));
    const Count k = 1 + rng.below(3);
    const Rational eps1(1, 6 + rng.below(10));
    Formula phi =
        testsupport::random_formula(rng, n, 2 + rng.below(10), 3, 5, Rational(1, 2));
    phi = drop_heavy_negative_clauses(phi, k).first;
    const Count neg_mass = negative_clause_mass(phi);
    const auto [out, tr] = step1_reduce_negative(phi, k, eps1);

    // replay the pick loop against the standalone definition
    std::vector<VarId> live = all_vars(phi);
    for (VarId v : tr.picked) {
      const Rational nv = nndeg(phi, live, v);
      CHECK(nv > tr.tau);
      for (VarId u : live) {
        const Rational nu = nndeg(phi, live, u);
        CHECK(nu <= nv);             // v was a maximum
        if (nu == nv) CHECK(v <= u); // and the smallest id among maxima
      }
      live.erase(std::find(live.begin(), live.end(), v));
    }
    for (VarId u : live)
      if (nndeg(phi, live, u) > tr.tau) FAIL("loop stopped early");

    // sweep: survivors have all negated literals on picked variables
    std::vector<char> picked(phi.n_vars, 0);
    for (VarId v : tr.picked) picked[v] = 1;
    Count deleted = 0;
    for (const auto& [c, mult] : phi.clauses) {
      bool keep = true;
      for (VarId u : c.neg)
        if (!picked[u]) keep = false;
      if (keep)
        CHECK(out.clauses.at(c) == mult);
      else
        deleted += mult;
    }
    CHECK(tr.deleted_clause_mass == deleted);
    CHECK(clause_mass(out) + deleted == clause_mass(phi));

    // count bound and deviation bound
    if (!tr.picked.empty())
      CHECK(Rational(tr.picked.size()) * tr.tau <
            Rational(neg_mass) * harmonic(k + 1));
    const Count opt = opt_value(phi, k);
    for_each_solution(all_vars(phi), k, [&, &out = out](const std::vector<VarId>& y) {
      const Count before = val(phi, Solution{y});
      const Count after = val(out, Solution{y});
      REQUIRE(before >= after);
      // unsatisfied deleted mass stays under (eps1/2) min(neg mass, OPT)
      const Count lost_possible = tr.deleted_clause_mass - (before - after);
      CHECK(Rational(lost_possible) <= eps1 / 2 * Rational(neg_mass));
      CHECK(Rational(lost_possible) <= eps1 / 2 * Rational(opt));
    });
  }
}

// --- stage II ----------------------------------------------------------------

TEST_CASE("positive-side reduction is the identity under the block size") {
  Formula phi;
  phi.n_vars = 5;
  for (VarId v = 0; v < 5; ++v) phi.add(C({v}), 1 + v);
  const auto [out, tr] = step2_reduce_positive(phi, 2, 2, 2, Rational(1, 12));
  CHECK(out == phi);
  CHECK(tr.kind == Stage2Case::identity);
  CHECK(tr.q == BigInt(18434));  // 2 + 2 * (2*2*2*12)^2
  CHECK(tr.deleted.empty());
}

TEST_CASE("positive-side reduction high-degree case keeps the top block") {
  // 34 singleton clauses of multiplicity 16; q = 1 + 2 * (2*1*1*8)^1 = 33
  Formula phi;
  phi.n_vars = 34;
  for (VarId v = 0; v < 34; ++v) phi.add(C({v}), 16);
  const auto [out, tr] = step2_reduce_positive(phi, 1, 2, 1, Rational(1, 8));
  CHECK(tr.kind == Stage2Case::low_degree);
  CHECK(tr.q == BigInt(33));
  CHECK(tr.tau2 == 16);  // exactly at the 2b/eps2 threshold
  CHECK(tr.deleted == std::vector<VarId>{33});
  CHECK(out.clauses.size() == 33);
  CHECK(opt_value(out, 1) == opt_value(phi, 1));  // still 16
}

TEST_CASE("positive-side reduction sunflower case on one wide clause") {
  Formula phi;
  phi.n_vars = 6;
  phi.add(C({0, 1, 2, 3, 4, 5}), 1);
  const auto [out, tr] = step2_reduce_positive(phi, 1, 1, 1, Rational(1, 2));
  CHECK(tr.kind == Stage2Case::sunflower);
  CHECK(tr.q == BigInt(5));
  CHECK(tr.tau2 == 1);
  CHECK(tr.opt_tilde == BigInt(2));
  CHECK(tr.deleted == std::vector<VarId>{0, 1, 2, 3});
  Formula expect;
  expect.n_vars = 6;
  expect.add(C({4, 5}), 1);
  CHECK(out == expect);
  CHECK(opt_value(out, 1) == opt_value(phi, 1));  // both 1

  // the rule must be inapplicable on its own output
  std::vector<char> alive(6, 0);
  alive[4] = alive[5] = 1;
  CHECK(!sunflower_prune_once(out, alive, tr.tau2, tr.opt_tilde + 1));
}

TEST_CASE("sunflower_prune_once names the minimum-degree petal") {
  Formula phi;
  phi.n_vars = 3;
  phi.add(C({0}), 3);
  phi.add(C({1}), 1);
  phi.add(C({2}), 2);
  std::vector<char> alive(3, 1);
  // all degrees <= 3; three disjoint petals; victim is the degree-1 variable
  const auto hit = sunflower_prune_once(phi, alive, 3, BigInt(3));
  REQUIRE(hit);
  CHECK(hit->first == 1);
  CHECK(hit->second.petals.size() == 3);
  // cap excludes the degree-3 variable, leaving too few petals
  CHECK(!sunflower_prune_once(phi, alive, 2, BigInt(3)));
  CHECK(sunflower_prune_once(phi, alive, 2, BigInt(2)));
}

TEST_CASE("positive-side reduction never renumbers and only deletes positives") {
  Rng rng(778899);
  for (int trial = 0; trial < 25; ++trial) {
    const VarId n = 2 + static_cast<VarId>(rng.below(7));
    const Count k = 1 + rng.below(2);
    const Formula phi =
        testsupport::random_formula(rng, n, 2 + rng.below(8), 3, 4, Rational(1, 4));
    const Rational eps2(1, 2 + rng.below(10));
    const auto [out, tr] = step2_reduce_positive(phi, k, 1, 1, eps2);
    CHECK(out.n_vars == phi.n_vars);
    std::vector<char> is_neg(phi.n_vars, 0);
    for (VarId v : negative_vars(phi)) is_neg[v] = 1;
    for (VarId v : tr.deleted) CHECK(!is_neg[v]);
    // deleting positive variables can only lower values, never below 1-eps2
    const Count before = opt_value(phi, k);
    const Count after = opt_value(out, k);
    CHECK(after <= before);
    if (tr.kind != Stage2Case::low_degree)  // unconditional cases
      CHECK(Rational(after) >= (1 - eps2) * Rational(before));
  }
}

TEST_CASE("positive-side reduction parameter errors") {
  Formula phi;
  phi.n_vars = 1;
  phi.add(C({0}), 1);
  CHECK_THROWS_AS(step2_reduce_positive(phi, 1, 0, 1, Rational(1, 8)), param_error);
  CHECK_THROWS_AS(step2_reduce_positive(phi, 1, 1, 1, Rational(-1)), param_error);
}

// --- stage III ---------------------------------------------------------------

TEST_CASE("multiplicity scaling on a pinned example") {
  Formula phi;
  phi.n_vars = 2;
  phi.add(C({0}), 290);
  phi.add(C({0, 1}), 10);
  const auto [out, tr] =
      step3_scale_multiplicities(phi, 1, 1, 1, Rational(2, 5));
  CHECK(tr.opt_tilde == BigInt(300));  // the x1 singleton
  CHECK(tr.s == Rational(3));          // (2/5) * 300 / (10 * 1 * 4)
  CHECK(tr.applied);
  Formula expect;
  expect.n_vars = 2;
  expect.add(C({0}), 96);     // floor(290 / 3)
  expect.add(C({0, 1}), 3);   // floor(10 / 3)
  CHECK(out == expect);

  // pointwise deviation: |val_before - s val_after| <= (eps3/2) OPT
  const Count opt = opt_value(phi, 1);
  for_each_solution(all_vars(phi), 1, [&, &out = out](const std::vector<VarId>& y) {
    const Rational diff = Rational(val(phi, Solution{y})) -
                          tr.s * Rational(val(out, Solution{y}));
    CHECK(abs(diff) <= Rational(2, 5) / 2 * Rational(opt));
  });
}

TEST_CASE("multiplicity scaling compresses huge masses") {
  Formula phi;
  phi.n_vars = 1;
  phi.add(C({0}), 1'000'000);
  const auto [out, tr] = step3_scale_multiplicities(phi, 1, 1, 1, Rational(1, 8));
  CHECK(tr.s == Rational(6250));
  REQUIRE(tr.applied);
  CHECK(clause_mass(out) == 160);
  CHECK(Rational(1'000'000) - tr.s * Rational(160) == 0);
}

TEST_CASE("multiplicity scaling is the identity when the scale is small") {
  Formula phi;
  phi.n_vars = 2;
  phi.add(C({0, 1}), 3);
  const auto [out, tr] = step3_scale_multiplicities(phi, 1, 2, 2, Rational(1, 12));
  CHECK(!tr.applied);
  CHECK(out == phi);
  CHECK(tr.s <= 1);
  CHECK(tr.opt_tilde == BigInt(3));

  Formula empty;
  empty.n_vars = 3;
  const auto [out2, tr2] = step3_scale_multiplicities(empty, 1, 1, 1, Rational(1, 8));
  CHECK(out2 == empty);
  CHECK(!tr2.applied);
}

TEST_CASE("scaling deviation holds for every oracle choice") {
  Rng rng(31337);
  for (int trial = 0; trial < 20; ++trial) {
    const VarId n = 1 + static_cast<VarId>(rng.below(5));
    const Count k = 1 + rng.below(2);
    Formula phi =
        testsupport::random_formula(rng, n, 1 + rng.below(6), 3, 3, Rational(1, 4));
    // inflate the masses so scaling actually fires
    Formula big;
    big.n_vars = phi.n_vars;
    for (const auto& [c, mult] : phi.clauses) big.add(c, mult * 50'000);
    const Rational eps3(1, 5);
    const Count opt = opt_value(big, k);
    for (OracleKind oracle : {OracleKind::exact, OracleKind::greedy,
                              OracleKind::best_of_baselines}) {
      const auto [out, tr] = step3_scale_multiplicities(big, k, 1, 1, eps3, oracle);
      CHECK(BigInt(tr.opt_tilde) <= BigInt(opt));  // estimates never overshoot
      if (!tr.applied) continue;
      for_each_solution(
          all_vars(big), k, [&, &out = out](const std::vector<VarId>& y) {
            const Rational diff = Rational(val(big, Solution{y})) -
                                  tr.s * Rational(val(out, Solution{y}));
            CHECK(abs(diff) <= eps3 / 2 * Rational(opt));
          });
      const BigInt mass_cap =
          BigInt(clause_mass(big)) * den(tr.s) / num(tr.s);
      CHECK(BigInt(clause_mass(out)) <= mass_cap);
    }
  }
}

// --- composition ------------------------------------------------------------

TEST_CASE("kernel parameters are validated up front") {
  Formula phi;
  phi.n_vars = 1;
  phi.add(C({0}), 1);
  PipelineParams p;
  p.k = 1;
  p.a = p.b = 2;
  for (const char* bad : {"0", "1/4", "3/10", "-1/8", "1"}) {
    p.eps = parse_rational(bad);
    CHECK_THROWS_AS(run_kernel(phi, p), param_error);
  }
  p.eps = Rational(1, 5);
  CHECK_NOTHROW(run_kernel(phi, p));
  p.a = 0;
  CHECK_THROWS_AS(run_kernel(phi, p), param_error);
}

TEST_CASE("run_kernel chains the four stages verbatim") {
  Formula phi;
  phi.n_vars = 3;
  phi.add(C({}, {0, 1}), 2);
  phi.add(C({2}, {0}), 3);
  phi.add(C({1, 2}), 4);
  PipelineParams p;
  p.k = 1;
  p.eps = Rational(1, 8);
  p.a = p.b = 2;
  const KernelRun run = run_kernel_stages(phi, p);
  CHECK(run.phi[0] == phi);
  const auto [s0, d0] = drop_heavy_negative_clauses(phi, p.k);
  CHECK(run.phi[1] == s0);
  CHECK(run.trace.stage0_deleted == d0);
  const auto [s1, t1] = step1_reduce_negative(s0, p.k, p.eps / 3);
  CHECK(run.phi[2] == s1);
  CHECK(run.trace.stage1 == t1);
  const auto [s2, t2] = step2_reduce_positive(s1, p.k, p.a, p.b, p.eps / 3);
  CHECK(run.phi[3] == s2);
  CHECK(run.trace.stage2 == t2);
  const auto [s3, t3] = step3_scale_multiplicities(s2, p.k, p.a, p.b, p.eps / 3);
  CHECK(run.phi[4] == s3);
  CHECK(run.trace.stage3 == t3);

  const auto [kernel, trace] = run_kernel(phi, p);
  CHECK(kernel == run.phi[4]);
  CHECK(trace == run.trace);
}

TEST_CASE("kernel value guarantee on generated free instances") {
  GenSpec spec;
  spec.n_vars = 9;
  spec.n_clauses = 10;
  spec.max_mult = 6;
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    spec.seed = seed;
    const Formula phi = generate_instance(spec);
    PipelineParams p;
    p.k = 1 + seed % 3;
    p.eps = seed % 2 ? Rational(1, 8) : Rational(1, 5);
    p.a = spec.a;
    p.b = spec.b;

    const KernelRun run = run_kernel_stages(phi, p);
    CHECK(run.phi[4].n_vars == phi.n_vars);

    const SizeBounds bounds = compute_size_bounds(run, p);
    CHECK(bounds.stage1_ok);
    CHECK(bounds.vars_ok);
    CHECK(bounds.mass_ok);
    CHECK(bounds.stage1_rhs_harmonic <= bounds.stage1_rhs_log);

    const Count opt = opt_value(phi, p.k);
    const auto [y, v] = fptas_solve(phi, p);
    CHECK(y.size() <= p.k);
    CHECK(val(phi, y) == v);
    CHECK(Rational(v) >= (1 - p.eps) * Rational(opt));

    // the kernel optimum itself lifts by identity to a near-optimal value
    const auto occ = occurring_vars(run.phi[4]);
    const auto [yk, vk] = brute_force_opt_over(run.phi[4], p.k, occ);
    CHECK(Rational(val(phi, yk)) >= (1 - p.eps) * Rational(opt));
  }
}

TEST_CASE("size bounds handle the k = 0 degenerate run") {
  Formula phi;
  phi.n_vars = 4;
  phi.add(C({0, 1}), 2);
  phi.add(C({}, {2}), 5);
  PipelineParams p;
  p.k = 0;
  p.eps = Rational(1, 8);
  p.a = p.b = 1;
  const KernelRun run = run_kernel_stages(phi, p);
  CHECK(run.trace.stage0_deleted == 5);  // one negated literal >= k + 1
  CHECK(run.trace.stage2.kind == Stage2Case::identity);
  CHECK(run.trace.stage2.q == BigInt(0));
  const SizeBounds bounds = compute_size_bounds(run, p);
  CHECK(bounds.stage1_ok);
  CHECK(bounds.vars_ok);  // records the trivial bound instead of t + 0
  CHECK(bounds.mass_ok);
  CHECK(opt_value(run.phi[4], 0) + run.trace.stage0_deleted == opt_value(phi, 0));
}

// --- lifting and the full scheme ----------------------------------------------

TEST_CASE("lift_solution returns the best of kernel answer, oracle and empty") {
  Formula phi;
  phi.n_vars = 3;
  phi.add(C({}, {0}), 5);
  phi.add(C({1}), 2);

  // a kernel answer that is already optimal survives the lift
  CHECK(lift_solution(phi, 1, make_solution({1})) == make_solution({1}));
  // a poor kernel answer is replaced by the oracle's
  CHECK(lift_solution(phi, 1, make_solution({0})) == make_solution({1}));
  // with a weak oracle the kernel answer can still win
  CHECK(lift_solution(phi, 1, make_solution({1}), OracleKind::greedy) ==
        make_solution({1}));
  CHECK_THROWS_AS(lift_solution(phi, 1, make_solution({0, 1})),
                  std::invalid_argument);
}

TEST_CASE("fptas_solve on a pinned free instance") {
  Formula phi;
  phi.n_vars = 2;
  phi.add(C({}, {0}), 5);
  phi.add(C({0, 1}), 1);
  PipelineParams p;
  p.k = 1;
  p.eps = Rational(1, 8);
  p.a = p.b = 2;
  const auto [y, v] = fptas_solve(phi, p);
  CHECK(y == make_solution({1}));
  CHECK(v == 6);  // meets the true optimum, not just 7/8 of it
}

// --- multiset-to-set transform -------------------------------------------------

TEST_CASE("set-form instance tags every replica with a fresh variable") {
  Formula phi;
  phi.n_vars = 1;
  phi.add(C({0}), 2);
  const Formula set = to_set_instance(phi, 1, Rational(1, 2));
  CHECK(set.n_vars == 5);  // 1 original + 2 copies * 2 replicas
  CHECK(set.clauses.size() == 4);
  CHECK(clause_mass(set) == 4);
  for (const auto& [c, mult] : set.clauses) {
    CHECK(mult == 1);
    CHECK(c.pos.size() == 2);  // x1 plus its tag
    CHECK(c.pos.front() == 0);
    CHECK(c.pos.back() >= 1);
  }
}

TEST_CASE("set-form optimum matches its closed form on small instances") {
  // any solution splits into original variables plus j fresh tags, each tag
  // covering one not-yet-satisfied replica:
  //   OPT_set = max_Y [ r val(Y) + min(k - |Y|, r (mass - val(Y))) ]
  Rng rng(654321);
  for (int trial = 0; trial < 12; ++trial) {
    const VarId n = 1 + static_cast<VarId>(rng.below(3));
    const Count k = 1 + rng.below(2);
    const Formula phi =
        testsupport::random_formula(rng, n, 1 + rng.below(3), 2, 2, Rational(1, 3));
    const Rational eps(1, 1 + rng.below(3));
    const Formula set = to_set_instance(phi, k, eps);
    const Count r = ceil_rational(Rational(k) / eps).convert_to<Count>();
    const Count mass = clause_mass(phi);

    Count expect = 0;
    for_each_solution(all_vars(phi), k, [&](const std::vector<VarId>& y) {
      const Count v = val(phi, Solution{y});
      const Count tags = std::min<Count>(k - y.size(), r * (mass - v));
      expect = std::max(expect, r * v + tags);
    });
    CHECK(opt_value(set, k) == expect);
  }
}

TEST_CASE("set-form degenerate parameters") {
  Formula phi;
  phi.n_vars = 2;
  phi.add(C({0}), 3);
  CHECK_THROWS_AS(to_set_instance(phi, 1, Rational(0)), param_error);
  const Formula zero = to_set_instance(phi, 0, Rational(1, 2));
  CHECK(zero.n_vars == 2);
  CHECK(zero.clauses.empty());
}

// --- trace serialization ---------------------------------------------------

TEST_CASE("kernel traces round-trip through JSON") {
  Formula phi;
  phi.n_vars = 6;
  phi.add(C({0, 1, 2, 3, 4, 5}), 1);
  phi.add(C({}, {0, 1}), 2);
  PipelineParams p;
  p.k = 1;
  p.eps = Rational(1, 5);
  p.a = p.b = 1;
  const auto [kernel, trace] = run_kernel(phi, p);
  const json j = trace_to_json(trace);
  CHECK(trace_from_json(j) == trace);

  // stable field names, exact value encodings
  CHECK(j["stage1"]["tau"].is_string());
  CHECK(j["stage2"]["q"].is_string());
  CHECK(j["stage3"]["s"].is_string());
  CHECK(j.contains("stage0_deleted"));
  CHECK(j["stage2"].contains("case"));
  CHECK(j["stage2"].contains("opt_tilde"));
  CHECK(j["stage1"].contains("deleted_clause_mass"));
}

TEST_CASE("trace parsing validates fields strictly") {
  KernelTrace tr;
  tr.stage1.tau = Rational(1, 24);
  tr.stage2.kind = Stage2Case::sunflower;
  tr.stage2.q = 5;
  tr.stage2.tau2 = 1;
  tr.stage2.opt_tilde = 2;
  tr.stage3.s = Rational(3);
  tr.stage3.applied = true;
  tr.stage3.opt_tilde = 300;
  const json good = trace_to_json(tr);
  CHECK(trace_from_json(good) == tr);

  json missing = good;
  missing.erase("stage1");
  CHECK_THROWS_AS(trace_from_json(missing), parse_error);
  json bad_case = good;
  bad_case["stage2"]["case"] = "III";
  CHECK_THROWS_AS(trace_from_json(bad_case), parse_error);
  json bad_tau = good;
  bad_tau["stage1"]["tau"] = 0.125;
  CHECK_THROWS_AS(trace_from_json(bad_tau), parse_error);
  json bad_vars = good;
  bad_vars["stage2"]["deleted"] = json::array({0});
  CHECK_THROWS_AS(trace_from_json(bad_vars), parse_error);
  json bad_applied = good;
  bad_applied["stage3"]["applied"] = "yes";
  CHECK_THROWS_AS(trace_from_json(bad_applied), parse_error);
}

TEST_CASE("run reports carry stats, params, trace, bounds and timings") {
  Formula phi;
  phi.n_vars = 2;
  phi.add(C({0}, {1}), 2);
  PipelineParams p;
  p.k = 1;
  p.eps = Rational(1, 8);
  p.a = p.b = 2;
  const KernelRun run = run_kernel_stages(phi, p);
  const json j = run_report_to_json(run, p, OracleKind::best_of_baselines, 1.5);
  CHECK(j["input"]["clause_mass"] == 2);
  CHECK(j["input"]["n_vars"] == 2);
  CHECK(j["kernel"].contains("occurring_vars"));
  CHECK(j["params"]["k"] == 1);
  CHECK(j["params"]["eps"] == "1/8");
  CHECK(j["params"]["oracle"] == "best-of");
  CHECK(trace_from_json(j["trace"]) == run.trace);
  CHECK(j["bounds"].contains("vars_bound"));
  CHECK(j["bounds"]["stage1_ok"].is_boolean());
  CHECK(j["timings_ms"]["total"] == 1.5);
}

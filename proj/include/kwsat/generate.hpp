#pragma once

// Seeded random instances that are certified K_{a,b}-free.  Sampling is
// rejection-based: draw a whole formula, test freeness exactly, retry.  Two
// structural rules make acceptance likely instead of hopeless: with b = 1
// clause widths are capped at a - 1 (a width-a clause alone is a K_{a,1}),
// and with b >= 2 any clause of width >= a is capped at multiplicity b - 1
// (b copies of one wide clause form a K_{a,b} by themselves).
//
// All randomness flows through a fixed-width engine with rejection sampling
// for ranges, so a seed produces the same instance on every platform.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "kwsat/bigraph.hpp"
#include "kwsat/formula.hpp"
#include "kwsat/rational.hpp"

namespace kwsat {

// mt19937_64 plus hand-rolled range reduction; std::uniform_int_distribution
// is implementation-defined and would break cross-platform determinism.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("empty range");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    for (;;) {
      const std::uint64_t x = eng_();
      if (x < limit) return x % n;
    }
  }

  // true with probability p, which must lie in [0, 1] with a denominator
  // that fits in 64 bits
  bool chance(const Rational& p) {
    if (p < 0 || p > 1) throw std::invalid_argument("probability outside [0, 1]");
    if (den(p) > BigInt(UINT64_MAX))
      throw std::invalid_argument("probability denominator too large");
    const std::uint64_t d = den(p).convert_to<std::uint64_t>();
    const std::uint64_t n = num(p).convert_to<std::uint64_t>();
    return below(d) < n;
  }

 private:
  std::mt19937_64 eng_;
};

struct GenSpec {
  VarId n_vars = 10;
  Count n_clauses = 10;     // clause draws; merging can leave fewer distinct
  unsigned a = 2, b = 2;    // forbidden pattern to stay free of
  Count max_width = 3;      // literals per clause, before the b = 1 cap
  Count max_mult = 5;       // multiplicity per draw, before the wide-clause cap
  Rational neg_prob = Rational(1, 4);  // per-literal negation probability
  std::uint64_t seed = 1;
};

// One sampling pass; freeness is not yet checked here.
namespace detail {
inline Formula sample_formula(const GenSpec& spec, Rng& rng) {
  Formula phi;
  phi.n_vars = spec.n_vars;
  Count width_cap = spec.max_width;
  if (spec.b == 1) width_cap = std::min<Count>(width_cap, spec.a - 1);
  if (width_cap == 0 || spec.n_vars == 0) return phi;  // only the empty formula fits

  for (Count i = 0; i < spec.n_clauses; ++i) {
    const Count width =
        1 + rng.below(std::min<Count>(width_cap, spec.n_vars));
    std::vector<VarId> vars;
    while (vars.size() < width) {
      const VarId v = static_cast<VarId>(rng.below(spec.n_vars));
      if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
    }
    std::vector<VarId> pos, neg;
    for (VarId v : vars) (rng.chance(spec.neg_prob) ? neg : pos).push_back(v);

    Count mult_cap = spec.max_mult;
    if (spec.b >= 2 && width >= spec.a)
      mult_cap = std::min<Count>(mult_cap, spec.b - 1);
    if (mult_cap == 0) continue;  // wide clause not placeable for this (a, b)
    const Count mult = 1 + rng.below(mult_cap);
    phi.add(make_clause(std::move(pos), std::move(neg)), mult);
  }
  return phi;
}
}  // namespace detail

// Draws formulas until one passes the exact K_{a,b}-freeness test.
// `attempts` bounds the rejection loop; `check_budget` bounds each freeness
// test (see is_kab_free).
inline Formula generate_instance(const GenSpec& spec, Count attempts = 1000,
                                 Count check_budget = default_enum_budget) {
  if (spec.a == 0 || spec.b == 0)
    throw param_error("pattern sides a, b must be >= 1");
  Rng rng(spec.seed);
  for (Count attempt = 0; attempt < attempts; ++attempt) {
    Formula phi = detail::sample_formula(spec, rng);
    if (is_kab_free(incidence_graph(phi), spec.a, spec.b, check_budget))
      return phi;
  }
  throw budget_exceeded("no K_{" + std::to_string(spec.a) + "," +
                        std::to_string(spec.b) + "}-free instance found in " +
                        std::to_string(attempts) + " attempts (seed " +
                        std::to_string(spec.seed) + ")");
}

}  // namespace kwsat

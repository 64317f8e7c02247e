#pragma once

// Bipartite graphs over dense vertex ids, as used by the positive-side
// reduction: left vertices are variables, right vertices are clause copies.
// Provides the greedy/recursive sunflower finder, the low-degree-vertex
// witness search, and the K_{a,b}-freeness test.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kwsat/formula.hpp"
#include "kwsat/rational.hpp"

namespace kwsat {

struct Bigraph {
  std::size_t n_left = 0;
  std::size_t n_right = 0;
  std::vector<std::vector<std::uint32_t>> adj;  // left id -> sorted right ids

  bool has_edge(std::uint32_t l, std::uint32_t r) const {
    return std::binary_search(adj[l].begin(), adj[l].end(), r);
  }
};

inline Bigraph make_bigraph(std::size_t n_left, std::size_t n_right,
                            std::vector<std::pair<std::uint32_t, std::uint32_t>> edges) {
  Bigraph g;
  g.n_left = n_left;
  g.n_right = n_right;
  g.adj.assign(n_left, {});
  for (auto [l, r] : edges) {
    if (l >= n_left || r >= n_right)
      throw std::invalid_argument("edge endpoint out of range");
    g.adj[l].push_back(r);
  }
  for (auto& a : g.adj) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  return g;
}

// right id -> sorted left ids
inline std::vector<std::vector<std::uint32_t>> transpose(const Bigraph& g) {
  std::vector<std::vector<std::uint32_t>> t(g.n_right);
  for (std::uint32_t l = 0; l < g.n_left; ++l)
    for (std::uint32_t r : g.adj[l]) t[r].push_back(l);
  return t;  // lefts pushed in ascending order
}

// A sunflower: left vertices (petals) whose neighborhoods pairwise intersect
// in exactly the core.  Petal neighborhoods may also meet the core; what is
// forbidden is any overlap outside it.
struct Sunflower {
  std::vector<std::uint32_t> petals;  // sorted left ids
  std::vector<std::uint32_t> core;    // sorted right ids
};

// Checks the defining pairwise property directly against the graph.
// Vacuously true for fewer than two petals.
inline bool is_valid_sunflower(const Bigraph& g, const Sunflower& sf) {
  for (std::uint32_t p : sf.petals)
    if (p >= g.n_left) return false;
  for (std::uint32_t c : sf.core)
    if (c >= g.n_right) return false;
  for (std::size_t i = 0; i < sf.petals.size(); ++i)
    for (std::size_t j = i + 1; j < sf.petals.size(); ++j) {
      const auto& a = g.adj[sf.petals[i]];
      const auto& b = g.adj[sf.petals[j]];
      std::vector<std::uint32_t> meet;
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                            std::back_inserter(meet));
      if (meet != sf.core) return false;
    }
  return true;
}

// Searches for a sunflower with exactly w petals.
//
// Recursive scheme: greedily collect left vertices with pairwise-disjoint
// neighborhoods (ascending id).  If w of them exist they form a core-free
// sunflower at this level.  Otherwise some collected neighborhood blocks the
// rest; pick the blocking right vertex u of highest degree among the
// still-considered lefts (smallest id on ties), restrict to u's neighbors,
// delete u from the graph and recurse; u joins the core of whatever the
// recursion finds.  Returns nothing when the greedy set saturates below w,
// which can only happen when the completeness precondition (K_{a,b}-free,
// left degrees <= l, at least a*((w-1)l)^b lefts) does not hold.
inline std::optional<Sunflower> find_sunflower(const Bigraph& g, Count w) {
  if (w == 0) throw std::invalid_argument("sunflower size must be >= 1");
  if (w > g.n_left) return std::nullopt;

  std::vector<char> alive(g.n_right, 1);

  auto rec = [&](auto&& self, const std::vector<std::uint32_t>& lefts)
      -> std::optional<Sunflower> {
    // greedy pairwise-disjoint set over live right vertices
    std::vector<char> used(g.n_right, 0);
    std::vector<std::uint32_t> disjoint;
    for (std::uint32_t v : lefts) {
      bool blocked = false;
      for (std::uint32_t r : g.adj[v])
        if (alive[r] && used[r]) {
          blocked = true;
          break;
        }
      if (blocked) continue;
      disjoint.push_back(v);
      for (std::uint32_t r : g.adj[v])
        if (alive[r]) used[r] = 1;
    }
    if (disjoint.size() >= w) {
      disjoint.resize(w);
      return Sunflower{std::move(disjoint), {}};
    }
    if (disjoint.size() == lefts.size()) return std::nullopt;

    // count, per used right vertex, how many considered lefts touch it
    std::vector<std::uint32_t> hit(g.n_right, 0);
    for (std::uint32_t v : lefts)
      for (std::uint32_t r : g.adj[v])
        if (alive[r] && used[r]) ++hit[r];
    std::uint32_t u = 0, best = 0;
    for (std::uint32_t r = 0; r < g.n_right; ++r)
      if (hit[r] > best) {
        best = hit[r];
        u = r;
      }
    // every non-collected left is blocked by some used right, so best >= 1
    std::vector<std::uint32_t> next;
    for (std::uint32_t v : lefts)
      if (g.has_edge(v, u)) next.push_back(v);
    alive[u] = 0;
    auto sub = self(self, next);
    if (sub) sub->core.push_back(u);
    return sub;
  };

  std::vector<std::uint32_t> all(g.n_left);
  for (std::uint32_t v = 0; v < g.n_left; ++v) all[v] = v;
  auto out = rec(rec, all);
  if (out) std::sort(out->core.begin(), out->core.end());
  return out;
}

// A left vertex with degree <= d, smallest id, if any.
inline std::optional<std::uint32_t> find_low_degree_left(const Bigraph& g, Count d) {
  for (std::uint32_t v = 0; v < g.n_left; ++v)
    if (g.adj[v].size() <= d) return v;
  return std::nullopt;
}

// True iff the graph has no complete bipartite subgraph with a left and b
// right vertices.  Enumerates b-subsets of right vertices with running
// common-neighborhood pruning; work is bounded by binomial(n_right, b)
// against the given budget.
inline bool is_kab_free(const Bigraph& g, unsigned a, unsigned b,
                        Count budget = default_enum_budget) {
  if (a == 0 || b == 0)
    throw std::invalid_argument("freeness pattern sides must be >= 1");
  if (b > g.n_right) return true;
  if (binomial(g.n_right, b) > BigInt(budget))
    throw budget_exceeded("K_{a,b} check over " + std::to_string(g.n_right) +
                          " right vertices, b=" + std::to_string(b) +
                          " exceeds budget " + std::to_string(budget));
  const auto lefts_of = transpose(g);

  // chosen so far share `common` left neighbors (for depth >= 1)
  auto rec = [&](auto&& self, std::uint32_t from, unsigned depth,
                 const std::vector<std::uint32_t>& common) -> bool {
    if (depth == b) return common.size() >= a;  // found K_{a,b}
    for (std::uint32_t r = from; r < g.n_right; ++r) {
      std::vector<std::uint32_t> meet;
      if (depth == 0) {
        meet = lefts_of[r];
      } else {
        std::set_intersection(common.begin(), common.end(), lefts_of[r].begin(),
                              lefts_of[r].end(), std::back_inserter(meet));
      }
      if (meet.size() < a) continue;
      if (self(self, r + 1, depth + 1, meet)) return true;
    }
    return false;
  };
  return !rec(rec, 0, 0, {});
}

// Incidence graph of a formula: one left vertex per variable (including
// non-occurring ones), one right vertex per clause copy.  Copies of the
// clauses appear in canonical clause order, multiplicities expanded.
inline Bigraph incidence_graph(const Formula& phi) {
  Bigraph g;
  g.n_left = phi.n_vars;
  g.adj.assign(phi.n_vars, {});
  std::uint32_t r = 0;
  for (const auto& [c, mult] : phi.clauses) {
    for (Count copy = 0; copy < mult; ++copy) {
      for (VarId v : c.pos) g.adj[v].push_back(r);
      for (VarId v : c.neg) g.adj[v].push_back(r);
      ++r;
    }
  }
  g.n_right = r;
  return g;  // right ids pushed in ascending order, so adjacency is sorted
}

}  // namespace kwsat

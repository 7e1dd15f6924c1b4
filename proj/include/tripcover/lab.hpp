#pragma once

#include "tripcover/cover.hpp"
#include "tripcover/linear.hpp"
#include "tripcover/reconstruction.hpp"
#include "tripcover/shelling.hpp"
#include "tripcover/tree.hpp"

#include <algorithm>
#include <array>
#include <climits>
#include <cstdint>
#include <functional>
#include <future>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace tripcover {

using Seed = std::uint64_t;

/// Uniform in [1/4, 4] over fractions with denominator at most 8.
inline Rational sample_length(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> den_pick(1, 8);
  const int den = den_pick(rng);
  std::uniform_int_distribution<int> num_pick((den + 3) / 4, 4 * den);
  return Rational(num_pick(rng), den);
}

/// Random binary tree on default labels. Leaf k (k >= 3) subdivides a
/// uniformly chosen edge, so every topology is equally likely.
inline PhyloTree random_binary_tree(int n, Seed seed) {
  if (n < 3) throw Error("random_binary_tree needs n >= 3");
  std::mt19937_64 rng(seed);
  const auto names = default_labels(n);
  std::vector<std::string> labels{names[0], names[1], names[2], ""};
  std::vector<PhyloTree::Edge> edges{{0, 3, 0}, {1, 3, 0}, {2, 3, 0}};
  for (int k = 3; k < n; ++k) {
    std::uniform_int_distribution<std::size_t> pick(0, edges.size() - 1);
    const auto e = edges[pick(rng)];
    const auto mid = static_cast<VertexId>(labels.size());
    labels.emplace_back();
    const auto leaf = static_cast<VertexId>(labels.size());
    labels.push_back(names[static_cast<std::size_t>(k)]);
    edges.erase(std::find_if(edges.begin(), edges.end(), [&](const auto& f) { return f.u == e.u && f.v == e.v; }));
    edges.push_back({e.u, mid, 0});
    edges.push_back({mid, e.v, 0});
    edges.push_back({mid, leaf, 0});
  }
  for (auto& e : edges) e.length = sample_length(rng);
  return PhyloTree::build(labels, edges);
}

/// (2n-5)!!, the number of binary topologies on n >= 3 taxa.
inline std::uint64_t topology_count(int n) {
  std::uint64_t c = 1;
  for (int k = 3; k <= 2 * n - 5; k += 2) c *= static_cast<std::uint64_t>(k);
  return c;
}

/// Visits every binary topology on `taxa` once; all edges have length 1.
inline void for_each_binary_tree(const TaxonSet& taxa, const std::function<void(const PhyloTree&)>& visit) {
  const int n = taxa.size();
  if (n < 3) throw Error("enumeration needs at least 3 taxa");
  if (n > 8) throw CapacityError("topology enumeration is capped at 8 taxa");
  std::vector<std::string> labels{taxa.label(0), taxa.label(1), taxa.label(2), ""};
  std::vector<PhyloTree::Edge> edges{{0, 3, 1}, {1, 3, 1}, {2, 3, 1}};
  std::function<void(int)> grow = [&](int k) {
    if (k == n) {
      visit(PhyloTree::build(labels, edges));
      return;
    }
    const std::size_t count = edges.size();
    for (std::size_t i = 0; i < count; ++i) {
      const auto e = edges[i];
      const auto mid = static_cast<VertexId>(labels.size());
      labels.emplace_back();
      labels.push_back(taxa.label(k));
      edges[i] = {e.u, mid, 1};
      edges.push_back({mid, e.v, 1});
      edges.push_back({mid, mid + 1, 1});
      grow(k + 1);
      edges.resize(count);
      edges[i] = e;
      labels.resize(labels.size() - 2);
    }
  };
  grow(3);
}

inline std::vector<PhyloTree> enumerate_binary_trees(const TaxonSet& taxa) {
  std::vector<PhyloTree> out;
  for_each_binary_tree(taxa, [&](const PhyloTree& t) { out.push_back(t); });
  return out;
}

/// Indices of the edges on the path between two leaves.
inline std::vector<int> path_edges(const PhyloTree& tree, TaxonId x, TaxonId y) {
  std::vector<int> out;
  VertexId u = tree.leaf_of(x);
  const VertexId target = tree.leaf_of(y);
  while (u != target) {
    for (const auto& [w, e] : tree.neighbours(u)) {
      if (tree.hops(w, target) < tree.hops(u, target)) {
        out.push_back(e);
        u = w;
        break;
      }
    }
  }
  return out;
}

struct Realization {
  PhyloTree tree;     // topology with one realizing length assignment
  int dimension = 0;  // 0 when the lengths are forced
};

/// Every topology on X carrying strictly positive lengths that reproduce
/// `dist` on each cord. Each topology gives one exact linear system.
inline std::vector<Realization> uniqueness_oracle(const TripletCover& cover, const PartialDistances& dist) {
  if (!dist.matches(cover)) throw Error("distances must be defined exactly on the cords of the cover");
  if (cover.taxon_count() > 7) throw CapacityError("uniqueness oracle is capped at 7 taxa");
  std::vector<Realization> out;
  const auto cords = cover.cords();
  for_each_binary_tree(cover.taxa(), [&](const PhyloTree& topo) {
    const std::size_t m = topo.edges().size();
    Matrix a(cords.size(), Vector(m, Rational(0)));
    Vector b(cords.size());
    for (std::size_t i = 0; i < cords.size(); ++i) {
      for (int e : path_edges(topo, cords[i].a, cords[i].b)) a[i][static_cast<std::size_t>(e)] = 1;
      b[i] = dist.at(cords[i]);
    }
    const auto solved = solve_exact(a, b);
    std::optional<Vector> lengths;
    if (solved.kind == SolveResult::Kind::unique) {
      if (std::all_of(solved.solution.begin(), solved.solution.end(), [](const Rational& v) { return v > 0; })) {
        lengths = solved.solution;
      }
    } else if (solved.kind == SolveResult::Kind::underdetermined) {
      lengths = positive_solution(a, b);
    }
    if (!lengths) return;
    auto edges = topo.edges();
    for (std::size_t e = 0; e < m; ++e) edges[e].length = (*lengths)[e];
    out.push_back({PhyloTree(topo.taxa(), topo.vertex_count(), edges), solved.dimension});
  });
  return out;
}

struct Flags {
  bool cover = false;
  bool minimal = false;
  bool minimum = false;
  bool sparse = false;
  bool shellable = false;
  int mu = 0;
  std::optional<bool> ample;  // unset when the patchwork search was cut short

  bool operator==(const Flags&) const = default;
};

/// Recomputes every flag from scratch.
inline Flags classify(const PhyloTree& tree, const TripletCover& cover, std::size_t section_limit = 10000,
                      int ample_cap = 16) {
  Flags f;
  f.cover = is_triplet_cover(tree, cover);
  f.mu = cover.mu();
  if (!f.cover) return f;
  f.minimal = is_minimal(tree, cover);
  f.minimum = is_minimum(tree, cover);
  f.sparse = is_sparse(tree, cover);
  f.shellable = is_shellable(tree, cover).shellable;
  const auto verdict = shellable_via_patchwork(tree, cover, section_limit, ample_cap);
  if (verdict.outcome != PatchworkVerdict::Outcome::indeterminate) f.ample = verdict.yes();
  return f;
}

struct InstanceRecord {
  PhyloTree tree;
  TripletCover cover;
  Flags flags;
  std::string generator;  // "exhaustive", "random" or "climb"
  Seed seed = 0;          // enumeration index or RNG seed
};

/// Named instance predicate; the tree is always one for which the cover is a
/// triplet cover.
struct FixturePredicate {
  std::string name;
  std::function<bool(const PhyloTree&, const TripletCover&)> test;
  // Optional guide for the hill-climbing phase; larger is closer.
  std::function<long(const PhyloTree&, const TripletCover&)> score = nullptr;
};

namespace predicates {

inline FixturePredicate minimal_not_sparse() {
  return {"minimal-not-sparse",
          [](const PhyloTree& t, const TripletCover& c) { return !is_sparse(t, c) && is_minimal(t, c); }};
}

inline FixturePredicate sparse_minimal_mu4() {
  return {"sparse-minimal-mu4", [](const PhyloTree& t, const TripletCover& c) {
            return c.mu() == 4 && is_sparse(t, c) && is_minimal(t, c);
          }};
}

inline FixturePredicate sparse_not_shellable() {
  return {"sparse-not-shellable",
          [](const PhyloTree& t, const TripletCover& c) { return is_sparse(t, c) && !is_shellable(t, c).shellable; },
          [](const PhyloTree& t, const TripletCover& c) {
            const long n = t.leaf_count();
            const long missing = n * (n - 1) / 2 - static_cast<long>(cord_closure(t, c).closed.size());
            return 10 * missing - (is_sparse(t, c) ? 0 : 5);
          }};
}

inline FixturePredicate sparse_minimal_shellable_not_ample() {
  return {"sparse-minimal-shellable-not-ample", [](const PhyloTree& t, const TripletCover& c) {
            if (!is_sparse(t, c) || !is_minimal(t, c) || !is_shellable(t, c).shellable) return false;
            return shellable_via_patchwork(t, c).outcome == PatchworkVerdict::Outcome::no_ample_section;
          }};
}

inline FixturePredicate minimum() {
  return {"minimum", [](const PhyloTree& t, const TripletCover& c) { return is_minimum(t, c); }};
}

inline std::vector<FixturePredicate> all() {
  return {minimal_not_sparse(), sparse_minimal_mu4(), sparse_not_shellable(), sparse_minimal_shellable_not_ample(),
          minimum()};
}

inline FixturePredicate by_name(const std::string& name) {
  for (auto& p : all()) {
    if (p.name == name) return p;
  }
  throw Error("unknown fixture predicate '" + name + "'");
}

}  // namespace predicates

struct SearchBudget {
  int n_min = 4;
  int n_max = 8;
  std::uint64_t per_n = 20000;  // candidate trees (exhaustive) or seeds (random) per n
  int exhaustive_max_n = 6;
  std::uint64_t climbs = 0;  // hill-climb restarts per n, for predicates with a score
  int climb_steps = 3000;
  unsigned jobs = 1;
};

/// Prefers the least-used leaf of each component, so every taxon tends to
/// land in several chosen triples.
inline LeafChooser balanced_chooser(Seed seed, int taxon_count) {
  auto rng = std::make_shared<std::mt19937_64>(seed);
  auto used = std::make_shared<std::vector<int>>(static_cast<std::size_t>(taxon_count), 0);
  return [rng, used](VertexId, int, const TaxonIds& comp) {
    int least = INT_MAX;
    TaxonIds pool;
    for (TaxonId x : comp) {
      const int u = (*used)[static_cast<std::size_t>(x)];
      if (u < least) {
        least = u;
        pool.clear();
      }
      if (u == least) pool.push_back(x);
    }
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    const TaxonId x = pool[pick(*rng)];
    ++(*used)[static_cast<std::size_t>(x)];
    return x;
  };
}

namespace detail {

// Covers worth testing for one tree: the raw canonical cover and its
// minimal reductions.
inline std::vector<TripletCover> candidate_covers(const PhyloTree& tree, const TripletCover& raw, Seed seed) {
  std::vector<TripletCover> out{raw};
  auto push = [&](TripletCover c) {
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(std::move(c));
  };
  push(minimalize(tree, raw, RemovalOrder::lexicographic()));
  push(minimalize(tree, raw, RemovalOrder::random(seed)));
  return out;
}

// Every cover Co(section) over all leaf choices, i.e. all canonical covers.
inline void for_each_canonical_cover(const PhyloTree& tree, const std::function<bool(const TripletCover&)>& visit) {
  const auto inner = tree.interior_vertices();
  std::vector<std::array<TaxonIds, 3>> comps;
  for (VertexId v : inner) comps.push_back(tree.components(v));
  std::vector<std::array<std::size_t, 3>> digit(inner.size(), {0, 0, 0});
  std::set<CordSet> seen;
  for (;;) {
    CordSet cords;
    for (std::size_t i = 0; i < inner.size(); ++i) {
      Triple t(comps[i][0][digit[i][0]], comps[i][1][digit[i][1]], comps[i][2][digit[i][2]]);
      for (const auto& c : t.cords()) cords.insert(c);
    }
    if (seen.insert(cords).second && !visit(TripletCover(tree.taxa(), cords))) return;
    std::size_t i = 0;
    for (; i < inner.size(); ++i) {
      int k = 0;
      for (; k < 3; ++k) {
        if (++digit[i][static_cast<std::size_t>(k)] < comps[i][static_cast<std::size_t>(k)].size()) break;
        digit[i][static_cast<std::size_t>(k)] = 0;
      }
      if (k < 3) break;
    }
    if (i == inner.size()) return;
  }
}

inline std::optional<InstanceRecord> search_random(const FixturePredicate& pred, int n, Seed begin, Seed end) {
  for (Seed s = begin; s < end; ++s) {
    const auto tree = random_binary_tree(n, s);
    for (const auto& chooser : {random_chooser(s), balanced_chooser(s, n)}) {
      for (const auto& c : candidate_covers(tree, canonical_cover(tree, chooser), s)) {
        if (pred.test(tree, c)) return InstanceRecord{tree, c, {}, "random", s};
      }
    }
  }
  return std::nullopt;
}

// Seeded hill climb over leaf choices: re-pick one leaf at a time and keep
// the move unless the predicate's score drops.
inline std::optional<InstanceRecord> search_climb(const FixturePredicate& pred, int n, Seed begin, Seed end,
                                                  int steps) {
  for (Seed s = begin; s < end; ++s) {
    std::mt19937_64 rng(s);
    const auto tree = random_binary_tree(n, s);
    const auto inner = tree.interior_vertices();
    std::vector<std::array<TaxonIds, 3>> comps;
    for (VertexId v : inner) comps.push_back(tree.components(v));
    auto draw = [&](const TaxonIds& comp) {
      std::uniform_int_distribution<std::size_t> pick(0, comp.size() - 1);
      return comp[pick(rng)];
    };
    std::vector<std::array<TaxonId, 3>> picks(inner.size());
    for (std::size_t i = 0; i < inner.size(); ++i) {
      for (std::size_t k = 0; k < 3; ++k) picks[i][k] = draw(comps[i][k]);
    }
    auto cover_of = [&] {
      CordSet cords;
      for (const auto& p : picks) {
        for (const auto& c : Triple(p[0], p[1], p[2]).cords()) cords.insert(c);
      }
      return TripletCover(tree.taxa(), cords);
    };
    TripletCover current = cover_of();
    long best = pred.score(tree, current);
    for (int step = 0; step < steps; ++step) {
      if (pred.test(tree, current)) return InstanceRecord{tree, current, {}, "climb", s};
      const auto saved = picks;
      std::uniform_int_distribution<std::size_t> vpick(0, inner.size() - 1);
      std::uniform_int_distribution<std::size_t> kpick(0, 2);
      const std::size_t i = vpick(rng);
      const std::size_t k = kpick(rng);
      picks[i][k] = draw(comps[i][k]);
      TripletCover candidate = cover_of();
      const long sc = pred.score(tree, candidate);
      if (sc >= best) {
        best = sc;
        current = std::move(candidate);
      } else {
        picks = saved;
      }
    }
  }
  return std::nullopt;
}

// Splits [0, total) into contiguous seed ranges, one per task, and keeps the
// hit with the least seed.
template <typename Run>
std::optional<InstanceRecord> fan_out(Seed total, unsigned jobs, Run run) {
  jobs = std::max(1u, jobs);
  const Seed chunk = (total + jobs - 1) / jobs;
  std::vector<std::future<std::optional<InstanceRecord>>> tasks;
  for (unsigned j = 0; j < jobs; ++j) {
    const Seed lo = std::min<Seed>(total, j * chunk);
    const Seed hi = std::min<Seed>(total, lo + chunk);
    tasks.push_back(std::async(jobs == 1 ? std::launch::deferred : std::launch::async, run, lo, hi));
  }
  std::optional<InstanceRecord> found;
  for (auto& t : tasks) {
    auto r = t.get();
    if (r && (!found || r->seed < found->seed)) found = std::move(r);
  }
  return found;
}

}  // namespace detail

/// First instance satisfying `pred`, by increasing n. Small n is swept
/// exhaustively (topology x leaf choices, in enumeration order); larger n
/// walks seeds 0, 1, 2, ... split into contiguous ranges across `jobs`
/// tasks, keeping the least seed found. Predicates with a score then get a
/// seeded hill climb. Flags are filled in by classify().
inline std::optional<InstanceRecord> search_fixture(const FixturePredicate& pred, const SearchBudget& budget) {
  for (int n = std::max(3, budget.n_min); n <= budget.n_max; ++n) {
    std::optional<InstanceRecord> found;
    if (n <= budget.exhaustive_max_n && n <= 8) {
      std::uint64_t index = 0;
      std::uint64_t trees = 0;
      for_each_binary_tree(TaxonSet(default_labels(n)), [&](const PhyloTree& tree) {
        if (found || trees++ >= budget.per_n) return;
        detail::for_each_canonical_cover(tree, [&](const TripletCover& raw) {
          for (const auto& c : detail::candidate_covers(tree, raw, index)) {
            if (pred.test(tree, c)) {
              found = InstanceRecord{tree, c, {}, "exhaustive", index};
              return false;
            }
          }
          ++index;
          return true;
        });
      });
    } else {
      found = detail::fan_out(budget.per_n, budget.jobs,
                              [&pred, n](Seed lo, Seed hi) { return detail::search_random(pred, n, lo, hi); });
    }
    if (!found && pred.score && budget.climbs > 0) {
      found = detail::fan_out(budget.climbs, budget.jobs, [&pred, n, steps = budget.climb_steps](Seed lo, Seed hi) {
        return detail::search_climb(pred, n, lo, hi, steps);
      });
    }
    if (found) {
      found->flags = classify(found->tree, found->cover);
      return found;
    }
  }
  return std::nullopt;
}

}  // namespace tripcover

#pragma once

#include "tripcover/cover.hpp"
#include "tripcover/rational.hpp"
#include "tripcover/tree.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tripcover {

/// Distances that no tree with the given cover as triplet cover realizes.
class UnrealizableError : public Error {
 public:
  enum class Stage { lambda, cherry_search, collision, nonpositive_length, verification };

  UnrealizableError(Stage stage, const std::string& what) : Error(stage_name(stage) + ": " + what), stage_(stage) {}
  Stage stage() const { return stage_; }

  static std::string stage_name(Stage s) {
    switch (s) {
      case Stage::lambda: return "pendant length";
      case Stage::cherry_search: return "cherry search";
      case Stage::collision: return "reduction";
      case Stage::nonpositive_length: return "non-positive length";
      case Stage::verification: return "final verification";
    }
    return "unknown";
  }

 private:
  Stage stage_;
};

/// Exact distances on the cords of one cover.
class PartialDistances {
 public:
  PartialDistances() = default;

  PartialDistances(TaxonSet taxa, std::map<Cord, Rational> values) : taxa_(std::move(taxa)), values_(std::move(values)) {
    for (const auto& [c, d] : values_) {
      if (c.b >= taxa_.size()) throw Error("distance on a cord outside X");
      if (d <= 0) throw Error("distance on " + cord_name(taxa_, c) + " must be positive");
    }
  }

  /// Distances of (T, lengths) on every cord of the cover.
  static PartialDistances from_tree(const PhyloTree& tree, const TripletCover& cover) {
    if (!(tree.taxa() == cover.taxa())) throw Error("cover and tree have different taxon sets");
    std::map<Cord, Rational> values;
    for (const auto& c : cover.cords()) values.emplace(c, tree.path_distance(c.a, c.b));
    return {tree.taxa(), std::move(values)};
  }

  const TaxonSet& taxa() const { return taxa_; }
  const std::map<Cord, Rational>& values() const { return values_; }

  const Rational& at(const Cord& c) const {
    auto it = values_.find(c);
    if (it == values_.end()) throw Error("no distance for " + cord_name(taxa_, c));
    return it->second;
  }
  const Rational& at(TaxonId x, TaxonId y) const { return at(Cord(x, y)); }

  /// Defined exactly on the cords of `cover`.
  bool matches(const TripletCover& cover) const {
    if (!(cover.taxa() == taxa_) || static_cast<int>(values_.size()) != cover.size()) return false;
    return std::all_of(cover.cords().begin(), cover.cords().end(), [&](const Cord& c) { return values_.count(c) > 0; });
  }

 private:
  TaxonSet taxa_;
  std::map<Cord, Rational> values_;
};

/// Half the least value of d(x,z) + d(x,z') - d(z,z') over triples xzz' whose
/// three pairs are all cords. This is the pendant length at x whenever the
/// distances come from a tree for which the cover is a triplet cover.
inline Rational lambda(TaxonId x, const TripletCover& cover, const PartialDistances& dist) {
  std::optional<Rational> best;
  const int n = cover.taxon_count();
  for (TaxonId z = 0; z < n; ++z) {
    if (z == x || !cover.has(x, z)) continue;
    for (TaxonId w = z + 1; w < n; ++w) {
      if (w == x || !cover.has(x, w) || !cover.has(z, w)) continue;
      Rational v = dist.at(x, z) + dist.at(x, w) - dist.at(z, w);
      if (!best || v < *best) best = v;
    }
  }
  if (!best) {
    throw UnrealizableError(UnrealizableError::Stage::lambda,
                            "taxon " + cover.taxa().label(x) + " lies in no triple whose three pairs are all cords");
  }
  return *best / 2;
}

/// Least cord xy (x < y) with d(x,y) = lambda(x) + lambda(y).
inline Cord find_cherry(const TripletCover& cover, const PartialDistances& dist) {
  if (cover.taxon_count() < 4) throw Error("cherry search needs at least 4 taxa");
  std::vector<Rational> lam;
  for (TaxonId x = 0; x < cover.taxon_count(); ++x) lam.push_back(lambda(x, cover, dist));
  std::string evidence;
  for (const auto& c : cover.cords()) {
    const Rational sum = lam[static_cast<std::size_t>(c.a)] + lam[static_cast<std::size_t>(c.b)];
    if (dist.at(c) == sum) return c;
  }
  for (TaxonId x = 0; x < cover.taxon_count(); ++x) {
    evidence += (x ? ", " : "") + cover.taxa().label(x) + "=" + format_rational(lam[static_cast<std::size_t>(x)]);
  }
  throw UnrealizableError(UnrealizableError::Stage::cherry_search,
                          "no cord xy has d(x,y) = lambda(x) + lambda(y); lambda values: " + evidence);
}

/// Removes x of cherry (x, y): drops xy, rewrites every xz as yz with
/// d'(y,z) = d(x,z) + lambda(y) - lambda(x). When yz is already a cord the
/// two values must agree.
inline std::pair<TripletCover, PartialDistances> reduce_instance(const TripletCover& cover, const PartialDistances& dist,
                                                                 TaxonId x, TaxonId y) {
  if (!cover.has(x, y)) throw Error("reduce_instance needs a cherry that is a cord");
  const Rational lx = lambda(x, cover, dist);
  const Rational ly = lambda(y, cover, dist);
  const TaxonSet& taxa = cover.taxa();

  std::map<std::pair<std::string, std::string>, Rational> out;
  auto key = [&](TaxonId p, TaxonId q) {
    const auto& lp = taxa.label(p);
    const auto& lq = taxa.label(q);
    return lp < lq ? std::pair{lp, lq} : std::pair{lq, lp};
  };
  for (const auto& c : cover.cords()) {
    if (!c.contains(x)) out.emplace(key(c.a, c.b), dist.at(c));
  }
  for (const auto& c : cover.cords()) {
    if (!c.contains(x) || c.contains(y)) continue;
    const TaxonId z = c.other(x);
    const Rational moved = dist.at(c) + ly - lx;
    auto [it, fresh] = out.emplace(key(y, z), moved);
    if (!fresh && it->second != moved) {
      throw UnrealizableError(UnrealizableError::Stage::collision,
                              "rewriting " + cord_name(taxa, c) + " onto " + taxa.label(y) + taxa.label(z) + " gives " +
                                  format_rational(moved) + " but the existing value is " + format_rational(it->second));
    }
  }

  std::vector<std::string> labels;
  for (TaxonId t = 0; t < cover.taxon_count(); ++t) {
    if (t != x) labels.push_back(taxa.label(t));
  }
  TaxonSet reduced(labels);
  CordSet cords;
  std::map<Cord, Rational> values;
  for (const auto& [pair, d] : out) {
    Cord c(reduced.id(pair.first), reduced.id(pair.second));
    cords.insert(c);
    values.emplace(c, d);
  }
  return {TripletCover(reduced, cords), PartialDistances(reduced, std::move(values))};
}

struct CherryRecord {
  std::string removed;  // x
  std::string kept;     // y
  Rational removed_pendant;
  Rational kept_pendant;
};

struct ReconstructionResult {
  PhyloTree tree;
  std::vector<CherryRecord> cherry_log;
};

/// Rebuilds (T, lengths) from distances on a triplet cover of T by
/// repeatedly removing a cherry, then re-inserting the cherries in reverse
/// order. The result is checked against every input distance.
inline ReconstructionResult reconstruct(const TripletCover& cover, const PartialDistances& dist) {
  using Stage = UnrealizableError::Stage;
  if (!dist.matches(cover)) throw Error("distances must be defined exactly on the cords of the cover");
  if (cover.taxon_count() < 3) throw Error("reconstruction needs at least 3 taxa");

  ReconstructionResult result;
  TripletCover cur_cover = cover;
  PartialDistances cur_dist = dist;
  while (cur_cover.taxon_count() > 3) {
    const Cord cherry = find_cherry(cur_cover, cur_dist);
    const Rational lx = lambda(cherry.a, cur_cover, cur_dist);
    const Rational ly = lambda(cherry.b, cur_cover, cur_dist);
    result.cherry_log.push_back({cur_cover.taxa().label(cherry.a), cur_cover.taxa().label(cherry.b), lx, ly});
    auto reduced = reduce_instance(cur_cover, cur_dist, cherry.a, cherry.b);
    cur_cover = std::move(reduced.first);
    cur_dist = std::move(reduced.second);
  }

  // Three taxa left: the three-point formulas give the pendant lengths.
  const auto& base = cur_cover.taxa();
  for (TaxonId p = 0; p < 3; ++p) {
    for (TaxonId q = p + 1; q < 3; ++q) {
      if (!cur_cover.has(p, q)) {
        throw UnrealizableError(Stage::cherry_search, "final three taxa lack cord " + base.label(p) + base.label(q));
      }
    }
  }
  std::vector<std::string> labels{base.label(0), base.label(1), base.label(2), ""};
  std::vector<PhyloTree::Edge> edges;
  for (TaxonId p = 0; p < 3; ++p) {
    const TaxonId q = (p + 1) % 3;
    const TaxonId r = (p + 2) % 3;
    Rational len = (cur_dist.at(p, q) + cur_dist.at(p, r) - cur_dist.at(q, r)) / 2;
    if (len <= 0) {
      throw UnrealizableError(Stage::nonpositive_length,
                              "pendant length " + format_rational(len) + " at " + base.label(p) + " in the 3-taxon base");
    }
    edges.push_back({p, 3, len});
  }

  for (auto it = result.cherry_log.rbegin(); it != result.cherry_log.rend(); ++it) {
    const auto kept = std::find(labels.begin(), labels.end(), it->kept) - labels.begin();
    auto edge = std::find_if(edges.begin(), edges.end(), [&](const PhyloTree::Edge& e) {
      return e.u == static_cast<VertexId>(kept) || e.v == static_cast<VertexId>(kept);
    });
    const VertexId parent = edge->u == static_cast<VertexId>(kept) ? edge->v : edge->u;
    const Rational inner = edge->length - it->kept_pendant;
    if (it->kept_pendant <= 0 || it->removed_pendant <= 0 || inner <= 0) {
      throw UnrealizableError(Stage::nonpositive_length, "re-attaching cherry " + it->removed + it->kept +
                                                             " needs lengths " + format_rational(it->removed_pendant) +
                                                             ", " + format_rational(it->kept_pendant) + ", " +
                                                             format_rational(inner));
    }
    const auto u = static_cast<VertexId>(labels.size());
    labels.emplace_back();
    const auto x = static_cast<VertexId>(labels.size());
    labels.push_back(it->removed);
    edges.erase(edge);
    edges.push_back({static_cast<VertexId>(kept), u, it->kept_pendant});
    edges.push_back({u, parent, inner});
    edges.push_back({x, u, it->removed_pendant});
  }

  result.tree = PhyloTree::build(labels, edges);
  for (const auto& [c, d] : dist.values()) {
    const Rational got = result.tree.path_distance(cover.taxa().label(c.a), cover.taxa().label(c.b));
    if (got != d) {
      throw UnrealizableError(Stage::verification, "reconstructed tree gives " + format_rational(got) + " on " +
                                                       cord_name(cover.taxa(), c) + ", input says " + format_rational(d));
    }
  }
  return result;
}

}  // namespace tripcover

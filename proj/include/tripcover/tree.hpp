#pragma once

#include "tripcover/rational.hpp"
#include "tripcover/taxa.hpp"

#include <algorithm>
#include <array>
#include <compare>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace tripcover {

/// Opaque vertex id, stable within one tree value.
using VertexId = int;

/// An X-split A|B, stored with the block holding the least taxon first.
struct Split {
  TaxonIds first;
  TaxonIds second;

  Split() = default;
  Split(TaxonIds a, TaxonIds b) : first(std::move(a)), second(std::move(b)) {
    std::sort(first.begin(), first.end());
    std::sort(second.begin(), second.end());
    if (first.empty() || second.empty()) throw Error("split blocks must be nonempty");
    if (second.front() < first.front()) std::swap(first, second);
  }

  bool trivial() const { return first.size() == 1 || second.size() == 1; }
  bool separates(TaxonId x, TaxonId y) const {
    bool x_first = std::binary_search(first.begin(), first.end(), x);
    bool y_first = std::binary_search(first.begin(), first.end(), y);
    return x_first != y_first;
  }

  friend auto operator<=>(const Split&, const Split&) = default;
};

/// Resolution of a four-taxon subset {a,b,x,y} as queried by quartet_topology.
enum class Quartet { ab_xy, ax_by, ay_bx, star };

/// Binary phylogenetic X-tree with strictly positive exact edge lengths.
///
/// Vertices 0..n-1 are the leaves, leaf i carrying taxon i of taxa();
/// vertices n..2n-3 are the interior vertices. Values are immutable once
/// built; every query is const and thread-safe.
class PhyloTree {
 public:
  struct Edge {
    VertexId u = 0;
    VertexId v = 0;
    Rational length;
  };

  PhyloTree() = default;

  /// Builds a tree from an arbitrary vertex numbering. `leaf_labels[v]` is the
  /// taxon on vertex v, or empty for an interior vertex. Vertices are
  /// renumbered into the canonical layout.
  static PhyloTree build(const std::vector<std::string>& leaf_labels, const std::vector<Edge>& edges) {
    std::vector<std::string> labels;
    for (const auto& l : leaf_labels) {
      if (!l.empty()) labels.push_back(l);
    }
    TaxonSet taxa(labels);
    const int n = taxa.size();
    if (n < 3) throw Error("a phylogenetic tree needs at least 3 taxa");

    std::vector<VertexId> remap(leaf_labels.size(), -1);
    int next_interior = n;
    for (std::size_t v = 0; v < leaf_labels.size(); ++v) {
      remap[v] = leaf_labels[v].empty() ? next_interior++ : taxa.id(leaf_labels[v]);
    }
    std::vector<Edge> renumbered;
    renumbered.reserve(edges.size());
    for (const auto& e : edges) {
      if (e.u < 0 || e.v < 0 || static_cast<std::size_t>(e.u) >= remap.size() ||
          static_cast<std::size_t>(e.v) >= remap.size()) {
        throw Error("edge endpoint out of range");
      }
      renumbered.push_back({remap[static_cast<std::size_t>(e.u)], remap[static_cast<std::size_t>(e.v)], e.length});
    }
    return PhyloTree(std::move(taxa), next_interior, std::move(renumbered));
  }

  /// Builds from the canonical layout directly (leaf i carries taxon i).
  PhyloTree(TaxonSet taxa, int vertex_count, std::vector<Edge> edges)
      : taxa_(std::move(taxa)), edges_(std::move(edges)), adj_(static_cast<std::size_t>(vertex_count)) {
    validate_and_index(vertex_count);
  }

  const TaxonSet& taxa() const { return taxa_; }
  int leaf_count() const { return taxa_.size(); }
  int vertex_count() const { return static_cast<int>(adj_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }

  bool is_leaf(VertexId v) const { return v < leaf_count(); }
  TaxonId taxon_of(VertexId leaf) const { return leaf; }
  VertexId leaf_of(TaxonId x) const { return x; }

  std::vector<VertexId> interior_vertices() const {
    std::vector<VertexId> out;
    for (VertexId v = leaf_count(); v < vertex_count(); ++v) out.push_back(v);
    return out;
  }

  /// (neighbour, edge index) pairs.
  const std::vector<std::pair<VertexId, int>>& neighbours(VertexId v) const {
    return adj_.at(static_cast<std::size_t>(v));
  }

  /// Number of edges on the path between two vertices.
  int hops(VertexId u, VertexId v) const {
    return hops_[static_cast<std::size_t>(u) * adj_.size() + static_cast<std::size_t>(v)];
  }

  /// Total length of the path between two taxa; zero iff x == y.
  const Rational& path_distance(TaxonId x, TaxonId y) const {
    check_taxon(x);
    check_taxon(y);
    return leaf_dist_[static_cast<std::size_t>(x) * static_cast<std::size_t>(leaf_count()) + static_cast<std::size_t>(y)];
  }

  const Rational& path_distance(const std::string& x, const std::string& y) const {
    return path_distance(taxa_.id(x), taxa_.id(y));
  }

  /// Taxa in the component of T - v that contains neighbour w.
  TaxonIds side(VertexId v, VertexId w) const {
    TaxonIds out;
    for (TaxonId x = 0; x < leaf_count(); ++x) {
      if (hops(x, w) < hops(x, v)) out.push_back(x);
    }
    return out;
  }

  /// The three leaf sets of T - v for interior v, ordered by least taxon.
  std::array<TaxonIds, 3> components(VertexId v) const {
    if (is_leaf(v)) throw Error("components() needs an interior vertex");
    std::array<TaxonIds, 3> out;
    const auto& nb = neighbours(v);
    for (std::size_t i = 0; i < 3; ++i) out[i] = side(v, nb[i].first);
    std::sort(out.begin(), out.end(), [](const TaxonIds& a, const TaxonIds& b) { return a.front() < b.front(); });
    return out;
  }

  /// Names an interior vertex by the least taxon of each component of T - v.
  Triple vertex_key(VertexId v) const {
    auto comps = components(v);
    return Triple(comps[0].front(), comps[1].front(), comps[2].front());
  }

  /// The unique vertex lying on all three paths between x, y and z.
  VertexId median(TaxonId x, TaxonId y, TaxonId z) const {
    check_taxon(x);
    check_taxon(y);
    check_taxon(z);
    if (x == y || x == z || y == z) throw Error("median needs three distinct taxa");
    for (VertexId m = leaf_count(); m < vertex_count(); ++m) {
      if (hops(x, m) + hops(m, y) == hops(x, y) && hops(x, m) + hops(m, z) == hops(x, z) &&
          hops(y, m) + hops(m, z) == hops(y, z)) {
        return m;
      }
    }
    throw Error("median not found");  // unreachable for a valid tree
  }

  /// One split per edge, sorted.
  std::vector<Split> splits() const {
    std::vector<Split> out;
    out.reserve(edges_.size());
    for (const auto& e : edges_) out.push_back(edge_split(e));
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Split of every edge together with its length.
  std::map<Split, Rational> split_lengths() const {
    std::map<Split, Rational> out;
    for (const auto& e : edges_) out.emplace(edge_split(e), e.length);
    return out;
  }

  Split edge_split(const Edge& e) const {
    TaxonIds a, b;
    for (TaxonId x = 0; x < leaf_count(); ++x) {
      (hops(x, e.u) < hops(x, e.v) ? a : b).push_back(x);
    }
    return Split(std::move(a), std::move(b));
  }

  /// Pairs of leaves adjacent to a common vertex.
  std::vector<Cord> cherries() const {
    std::set<Cord> out;
    for (VertexId v = leaf_count(); v < vertex_count(); ++v) {
      std::vector<TaxonId> leaves;
      for (const auto& [w, e] : neighbours(v)) {
        if (is_leaf(w)) leaves.push_back(w);
      }
      for (std::size_t i = 0; i < leaves.size(); ++i) {
        for (std::size_t j = i + 1; j < leaves.size(); ++j) out.emplace(leaves[i], leaves[j]);
      }
    }
    return {out.begin(), out.end()};
  }

  /// Quartet displayed on {a,b,x,y}, decided by topological four-point sums.
  Quartet quartet_topology(TaxonId a, TaxonId b, TaxonId x, TaxonId y) const {
    for (TaxonId t : {a, b, x, y}) check_taxon(t);
    std::set<TaxonId> distinct{a, b, x, y};
    if (distinct.size() != 4) throw Error("quartet needs four distinct taxa");
    int s_ab = hops(a, b) + hops(x, y);
    int s_ax = hops(a, x) + hops(b, y);
    int s_ay = hops(a, y) + hops(b, x);
    if (s_ab < s_ax && s_ab < s_ay) return Quartet::ab_xy;
    if (s_ax < s_ab && s_ax < s_ay) return Quartet::ax_by;
    if (s_ay < s_ab && s_ay < s_ax) return Quartet::ay_bx;
    return Quartet::star;
  }

  /// T|_A: subtree spanned by A with degree-2 vertices suppressed.
  PhyloTree restrict_to(const TaxonIds& subset) const {
    std::set<TaxonId> keep_taxa(subset.begin(), subset.end());
    for (TaxonId x : keep_taxa) check_taxon(x);
    if (keep_taxa.size() < 3) throw Error("restriction needs at least 3 taxa");

    // A vertex is spanned iff it is a kept leaf or at least two of its
    // directions reach kept leaves.
    std::vector<bool> spanned(adj_.size(), false);
    for (VertexId v = 0; v < vertex_count(); ++v) {
      if (is_leaf(v)) {
        spanned[static_cast<std::size_t>(v)] = keep_taxa.count(v) > 0;
        continue;
      }
      int dirs = 0;
      for (const auto& [w, e] : neighbours(v)) {
        bool any = false;
        for (TaxonId x : keep_taxa) {
          if (hops(x, w) < hops(x, v)) {
            any = true;
            break;
          }
        }
        dirs += any ? 1 : 0;
      }
      spanned[static_cast<std::size_t>(v)] = dirs >= 2;
    }
    return suppress(spanned);
  }

  PhyloTree restrict_to_labels(const std::vector<std::string>& labels) const {
    TaxonIds ids;
    for (const auto& l : labels) ids.push_back(taxa_.id(l));
    return restrict_to(ids);
  }

  /// T - x: drop leaf x and merge the two edges at its former neighbour.
  PhyloTree remove_leaf(TaxonId x) const {
    check_taxon(x);
    if (leaf_count() < 4) throw Error("cannot remove a leaf from a 3-taxon tree");
    const VertexId p = neighbours(x).front().first;
    std::vector<std::pair<VertexId, Rational>> others;
    for (const auto& [w, e] : neighbours(p)) {
      if (w != x) others.emplace_back(w, edges_[static_cast<std::size_t>(e)].length);
    }
    std::vector<std::string> labels(adj_.size());
    for (TaxonId t = 0; t < leaf_count(); ++t) {
      if (t != x) labels[static_cast<std::size_t>(t)] = taxa_.label(t);
    }
    std::vector<Edge> kept;
    for (const auto& e : edges_) {
      if (e.u == p || e.v == p) continue;
      kept.push_back(e);
    }
    kept.push_back({others[0].first, others[1].first, others[0].second + others[1].second});
    // x and p become isolated; drop them by compacting ids.
    std::vector<VertexId> remap(adj_.size(), -1);
    std::vector<std::string> compact_labels;
    for (VertexId v = 0; v < vertex_count(); ++v) {
      if (v == x || v == p) continue;
      remap[static_cast<std::size_t>(v)] = static_cast<VertexId>(compact_labels.size());
      compact_labels.push_back(labels[static_cast<std::size_t>(v)]);
    }
    for (auto& e : kept) {
      e.u = remap[static_cast<std::size_t>(e.u)];
      e.v = remap[static_cast<std::size_t>(e.v)];
    }
    return build(compact_labels, kept);
  }

 private:
  void check_taxon(TaxonId x) const {
    if (x < 0 || x >= leaf_count()) throw Error("unknown taxon id " + std::to_string(x));
  }

  void validate_and_index(int vertex_count) {
    const int n = taxa_.size();
    if (n < 3) throw Error("a phylogenetic tree needs at least 3 taxa");
    if (vertex_count != 2 * n - 2) {
      throw Error("binary tree on " + std::to_string(n) + " taxa must have " + std::to_string(n - 2) +
                  " interior vertices");
    }
    if (static_cast<int>(edges_.size()) != 2 * n - 3) throw Error("binary tree must have 2n-3 edges");
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      const auto& e = edges_[i];
      if (e.u < 0 || e.v < 0 || e.u >= vertex_count || e.v >= vertex_count || e.u == e.v) {
        throw Error("invalid edge endpoints");
      }
      if (e.length <= 0) throw Error("edge lengths must be strictly positive");
      adj_[static_cast<std::size_t>(e.u)].emplace_back(e.v, static_cast<int>(i));
      adj_[static_cast<std::size_t>(e.v)].emplace_back(e.u, static_cast<int>(i));
    }
    for (VertexId v = 0; v < vertex_count; ++v) {
      const auto deg = adj_[static_cast<std::size_t>(v)].size();
      if (v < n && deg != 1) throw Error("leaf '" + taxa_.label(v) + "' must have degree 1");
      if (v >= n && deg != 3) throw Error("interior vertex of degree " + std::to_string(deg) + " (tree is not binary)");
    }

    const auto vc = static_cast<std::size_t>(vertex_count);
    hops_.assign(vc * vc, -1);
    for (VertexId s = 0; s < vertex_count; ++s) {
      std::deque<VertexId> queue{s};
      hops_[static_cast<std::size_t>(s) * vc + static_cast<std::size_t>(s)] = 0;
      while (!queue.empty()) {
        VertexId u = queue.front();
        queue.pop_front();
        for (const auto& [w, e] : adj_[static_cast<std::size_t>(u)]) {
          auto& h = hops_[static_cast<std::size_t>(s) * vc + static_cast<std::size_t>(w)];
          if (h < 0) {
            h = hops_[static_cast<std::size_t>(s) * vc + static_cast<std::size_t>(u)] + 1;
            queue.push_back(w);
          }
        }
      }
    }
    for (int h : hops_) {
      if (h < 0) throw Error("tree is not connected");
    }

    const auto nn = static_cast<std::size_t>(n);
    leaf_dist_.assign(nn * nn, Rational(0));
    for (TaxonId s = 0; s < n; ++s) {
      std::vector<Rational> dist(vc);
      std::vector<bool> seen(vc, false);
      std::vector<VertexId> stack{s};
      seen[static_cast<std::size_t>(s)] = true;
      while (!stack.empty()) {
        VertexId u = stack.back();
        stack.pop_back();
        for (const auto& [w, e] : adj_[static_cast<std::size_t>(u)]) {
          if (seen[static_cast<std::size_t>(w)]) continue;
          seen[static_cast<std::size_t>(w)] = true;
          dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(u)] + edges_[static_cast<std::size_t>(e)].length;
          stack.push_back(w);
        }
      }
      for (TaxonId t = 0; t < n; ++t) {
        leaf_dist_[static_cast<std::size_t>(s) * nn + static_cast<std::size_t>(t)] = dist[static_cast<std::size_t>(t)];
      }
    }
  }

  /// Keeps the spanned vertices and contracts every path through a
  /// spanned vertex of degree 2 into a single edge.
  PhyloTree suppress(const std::vector<bool>& spanned) const {
    auto span_degree = [&](VertexId v) {
      int d = 0;
      for (const auto& [w, e] : neighbours(v)) d += spanned[static_cast<std::size_t>(w)] ? 1 : 0;
      return d;
    };
    std::vector<std::string> labels;
    std::vector<VertexId> remap(adj_.size(), -1);
    for (VertexId v = 0; v < vertex_count(); ++v) {
      if (!spanned[static_cast<std::size_t>(v)] || span_degree(v) == 2) continue;
      remap[static_cast<std::size_t>(v)] = static_cast<VertexId>(labels.size());
      labels.push_back(is_leaf(v) ? taxa_.label(v) : std::string());
    }
    std::vector<Edge> out;
    for (VertexId v = 0; v < vertex_count(); ++v) {
      if (remap[static_cast<std::size_t>(v)] < 0) continue;
      for (const auto& [first, first_edge] : neighbours(v)) {
        if (!spanned[static_cast<std::size_t>(first)]) continue;
        VertexId prev = v;
        VertexId cur = first;
        Rational length = edges_[static_cast<std::size_t>(first_edge)].length;
        while (remap[static_cast<std::size_t>(cur)] < 0) {
          bool moved = false;
          for (const auto& [w, e] : neighbours(cur)) {
            if (w == prev || !spanned[static_cast<std::size_t>(w)]) continue;
            length += edges_[static_cast<std::size_t>(e)].length;
            prev = cur;
            cur = w;
            moved = true;
            break;
          }
          if (!moved) throw Error("restriction walk failed");
        }
        if (v < cur) out.push_back({remap[static_cast<std::size_t>(v)], remap[static_cast<std::size_t>(cur)], length});
      }
    }
    return build(labels, out);
  }

  TaxonSet taxa_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::pair<VertexId, int>>> adj_;
  std::vector<int> hops_;
  std::vector<Rational> leaf_dist_;
};

/// True iff both trees have the same splits (and, optionally, the same
/// length on every split's edge). Trees must share their taxon set.
inline bool is_isomorphic(const PhyloTree& t1, const PhyloTree& t2, bool compare_lengths = false) {
  if (!(t1.taxa() == t2.taxa())) throw Error("isomorphism test needs identical taxon sets");
  if (!compare_lengths) return t1.splits() == t2.splits();
  return t1.split_lengths() == t2.split_lengths();
}

}  // namespace tripcover

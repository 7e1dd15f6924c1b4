#pragma once

#include "tripcover/cover.hpp"
#include "tripcover/taxa.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace tripcover {

/// Simple undirected graph on vertices 0..n-1 (the taxa of a cover).
class CoverGraph {
 public:
  CoverGraph() = default;

  CoverGraph(int vertex_count, const CordSet& edges)
      : n_(vertex_count), edges_(edges), adj_(static_cast<std::size_t>(vertex_count) * static_cast<std::size_t>(vertex_count), 0) {
    for (const auto& e : edges_) {
      if (e.a < 0 || e.b >= n_) throw Error("graph edge outside the vertex range");
      adj_[idx(e.a, e.b)] = adj_[idx(e.b, e.a)] = 1;
    }
  }

  int vertex_count() const { return n_; }
  const CordSet& edges() const { return edges_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  bool adjacent(TaxonId x, TaxonId y) const { return x != y && adj_[idx(x, y)] != 0; }

  int degree(TaxonId x) const {
    int d = 0;
    for (TaxonId y = 0; y < n_; ++y) d += adjacent(x, y) ? 1 : 0;
    return d;
  }

 private:
  std::size_t idx(TaxonId x, TaxonId y) const {
    return static_cast<std::size_t>(x) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(y);
  }

  int n_ = 0;
  CordSet edges_;
  std::vector<std::uint8_t> adj_;
};

/// Γ(T): vertex set X, edge set the cords.
inline CoverGraph build_cover_graph(const TripletCover& cover) {
  return {cover.taxon_count(), cover.cord_set()};
}

/// All 3-cliques.
inline TripleSet triangles(const CoverGraph& g) {
  TripleSet out;
  for (const auto& e : g.edges()) {
    for (TaxonId z = e.b + 1; z < g.vertex_count(); ++z) {
      if (g.adjacent(e.a, z) && g.adjacent(e.b, z)) out.emplace(e.a, e.b, z);
    }
  }
  return out;
}

/// 3-cliques of the graph formed by an edge set alone.
inline TripleSet triangles_of_edges(const CordSet& edges) {
  std::map<TaxonId, std::set<TaxonId>> nb;
  for (const auto& e : edges) {
    nb[e.a].insert(e.b);
    nb[e.b].insert(e.a);
  }
  TripleSet out;
  for (const auto& e : edges) {
    for (TaxonId z : nb[e.a]) {
      if (z > e.b && nb[e.b].count(z)) out.emplace(e.a, e.b, z);
    }
  }
  return out;
}

namespace detail {

inline bool connected_without(const CoverGraph& g, TaxonId removed) {
  const int n = g.vertex_count();
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  TaxonId start = removed == 0 ? 1 : 0;
  std::vector<TaxonId> stack{start};
  seen[static_cast<std::size_t>(start)] = true;
  int reached = 1;
  while (!stack.empty()) {
    TaxonId u = stack.back();
    stack.pop_back();
    for (TaxonId w = 0; w < n; ++w) {
      if (w == removed || seen[static_cast<std::size_t>(w)] || !g.adjacent(u, w)) continue;
      seen[static_cast<std::size_t>(w)] = true;
      ++reached;
      stack.push_back(w);
    }
  }
  return reached == n - (removed >= 0 ? 1 : 0);
}

}  // namespace detail

/// Connected with no cut vertex.
inline bool is_two_connected(const CoverGraph& g) {
  if (g.vertex_count() < 3) throw Error("2-connectivity needs at least 3 vertices");
  if (!detail::connected_without(g, -1)) return false;
  for (TaxonId x = 0; x < g.vertex_count(); ++x) {
    if (!detail::connected_without(g, x)) return false;
  }
  return true;
}

/// 2-tree recognition on the subgraph (vertices, edges) by repeatedly
/// peeling a degree-2 vertex whose neighbours are adjacent. Returns a
/// construction order v1, v2, ..., vq on success.
inline std::optional<std::vector<TaxonId>> two_tree_order(const TaxonIds& vertices, const CordSet& edges) {
  if (vertices.size() < 3) return std::nullopt;
  if (edges.size() != 2 * vertices.size() - 3) return std::nullopt;
  std::map<TaxonId, std::set<TaxonId>> nb;
  for (TaxonId v : vertices) nb[v];
  for (const auto& e : edges) {
    if (!nb.count(e.a) || !nb.count(e.b)) return std::nullopt;
    nb[e.a].insert(e.b);
    nb[e.b].insert(e.a);
  }
  std::vector<TaxonId> peeled;
  while (nb.size() > 2) {
    std::optional<TaxonId> pick;
    for (const auto& [v, adj] : nb) {
      if (adj.size() != 2) continue;
      TaxonId p = *adj.begin();
      TaxonId q = *adj.rbegin();
      if (nb[p].count(q)) {
        pick = v;
        break;
      }
    }
    if (!pick) return std::nullopt;
    for (TaxonId w : nb[*pick]) nb[w].erase(*pick);
    nb.erase(*pick);
    peeled.push_back(*pick);
  }
  auto first = nb.begin();
  auto second = std::next(first);
  if (!first->second.count(second->first)) return std::nullopt;
  std::vector<TaxonId> order{first->first, second->first};
  order.insert(order.end(), peeled.rbegin(), peeled.rend());
  return order;
}

inline std::optional<std::vector<TaxonId>> two_tree_order(const CoverGraph& g) {
  if (g.vertex_count() < 3) throw Error("2-tree recognition needs at least 3 vertices");
  TaxonIds all;
  for (TaxonId x = 0; x < g.vertex_count(); ++x) all.push_back(x);
  return two_tree_order(all, g.edges());
}

inline bool is_two_tree(const CoverGraph& g) { return two_tree_order(g).has_value(); }

/// One 2-tree block (W_i, F_i) of a decomposition.
struct TwoTreeBlock {
  TaxonIds vertices;
  CordSet edges;
  TripleSet triangles;
  std::vector<Triple> construction_order;  // triples in accretion order

  friend bool operator==(const TwoTreeBlock& a, const TwoTreeBlock& b) {
    return a.vertices == b.vertices && a.edges == b.edges && a.triangles == b.triangles;
  }
};

struct TwoTreeDecomposition {
  std::vector<TwoTreeBlock> blocks;

  int block_count() const { return static_cast<int>(blocks.size()); }

  TaxonIds vertices() const {
    std::set<TaxonId> all;
    for (const auto& b : blocks) all.insert(b.vertices.begin(), b.vertices.end());
    return {all.begin(), all.end()};
  }

  /// Multiset union of the block edge sets (as a sorted list).
  std::vector<Cord> edges() const {
    std::vector<Cord> all;
    for (const auto& b : blocks) all.insert(all.end(), b.edges.begin(), b.edges.end());
    std::sort(all.begin(), all.end());
    return all;
  }

  TripleSet triangles() const {
    TripleSet all;
    for (const auto& b : blocks) all.insert(b.triangles.begin(), b.triangles.end());
    return all;
  }
};

namespace detail {

/// Orders a block's triangles so that each one after the first shares a
/// pair with an earlier one, choosing the least candidate each time.
inline std::vector<Triple> accretion_order(TripleSet pool, std::size_t limit = SIZE_MAX) {
  std::vector<Triple> seq;
  if (pool.empty()) return seq;
  seq.push_back(*pool.begin());
  pool.erase(pool.begin());
  while (seq.size() < limit) {
    auto it = std::find_if(pool.begin(), pool.end(), [&](const Triple& t) {
      return std::any_of(seq.begin(), seq.end(), [&](const Triple& s) { return s.overlap(t) == 2; });
    });
    if (it == pool.end()) break;
    seq.push_back(*it);
    pool.erase(it);
  }
  return seq;
}

/// Block spanned by a triangle family; nullopt unless it is a 2-tree whose
/// triangles are exactly the family.
inline std::optional<TwoTreeBlock> block_from_triangles(const TripleSet& family) {
  TwoTreeBlock b;
  b.triangles = family;
  b.vertices = union_of(family);
  b.edges = cord_set(family);
  if (!two_tree_order(b.vertices, b.edges)) return std::nullopt;
  if (triangles_of_edges(b.edges) != family) return std::nullopt;
  b.construction_order = accretion_order(family);
  if (b.construction_order.size() != family.size()) return std::nullopt;
  return b;
}

}  // namespace detail

/// Greedy triple accretion: start a block at the least unused triple, keep
/// adding the least unused triple sharing a pair with the block, and start a
/// new block when none is left. Throws if the blocks fail to be 2-trees with
/// pairwise disjoint edge sets, which cannot happen for a genuine section.
inline TwoTreeDecomposition decomposition_from_section(const TripleSet& section) {
  TwoTreeDecomposition out;
  TripleSet remaining = section;
  while (!remaining.empty()) {
    auto seq = detail::accretion_order(remaining);
    TripleSet family(seq.begin(), seq.end());
    for (const auto& t : seq) remaining.erase(t);
    auto block = detail::block_from_triangles(family);
    if (!block) throw Error("triple family is not a section: accreted block is not a 2-tree");
    block->construction_order = seq;
    out.blocks.push_back(std::move(*block));
  }
  CordSet seen;
  for (const auto& b : out.blocks) {
    for (const auto& e : b.edges) {
      if (!seen.insert(e).second) throw Error("triple family is not a section: blocks share an edge");
    }
  }
  return out;
}

/// Blocks are 2-trees on >= 3 vertices, vertex sets cover the graph and edge
/// sets partition its edges.
inline bool is_decomposition_of(const CoverGraph& g, const TwoTreeDecomposition& d) {
  if (d.blocks.empty()) return false;
  for (const auto& b : d.blocks) {
    if (b.vertices.size() < 3 || !two_tree_order(b.vertices, b.edges)) return false;
  }
  TaxonIds all;
  for (TaxonId x = 0; x < g.vertex_count(); ++x) all.push_back(x);
  if (d.vertices() != all) return false;
  auto edges = d.edges();
  return edges == std::vector<Cord>(g.edges().begin(), g.edges().end());
}

/// Every triangle of the graph has all three edges inside one block.
inline bool is_strict(const CoverGraph& g, const TwoTreeDecomposition& d) {
  for (const auto& b : d.blocks) {
    for (const auto& e : b.edges) {
      if (!g.adjacent(e.a, e.b)) throw Error("decomposition block is not a subgraph");
    }
  }
  for (const auto& t : triangles(g)) {
    const auto sides = t.cords();
    bool inside = std::any_of(d.blocks.begin(), d.blocks.end(), [&](const TwoTreeBlock& b) {
      return std::all_of(sides.begin(), sides.end(), [&](const Cord& c) { return b.edges.count(c) > 0; });
    });
    if (!inside) return false;
  }
  return true;
}

/// |F| = 2|W| - 4 + m for the graph (W, F) assembled from the blocks.
inline bool verify_counting(const TwoTreeDecomposition& d) {
  const auto f = static_cast<long>(d.edges().size());
  const auto w = static_cast<long>(d.vertices().size());
  return f == 2 * w - 4 + d.block_count();
}

/// Every 2-tree decomposition of the graph, by assigning each triangle to a
/// block or leaving it unused. Blocks are listed by least triangle. Refuses
/// graphs with more than `cap` triangles.
inline std::vector<TwoTreeDecomposition> enumerate_decompositions(const CoverGraph& g, int cap = 12) {
  const TripleSet all = triangles(g);
  if (static_cast<int>(all.size()) > cap) {
    throw CapacityError("decomposition search limited to " + std::to_string(cap) + " triangles, got " +
                        std::to_string(all.size()));
  }
  std::vector<Triple> tri(all.begin(), all.end());
  std::vector<TwoTreeDecomposition> found;
  if (cord_set(all) != g.edges()) return found;  // an edge outside every triangle

  std::vector<TripleSet> blocks;
  std::map<Cord, int> owner;  // edge -> block index
  std::map<Cord, int> uses;   // triangles of that block using the edge

  std::function<void(std::size_t)> assign = [&](std::size_t i) {
    if (i == tri.size()) {
      if (owner.size() != g.edges().size()) return;
      TwoTreeDecomposition d;
      for (const auto& fam : blocks) {
        auto b = detail::block_from_triangles(fam);
        if (!b) return;
        d.blocks.push_back(std::move(*b));
      }
      if (is_decomposition_of(g, d)) found.push_back(std::move(d));
      return;
    }
    const Triple& t = tri[i];
    // Unused.
    assign(i + 1);
    // Into block k (existing ones, then a fresh one).
    for (std::size_t k = 0; k <= blocks.size(); ++k) {
      bool clash = false;
      for (const auto& c : t.cords()) {
        auto it = owner.find(c);
        if (it != owner.end() && it->second != static_cast<int>(k)) clash = true;
      }
      if (clash) continue;
      if (k == blocks.size()) blocks.emplace_back();
      blocks[k].insert(t);
      for (const auto& c : t.cords()) {
        owner[c] = static_cast<int>(k);
        ++uses[c];
      }
      assign(i + 1);
      for (const auto& c : t.cords()) {
        if (--uses[c] == 0) {
          uses.erase(c);
          owner.erase(c);
        }
      }
      blocks[k].erase(t);
      if (blocks[k].empty()) blocks.pop_back();
    }
  };
  assign(0);
  return found;
}

}  // namespace tripcover

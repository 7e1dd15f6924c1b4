#pragma once

#include "tripcover/taxa.hpp"
#include "tripcover/tree.hpp"

#include <algorithm>
#include <bitset>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace tripcover {

/// Raised when an operation requires a triplet cover and gets something else.
class NotACoverError : public Error {
 public:
  using Error::Error;
};

/// A set of cords over X. Cover-ness is relative to a tree and is checked by
/// the free functions below, not by the type.
class TripletCover {
 public:
  TripletCover() = default;

  TripletCover(TaxonSet taxa, const CordSet& cords) : taxa_(std::move(taxa)) {
    const auto n = static_cast<std::size_t>(taxa_.size());
    present_.assign(n * n, 0);
    for (const auto& c : cords) {
      if (c.a < 0 || c.b >= taxa_.size()) throw Error("cord refers to a taxon outside X");
      present_[index(c.a, c.b)] = 1;
      present_[index(c.b, c.a)] = 1;
    }
    cords_.assign(cords.begin(), cords.end());
  }

  /// Builds from labelled pairs; a repeated cord is an error.
  static TripletCover from_labels(TaxonSet taxa, const std::vector<std::pair<std::string, std::string>>& pairs) {
    CordSet cords;
    for (const auto& [x, y] : pairs) {
      Cord c(taxa.id(x), taxa.id(y));
      if (!cords.insert(c).second) throw Error("duplicate cord " + x + y);
    }
    return TripletCover(std::move(taxa), cords);
  }

  const TaxonSet& taxa() const { return taxa_; }
  int taxon_count() const { return taxa_.size(); }
  const std::vector<Cord>& cords() const { return cords_; }
  CordSet cord_set() const { return {cords_.begin(), cords_.end()}; }
  int size() const { return static_cast<int>(cords_.size()); }

  bool has(TaxonId x, TaxonId y) const {
    return x != y && present_[index(x, y)] != 0;
  }
  bool has(const Cord& c) const { return has(c.a, c.b); }

  /// Number of cords containing x.
  int multiplicity(TaxonId x) const {
    if (x < 0 || x >= taxon_count()) throw Error("unknown taxon id " + std::to_string(x));
    int m = 0;
    for (TaxonId y = 0; y < taxon_count(); ++y) m += has(x, y) ? 1 : 0;
    return m;
  }

  /// Least multiplicity over X; zero for an empty cover.
  int mu() const {
    int best = std::numeric_limits<int>::max();
    for (TaxonId x = 0; x < taxon_count(); ++x) best = std::min(best, multiplicity(x));
    return taxon_count() == 0 ? 0 : best;
  }

  TripletCover without(const Cord& c) const {
    CordSet s = cord_set();
    s.erase(c);
    return {taxa_, s};
  }

  TripletCover with(const Cord& c) const {
    CordSet s = cord_set();
    s.insert(c);
    return {taxa_, s};
  }

  friend bool operator==(const TripletCover& a, const TripletCover& b) {
    return a.taxa_ == b.taxa_ && a.cords_ == b.cords_;
  }

 private:
  std::size_t index(TaxonId x, TaxonId y) const {
    return static_cast<std::size_t>(x) * static_cast<std::size_t>(taxa_.size()) + static_cast<std::size_t>(y);
  }

  TaxonSet taxa_;
  std::vector<Cord> cords_;
  std::vector<std::uint8_t> present_;
};

/// S_v for one interior vertex.
struct VertexSupport {
  VertexId vertex = 0;
  Triple key;                   // least taxon of each component of T - v
  std::vector<Triple> triples;  // sorted
};

/// Supports of all interior vertices, ordered by vertex key.
using SupportMap = std::vector<VertexSupport>;

namespace detail {

inline void require_same_taxa(const PhyloTree& tree, const TripletCover& cover) {
  if (!(tree.taxa() == cover.taxa())) throw Error("cover and tree have different taxon sets");
}

}  // namespace detail

/// Triples abc with one leaf in each component of T - v and ab, ac, bc all
/// cords, for every interior v.
inline SupportMap support_map(const PhyloTree& tree, const TripletCover& cover) {
  detail::require_same_taxa(tree, cover);
  SupportMap out;
  for (VertexId v : tree.interior_vertices()) {
    auto comps = tree.components(v);
    VertexSupport s{v, Triple(comps[0].front(), comps[1].front(), comps[2].front()), {}};
    for (TaxonId a : comps[0]) {
      for (TaxonId b : comps[1]) {
        if (!cover.has(a, b)) continue;
        for (TaxonId c : comps[2]) {
          if (cover.has(a, c) && cover.has(b, c)) s.triples.emplace_back(a, b, c);
        }
      }
    }
    std::sort(s.triples.begin(), s.triples.end());
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(), [](const VertexSupport& x, const VertexSupport& y) { return x.key < y.key; });
  return out;
}

/// Key of the first interior vertex (in key order) with empty support.
inline std::optional<Triple> first_unsupported(const PhyloTree& tree, const TripletCover& cover) {
  detail::require_same_taxa(tree, cover);
  // Cheaper than support_map: stop at the first supporting triple.
  std::optional<Triple> worst;
  for (VertexId v : tree.interior_vertices()) {
    auto comps = tree.components(v);
    bool found = false;
    for (TaxonId a : comps[0]) {
      for (TaxonId b : comps[1]) {
        if (!cover.has(a, b)) continue;
        for (TaxonId c : comps[2]) {
          if (cover.has(a, c) && cover.has(b, c)) {
            found = true;
            break;
          }
        }
        if (found) break;
      }
      if (found) break;
    }
    if (!found) {
      Triple key(comps[0].front(), comps[1].front(), comps[2].front());
      if (!worst || key < *worst) worst = key;
    }
  }
  return worst;
}

inline bool is_triplet_cover(const PhyloTree& tree, const TripletCover& cover) {
  return !first_unsupported(tree, cover).has_value();
}

inline void require_cover(const PhyloTree& tree, const TripletCover& cover) {
  if (auto missing = first_unsupported(tree, cover)) {
    throw NotACoverError("not a triplet cover: interior vertex " + triple_name(tree.taxa(), *missing) +
                         " has no supporting triple");
  }
}

/// C(T): the disjoint union of all supports.
inline TripleSet triple_set(const SupportMap& supports) {
  TripleSet out;
  for (const auto& s : supports) out.insert(s.triples.begin(), s.triples.end());
  return out;
}

inline TripleSet triple_set(const PhyloTree& tree, const TripletCover& cover) {
  return triple_set(support_map(tree, cover));
}

/// No single cord can be dropped without losing cover-ness.
inline bool is_minimal(const PhyloTree& tree, const TripletCover& cover) {
  require_cover(tree, cover);
  for (const auto& c : cover.cords()) {
    if (is_triplet_cover(tree, cover.without(c))) return false;
  }
  return true;
}

inline bool is_minimum(const PhyloTree& tree, const TripletCover& cover) {
  require_cover(tree, cover);
  return cover.size() == 2 * tree.leaf_count() - 3;
}

/// Order in which minimalize() tries to drop cords.
struct RemovalOrder {
  enum class Kind { lexicographic, seeded_random };
  Kind kind = Kind::lexicographic;
  std::uint64_t seed = 0;

  static RemovalOrder lexicographic() { return {}; }
  static RemovalOrder random(std::uint64_t seed) { return {Kind::seeded_random, seed}; }
};

/// Drops cords one at a time in the given order whenever the remainder is
/// still a triplet cover. The result is a minimal cover inside the input.
inline TripletCover minimalize(const PhyloTree& tree, const TripletCover& cover,
                               RemovalOrder order = RemovalOrder::lexicographic()) {
  require_cover(tree, cover);
  std::vector<Cord> candidates = cover.cords();
  if (order.kind == RemovalOrder::Kind::seeded_random) {
    std::mt19937_64 rng(order.seed);
    std::shuffle(candidates.begin(), candidates.end(), rng);
  }
  TripletCover current = cover;
  for (const auto& c : candidates) {
    TripletCover trial = current.without(c);
    if (is_triplet_cover(tree, trial)) current = std::move(trial);
  }
  return current;
}

inline bool is_sparse(const PhyloTree& tree, const TripletCover& cover) {
  require_cover(tree, cover);
  return static_cast<int>(triple_set(tree, cover).size()) == tree.leaf_count() - 2;
}

/// Every nonempty subfamily C' has |union C'| >= |C'| + 2, and the family
/// covers X. Decided by visiting all subfamilies, so it refuses families
/// larger than `cap`.
inline bool is_hall_type(const TaxonIds& taxa, const TripleSet& triples, int cap = 22) {
  TaxonIds ground = taxa;
  std::sort(ground.begin(), ground.end());
  ground.erase(std::unique(ground.begin(), ground.end()), ground.end());
  if (union_of(triples) != ground) return false;
  // the whole family is itself a subfamily
  if (triples.size() + 2 > ground.size()) return false;
  if (static_cast<int>(triples.size()) > cap) {
    throw CapacityError("Hall-type check limited to " + std::to_string(cap) + " triples, got " +
                        std::to_string(triples.size()));
  }
  // Compact the used taxa so every triple fits in a fixed-width mask.
  TaxonIds used = union_of(triples);
  using Mask = std::bitset<128>;
  std::vector<Mask> masks;
  for (const auto& t : triples) {
    Mask m;
    for (TaxonId x : t.v) {
      m.set(static_cast<std::size_t>(std::lower_bound(used.begin(), used.end(), x) - used.begin()));
    }
    masks.push_back(m);
  }
  const int k = static_cast<int>(masks.size());
  // Depth-first over subsets; `chosen` members so far with union `acc`.
  std::function<bool(int, const Mask&, int)> ok = [&](int next, const Mask& acc, int chosen) {
    if (chosen > 0 && static_cast<int>(acc.count()) < chosen + 2) return false;
    for (int i = next; i < k; ++i) {
      if (!ok(i + 1, acc | masks[static_cast<std::size_t>(i)], chosen + 1)) return false;
    }
    return true;
  };
  return ok(0, Mask{}, 0);
}

inline bool is_hall_type(int taxon_count, const TripleSet& triples, int cap = 22) {
  TaxonIds all(static_cast<std::size_t>(taxon_count));
  std::iota(all.begin(), all.end(), 0);
  return is_hall_type(all, triples, cap);
}

/// Product of the support sizes, saturating at the largest uint64.
inline std::uint64_t section_count(const SupportMap& supports) {
  std::uint64_t total = 1;
  for (const auto& s : supports) {
    const auto k = static_cast<std::uint64_t>(s.triples.size());
    if (k == 0) return 0;
    if (total > std::numeric_limits<std::uint64_t>::max() / k) return std::numeric_limits<std::uint64_t>::max();
    total *= k;
  }
  return total;
}

/// Walks the sections of C(T) in lexicographic order of the per-vertex
/// choices (vertices in key order, each support sorted).
class SectionCursor {
 public:
  explicit SectionCursor(SupportMap supports) : supports_(std::move(supports)), digits_(supports_.size(), 0) {
    for (const auto& s : supports_) {
      if (s.triples.empty()) throw NotACoverError("a vertex has empty support, so there are no sections");
    }
  }

  std::optional<TripleSet> next() {
    if (done_) return std::nullopt;
    TripleSet section;
    for (std::size_t i = 0; i < supports_.size(); ++i) section.insert(supports_[i].triples[digits_[i]]);
    advance();
    return section;
  }

 private:
  void advance() {
    for (std::size_t i = supports_.size(); i-- > 0;) {
      if (++digits_[i] < supports_[i].triples.size()) return;
      digits_[i] = 0;
    }
    done_ = true;
  }

  SupportMap supports_;
  std::vector<std::size_t> digits_;
  bool done_ = false;
};

/// Up to `limit` sections, in cursor order.
inline std::vector<TripleSet> enumerate_sections(const SupportMap& supports, std::size_t limit) {
  if (limit == 0) throw Error("section limit must be positive");
  SectionCursor cursor(supports);
  std::vector<TripleSet> out;
  while (out.size() < limit) {
    auto s = cursor.next();
    if (!s) break;
    out.push_back(std::move(*s));
  }
  return out;
}

/// Picks one leaf from a component of T - v. Arguments: the vertex, the
/// component's position (0..2, ordered by least taxon) and its taxa.
using LeafChooser = std::function<TaxonId(VertexId, int, const TaxonIds&)>;

inline LeafChooser least_label_chooser() {
  return [](VertexId, int, const TaxonIds& comp) { return comp.front(); };
}

/// Uniform leaf per component. Deterministic for a given tree and seed
/// because vertices are visited in id order.
inline LeafChooser random_chooser(std::uint64_t seed) {
  auto rng = std::make_shared<std::mt19937_64>(seed);
  return [rng](VertexId, int, const TaxonIds& comp) {
    std::uniform_int_distribution<std::size_t> pick(0, comp.size() - 1);
    return comp[pick(*rng)];
  };
}

/// Union over interior v of the three cords of a triple with one chosen leaf
/// per component of T - v. Always a triplet cover.
inline TripletCover canonical_cover(const PhyloTree& tree, const LeafChooser& chooser) {
  CordSet cords;
  for (VertexId v : tree.interior_vertices()) {
    auto comps = tree.components(v);
    TaxonId picks[3];
    for (int i = 0; i < 3; ++i) picks[i] = chooser(v, i, comps[static_cast<std::size_t>(i)]);
    for (const auto& c : Triple(picks[0], picks[1], picks[2]).cords()) cords.insert(c);
  }
  return {tree.taxa(), cords};
}

/// T^{-x}: drops every cord through x and x itself from the taxon set.
inline TripletCover remove_taxon_cover(const TripletCover& cover, TaxonId x) {
  if (x < 0 || x >= cover.taxon_count()) throw Error("unknown taxon id " + std::to_string(x));
  std::vector<std::string> labels;
  for (TaxonId y = 0; y < cover.taxon_count(); ++y) {
    if (y != x) labels.push_back(cover.taxa().label(y));
  }
  TaxonSet reduced(labels);
  auto shift = [x](TaxonId y) { return y > x ? y - 1 : y; };
  CordSet cords;
  for (const auto& c : cover.cords()) {
    if (!c.contains(x)) cords.emplace(shift(c.a), shift(c.b));
  }
  return {std::move(reduced), cords};
}

/// The cover restricted to the taxa in `subset`, re-indexed over that subset.
inline TripletCover restrict_cover(const TripletCover& cover, const TaxonIds& subset) {
  TaxonIds sorted = subset;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::string> labels;
  for (TaxonId x : sorted) labels.push_back(cover.taxa().label(x));
  auto pos = [&](TaxonId x) { return static_cast<TaxonId>(std::lower_bound(sorted.begin(), sorted.end(), x) - sorted.begin()); };
  CordSet cords;
  for (const auto& c : cover.cords()) {
    if (std::binary_search(sorted.begin(), sorted.end(), c.a) && std::binary_search(sorted.begin(), sorted.end(), c.b)) {
      cords.emplace(pos(c.a), pos(c.b));
    }
  }
  return {TaxonSet(labels), cords};
}

/// All of (X choose 2).
inline TripletCover full_cover(const TaxonSet& taxa) {
  CordSet cords;
  for (TaxonId x = 0; x < taxa.size(); ++x) {
    for (TaxonId y = x + 1; y < taxa.size(); ++y) cords.emplace(x, y);
  }
  return {taxa, cords};
}

}  // namespace tripcover

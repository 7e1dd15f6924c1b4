#pragma once

#include "tripcover/cover.hpp"
#include "tripcover/tree.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <iterator>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tripcover {

/// Adds cord ab, forced by witnesses x, y: T displays xa|yb on {a,b,x,y}
/// and the other five cords of that quartet are already available.
struct ShellingStep {
  TaxonId a = 0;
  TaxonId b = 0;
  TaxonId x = 0;
  TaxonId y = 0;

  Cord cord() const { return {a, b}; }
  friend bool operator==(const ShellingStep&, const ShellingStep&) = default;
};

using Shelling = std::vector<ShellingStep>;

/// "xa|yb" with taxon labels.
inline std::string quartet_name(const TaxonSet& taxa, const ShellingStep& s) {
  return taxa.label(s.x) + taxa.label(s.a) + "|" + taxa.label(s.y) + taxa.label(s.b);
}

namespace detail {

/// Mutable cord matrix used while saturating.
class CordMatrix {
 public:
  explicit CordMatrix(const TripletCover& cover)
      : n_(cover.taxon_count()), bits_(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_), 0) {
    for (const auto& c : cover.cords()) add(c.a, c.b);
  }

  bool has(TaxonId x, TaxonId y) const { return bits_[idx(x, y)] != 0; }
  void add(TaxonId x, TaxonId y) { bits_[idx(x, y)] = bits_[idx(y, x)] = 1; }
  int taxon_count() const { return n_; }

  CordSet cords() const {
    CordSet out;
    for (TaxonId x = 0; x < n_; ++x) {
      for (TaxonId y = x + 1; y < n_; ++y) {
        if (has(x, y)) out.emplace(x, y);
      }
    }
    return out;
  }

 private:
  std::size_t idx(TaxonId x, TaxonId y) const {
    return static_cast<std::size_t>(x) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(y);
  }
  int n_;
  std::vector<std::uint8_t> bits_;
};

/// First witness pair (lexicographic over ordered pairs) that forces ab.
inline std::optional<ShellingStep> find_witness(const PhyloTree& tree, const CordMatrix& m, TaxonId a, TaxonId b) {
  const int n = m.taxon_count();
  for (TaxonId x = 0; x < n; ++x) {
    if (x == a || x == b || !m.has(x, a) || !m.has(x, b)) continue;
    for (TaxonId y = 0; y < n; ++y) {
      if (y == a || y == b || y == x) continue;
      if (!m.has(y, a) || !m.has(y, b) || !m.has(x, y)) continue;
      // Recomputed from the tree on every step, never cached.
      if (tree.quartet_topology(a, b, x, y) == Quartet::ax_by) return ShellingStep{a, b, x, y};
    }
  }
  return std::nullopt;
}

}  // namespace detail

struct ClosureResult {
  CordSet closed;
  Shelling steps;
  bool complete = false;  // reached all of (X choose 2)
};

/// Saturates the cover under quartet-forced additions. Missing cords and
/// witness pairs are scanned lexicographically; passes repeat until a pass
/// adds nothing. Since additions only enlarge the set of available cords,
/// any cord that is ever addable stays addable, so the final set does not
/// depend on the scan order.
inline ClosureResult cord_closure(const PhyloTree& tree, const TripletCover& cover) {
  require_cover(tree, cover);
  detail::CordMatrix m(cover);
  const int n = tree.leaf_count();
  ClosureResult out;
  for (bool changed = true; changed;) {
    changed = false;
    for (TaxonId a = 0; a < n; ++a) {
      for (TaxonId b = a + 1; b < n; ++b) {
        if (m.has(a, b)) continue;
        if (auto step = detail::find_witness(tree, m, a, b)) {
          m.add(a, b);
          out.steps.push_back(*step);
          changed = true;
        }
      }
    }
  }
  out.closed = m.cords();
  out.complete = static_cast<int>(out.closed.size()) == n * (n - 1) / 2;
  return out;
}

/// Same saturation with a seeded random scan order in every pass.
inline ClosureResult cord_closure_shuffled(const PhyloTree& tree, const TripletCover& cover, std::uint64_t seed) {
  require_cover(tree, cover);
  detail::CordMatrix m(cover);
  std::mt19937_64 rng(seed);
  const int n = tree.leaf_count();
  ClosureResult out;
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<Cord> missing;
    for (TaxonId a = 0; a < n; ++a) {
      for (TaxonId b = a + 1; b < n; ++b) {
        if (!m.has(a, b)) missing.emplace_back(a, b);
      }
    }
    std::shuffle(missing.begin(), missing.end(), rng);
    for (const auto& c : missing) {
      if (auto step = detail::find_witness(tree, m, c.a, c.b)) {
        m.add(c.a, c.b);
        out.steps.push_back(*step);
        changed = true;
      }
    }
  }
  out.closed = m.cords();
  out.complete = static_cast<int>(out.closed.size()) == n * (n - 1) / 2;
  return out;
}

struct ShellabilityResult {
  bool shellable = false;
  Shelling witness;  // valid shelling when shellable
};

inline ShellabilityResult is_shellable(const PhyloTree& tree, const TripletCover& cover) {
  require_cover(tree, cover);
  if (tree.leaf_count() == 3) return {true, {}};
  auto closure = cord_closure(tree, cover);
  if (!closure.complete) return {false, {}};
  return {true, std::move(closure.steps)};
}

/// Quartet on four taxa read off T restricted to them, independently of the
/// hop-count test used while saturating. Returns true iff {p,q}|{r,s}.
inline bool displays_quartet(const PhyloTree& tree, TaxonId p, TaxonId q, TaxonId r, TaxonId s) {
  const std::vector<std::string> labels{tree.taxa().label(p), tree.taxa().label(q), tree.taxa().label(r),
                                        tree.taxa().label(s)};
  PhyloTree quartet = tree.restrict_to_labels(labels);
  const auto cherries = quartet.cherries();
  const Cord pq(quartet.taxa().id(labels[0]), quartet.taxa().id(labels[1]));
  return std::find(cherries.begin(), cherries.end(), pq) != cherries.end();
}

/// Checks a shelling against the definition: every step adds a missing cord,
/// its witnesses display xa|yb and the other five cords are available, and
/// the steps add exactly the cords missing from the cover. Returns an empty
/// string when valid, else the reason.
inline std::string check_shelling(const PhyloTree& tree, const TripletCover& cover, const Shelling& steps) {
  if (!(tree.taxa() == cover.taxa())) return "cover and tree have different taxon sets";
  if (!is_triplet_cover(tree, cover)) return "not a triplet cover";
  const int n = tree.leaf_count();
  if (n == 3) return steps.empty() ? "" : "a 3-taxon cover admits no steps";
  const auto& taxa = tree.taxa();
  detail::CordMatrix m(cover);
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& s = steps[i];
    const std::string where = "step " + std::to_string(i + 1) + ": ";
    for (TaxonId t : {s.a, s.b, s.x, s.y}) {
      if (t < 0 || t >= n) return where + "unknown taxon";
    }
    std::set<TaxonId> distinct{s.a, s.b, s.x, s.y};
    if (distinct.size() != 4) return where + "taxa are not distinct";
    if (m.has(s.a, s.b)) return where + "cord " + cord_name(taxa, s.cord()) + " is already present";
    for (auto [p, q] : {std::pair{s.x, s.a}, {s.x, s.b}, {s.y, s.a}, {s.y, s.b}, {s.x, s.y}}) {
      if (!m.has(p, q)) return where + "cord " + cord_name(taxa, Cord(p, q)) + " is not yet available";
    }
    if (!displays_quartet(tree, s.x, s.a, s.y, s.b)) {
      return where + "tree does not display " + quartet_name(taxa, s);
    }
    m.add(s.a, s.b);
  }
  if (static_cast<int>(m.cords().size()) != n * (n - 1) / 2) return "shelling does not reach every pair";
  return "";
}

inline bool verify_shelling(const PhyloTree& tree, const TripletCover& cover, const Shelling& steps) {
  return check_shelling(tree, cover, steps).empty();
}

/// Attaches witnesses to a given cord order; nullopt if some cord in the
/// order cannot be forced at its turn.
inline std::optional<Shelling> shelling_from_order(const PhyloTree& tree, const TripletCover& cover,
                                                   const std::vector<Cord>& order) {
  require_cover(tree, cover);
  detail::CordMatrix m(cover);
  Shelling out;
  for (const auto& c : order) {
    if (m.has(c.a, c.b)) return std::nullopt;
    auto step = detail::find_witness(tree, m, c.a, c.b);
    if (!step) step = detail::find_witness(tree, m, c.b, c.a);
    if (!step) return std::nullopt;
    m.add(c.a, c.b);
    out.push_back(*step);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Patchworks

/// |union C'| == |C'| + 2 for a nonempty C' inside the section.
inline bool patchwork_membership(const TripleSet& section, const TripleSet& subset) {
  if (subset.empty()) throw Error("patchwork members are nonempty");
  for (const auto& t : subset) {
    if (!section.count(t)) throw Error("subset is not contained in the section");
  }
  return union_of(subset).size() == subset.size() + 2;
}

/// A family of subsets of the section, sorted by size then content.
using Hierarchy = std::vector<TripleSet>;

inline bool is_hierarchy(const Hierarchy& h) {
  for (std::size_t i = 0; i < h.size(); ++i) {
    for (std::size_t j = i + 1; j < h.size(); ++j) {
      TripleSet inter;
      std::set_intersection(h[i].begin(), h[i].end(), h[j].begin(), h[j].end(), std::inserter(inter, inter.end()));
      if (!inter.empty() && inter != h[i] && inter != h[j]) return false;
    }
  }
  return true;
}

struct AmpleResult {
  bool ample = false;
  Hierarchy hierarchy;  // maximal hierarchy inside P(C) when ample

  /// Binary split of every non-singleton hierarchy member.
  std::vector<std::pair<std::uint32_t, std::pair<std::uint32_t, std::uint32_t>>> splits;
  std::vector<Triple> members;  // bit i of a mask is members[i]
};

/// Decides whether P(C) contains a maximal hierarchy on C, i.e. whether C
/// can be split recursively into two disjoint patchwork members down to
/// singletons. `taxon_count` is |X|; C must have |X| - 2 triples covering X.
inline AmpleResult is_ample(int taxon_count, const TripleSet& section, int cap = 16) {
  if (static_cast<int>(section.size()) != taxon_count - 2 || static_cast<int>(union_of(section).size()) != taxon_count) {
    throw Error("not section-shaped: need |X|-2 triples whose union is X");
  }
  const int k = static_cast<int>(section.size());
  if (k > cap || k > 24) {
    throw CapacityError("ample-patchwork search limited to " + std::to_string(cap) + " triples, got " + std::to_string(k));
  }
  AmpleResult out;
  out.members.assign(section.begin(), section.end());
  TaxonIds used = union_of(section);
  std::vector<std::uint32_t> tri_mask(static_cast<std::size_t>(k), 0);
  for (int i = 0; i < k; ++i) {
    for (TaxonId x : out.members[static_cast<std::size_t>(i)].v) {
      tri_mask[static_cast<std::size_t>(i)] |=
          1u << static_cast<unsigned>(std::lower_bound(used.begin(), used.end(), x) - used.begin());
    }
  }
  const std::uint32_t full = k == 32 ? ~0u : ((1u << static_cast<unsigned>(k)) - 1);
  std::vector<std::uint32_t> uni(static_cast<std::size_t>(full) + 1, 0);
  std::vector<std::uint8_t> member(static_cast<std::size_t>(full) + 1, 0);
  for (std::uint32_t s = 1; s <= full; ++s) {
    const unsigned low = static_cast<unsigned>(std::countr_zero(s));
    uni[s] = uni[s & (s - 1)] | tri_mask[low];
    member[s] = std::popcount(uni[s]) == std::popcount(s) + 2 ? 1 : 0;
  }

  std::vector<std::int8_t> memo(static_cast<std::size_t>(full) + 1, -1);
  std::vector<std::uint32_t> chosen(static_cast<std::size_t>(full) + 1, 0);
  std::function<bool(std::uint32_t)> feasible = [&](std::uint32_t s) -> bool {
    if (std::popcount(s) == 1) return true;
    if (memo[s] >= 0) return memo[s] != 0;
    bool ok = false;
    const std::uint32_t low = s & (~s + 1);
    const std::uint32_t rest = s ^ low;
    // Submasks of s containing its lowest element, excluding s itself.
    for (std::uint32_t sub = rest;; sub = (sub - 1) & rest) {
      const std::uint32_t a = sub | low;
      const std::uint32_t b = s ^ a;
      if (b != 0 && member[a] && member[b]) {
        const int shared = std::popcount(uni[a] & uni[b]);
        if (shared > 2 || (member[s] && shared != 2)) {
          throw std::logic_error("disjoint patchwork members overlap in " + std::to_string(shared) + " taxa");
        }
        if (feasible(a) && feasible(b)) {
          ok = true;
          chosen[s] = a;
          break;
        }
      }
      if (sub == 0) break;
    }
    memo[s] = ok ? 1 : 0;
    return ok;
  };

  if (!member[full] || !feasible(full)) return out;
  out.ample = true;
  std::function<void(std::uint32_t)> collect = [&](std::uint32_t s) {
    TripleSet node;
    for (int i = 0; i < k; ++i) {
      if (s & (1u << static_cast<unsigned>(i))) node.insert(out.members[static_cast<std::size_t>(i)]);
    }
    out.hierarchy.push_back(std::move(node));
    if (std::popcount(s) == 1) return;
    out.splits.push_back({s, {chosen[s], s ^ chosen[s]}});
    collect(chosen[s]);
    collect(s ^ chosen[s]);
  };
  collect(full);
  std::sort(out.hierarchy.begin(), out.hierarchy.end(), [](const TripleSet& x, const TripleSet& y) {
    return x.size() != y.size() ? x.size() < y.size() : x < y;
  });
  return out;
}

/// Builds a shelling bottom-up along the hierarchy: after both children of a
/// member are complete, every missing cord pq between the two sides is
/// forced through the two shared taxa.
inline Shelling shelling_from_hierarchy(const PhyloTree& tree, const TripletCover& cover, const AmpleResult& ample) {
  require_cover(tree, cover);
  if (!ample.ample) throw Error("no hierarchy to follow");
  detail::CordMatrix m(cover);
  Shelling steps;
  std::map<std::uint32_t, std::pair<std::uint32_t, std::uint32_t>> split_of(ample.splits.begin(), ample.splits.end());
  auto taxa_of = [&](std::uint32_t s) {
    std::set<TaxonId> out;
    for (std::size_t i = 0; i < ample.members.size(); ++i) {
      if (s & (1u << static_cast<unsigned>(i))) out.insert(ample.members[i].v.begin(), ample.members[i].v.end());
    }
    return out;
  };
  std::function<void(std::uint32_t)> build = [&](std::uint32_t s) {
    auto it = split_of.find(s);
    if (it == split_of.end()) return;  // singleton: its three cords are cover cords
    build(it->second.first);
    build(it->second.second);
    const auto left = taxa_of(it->second.first);
    const auto right = taxa_of(it->second.second);
    std::vector<TaxonId> shared;
    std::set_intersection(left.begin(), left.end(), right.begin(), right.end(), std::back_inserter(shared));
    if (shared.size() != 2) throw std::logic_error("hierarchy children must share exactly two taxa");
    const TaxonId y = shared[0];
    const TaxonId z = shared[1];
    for (TaxonId p : left) {
      if (p == y || p == z) continue;
      for (TaxonId q : right) {
        if (q == y || q == z || m.has(p, q)) continue;
        const Quartet qt = tree.quartet_topology(p, q, y, z);
        if (qt == Quartet::ab_xy || qt == Quartet::star) {
          throw std::logic_error("cross-block quartet resolves as pq|yz");
        }
        // ax_by: {p,y}|{q,z};  ay_bx: {p,z}|{q,y}.
        ShellingStep step = qt == Quartet::ax_by ? ShellingStep{p, q, y, z} : ShellingStep{p, q, z, y};
        if (step.a > step.b) step = {step.b, step.a, step.y, step.x};
        m.add(p, q);
        steps.push_back(step);
      }
    }
  };
  const std::uint32_t full = static_cast<std::uint32_t>((std::uint64_t{1} << ample.members.size()) - 1);
  build(full);
  return steps;
}

/// Outcome of the patchwork route to shellability.
struct PatchworkVerdict {
  enum class Outcome { ample_section, no_ample_section, indeterminate };
  Outcome outcome = Outcome::indeterminate;
  std::size_t sections_checked = 0;
  std::optional<TripleSet> section;  // the ample one
  AmpleResult ample;
  Shelling shelling;  // constructed along the hierarchy
  std::string note;   // why the answer is indeterminate

  bool yes() const { return outcome == Outcome::ample_section; }
};

/// True when some section of C(T) has an ample patchwork; sections are
/// visited in cursor order up to `section_limit`.
inline PatchworkVerdict shellable_via_patchwork(const PhyloTree& tree, const TripletCover& cover,
                                                std::size_t section_limit = 10000, int ample_cap = 16) {
  require_cover(tree, cover);
  PatchworkVerdict verdict;
  const int n = tree.leaf_count();
  if (n - 2 > ample_cap) {
    verdict.note = "sections have " + std::to_string(n - 2) + " triples, above the ample cap " + std::to_string(ample_cap);
    return verdict;
  }
  const auto supports = support_map(tree, cover);
  const auto total = section_count(supports);
  SectionCursor cursor(supports);
  while (verdict.sections_checked < section_limit) {
    auto section = cursor.next();
    if (!section) break;
    ++verdict.sections_checked;
    auto ample = is_ample(n, *section, ample_cap);
    if (ample.ample) {
      verdict.outcome = PatchworkVerdict::Outcome::ample_section;
      verdict.section = std::move(*section);
      verdict.shelling = shelling_from_hierarchy(tree, cover, ample);
      verdict.ample = std::move(ample);
      return verdict;
    }
  }
  if (verdict.sections_checked == total) {
    verdict.outcome = PatchworkVerdict::Outcome::no_ample_section;
  } else {
    verdict.note = "section limit " + std::to_string(section_limit) + " reached before all " + std::to_string(total) +
                   " sections were checked";
  }
  return verdict;
}

/// (T|_A, T|_A) for a taxon subset A.
inline std::pair<PhyloTree, TripletCover> restriction_cover(const PhyloTree& tree, const TripletCover& cover,
                                                            const TaxonIds& subset) {
  detail::require_same_taxa(tree, cover);
  if (subset.size() < 3) throw Error("restriction needs at least 3 taxa");
  return {tree.restrict_to(subset), restrict_cover(cover, subset)};
}

/// Restriction to the taxa of a patchwork member C' of a section; checks
/// that C' really is a member.
inline std::pair<PhyloTree, TripletCover> restriction_cover(const PhyloTree& tree, const TripletCover& cover,
                                                            const TripleSet& section, const TripleSet& member) {
  if (!patchwork_membership(section, member)) throw Error("subset is not a patchwork member");
  return restriction_cover(tree, cover, union_of(member));
}

}  // namespace tripcover

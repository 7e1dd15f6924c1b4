#pragma once

#include "tripcover/rational.hpp"

#include <algorithm>
#include <cctype>
#include <array>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace tripcover {

/// Index of a taxon inside a TaxonSet. Taxon indices follow the
/// lexicographic order of the labels, so comparing indices compares labels.
using TaxonId = int;

inline bool is_valid_label(std::string_view label) {
  if (label.empty()) return false;
  for (char c : label) {
    if (std::isspace(static_cast<unsigned char>(c))) return false;
    if (c == '(' || c == ')' || c == ',' || c == ':' || c == ';') return false;
  }
  return true;
}

/// The label set X, kept sorted.
class TaxonSet {
 public:
  TaxonSet() = default;

  explicit TaxonSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
    for (const auto& l : labels_) {
      if (!is_valid_label(l)) throw Error("invalid taxon label '" + l + "'");
    }
    std::sort(labels_.begin(), labels_.end());
    auto dup = std::adjacent_find(labels_.begin(), labels_.end());
    if (dup != labels_.end()) throw Error("duplicate taxon '" + *dup + "'");
  }

  TaxonSet(std::initializer_list<std::string> labels)
      : TaxonSet(std::vector<std::string>(labels)) {}

  int size() const { return static_cast<int>(labels_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(TaxonId id) const { return labels_.at(static_cast<std::size_t>(id)); }

  bool contains(std::string_view label) const {
    return std::binary_search(labels_.begin(), labels_.end(), label);
  }

  TaxonId id(std::string_view label) const {
    auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
    if (it == labels_.end() || *it != label) {
      throw Error("unknown taxon '" + std::string(label) + "'");
    }
    return static_cast<TaxonId>(it - labels_.begin());
  }

  friend bool operator==(const TaxonSet&, const TaxonSet&) = default;

 private:
  std::vector<std::string> labels_;
};

/// Unordered pair of distinct taxa, stored with a < b.
struct Cord {
  TaxonId a = 0;
  TaxonId b = 0;

  Cord() = default;
  Cord(TaxonId x, TaxonId y) : a(std::min(x, y)), b(std::max(x, y)) {
    if (x == y) throw Error("a cord needs two distinct taxa");
  }

  bool contains(TaxonId x) const { return a == x || b == x; }
  TaxonId other(TaxonId x) const { return x == a ? b : a; }

  friend auto operator<=>(const Cord&, const Cord&) = default;
};

/// Unordered triple of distinct taxa, stored sorted.
struct Triple {
  std::array<TaxonId, 3> v{};

  Triple() = default;
  Triple(TaxonId x, TaxonId y, TaxonId z) : v{x, y, z} {
    std::sort(v.begin(), v.end());
    if (v[0] == v[1] || v[1] == v[2]) throw Error("a triple needs three distinct taxa");
  }

  bool contains(TaxonId x) const { return v[0] == x || v[1] == x || v[2] == x; }
  std::array<Cord, 3> cords() const { return {Cord(v[0], v[1]), Cord(v[0], v[2]), Cord(v[1], v[2])}; }

  /// Number of taxa shared with another triple.
  int overlap(const Triple& o) const {
    int n = 0;
    for (TaxonId x : v) n += o.contains(x) ? 1 : 0;
    return n;
  }

  friend auto operator<=>(const Triple&, const Triple&) = default;
};

using CordSet = std::set<Cord>;
using TripleSet = std::set<Triple>;

/// Set of taxa as a sorted, duplicate-free vector of ids.
using TaxonIds = std::vector<TaxonId>;

inline std::string cord_name(const TaxonSet& taxa, const Cord& c) {
  return taxa.label(c.a) + taxa.label(c.b);
}

inline std::string triple_name(const TaxonSet& taxa, const Triple& t) {
  return taxa.label(t.v[0]) + taxa.label(t.v[1]) + taxa.label(t.v[2]);
}

/// Taxa used by at least one member of the family.
inline TaxonIds union_of(const TripleSet& triples) {
  std::set<TaxonId> all;
  for (const auto& t : triples) all.insert(t.v.begin(), t.v.end());
  return {all.begin(), all.end()};
}

/// Co(C): every 2-subset of a member triple.
inline CordSet cord_set(const TripleSet& triples) {
  CordSet out;
  for (const auto& t : triples) {
    for (const auto& c : t.cords()) out.insert(c);
  }
  return out;
}

/// Default labels for generated instances: a..z up to 26 taxa, t001.. beyond.
inline std::vector<std::string> default_labels(int n) {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    if (n <= 26) {
      out.emplace_back(1, static_cast<char>('a' + i));
    } else {
      std::string num = std::to_string(i + 1);
      out.push_back("t" + std::string(num.size() < 3 ? 3 - num.size() : 0, '0') + num);
    }
  }
  return out;
}

}  // namespace tripcover

#pragma once

#include "tripcover/cover.hpp"
#include "tripcover/cover_graph.hpp"
#include "tripcover/lab.hpp"
#include "tripcover/newick.hpp"
#include "tripcover/reconstruction.hpp"
#include "tripcover/shelling.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace tripcover {

using Json = nlohmann::json;

/// Malformed input file: bad JSON, wrong shape, unknown taxa, duplicates.
class FormatError : public Error {
 public:
  using Error::Error;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << text;
}

inline Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw FormatError(std::string("malformed JSON: ") + e.what());
  }
}

/// Keys sorted, two-space indent, trailing newline.
inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

namespace detail {

inline const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline std::string text_of(const Json& j, const char* what) {
  if (!j.is_string()) throw FormatError(std::string(what) + " must be a string");
  return j.get<std::string>();
}

inline TaxonSet taxa_from_json(const Json& j) {
  const Json& arr = field(j, "taxa");
  if (!arr.is_array()) throw FormatError("'taxa' must be an array");
  std::vector<std::string> labels;
  for (const auto& v : arr) labels.push_back(text_of(v, "taxon label"));
  try {
    return TaxonSet(std::move(labels));
  } catch (const Error& e) {
    throw FormatError(e.what());
  }
}

inline TaxonId taxon_id(const TaxonSet& taxa, const Json& j) {
  const auto label = text_of(j, "taxon label");
  if (!taxa.contains(label)) throw FormatError("unknown taxon '" + label + "'");
  return taxa.id(label);
}

inline Json taxon_list(const TaxonSet& taxa, const TaxonIds& ids) {
  Json out = Json::array();
  for (TaxonId x : ids) out.push_back(taxa.label(x));
  return out;
}

}  // namespace detail

// Cover: {"taxa": [...], "cords": [["a","b"], ...]}

inline Json cover_to_json(const TripletCover& cover) {
  Json cords = Json::array();
  for (const auto& c : cover.cords()) cords.push_back({cover.taxa().label(c.a), cover.taxa().label(c.b)});
  return {{"taxa", cover.taxa().labels()}, {"cords", cords}};
}

inline TripletCover cover_from_json(const Json& j) {
  TaxonSet taxa = detail::taxa_from_json(j);
  const Json& arr = detail::field(j, "cords");
  if (!arr.is_array()) throw FormatError("'cords' must be an array");
  CordSet cords;
  for (const auto& pair : arr) {
    if (!pair.is_array() || pair.size() != 2) throw FormatError("each cord must be a pair of labels");
    const TaxonId a = detail::taxon_id(taxa, pair[0]);
    const TaxonId b = detail::taxon_id(taxa, pair[1]);
    if (a == b) throw FormatError("cord joins taxon '" + taxa.label(a) + "' to itself");
    if (!cords.insert(Cord(a, b)).second) throw FormatError("duplicate cord " + taxa.label(a) + taxa.label(b));
  }
  return {std::move(taxa), cords};
}

// Distances: {"taxa": [...], "distances": [["a","b","7/2"], ...]}

inline Json distances_to_json(const PartialDistances& dist) {
  Json rows = Json::array();
  for (const auto& [c, d] : dist.values()) {
    rows.push_back({dist.taxa().label(c.a), dist.taxa().label(c.b), format_rational(d)});
  }
  return {{"taxa", dist.taxa().labels()}, {"distances", rows}};
}

inline PartialDistances distances_from_json(const Json& j) {
  TaxonSet taxa = detail::taxa_from_json(j);
  const Json& arr = detail::field(j, "distances");
  if (!arr.is_array()) throw FormatError("'distances' must be an array");
  std::map<Cord, Rational> values;
  for (const auto& row : arr) {
    if (!row.is_array() || row.size() != 3) throw FormatError("each distance must be [label, label, value]");
    const TaxonId a = detail::taxon_id(taxa, row[0]);
    const TaxonId b = detail::taxon_id(taxa, row[1]);
    if (a == b) throw FormatError("distance from '" + taxa.label(a) + "' to itself");
    Rational d;
    try {
      d = parse_rational(detail::text_of(row[2], "distance value"));
    } catch (const FormatError&) {
      throw;
    } catch (const Error& e) {
      throw FormatError(e.what());
    }
    if (!values.emplace(Cord(a, b), d).second) throw FormatError("duplicate distance " + taxa.label(a) + taxa.label(b));
  }
  try {
    return {std::move(taxa), std::move(values)};
  } catch (const Error& e) {
    throw FormatError(e.what());
  }
}

// Tree dump: leaves 0..n-1 carry the taxa in order, interior vertices
// follow; lengths are {"num": "...", "den": "..."}.

inline Json tree_to_json(const PhyloTree& tree) {
  Json edges = Json::array();
  for (const auto& e : tree.edges()) {
    edges.push_back({{"u", e.u},
                     {"v", e.v},
                     {"length",
                      {{"num", boost::multiprecision::numerator(e.length).str()},
                       {"den", boost::multiprecision::denominator(e.length).str()}}}});
  }
  Json vertices = Json::array();
  for (VertexId v = 0; v < tree.vertex_count(); ++v) {
    vertices.push_back({{"id", v}, {"taxon", tree.is_leaf(v) ? Json(tree.taxa().label(tree.taxon_of(v))) : Json()}});
  }
  return {{"taxa", tree.taxa().labels()}, {"vertices", vertices}, {"edges", edges}, {"newick", write_newick(tree)}};
}

// Shelling witness: {"taxa": [...], "steps": [{"cord", "witness_pair", "quartet"}]}

inline Json shelling_to_json(const TaxonSet& taxa, const Shelling& steps) {
  Json arr = Json::array();
  for (const auto& s : steps) {
    arr.push_back({{"cord", {taxa.label(s.a), taxa.label(s.b)}},
                   {"witness_pair", {taxa.label(s.x), taxa.label(s.y)}},
                   {"quartet", quartet_name(taxa, s)}});
  }
  return {{"taxa", taxa.labels()}, {"steps", arr}};
}

/// Reads steps; the quartet string is informational and not trusted.
inline Shelling shelling_from_json(const TaxonSet& taxa, const Json& j) {
  const Json& arr = detail::field(j, "steps");
  if (!arr.is_array()) throw FormatError("'steps' must be an array");
  Shelling steps;
  for (const auto& s : arr) {
    const Json& cord = detail::field(s, "cord");
    const Json& pair = detail::field(s, "witness_pair");
    if (!cord.is_array() || cord.size() != 2 || !pair.is_array() || pair.size() != 2) {
      throw FormatError("'cord' and 'witness_pair' must be pairs of labels");
    }
    steps.push_back({detail::taxon_id(taxa, cord[0]), detail::taxon_id(taxa, cord[1]), detail::taxon_id(taxa, pair[0]),
                     detail::taxon_id(taxa, pair[1])});
  }
  return steps;
}

// Decomposition report.

inline Json decomposition_to_json(const TaxonSet& taxa, const TwoTreeDecomposition& d, bool strict) {
  Json blocks = Json::array();
  for (const auto& b : d.blocks) {
    Json edges = Json::array();
    for (const auto& c : b.edges) edges.push_back(cord_name(taxa, c));
    Json tris = Json::array();
    for (const auto& t : b.triangles) tris.push_back(triple_name(taxa, t));
    Json order = Json::array();
    for (const auto& t : b.construction_order) order.push_back(triple_name(taxa, t));
    blocks.push_back({{"vertices", detail::taxon_list(taxa, b.vertices)},
                      {"edges", edges},
                      {"triangles", tris},
                      {"construction_order", order}});
  }
  return {{"blocks", blocks}, {"block_count", d.block_count()}, {"strict", strict}, {"counting_identity", verify_counting(d)}};
}

// Instance records for the fixture store.

inline Json flags_to_json(const Flags& f) {
  return {{"is_cover", f.cover},   {"minimal", f.minimal}, {"minimum", f.minimum},
          {"sparse", f.sparse},    {"shellable", f.shellable}, {"mu", f.mu},
          {"ample", f.ample ? Json(*f.ample) : Json()}};
}

inline Flags flags_from_json(const Json& j) {
  try {
    Flags f;
    f.cover = j.at("is_cover").get<bool>();
    f.minimal = j.at("minimal").get<bool>();
    f.minimum = j.at("minimum").get<bool>();
    f.sparse = j.at("sparse").get<bool>();
    f.shellable = j.at("shellable").get<bool>();
    f.mu = j.at("mu").get<int>();
    if (!j.at("ample").is_null()) f.ample = j.at("ample").get<bool>();
    return f;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("bad flags: ") + e.what());
  }
}

inline Json record_to_json(const std::string& predicate, const InstanceRecord& r) {
  return {{"predicate", predicate},
          {"generator", r.generator},
          {"seed", r.seed},
          {"n", r.tree.leaf_count()},
          {"tree", write_newick(r.tree)},
          {"cover", cover_to_json(r.cover)},
          {"flags", flags_to_json(r.flags)}};
}

/// Loads a record and recomputes its flags; a stored flag that disagrees
/// with recomputation is an error.
inline InstanceRecord record_from_json(const Json& j) {
  InstanceRecord r;
  try {
    r.tree = parse_newick(detail::text_of(detail::field(j, "tree"), "'tree'"));
    r.generator = detail::text_of(detail::field(j, "generator"), "'generator'");
    r.seed = detail::field(j, "seed").get<Seed>();
  } catch (const Json::exception& e) {
    throw FormatError(std::string("bad record: ") + e.what());
  }
  r.cover = cover_from_json(detail::field(j, "cover"));
  r.flags = classify(r.tree, r.cover);
  if (!(flags_from_json(detail::field(j, "flags")) == r.flags)) {
    throw FormatError("stored flags disagree with recomputed flags " + flags_to_json(r.flags).dump());
  }
  return r;
}

/// <root>/<predicate>/<n>/<seed>.json
inline std::filesystem::path store_path(const std::filesystem::path& root, const std::string& predicate,
                                        const InstanceRecord& r) {
  return root / predicate / std::to_string(r.tree.leaf_count()) / (std::to_string(r.seed) + ".json");
}

}  // namespace tripcover

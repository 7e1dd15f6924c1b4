#pragma once

#include "tripcover/cover.hpp"
#include "tripcover/cover_graph.hpp"
#include "tripcover/io.hpp"
#include "tripcover/shelling.hpp"

#include <cstdint>
#include <string>

namespace tripcover {

/// Capacity ceilings of the analysis; each one is reported when hit.
struct AnalysisLimits {
  std::size_t section_limit = 10000;
  int ample_cap = 16;
  int hall_cap = 22;
};

/// Full classification of a cover. Only call with a triplet cover; the
/// non-cover case is reported separately by the caller.
inline Json analysis_report(const PhyloTree& tree, const TripletCover& cover, const AnalysisLimits& limits = {}) {
  require_cover(tree, cover);
  const auto& taxa = cover.taxa();
  const auto supports = support_map(tree, cover);
  const TripleSet ct = triple_set(supports);
  const auto graph = build_cover_graph(cover);

  Json report;
  report["is_cover"] = true;
  report["taxa"] = taxa.labels();
  report["cord_count"] = cover.size();
  report["is_minimal"] = is_minimal(tree, cover);
  report["is_minimum"] = is_minimum(tree, cover);
  report["is_sparse"] = is_sparse(tree, cover);
  report["mu"] = cover.mu();

  Json mult = Json::object();
  for (TaxonId x = 0; x < cover.taxon_count(); ++x) mult[taxa.label(x)] = cover.multiplicity(x);
  report["multiplicity"] = mult;

  Json sup = Json::array();
  for (const auto& s : supports) {
    Json tris = Json::array();
    for (const auto& t : s.triples) tris.push_back(triple_name(taxa, t));
    sup.push_back({{"vertex", triple_name(taxa, s.key)}, {"triples", tris}});
  }
  report["supports"] = sup;
  Json all = Json::array();
  for (const auto& t : ct) all.push_back(triple_name(taxa, t));
  report["triple_set"] = all;
  report["section_count"] = section_count(supports);

  try {
    report["hall_type"] = is_hall_type(cover.taxon_count(), ct, limits.hall_cap);
  } catch (const CapacityError& e) {
    report["hall_type"] = nullptr;
    report["hall_type_note"] = e.what();
  }

  report["triangles_match"] = triangles(graph) == ct;
  report["two_connected"] = is_two_connected(graph);
  report["cover_graph_is_two_tree"] = is_two_tree(graph);

  // Decomposition induced by the first section.
  SectionCursor cursor(supports);
  const auto first = cursor.next();
  const auto d = decomposition_from_section(*first);
  report["decomposition"] = decomposition_to_json(taxa, d, is_strict(graph, d));
  report["blocks"] = d.block_count();

  const auto shell = is_shellable(tree, cover);
  report["shellable"] = shell.shellable;
  if (shell.shellable) {
    report["shelling"] = shelling_to_json(taxa, shell.witness)["steps"];
  } else {
    const auto closure = cord_closure(tree, cover);
    report["closure_size"] = closure.closed.size();
  }

  const auto verdict = shellable_via_patchwork(tree, cover, limits.section_limit, limits.ample_cap);
  Json ample;
  switch (verdict.outcome) {
    case PatchworkVerdict::Outcome::ample_section: ample["verdict"] = "ample_section"; break;
    case PatchworkVerdict::Outcome::no_ample_section: ample["verdict"] = "no_ample_section"; break;
    case PatchworkVerdict::Outcome::indeterminate: ample["verdict"] = "indeterminate"; break;
  }
  ample["sections_checked"] = verdict.sections_checked;
  if (verdict.section) {
    Json sec = Json::array();
    for (const auto& t : *verdict.section) sec.push_back(triple_name(taxa, t));
    ample["section"] = sec;
  }
  if (!verdict.note.empty()) ample["note"] = verdict.note;
  report["ample_patchwork"] = ample;
  return report;
}

}  // namespace tripcover

// tripcover: command-line front end.
//
// Exit codes: 0 ok, 1 I/O / format / usage error, 2 input is not a triplet
// cover of the tree, 3 distances not realizable over the cover, 4 negative
// verdict (not shellable, shelling rejected), 5 capacity ceiling hit.

#include "tripcover/cover.hpp"
#include "tripcover/cover_graph.hpp"
#include "tripcover/io.hpp"
#include "tripcover/lab.hpp"
#include "tripcover/newick.hpp"
#include "tripcover/reconstruction.hpp"
#include "tripcover/report.hpp"
#include "tripcover/shelling.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>

namespace fs = std::filesystem;
using namespace tripcover;

namespace {

enum Exit { ok = 0, io_error = 1, not_cover = 2, unrealizable = 3, negative = 4, capacity = 5 };

const char* kFormats = R"(File formats:
  tree      Newick with branch lengths, decimal or p/q:  ((a:1,b:1):1,c:1,(d:1,e:1):1);
  cover     {"taxa": ["a","b","c"], "cords": [["a","b"], ["a","c"], ["b","c"]]}
  distances {"taxa": ["a","b","c"], "distances": [["a","b","2"], ["a","c","7/2"], ["b","c","3"]]}
  shelling  {"taxa": [...], "steps": [{"cord": ["a","e"], "witness_pair": ["b","d"], "quartet": "ba|de"}]}
All rationals in JSON are strings such as "7/2". JSON output has sorted keys.

Exit codes: 0 ok, 1 I/O or format error, 2 not a triplet cover, 3 distances
not realizable over the cover, 4 negative verdict, 5 capacity ceiling hit.)";

struct Common {
  AnalysisLimits limits;
};

void add_limits(CLI::App* cmd, Common& c) {
  cmd->add_option("--limit-sections", c.limits.section_limit, "Most sections visited by section sweeps")
      ->capture_default_str();
  cmd->add_option("--ample-cap", c.limits.ample_cap, "Largest section size for the ample-patchwork check")
      ->capture_default_str();
  cmd->add_option("--hall-cap", c.limits.hall_cap, "Largest triple family for the Hall-type check")
      ->capture_default_str();
}

void emit(const Json& j, const std::string& path) {
  if (path.empty()) {
    std::cout << dump(j);
  } else {
    write_file(path, dump(j));
  }
}

std::pair<PhyloTree, TripletCover> load_instance(const std::string& tree_path, const std::string& cover_path) {
  PhyloTree tree = parse_newick(read_file(tree_path));
  TripletCover cover = cover_from_json(parse_json(read_file(cover_path)));
  if (!(tree.taxa() == cover.taxa())) throw FormatError("tree and cover have different taxon sets");
  return {std::move(tree), std::move(cover)};
}

// Exit 2 with the first unsupported vertex named by its component triple.
int report_non_cover(const PhyloTree& tree, const TripletCover& cover) {
  const auto v = first_unsupported(tree, cover);
  std::cerr << "not a triplet cover: interior vertex " << triple_name(tree.taxa(), *v)
            << " has no supporting triple\n";
  return not_cover;
}

int run_analyze(const std::string& tree_path, const std::string& cover_path, const std::string& out,
                const Common& c) {
  auto [tree, cover] = load_instance(tree_path, cover_path);
  if (!is_triplet_cover(tree, cover)) {
    const auto v = first_unsupported(tree, cover);
    emit({{"is_cover", false}, {"unsupported_vertex", triple_name(tree.taxa(), *v)}}, out);
    return report_non_cover(tree, cover);
  }
  emit(analysis_report(tree, cover, c.limits), out);
  return ok;
}

int run_reconstruct(const std::string& cover_path, const std::string& dist_path, const std::string& out,
                    const std::string& log_path) {
  const auto cover = cover_from_json(parse_json(read_file(cover_path)));
  const auto dist = distances_from_json(parse_json(read_file(dist_path)));
  if (!(dist.taxa() == cover.taxa())) throw FormatError("cover and distances have different taxon sets");
  if (!dist.matches(cover)) throw FormatError("distances must be given on exactly the cords of the cover");
  ReconstructionResult result;
  try {
    result = reconstruct(cover, dist);
  } catch (const UnrealizableError& e) {
    std::cerr << "not realizable over this cover: " << e.what() << "\n";
    return unrealizable;
  }
  const std::string nwk = write_newick(result.tree) + "\n";
  if (out.empty()) {
    std::cout << nwk;
  } else {
    write_file(out, nwk);
  }
  if (!log_path.empty()) {
    Json log = Json::array();
    for (const auto& s : result.cherry_log) {
      log.push_back({{"removed", s.removed},
                     {"kept", s.kept},
                     {"removed_pendant", format_rational(s.removed_pendant)},
                     {"kept_pendant", format_rational(s.kept_pendant)}});
    }
    write_file(log_path, dump(log));
  }
  return ok;
}

int run_decompose(const std::string& tree_path, const std::string& cover_path, const std::string& out,
                  std::size_t section_index, bool all, int enum_cap, const Common& c) {
  auto [tree, cover] = load_instance(tree_path, cover_path);
  if (!is_triplet_cover(tree, cover)) return report_non_cover(tree, cover);
  const auto graph = build_cover_graph(cover);
  const auto& taxa = cover.taxa();
  if (all) {
    Json arr = Json::array();
    for (const auto& d : enumerate_decompositions(graph, enum_cap)) {
      arr.push_back(decomposition_to_json(taxa, d, is_strict(graph, d)));
    }
    emit({{"decompositions", arr}, {"count", arr.size()}}, out);
    return ok;
  }
  const auto supports = support_map(tree, cover);
  if (section_index >= c.limits.section_limit) {
    std::cerr << "section index " << section_index << " is beyond --limit-sections\n";
    return capacity;
  }
  SectionCursor cursor(supports);
  std::optional<TripleSet> section;
  for (std::size_t i = 0; i <= section_index; ++i) {
    section = cursor.next();
    if (!section) {
      std::cerr << "the cover has only " << i << " sections\n";
      return io_error;
    }
  }
  const auto d = decomposition_from_section(*section);
  Json j = decomposition_to_json(taxa, d, is_strict(graph, d));
  j["section_index"] = section_index;
  j["section_count"] = section_count(supports);
  emit(j, out);
  return ok;
}

int run_shell(const std::string& tree_path, const std::string& cover_path, const std::string& out) {
  auto [tree, cover] = load_instance(tree_path, cover_path);
  if (!is_triplet_cover(tree, cover)) return report_non_cover(tree, cover);
  const auto result = is_shellable(tree, cover);
  if (!result.shellable) {
    const auto closure = cord_closure(tree, cover);
    std::cerr << "not shellable: closure stops at " << closure.closed.size() << " of "
              << tree.leaf_count() * (tree.leaf_count() - 1) / 2 << " cords\n";
    return negative;
  }
  emit(shelling_to_json(cover.taxa(), result.witness), out);
  return ok;
}

int run_verify_shelling(const std::string& tree_path, const std::string& cover_path, const std::string& path) {
  auto [tree, cover] = load_instance(tree_path, cover_path);
  if (!is_triplet_cover(tree, cover)) return report_non_cover(tree, cover);
  const auto steps = shelling_from_json(cover.taxa(), parse_json(read_file(path)));
  const auto reason = check_shelling(tree, cover, steps);
  if (!reason.empty()) {
    std::cerr << "shelling rejected: " << reason << "\n";
    return negative;
  }
  std::cout << "shelling valid (" << steps.size() << " steps)\n";
  return ok;
}

int run_generate(int n, Seed seed, const std::string& policy, const std::string& dir) {
  if (n < 3) throw FormatError("--n must be at least 3");
  const auto tree = random_binary_tree(n, seed);
  TripletCover cover;
  if (policy == "least") {
    cover = canonical_cover(tree, least_label_chooser());
  } else if (policy == "random") {
    cover = canonical_cover(tree, random_chooser(seed));
  } else if (policy == "balanced") {
    cover = canonical_cover(tree, balanced_chooser(seed, n));
  } else if (policy == "minimal") {
    cover = minimalize(tree, canonical_cover(tree, random_chooser(seed)), RemovalOrder::random(seed));
  } else {
    throw FormatError("unknown cover policy '" + policy + "'");
  }
  const fs::path root(dir);
  write_file(root / "tree.nwk", write_newick(tree) + "\n");
  write_file(root / "cover.json", dump(cover_to_json(cover)));
  write_file(root / "dist.json", dump(distances_to_json(PartialDistances::from_tree(tree, cover))));
  std::cout << "wrote tree.nwk, cover.json, dist.json to " << root.string() << "\n";
  return ok;
}

int run_fixtures(const std::string& which, const SearchBudget& budget, const std::string& store,
                 const std::string& check) {
  if (!check.empty()) {
    int bad = 0;
    int seen = 0;
    for (const auto& entry : fs::recursive_directory_iterator(check)) {
      if (entry.path().extension() != ".json") continue;
      ++seen;
      try {
        record_from_json(parse_json(read_file(entry.path())));
      } catch (const Error& e) {
        std::cerr << entry.path().string() << ": " << e.what() << "\n";
        ++bad;
      }
    }
    std::cout << seen << " records checked, " << bad << " inconsistent\n";
    return bad ? io_error : ok;
  }
  std::vector<FixturePredicate> preds;
  if (which == "all") {
    preds = predicates::all();
  } else {
    preds.push_back(predicates::by_name(which));
  }
  for (const auto& p : preds) {
    const auto found = search_fixture(p, budget);
    if (!found) {
      std::cout << p.name << ": not found (n " << budget.n_min << ".." << budget.n_max << ")\n";
      continue;
    }
    std::cout << p.name << ": found n=" << found->tree.leaf_count() << " " << found->generator << " seed "
              << found->seed << " " << write_newick(found->tree) << "\n";
    if (!store.empty()) {
      const auto path = store_path(store, p.name, *found);
      write_file(path, dump(record_to_json(p.name, *found)));
      std::cout << "  stored " << path.string() << "\n";
    }
  }
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Triplet covers of binary phylogenetic trees: analysis, reconstruction, shellings."};
  app.footer(kFormats);
  app.require_subcommand(1);
  Common common;

  std::string tree_path, cover_path, dist_path, out, log_path, shelling_path, policy = "random", dir = ".";
  std::string predicate = "all", store, check;
  std::size_t section_index = 0;
  bool all = false;
  int decomposition_cap = 12;
  int n = 5;
  Seed seed = 1;
  SearchBudget budget;

  auto* analyze = app.add_subcommand("analyze", "Classify a cover of a tree and print a JSON report");
  analyze->add_option("--tree", tree_path, "Newick tree file")->required();
  analyze->add_option("--cover", cover_path, "Cover JSON file")->required();
  analyze->add_option("--json", out, "Write the report here instead of stdout");
  add_limits(analyze, common);

  auto* recon = app.add_subcommand("reconstruct", "Rebuild the tree from distances on a triplet cover");
  recon->add_option("--cover", cover_path, "Cover JSON file")->required();
  recon->add_option("--dist", dist_path, "Distances JSON file")->required();
  recon->add_option("--out", out, "Write the Newick tree here instead of stdout");
  recon->add_option("--log", log_path, "Write the cherry-reduction log (JSON)");
  add_limits(recon, common);

  auto* decompose = app.add_subcommand("decompose", "2-tree decomposition of the cover graph");
  decompose->add_option("--tree", tree_path, "Newick tree file")->required();
  decompose->add_option("--cover", cover_path, "Cover JSON file")->required();
  decompose->add_option("--json", out, "Write the report here instead of stdout");
  decompose->add_option("--section", section_index, "Index of the section to decompose along")->capture_default_str();
  decompose->add_flag("--all", all, "Enumerate every 2-tree decomposition of the cover graph instead");
  decompose->add_option("--decomposition-cap", decomposition_cap, "Vertex cap for --all")->capture_default_str();
  add_limits(decompose, common);

  auto* shell = app.add_subcommand("shell", "Find a shelling and write it as a witness file");
  shell->add_option("--tree", tree_path, "Newick tree file")->required();
  shell->add_option("--cover", cover_path, "Cover JSON file")->required();
  shell->add_option("--json", out, "Write the witness here instead of stdout");
  add_limits(shell, common);

  auto* verify = app.add_subcommand("verify-shelling", "Check a shelling witness file step by step");
  verify->add_option("--tree", tree_path, "Newick tree file")->required();
  verify->add_option("--cover", cover_path, "Cover JSON file")->required();
  verify->add_option("--shelling", shelling_path, "Shelling witness JSON file")->required();
  add_limits(verify, common);

  auto* generate = app.add_subcommand("generate", "Write a random tree, a cover of it and its distances");
  generate->add_option("--n", n, "Number of taxa (>= 3)")->required();
  generate->add_option("--seed", seed, "Random seed")->capture_default_str();
  generate->add_option("--cover-policy", policy, "least | random | balanced | minimal")->capture_default_str();
  generate->add_option("--out-dir", dir, "Output directory")->capture_default_str();
  add_limits(generate, common);

  auto* fixtures = app.add_subcommand("fixtures", "Search for instances with named properties");
  fixtures->add_option("--predicate", predicate,
                       "all | minimal-not-sparse | sparse-minimal-mu4 | sparse-not-shellable | "
                       "sparse-minimal-shellable-not-ample | minimum")
      ->capture_default_str();
  fixtures->add_option("--n-min", budget.n_min, "Smallest n")->capture_default_str();
  fixtures->add_option("--n-max", budget.n_max, "Largest n")->capture_default_str();
  fixtures->add_option("--budget", budget.per_n, "Trees (exhaustive) or seeds (random) per n")->capture_default_str();
  fixtures->add_option("--exhaustive-max-n", budget.exhaustive_max_n, "Sweep exhaustively up to this n")
      ->capture_default_str();
  fixtures->add_option("--climbs", budget.climbs, "Hill-climb restarts per n")->capture_default_str();
  fixtures->add_option("--climb-steps", budget.climb_steps, "Moves per hill climb")->capture_default_str();
  fixtures->add_option("--jobs", budget.jobs, "Parallel tasks over disjoint seed ranges")->capture_default_str();
  fixtures->add_option("--store", store, "Write found records under this directory");
  fixtures->add_option("--check", check, "Recompute and compare the flags of every record under this directory");
  add_limits(fixtures, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return io_error;
  }

  try {
    if (*analyze) return run_analyze(tree_path, cover_path, out, common);
    if (*recon) return run_reconstruct(cover_path, dist_path, out, log_path);
    if (*decompose) return run_decompose(tree_path, cover_path, out, section_index, all, decomposition_cap, common);
    if (*shell) return run_shell(tree_path, cover_path, out);
    if (*verify) return run_verify_shelling(tree_path, cover_path, shelling_path);
    if (*generate) return run_generate(n, seed, policy, dir);
    if (*fixtures) return run_fixtures(predicate, budget, store, check);
  } catch (const CapacityError& e) {
    std::cerr << "capacity: " << e.what() << "\n";
    return capacity;
  } catch (const NotACoverError& e) {
    std::cerr << "not a triplet cover: " << e.what() << "\n";
    return not_cover;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return io_error;
  }
  return io_error;
}

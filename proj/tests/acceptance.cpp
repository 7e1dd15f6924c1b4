// Acceptance harness: one PASS/FAIL line per criterion, budgets and
// tolerances fixed below. Exit status is nonzero when any line fails.

#include "oracles.hpp"
#include "tripcover/io.hpp"
#include "tripcover/lab.hpp"
#include "tripcover/reconstruction.hpp"
#include "tripcover/shelling.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

using namespace tripcover;
namespace fs = std::filesystem;

namespace {

// Time limits, in seconds.
constexpr double kExampleLimit = 1.0;
constexpr double kRoundTripLimit = 60.0;
constexpr double kOracleLimit = 300.0;

// Instance budgets.
constexpr int kRoundTrips = 500;
constexpr int kOracleInstances = 50;
constexpr int kSuiteInstances = 300;
constexpr int kConfluenceInstances = 100;
constexpr int kConfluenceOrders = 10;
constexpr std::size_t kSectionSweep = 10000;

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Counter {
  int checked = 0;
  int failed = 0;
  std::string first;

  void check(bool ok, const std::string& what) {
    ++checked;
    if (!ok && failed++ == 0) first = what;
  }
  std::string summary() const {
    std::ostringstream s;
    s << checked - failed << "/" << checked << " checks";
    if (failed) s << ", first failure: " << first;
    return s.str();
  }
};

int failures = 0;

void criterion(int k, const char* title, const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (!o.pass) ++failures;
  std::printf("%s %2d %s [%.2f s] %s\n", o.pass ? "PASS" : "FAIL", k, title, secs, o.detail.c_str());
  std::fflush(stdout);
}

std::string label(const oracle::Instance& inst) { return inst.origin + " " + write_newick(inst.tree); }

// Triplet covers for the suites: canonical covers from random and balanced
// choosers, and minimal reductions of both.
std::vector<oracle::Instance> suite(Seed base, int count, bool minimal_only) {
  std::vector<oracle::Instance> out;
  for (Seed s = base; static_cast<int>(out.size()) < count; ++s) {
    const int n = 4 + static_cast<int>(s % 7);
    auto tree = random_binary_tree(n, s);
    const auto raw = s % 2 ? canonical_cover(tree, random_chooser(s)) : canonical_cover(tree, balanced_chooser(s, n));
    TripletCover cover;
    if (minimal_only || s % 4 >= 2) {
      cover = minimalize(tree, raw, s % 3 ? RemovalOrder::random(s) : RemovalOrder::lexicographic());
    } else {
      cover = raw;
    }
    out.push_back({std::move(tree), std::move(cover), "seed " + std::to_string(s)});
  }
  return out;
}

Outcome fig1_end_to_end() {
  const fs::path data = TRIPCOVER_DATA;
  const auto out = fs::temp_directory_path() / "tripcover_acceptance_fig1.json";
  const std::string cmd = std::string("\"") + TRIPCOVER_CLI + "\" analyze --tree \"" + (data / "fig1.nwk").string() +
                          "\" --cover \"" + (data / "fig1_cover.json").string() + "\" --json \"" + out.string() + "\"";
  const auto start = Clock::now();
  const int status = std::system(cmd.c_str());
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  Counter c;
  c.check(WIFEXITED(status) && WEXITSTATUS(status) == 0, "analyze exit status");
  const auto j = parse_json(read_file(out));
  c.check(j["is_cover"] == true, "is_cover");
  c.check(j["is_minimum"] == true && j["cord_count"] == 7, "minimum with 7 cords");
  c.check(j["is_sparse"] == true, "sparse");
  c.check(j["shellable"] == true, "shellable");
  std::set<std::string> added;
  for (const auto& s : j["shelling"]) added.insert(s["cord"][0].get<std::string>() + s["cord"][1].get<std::string>());
  c.check(added == std::set<std::string>{"ad", "ae", "bd"}, "added cords are ae, bd, ad");

  const auto tree = oracle::fig1_tree();
  const auto cover = oracle::fig1_cover();
  const auto given = shelling_from_order(tree, cover, {Cord(0, 4), Cord(1, 3), Cord(0, 3)});
  c.check(given && verify_shelling(tree, cover, *given), "order ae, bd, ad verifies");
  c.check(secs < kExampleLimit, "runtime");

  std::ostringstream d;
  d << c.summary() << "; analyze took " << secs << " s (limit " << kExampleLimit << " s)";
  return {c.failed == 0, d.str()};
}

Outcome round_trip() {
  const auto start = Clock::now();
  int exact = 0;
  std::string first;
  for (Seed s = 0; s < static_cast<Seed>(kRoundTrips); ++s) {
    const int n = 4 + static_cast<int>(s % 7);
    const auto t = random_binary_tree(n, s);
    const auto c = canonical_cover(t, random_chooser(s));
    try {
      const auto r = reconstruct(c, PartialDistances::from_tree(t, c));
      if (is_isomorphic(r.tree, t, true)) {
        ++exact;
        continue;
      }
    } catch (const Error&) {
    }
    if (first.empty()) first = "seed " + std::to_string(s);
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  std::ostringstream d;
  d << exact << "/" << kRoundTrips << " isomorphic with equal lengths, n in [4,10], " << secs << " s (limit "
    << kRoundTripLimit << " s)";
  if (!first.empty()) d << ", first failure " << first;
  return {exact == kRoundTrips && secs < kRoundTripLimit, d.str()};
}

Outcome uniqueness() {
  const auto start = Clock::now();
  int unique = 0;
  std::string first;
  for (Seed s = 0; s < static_cast<Seed>(kOracleInstances); ++s) {
    const int n = 4 + static_cast<int>(s % 4);
    const auto t = random_binary_tree(n, 9000 + s);
    const auto c = s % 2 ? canonical_cover(t, random_chooser(s))
                         : minimalize(t, canonical_cover(t, balanced_chooser(s, n)), RemovalOrder::random(s));
    const auto found = uniqueness_oracle(c, PartialDistances::from_tree(t, c));
    if (found.size() == 1 && found[0].dimension == 0 && is_isomorphic(found[0].tree, t, true)) {
      ++unique;
    } else if (first.empty()) {
      first = "seed " + std::to_string(s) + " (" + std::to_string(found.size()) + " survivors)";
    }
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  std::ostringstream d;
  d << unique << "/" << kOracleInstances << " with exactly one realizing tree, n in [4,7], " << secs << " s (limit "
    << kOracleLimit << " s)";
  if (!first.empty()) d << ", first failure " << first;
  return {unique == kOracleInstances && secs < kOracleLimit, d.str()};
}

Outcome triangles_suite() {
  Counter c;
  int minimal = 0;
  for (const auto& inst : suite(20000, kSuiteInstances, false)) {
    const auto g = build_cover_graph(inst.cover);
    const auto tri = triangles(g);
    c.check(tri == triple_set(inst.tree, inst.cover), "triangles = C(T), " + label(inst));
    c.check(is_two_connected(g), "2-connected, " + label(inst));
    if (is_minimal(inst.tree, inst.cover)) {
      ++minimal;
      c.check(cord_set(tri) == inst.cover.cord_set(), "every cord in a triangle, " + label(inst));
    }
  }
  return {c.failed == 0, std::to_string(kSuiteInstances) + " covers (" + std::to_string(minimal) + " minimal), " +
                             c.summary()};
}

Outcome sparse_suite() {
  Counter c;
  int sparse = 0;
  int swept = 0;
  for (const auto& inst : suite(30000, kSuiteInstances, false)) {
    const auto& t = inst.tree;
    const auto& cov = inst.cover;
    const auto m = support_map(t, cov);
    const auto ct = triple_set(m);
    const bool is_sp = is_sparse(t, cov);
    sparse += is_sp;
    c.check(is_sp == is_hall_type(t.leaf_count(), ct), "sparse vs Hall-type, " + label(inst));
    c.check(ct.size() > 16 || is_sp == oracle::is_hall(t.leaf_count(), ct), "sparse vs brute Hall, " + label(inst));
    c.check(is_sp == (section_count(m) == 1), "sparse vs unique section, " + label(inst));
    if (section_count(m) <= kSectionSweep) {
      ++swept;
      bool all_equal = true;
      for (const auto& sec : enumerate_sections(m, kSectionSweep)) all_equal = all_equal && cord_set(sec) == cov.cord_set();
      c.check(is_minimal(t, cov) == all_equal, "minimal vs Co(section) = T, " + label(inst));
    }
  }
  return {c.failed == 0, std::to_string(kSuiteInstances) + " covers (" + std::to_string(sparse) + " sparse, " +
                             std::to_string(swept) + " swept over every section), " + c.summary()};
}

Outcome bounds_suite() {
  Counter c;
  int minimum = 0;
  std::map<int, int> mus;
  for (const auto& inst : suite(40000, kSuiteInstances, true)) {
    const int n = inst.tree.leaf_count();
    const auto& cov = inst.cover;
    c.check(is_minimal(inst.tree, cov), "generated cover is minimal, " + label(inst));
    ++mus[cov.mu()];
    c.check(cov.mu() >= 2 && cov.mu() <= 4, "2 <= mu <= 4, " + label(inst));
    const int size = static_cast<int>(cov.size());
    c.check(size >= 2 * n - 3 && size <= 3 * n - 6, "2n-3 <= |T| <= 3n-6, " + label(inst));
    if (is_minimum(inst.tree, cov)) {
      ++minimum;
      c.check(cov.mu() == 2, "minimum has mu = 2, " + label(inst));
      const auto g = build_cover_graph(cov);
      const auto d = decomposition_from_section(enumerate_sections(support_map(inst.tree, cov), 1).front());
      c.check(is_two_tree(g) && d.block_count() == 1, "minimum is a single 2-tree, " + label(inst));
    }
  }
  std::ostringstream d;
  d << kSuiteInstances << " minimal covers (" << minimum << " minimum; mu";
  for (const auto& [mu, k] : mus) d << " " << mu << ":" << k;
  d << "), " << c.summary();
  return {c.failed == 0 && minimum > 0, d.str()};
}

Outcome decomposition_suite() {
  Counter c;
  int sections = 0;
  int exhaustive = 0;
  for (const auto& inst : suite(50000, kSuiteInstances, true)) {
    const auto& t = inst.tree;
    const auto& cov = inst.cover;
    const int n = t.leaf_count();
    const auto g = build_cover_graph(cov);
    const bool sparse = is_sparse(t, cov);
    const auto m = support_map(t, cov);
    std::optional<std::vector<TwoTreeDecomposition>> all;
    if (n <= 8) all = enumerate_decompositions(g);
    for (const auto& sec : enumerate_sections(m, kSectionSweep)) {
      ++sections;
      const auto d = decomposition_from_section(sec);
      c.check(is_decomposition_of(g, d), "is a decomposition, " + label(inst));
      std::size_t total = 0;
      for (const auto& b : d.blocks) total += b.triangles.size();
      c.check(d.triangles() == sec && total == sec.size(), "C = disjoint union of block triangles, " + label(inst));
      c.check(static_cast<int>(cov.size()) == 2 * n - 4 + d.block_count() && verify_counting(d),
              "|T| = 2|X| - 4 + m, " + label(inst));
      c.check(is_strict(g, d) == sparse, "strict iff sparse, " + label(inst));
      if (all) {
        ++exhaustive;
        const auto same = std::count_if(all->begin(), all->end(),
                                        [&](const TwoTreeDecomposition& e) { return e.triangles() == sec; });
        c.check(same == 1, "unique decomposition for the section, " + label(inst));
      }
    }
  }
  return {c.failed == 0, std::to_string(kSuiteInstances) + " minimal covers, " + std::to_string(sections) +
                             " sections (" + std::to_string(exhaustive) + " checked exhaustively, n <= 8), " +
                             c.summary()};
}

Outcome shelling_suite() {
  Counter c;
  int ample = 0;
  int two_block = 0;
  auto visit = [&](const PhyloTree& t, const TripletCover& cov, const std::string& what) {
    const bool shellable = is_shellable(t, cov).shellable;
    const auto verdict = shellable_via_patchwork(t, cov, 64, 16);
    if (verdict.yes()) {
      ++ample;
      c.check(shellable, "ample section but not shellable, " + what);
      c.check(verify_shelling(t, cov, verdict.shelling), "hierarchy shelling verifies, " + what);
    }
    if (is_minimal(t, cov) && is_sparse(t, cov)) {
      const auto g = build_cover_graph(cov);
      const auto d = decomposition_from_section(enumerate_sections(support_map(t, cov), 1).front());
      if (is_strict(g, d) && d.block_count() <= 2) {
        ++two_block;
        c.check(shellable, "strict decomposition with <= 2 blocks but not shellable, " + what);
      }
    }
  };
  for (const auto& inst : suite(60000, kSuiteInstances, false)) visit(inst.tree, inst.cover, label(inst));
  for (const auto& inst : suite(70000, kSuiteInstances, true)) visit(inst.tree, inst.cover, label(inst));
  for (const char* name : {"sparse-minimal-mu4", "sparse-not-shellable", "sparse-minimal-shellable-not-ample"}) {
    const fs::path dir = fs::path(TRIPCOVER_DATA) / "fixtures" / name;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
      if (e.path().extension() != ".json") continue;
      const auto r = record_from_json(parse_json(read_file(e.path())));
      visit(r.tree, r.cover, e.path().filename().string());
    }
  }
  std::ostringstream d;
  d << "premise held " << ample << " times (ample section) and " << two_block
    << " times (strict, <= 2 blocks); " << c.summary();
  return {c.failed == 0 && ample > 0 && two_block > 0, d.str()};
}

Outcome confluence() {
  int agree = 0;
  std::string first;
  const auto instances = suite(80000, kConfluenceInstances, false);
  for (const auto& inst : instances) {
    const auto base = cord_closure(inst.tree, inst.cover).closed;
    bool same = true;
    for (int k = 0; k < kConfluenceOrders; ++k) {
      same = same && cord_closure_shuffled(inst.tree, inst.cover, 1000 * static_cast<std::uint64_t>(k) + 7).closed == base;
    }
    if (same) {
      ++agree;
    } else if (first.empty()) {
      first = label(inst);
    }
  }
  std::ostringstream d;
  d << agree << "/" << kConfluenceInstances << " identical closures over " << kConfluenceOrders << " orders";
  if (!first.empty()) d << ", first failure " << first;
  return {agree == kConfluenceInstances, d.str()};
}

// Budgets under which the stored fixtures were found.
Outcome fixture_synthesis() {
  SearchBudget ab;
  ab.n_min = 4;
  ab.n_max = 12;
  ab.per_n = 500;
  SearchBudget cb;
  cb.n_min = 12;
  cb.n_max = 12;
  cb.per_n = 0;
  cb.climbs = 150;
  cb.climb_steps = 3000;

  std::ostringstream d;
  bool pass = true;
  auto describe = [](const std::optional<InstanceRecord>& r) {
    if (!r) return std::string("not found");
    return "n=" + std::to_string(r->tree.leaf_count()) + " " + r->generator + " seed " + std::to_string(r->seed);
  };

  const auto a = search_fixture(predicates::minimal_not_sparse(), ab);
  const bool a_ok = a && is_triplet_cover(a->tree, a->cover) && is_minimal(a->tree, a->cover) &&
                    !is_sparse(a->tree, a->cover) &&
                    oracle::is_minimal(a->tree, a->cover.cord_set()) &&
                    oracle::all_triples(a->tree, a->cover.cord_set()).size() > static_cast<std::size_t>(a->tree.leaf_count() - 2);
  d << "(a) minimal, not sparse: " << describe(a) << (a_ok ? "" : " [FAILED]") << "; ";
  pass = pass && a_ok;

  const auto b = search_fixture(predicates::sparse_minimal_mu4(), ab);
  const bool b_ok = b && is_triplet_cover(b->tree, b->cover) && is_minimal(b->tree, b->cover) &&
                    is_sparse(b->tree, b->cover) && b->cover.mu() == 4 &&
                    oracle::is_minimal(b->tree, b->cover.cord_set()) &&
                    oracle::all_triples(b->tree, b->cover.cord_set()).size() == static_cast<std::size_t>(b->tree.leaf_count() - 2);
  d << "(b) sparse, minimal, mu = 4: " << describe(b) << (b_ok ? "" : " [FAILED]") << "; ";
  pass = pass && b_ok;

  const auto c = search_fixture(predicates::sparse_not_shellable(), cb);
  d << "(c) sparse, not shellable (n = 12, 150 climbs x 3000 steps): " << describe(c);
  if (c) {
    const int n = c->tree.leaf_count();
    const bool c_ok = is_triplet_cover(c->tree, c->cover) && is_sparse(c->tree, c->cover) &&
                      !is_shellable(c->tree, c->cover).shellable &&
                      oracle::closure(c->tree, c->cover.cord_set()).size() < static_cast<std::size_t>(n * (n - 1) / 2) &&
                      oracle::all_triples(c->tree, c->cover.cord_set()).size() == static_cast<std::size_t>(n - 2);
    d << (c_ok ? ", witness verified" : " [witness FAILED verification]");
    pass = pass && c_ok;
  }
  return {pass, d.str()};
}

}  // namespace

int main() {
  criterion(1, "five-taxon example end to end", fig1_end_to_end);
  criterion(2, "reconstruction round trip", round_trip);
  criterion(3, "uniqueness oracle", uniqueness);
  criterion(4, "triangles, 2-connectivity, cords in triangles", triangles_suite);
  criterion(5, "sparse vs Hall-type vs unique section; minimal vs Co", sparse_suite);
  criterion(6, "multiplicity and size bounds; minimum covers", bounds_suite);
  criterion(7, "section decompositions", decomposition_suite);
  criterion(8, "ample or two-block strict implies shellable", shelling_suite);
  criterion(9, "closure confluence", confluence);
  criterion(10, "fixture synthesis", fixture_synthesis);
  return failures == 0 ? 0 : 1;
}

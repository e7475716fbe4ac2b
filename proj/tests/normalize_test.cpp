#include "ncsagree/normalize.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "ncsagree/errors.hpp"
#include "ncsagree/synthetic.hpp"
#include "helpers.hpp"

using namespace ncsagree;
using testutil::load_assign;
using testutil::load_pubs;

namespace {

// One doi-keyed system over explicit (citations, fields...) rows.
struct TinyCorpus {
  corpus::Corpus corp;

  explicit TinyCorpus(
      const std::vector<std::pair<std::int64_t, std::vector<std::string>>>&
          papers,
      int year = 2008) {
    std::ostringstream pubs;
    pubs << "doi\tpmid\tut\tpub_year\tcitations\n";
    std::ostringstream rows;
    rows << "paper_key\tfield_id\tis_primary\n";
    for (std::size_t i = 0; i < papers.size(); ++i) {
      pubs << "10.1/p" << i << "\t\t\t" << year << '\t' << papers[i].first
           << '\n';
      for (const auto& f : papers[i].second)
        rows << "10.1/p" << i << '\t' << f << "\t0\n";
    }
    auto loaded = load_pubs(pubs.str());
    corp.papers = std::move(loaded.records);
    const corpus::ClassificationSystemDescriptor desc{
        "sys", corpus::IdNamespace::doi,
        corpus::AssignmentPolicy::all_assignments_averaged};
    const auto resolved = corpus::resolve_assignments(
        load_assign(rows.str(), desc), desc.policy);
    corp.systems.push_back(corpus::link_system(corp.papers, desc, resolved));
  }

  double score(std::size_t paper) const {
    const auto refsets =
        normalize::build_reference_sets(corp, corp.systems[0]);
    const auto ncs = normalize::compute_ncs(corp, corp.systems[0], refsets);
    return ncs.at(static_cast<std::uint32_t>(paper));
  }
};

}  // namespace

TEST_CASE("reference sets: integer sums and means") {
  TinyCorpus t({{3, {"F"}}, {10, {"F"}}, {19, {"F"}}});
  const auto refsets =
      normalize::build_reference_sets(t.corp, t.corp.systems[0]);
  const auto all = refsets.sorted();
  REQUIRE(all.size() == 1);
  CHECK(all[0].n_papers == 3);
  CHECK(all[0].citation_sum == 32);
  CHECK(all[0].mean() == doctest::Approx(10.667).epsilon(1e-4));
  // deferred division: mean * n reproduces the exact sum
  CHECK(all[0].mean() * 3.0 == 32.0);
}

TEST_CASE("reference sets: single uncited paper") {
  TinyCorpus t({{0, {"F"}}});
  const auto refsets =
      normalize::build_reference_sets(t.corp, t.corp.systems[0]);
  const auto all = refsets.sorted();
  REQUIRE(all.size() == 1);
  CHECK(all[0].n_papers == 1);
  CHECK(all[0].mean() == 0.0);
}

TEST_CASE("reference sets: multi-field papers count fully in every field") {
  TinyCorpus t({{4, {"F", "G"}}, {2, {"F"}}});
  const auto refsets =
      normalize::build_reference_sets(t.corp, t.corp.systems[0]);
  const auto all = refsets.sorted();
  REQUIRE(all.size() == 2);  // F and G
  CHECK(all[0].n_papers == 2);
  CHECK(all[0].citation_sum == 6);
  CHECK(all[1].n_papers == 1);
  CHECK(all[1].citation_sum == 4);
}

TEST_CASE("ncs: the 3-over-10.67 anchor rounds to 0.28") {
  TinyCorpus t({{3, {"F"}}, {10, {"F"}}, {19, {"F"}}});
  const double s = t.score(0);
  CHECK(s == doctest::Approx(3.0 / (32.0 / 3.0)).epsilon(1e-14));
  CHECK(std::round(s * 100.0) / 100.0 == 0.28);
}

TEST_CASE("ncs: zero citations score zero") {
  TinyCorpus t({{0, {"F"}}, {10, {"F"}}});
  CHECK(t.score(0) == 0.0);
}

TEST_CASE("ncs: multi-field scores average the per-field ratios") {
  // field F mean 2 (papers 4 and 0), field G mean 4
  TinyCorpus t({{4, {"F", "G"}}, {0, {"F"}}, {4, {"G"}}});
  CHECK(t.score(0) == doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("ncs: zero-mean reference set scores zero") {
  TinyCorpus t({{0, {"F"}}, {0, {"F"}}});
  CHECK(t.score(0) == 0.0);
  CHECK(t.score(1) == 0.0);
}

TEST_CASE("ncs: missing reference set is an internal error") {
  TinyCorpus t({{3, {"F"}}, {5, {"G"}}});
  auto refsets = normalize::build_reference_sets(t.corp, t.corp.systems[0]);
  refsets.by_field_year.erase(refsets.by_field_year.begin());
  CHECK_THROWS_AS(
      normalize::compute_ncs(t.corp, t.corp.systems[0], refsets),
      ConsistencyError);
}

TEST_CASE("ncs: system mismatch is an internal error") {
  TinyCorpus t({{3, {"F"}}});
  auto refsets = normalize::build_reference_sets(t.corp, t.corp.systems[0]);
  refsets.system_id = "other";
  CHECK_THROWS_AS(
      normalize::compute_ncs(t.corp, t.corp.systems[0], refsets),
      ConsistencyError);
}

namespace {

synthetic::SyntheticConfig single_assignment_config(std::uint64_t seed) {
  synthetic::SyntheticConfig config;
  config.seed = seed;
  config.n_papers = 600;
  config.citation_scale = 6.0;
  config.systems = {{"solo", 12, corpus::IdNamespace::doi,
                     corpus::AssignmentPolicy::all_assignments_averaged, 0.0,
                     0.0}};
  return config;
}

}  // namespace

TEST_CASE("ncs invariant: reference-set mean score is exactly 1") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const auto config = single_assignment_config(seed);
    const auto corp = testutil::corpus_from_synth(
        config, synthetic::generate_synthetic_corpus(config));
    const auto& sys = corp.systems[0];
    const auto refsets = normalize::build_reference_sets(corp, sys);
    const auto ncs = normalize::compute_ncs(corp, sys, refsets);

    std::map<std::uint64_t, std::pair<double, std::int64_t>> sums;
    for (std::size_t p = 0; p < sys.size(); ++p) {
      const auto paper_id = sys.paper_ids[p];
      const auto key = normalize::ReferenceSets::key(
          sys.fields[p][0], corp.papers[paper_id].pub_year);
      auto& [sum, count] = sums[key];
      sum += ncs.at(paper_id);
      ++count;
    }
    for (const auto& [key, entry] : sums) {
      const auto* stats = &refsets.by_field_year.at(key);
      if (stats->citation_sum == 0) continue;
      const double mean =
          entry.first / static_cast<double>(entry.second);
      CHECK(std::abs(mean - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("ncs invariant: citation scaling leaves scores unchanged") {
  const auto config = synthetic::default_six_system_config(9, 400);
  const auto synth = synthetic::generate_synthetic_corpus(config);
  const auto base = testutil::corpus_from_synth(config, synth);

  for (const std::int64_t k : {2, 7}) {
    auto scaled_synth = synth;
    for (auto& p : scaled_synth.publications) p.citations *= k;
    const auto scaled = testutil::corpus_from_synth(config, scaled_synth);
    for (std::size_t s = 0; s < base.systems.size(); ++s) {
      const auto ncs_base = normalize::compute_ncs(
          base, base.systems[s],
          normalize::build_reference_sets(base, base.systems[s]));
      const auto ncs_scaled = normalize::compute_ncs(
          scaled, scaled.systems[s],
          normalize::build_reference_sets(scaled, scaled.systems[s]));
      for (const auto paper_id : base.systems[s].paper_ids)
        CHECK(std::abs(ncs_base.at(paper_id) - ncs_scaled.at(paper_id)) <=
              1e-12);
    }
  }
}

TEST_CASE("ncs invariant: more citations, strictly higher score") {
  TinyCorpus base({{3, {"F"}}, {10, {"F"}}, {19, {"F"}}});
  TinyCorpus bumped({{4, {"F"}}, {10, {"F"}}, {19, {"F"}}});
  CHECK(bumped.score(0) > base.score(0));
}

TEST_CASE("ncs invariant: input order does not matter") {
  const auto config = single_assignment_config(4);
  const auto synth = synthetic::generate_synthetic_corpus(config);

  auto shuffled = synth;
  std::reverse(shuffled.assignments[0].begin(),
               shuffled.assignments[0].end());
  const auto a = testutil::corpus_from_synth(config, synth);
  const auto b = testutil::corpus_from_synth(config, shuffled);
  const auto ncs_a = normalize::compute_ncs(
      a, a.systems[0], normalize::build_reference_sets(a, a.systems[0]));
  const auto ncs_b = normalize::compute_ncs(
      b, b.systems[0], normalize::build_reference_sets(b, b.systems[0]));
  CHECK(ncs_a.score_by_paper == ncs_b.score_by_paper);
}

TEST_CASE("ncs invariant: removing an unrelated field changes nothing") {
  TinyCorpus with({{3, {"F"}}, {10, {"F"}}, {7, {"G"}}});
  TinyCorpus without({{3, {"F"}}, {10, {"F"}}});
  CHECK(with.score(0) == without.score(0));
  CHECK(with.score(1) == without.score(1));
}

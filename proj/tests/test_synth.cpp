#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "doctest.h"

#include "eduspace/csv.hpp"
#include "eduspace/error.hpp"
#include "eduspace/ingest.hpp"
#include "eduspace/rng.hpp"
#include "eduspace/synth.hpp"

using namespace eduspace;

TEST_CASE("generation is deterministic and prefix-stable") {
  SynthConfig config = synth_preset("blobs3");
  config.n_students = 200;
  auto a = generate(config);
  auto b = generate(config);
  REQUIRE(a.secondary.size() == b.secondary.size());
  for (size_t i = 0; i < a.secondary.size(); ++i) {
    CHECK(a.secondary[i].student_id == b.secondary[i].student_id);
    CHECK(a.secondary[i].math_score == b.secondary[i].math_score);
    CHECK(a.secondary[i].family_income == b.secondary[i].family_income);
  }
  config.n_students = 350;
  auto c = generate(config);
  // the first 200 students are bit-identical: streams are per-student
  for (size_t i = 0; i < 200; ++i) {
    CHECK(c.secondary[i].math_score == a.secondary[i].math_score);
    CHECK(c.truth.cluster[i] == a.truth.cluster[i]);
    CHECK(c.truth.migrated[i] == a.truth.migrated[i]);
  }
}

TEST_CASE("config validation rejects inconsistent setups") {
  SynthConfig config = synth_preset("blobs3");
  config.components[0].weight = 0.9;  // sum != 1
  CHECK_THROWS_AS(generate(config), Error);
  config = synth_preset("blobs3");
  config.migration.cluster_offsets = {0.0};  // wrong arity
  CHECK_THROWS_AS(generate(config), Error);
  config = synth_preset("blobs3");
  config.n_regions = 1;
  CHECK_THROWS_AS(generate(config), Error);
  config = synth_preset("blobs3");
  config.year_hi = config.year_lo - 1;
  CHECK_THROWS_AS(generate(config), Error);
  CHECK_THROWS_AS(synth_preset("nope"), Error);
}

TEST_CASE("generated raw values always pass ingest validation") {
  SynthConfig config = synth_preset("fig1a");
  config.n_students = 3000;
  auto cohort = generate(config);
  const std::string dir = "synth_ingest_check";
  write_synth_csvs(cohort, dir);
  auto sec = load_secondary(dir + "/secondary.csv");
  auto enr = load_enrollment(dir + "/enrollment.csv");
  CHECK(sec.rejects.empty());
  CHECK(enr.rejects.empty());
  CHECK(sec.records.size() == 3000);
  CHECK(enr.records.size() == cohort.enrollment.size());
  std::filesystem::remove_all(dir);
}

TEST_CASE("value ranges match the documented generator bounds") {
  SynthConfig config = synth_preset("fig1a");
  config.n_students = 2000;
  auto cohort = generate(config);
  for (const auto& r : cohort.secondary) {
    CHECK(r.math_score >= kSynthScoreLo);
    CHECK(r.math_score <= kSynthScoreHi);
    CHECK(r.gpa >= kSynthGpaLo);
    CHECK(r.gpa <= kSynthGpaHi);
    CHECK(r.family_income >= kSynthIncomeBase * 0.999);
    CHECK(r.home_region >= 1);
    CHECK(r.home_region <= 16);
    CHECK(r.cohort_year >= 2021);
    CHECK(r.cohort_year <= 2024);
  }
}

TEST_CASE("enrollment probability is honored") {
  SynthConfig config = synth_preset("fig1a");
  config.n_students = 20000;
  auto cohort = generate(config);
  double share = static_cast<double>(cohort.enrollment.size()) / 20000.0;
  CHECK(share == doctest::Approx(0.9).epsilon(0.01));
  // non-enrolled students are never migrated in truth
  for (size_t i = 0; i < cohort.truth.enrolled.size(); ++i) {
    if (!cohort.truth.enrolled[i]) CHECK(cohort.truth.migrated[i] == 0);
  }
}

TEST_CASE("planted per-cluster migration rates are recovered from truth") {
  auto cohort = generate(synth_preset("rates3"));
  std::map<int, std::pair<int64_t, int64_t>> counts;  // cluster -> (migrants, enrolled)
  for (size_t i = 0; i < cohort.truth.cluster.size(); ++i) {
    if (!cohort.truth.enrolled[i]) continue;
    auto& [migrants, enrolled] = counts[cohort.truth.cluster[i]];
    enrolled += 1;
    migrants += cohort.truth.migrated[i] ? 1 : 0;
  }
  const double planted[3] = {0.1, 0.4, 0.7};
  for (int c = 0; c < 3; ++c) {
    const auto& [migrants, enrolled] = counts[c];
    REQUIRE(enrolled > 8000);
    CHECK(static_cast<double>(migrants) / static_cast<double>(enrolled) ==
          doctest::Approx(planted[c]).epsilon(0.025));
  }
}

TEST_CASE("threshold migration mode is deterministic given features") {
  auto cohort = generate(synth_preset("separable"));
  for (size_t i = 0; i < cohort.truth.migration_prob.size(); ++i) {
    const double p = cohort.truth.migration_prob[i];
    CHECK((p == 0.0 || p == 1.0));
    if (cohort.truth.enrolled[i]) {
      CHECK(cohort.truth.migrated[i] == static_cast<uint8_t>(p));
    }
  }
  // single cohort year by design
  for (const auto& r : cohort.secondary) CHECK(r.cohort_year == 2022);
}

TEST_CASE("career mix shifts with the academic tier") {
  SynthConfig config = synth_preset("fig1a");
  config.n_students = 20000;
  auto cohort = generate(config);
  std::map<std::string, int64_t> area_of;
  int64_t high_total = 0, low_total = 0, high_med = 0, low_med = 0;
  std::map<std::string, size_t> index_by_id;
  for (size_t i = 0; i < cohort.secondary.size(); ++i) {
    index_by_id[cohort.secondary[i].student_id] = i;
  }
  for (const auto& e : cohort.enrollment) {
    const size_t i = index_by_id[e.student_id];
    const double perf = cohort.truth.performance[i];
    if (perf >= 0.7) {
      high_total++;
      high_med += e.career_area == "Medicine" ? 1 : 0;
    } else if (perf < 0.4) {
      low_total++;
      low_med += e.career_area == "Medicine" ? 1 : 0;
    }
  }
  REQUIRE(high_total > 1000);
  REQUIRE(low_total > 1000);
  const double high_share = static_cast<double>(high_med) / static_cast<double>(high_total);
  const double low_share = static_cast<double>(low_med) / static_cast<double>(low_total);
  CHECK(high_share == doctest::Approx(0.25).epsilon(0.1));
  CHECK(low_share == doctest::Approx(0.02).epsilon(0.5));
  CHECK(high_share > 5 * low_share);
}

TEST_CASE("two-factor mode plants the latent factors") {
  auto cohort = generate(synth_preset("twofactor"));
  REQUIRE(cohort.secondary.size() == 20000);
  // reading score is an affine map of x0 which tracks performance
  double sp = 0, spp = 0, sxx = 0, sx = 0, sy = 0;
  const double n = 20000;
  for (size_t i = 0; i < cohort.secondary.size(); ++i) {
    const double x = cohort.truth.performance[i];
    const double y = cohort.secondary[i].reading_score;
    sx += x;
    sy += y;
    sp += x * y;
    spp += y * y;
    sxx += x * x;
  }
  const double cov = sp / n - (sx / n) * (sy / n);
  const double vx = sxx / n - (sx / n) * (sx / n);
  const double vy = spp / n - (sy / n) * (sy / n);
  CHECK(cov / std::sqrt(vx * vy) > 0.95);
}

TEST_CASE("ari matches a hand-computed contingency") {
  // truth {0,0,1,1} vs pred {0,0,1,2}: ARI = 4/7
  CHECK(adjusted_rand_index({0, 0, 1, 1}, {0, 0, 1, 2}) == doctest::Approx(4.0 / 7.0));
}

TEST_CASE("ari properties: identity, permutation, independence") {
  std::vector<int> a, b, random_a, random_b;
  Rng rng(31);
  for (int i = 0; i < 3000; ++i) {
    int v = static_cast<int>(rng.below(4));
    a.push_back(v);
    b.push_back((v + 2) % 4);  // relabeled partition, same structure
    random_a.push_back(static_cast<int>(rng.below(4)));
    random_b.push_back(static_cast<int>(rng.below(4)));
  }
  CHECK(adjusted_rand_index(a, a) == doctest::Approx(1.0));
  CHECK(adjusted_rand_index(a, b) == doctest::Approx(1.0));
  CHECK(std::abs(adjusted_rand_index(random_a, random_b)) < 0.03);
  CHECK(adjusted_rand_index(a, random_a) < 0.1);
  // degenerate: both trivial partitions agree perfectly
  CHECK(adjusted_rand_index({1, 1, 1}, {2, 2, 2}) == 1.0);
  CHECK_THROWS_AS(adjusted_rand_index({1, 2}, {1}), Error);
}

TEST_CASE("synth csv bundle round-trips through the ingest loaders") {
  SynthConfig config = synth_preset("rates3");
  config.n_students = 500;
  auto cohort = generate(config);
  const std::string dir = "synth_bundle";
  write_synth_csvs(cohort, dir);
  REQUIRE(std::filesystem::exists(dir + "/ground_truth.csv"));
  auto sec = load_secondary(dir + "/secondary.csv");
  REQUIRE(sec.records.size() == 500);
  // truth file aligns with the secondary file row by row
  auto truth_table = read_csv_file(dir + "/ground_truth.csv");
  REQUIRE(truth_table.rows.size() == 500);
  CHECK(truth_table.rows[0][0] == sec.records[0].student_id);
  std::filesystem::remove_all(dir);
}

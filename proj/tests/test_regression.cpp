#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "eduspace/csv.hpp"
#include "eduspace/design.hpp"
#include "eduspace/error.hpp"
#include "eduspace/logit.hpp"
#include "eduspace/rng.hpp"

using namespace eduspace;

namespace {

double sigmoid(double eta) { return 1.0 / (1.0 + std::exp(-eta)); }

struct SimpleSample {
  Eigen::MatrixXd X;  // intercept + one covariate
  Eigen::VectorXd y;
};

// few distinct covariate values so the likelihood reduces to sufficient
// statistics, which keeps the grid-search oracle cheap
SimpleSample simulate(const std::vector<double>& levels, double b0, double b1, int per_level,
                      uint64_t seed) {
  Rng rng(seed);
  SimpleSample s;
  const int n = per_level * static_cast<int>(levels.size());
  s.X.resize(n, 2);
  s.y.resize(n);
  int row = 0;
  for (double x : levels) {
    for (int i = 0; i < per_level; ++i, ++row) {
      s.X(row, 0) = 1;
      s.X(row, 1) = x;
      s.y(row) = rng.uniform() < sigmoid(b0 + b1 * x) ? 1.0 : 0.0;
    }
  }
  return s;
}

// log-likelihood from the per-level counts; exact for the simulate() design
struct SufficientStats {
  std::vector<double> level;
  std::vector<double> ones;
  std::vector<double> total;

  explicit SufficientStats(const SimpleSample& s) {
    std::map<double, std::pair<double, double>> acc;
    for (Eigen::Index i = 0; i < s.y.size(); ++i) {
      auto& [o, t] = acc[s.X(i, 1)];
      o += s.y(i);
      t += 1;
    }
    for (auto& [x, ot] : acc) {
      level.push_back(x);
      ones.push_back(ot.first);
      total.push_back(ot.second);
    }
  }

  double loglik(double b0, double b1) const {
    double ll = 0;
    for (size_t g = 0; g < level.size(); ++g) {
      const double eta = b0 + b1 * level[g];
      const double log1pexp = eta > 0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
      ll += ones[g] * eta - total[g] * log1pexp;
    }
    return ll;
  }
};

// Two-stage exhaustive scan. The log-likelihood is strictly concave here, so
// the coarse argmax lies within one coarse step of the true maximizer and the
// fine window around it contains the optimum.
std::pair<double, double> grid_search_mle(const SufficientStats& stats) {
  double best0 = 0, best1 = 0, best = -1e300;
  for (double b0 = -5; b0 <= 5 + 1e-12; b0 += 0.05) {
    for (double b1 = -5; b1 <= 5 + 1e-12; b1 += 0.05) {
      const double ll = stats.loglik(b0, b1);
      if (ll > best) {
        best = ll;
        best0 = b0;
        best1 = b1;
      }
    }
  }
  const double window = 0.1, step = 1e-3;
  double fine0 = best0, fine1 = best1;
  for (double b0 = best0 - window; b0 <= best0 + window + 1e-12; b0 += step) {
    for (double b1 = best1 - window; b1 <= best1 + window + 1e-12; b1 += step) {
      const double ll = stats.loglik(b0, b1);
      if (ll > best) {
        best = ll;
        fine0 = b0;
        fine1 = b1;
      }
    }
  }
  return {fine0, fine1};
}

Eigen::MatrixXd cohort_features(int n, uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd f(n, 6);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 6; ++j) f(i, j) = rng.uniform();
  }
  return f;
}

std::vector<Archetype> random_clusters(int n, uint64_t seed) {
  Rng rng(seed);
  std::vector<Archetype> clusters(static_cast<size_t>(n));
  for (auto& c : clusters) c = static_cast<Archetype>(rng.below(7));
  return clusters;
}

std::vector<uint8_t> simulate_migration(const Eigen::MatrixXd& features,
                                        const std::vector<Archetype>& clusters, uint64_t seed) {
  Rng rng(seed);
  std::vector<uint8_t> migrated(static_cast<size_t>(features.rows()));
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    const double eta = -0.8 + 1.2 * features(i, 1) - 0.9 * features(i, 5) +
                       (clusters[static_cast<size_t>(i)] == Archetype::Achievers ? 0.5 : 0.0);
    migrated[static_cast<size_t>(i)] = rng.uniform() < sigmoid(eta) ? 1 : 0;
  }
  return migrated;
}

}  // namespace

TEST_CASE("stable log-likelihood agrees with the naive formula") {
  SimpleSample s = simulate({-1, 0, 1}, 0.3, -0.7, 40, 21);
  Eigen::VectorXd beta(2);
  beta << 0.2, -0.5;
  double naive = 0;
  for (Eigen::Index i = 0; i < s.y.size(); ++i) {
    const double eta = s.X.row(i) * beta;
    naive += s.y(i) * eta - std::log(1.0 + std::exp(eta));
  }
  CHECK(logit_loglik<double>(s.X, s.y, beta) == doctest::Approx(naive).epsilon(1e-12));

  // extreme linear predictors must not overflow
  beta << 1000, 500;
  CHECK(std::isfinite(logit_loglik<double>(s.X, s.y, beta)));
  beta << -1000, -500;
  CHECK(std::isfinite(logit_loglik<double>(s.X, s.y, beta)));
}

TEST_CASE("score matches central finite differences") {
  SimpleSample s = simulate({-1, -0.2, 0.4, 1}, 0.1, 0.8, 30, 33);
  Rng rng(7);
  const double h = 1e-6;
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd beta(2);
    beta << rng.uniform(-2, 2), rng.uniform(-2, 2);
    Eigen::VectorXd score = logit_score<double>(s.X, s.y, beta);
    for (int j = 0; j < 2; ++j) {
      Eigen::VectorXd up = beta, down = beta;
      up(j) += h;
      down(j) -= h;
      const double fd =
          (logit_loglik<double>(s.X, s.y, up) - logit_loglik<double>(s.X, s.y, down)) / (2 * h);
      CHECK(score(j) == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("label-symmetric data gives zero coefficients") {
  Eigen::MatrixXd X(4, 2);
  X << 1, -1, 1, -1, 1, 1, 1, 1;
  Eigen::VectorXd y(4);
  y << 0, 1, 0, 1;
  auto fit = fit_logit<double>(X, y);
  CHECK(fit.converged);
  CHECK(std::abs(fit.coefficients(0)) < 1e-8);
  CHECK(std::abs(fit.coefficients(1)) < 1e-8);
  CHECK(fit.pseudo_r2 == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("Newton solution matches an exhaustive grid search") {
  SimpleSample s = simulate({0, 0.25, 0.5, 0.75, 1}, -0.4, 0.9, 120, 5);
  SufficientStats stats(s);
  auto [g0, g1] = grid_search_mle(stats);
  auto fit = fit_logit<double>(s.X, s.y);
  REQUIRE(fit.converged);
  CHECK(std::abs(fit.coefficients(0) - g0) < 2e-3);
  CHECK(std::abs(fit.coefficients(1) - g1) < 2e-3);
  // the Newton optimum cannot be worse than any lattice point
  CHECK(fit.log_likelihood >= stats.loglik(g0, g1) - 1e-9);
  // score vanishes at the reported optimum
  CHECK(logit_score<double>(s.X, s.y, fit.coefficients).norm() < 1e-6);
}

TEST_CASE("intercept-only fit has a closed form") {
  const int n = 200, ones = 70;
  Eigen::MatrixXd X = Eigen::MatrixXd::Ones(n, 1);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  y.head(ones).setOnes();
  auto fit = fit_logit<double>(X, y);
  const double p_hat = static_cast<double>(ones) / n;
  CHECK(fit.coefficients(0) == doctest::Approx(std::log(p_hat / (1 - p_hat))).epsilon(1e-8));
  CHECK(fit.std_errors(0) == doctest::Approx(std::sqrt(1.0 / (n * p_hat * (1 - p_hat)))).epsilon(1e-6));
  CHECK(fit.pseudo_r2 == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(fit.log_likelihood == doctest::Approx(fit.null_log_likelihood).epsilon(1e-12));
}

TEST_CASE("steep signal yields pseudo R2 near one") {
  SimpleSample s = simulate({-1, -0.5, 0.5, 1}, 0, 6, 500, 17);
  auto fit = fit_logit<double>(s.X, s.y);
  CHECK(fit.converged);
  CHECK(fit.pseudo_r2 > 0.7);
  CHECK(fit.pseudo_r2 < 1.0);
}

TEST_CASE("degenerate inputs throw typed errors") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Ones(10, 1);
  Eigen::VectorXd y = Eigen::VectorXd::Ones(10);
  CHECK_THROWS_WITH_AS(fit_logit<double>(X, y), "ConstantColumn: response has a single class",
                       Error);

  Eigen::MatrixXd tiny = Eigen::MatrixXd::Ones(2, 2);
  Eigen::VectorXd ty(2);
  ty << 0, 1;
  CHECK_THROWS_AS(fit_logit<double>(tiny, ty), Error);

  Eigen::VectorXd bad(10);
  bad.setZero();
  bad(3) = 0.5;
  CHECK_THROWS_AS(fit_logit<double>(X, bad), Error);

  Eigen::VectorXd short_y(4);
  short_y << 0, 1, 0, 1;
  CHECK_THROWS_AS(fit_logit<double>(X, short_y), Error);
}

TEST_CASE("perfectly separated data is reported as separation") {
  const int n = 60;
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n);
  Rng rng(3);
  for (int i = 0; i < n; ++i) {
    const double x = rng.uniform(-1, 1);
    X(i, 0) = 1;
    X(i, 1) = x;
    y(i) = x > 0 ? 1.0 : 0.0;
  }
  try {
    fit_logit<double>(X, y);
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Separation);
  }
}

TEST_CASE("design matrices have the ladder shapes") {
  const int n = 40;
  auto features = cohort_features(n, 41);
  auto clusters = random_clusters(n, 42);
  std::vector<uint8_t> migrated(n, 0);
  for (int i = 0; i < n; i += 2) migrated[static_cast<size_t>(i)] = 1;

  const std::vector<std::pair<int, int>> expected = {{1, 7}, {2, 13}, {3, 14}, {4, 14}, {5, 15}};
  for (auto [id, cols] : expected) {
    auto d = build_design(features, clusters, migrated, id);
    CHECK(d.X.cols() == cols);
    CHECK(d.X.rows() == n);
    CHECK(static_cast<int>(d.spec.column_names.size()) == cols);
    CHECK(d.spec.column_names[0] == "intercept");
    CHECK(d.spec.display_names[0] == "Constant");
    CHECK((d.X.col(0).array() == 1.0).all());
    for (int i = 0; i < n; ++i) CHECK(d.y(i) == (migrated[static_cast<size_t>(i)] ? 1.0 : 0.0));
  }
}

TEST_CASE("covariates are min-max scaled over the sample") {
  const int n = 60;
  auto features = cohort_features(n, 8);
  features.col(2) = (features.col(2).array() * 40.0 + 7.0).matrix();  // arbitrary affine shift
  auto d = build_design(features, {}, std::vector<uint8_t>(n, 0) /*unused flags*/, 1);
  // y all zero is fine for construction; scaling happens regardless
  for (int f = 0; f < 6; ++f) {
    CHECK(d.X.col(1 + f).minCoeff() == doctest::Approx(0.0));
    CHECK(d.X.col(1 + f).maxCoeff() == doctest::Approx(1.0));
  }
  // scaling is a monotone map of the raw column
  Eigen::Index raw_max, scaled_max;
  features.col(2).maxCoeff(&raw_max);
  d.X.col(3).maxCoeff(&scaled_max);
  CHECK(raw_max == scaled_max);
}

TEST_CASE("dummies follow name order and honor the baseline") {
  const int n = 70;
  auto features = cohort_features(n, 9);
  auto clusters = random_clusters(n, 10);
  std::vector<uint8_t> migrated(n, 0);
  migrated[0] = 1;

  auto d = build_design(features, clusters, migrated, 2);
  const std::vector<std::string> expect = {"cluster_Atypical",  "cluster_Challenged",
                                           "cluster_Disadvantaged", "cluster_Privileged",
                                           "cluster_Resilient", "cluster_Strivers"};
  REQUIRE(d.spec.column_names.size() == 13);
  for (size_t i = 0; i < expect.size(); ++i) CHECK(d.spec.column_names[7 + i] == expect[i]);
  // indicator columns are exact
  for (int i = 0; i < n; ++i) {
    double row_sum = d.X.row(i).segment(7, 6).sum();
    const bool base = clusters[static_cast<size_t>(i)] == Archetype::Achievers;
    CHECK(row_sum == (base ? 0.0 : 1.0));
  }

  auto alt = build_design(features, clusters, migrated, 2, Archetype::Strivers);
  CHECK(alt.spec.column_names[7] == "cluster_Achievers");
  for (const auto& name : alt.spec.column_names) CHECK(name != "cluster_Strivers");
}

TEST_CASE("interaction columns multiply the scaled covariates") {
  const int n = 50;
  auto features = cohort_features(n, 12);
  auto clusters = random_clusters(n, 13);
  std::vector<uint8_t> migrated(n, 1);
  migrated[1] = 0;

  auto m5 = build_design(features, clusters, migrated, 5);
  REQUIRE(m5.spec.column_names[13] == "lang_x_math");
  REQUIRE(m5.spec.column_names[14] == "income_x_lang_x_math");
  Eigen::VectorXd lang = m5.X.col(1), math = m5.X.col(2), income = m5.X.col(6);
  CHECK((m5.X.col(13) - lang.cwiseProduct(math)).norm() == doctest::Approx(0.0));
  CHECK((m5.X.col(14) - income.cwiseProduct(lang).cwiseProduct(math)).norm() ==
        doctest::Approx(0.0));

  auto m3 = build_design(features, clusters, migrated, 3);
  CHECK(m3.spec.column_names.back() == "lang_x_math");
  auto m4 = build_design(features, clusters, migrated, 4);
  CHECK(m4.spec.column_names.back() == "income_x_lang_x_math");
}

TEST_CASE("exactly dependent columns are named") {
  const int n = 30;
  auto features = cohort_features(n, 14);
  features.col(1) = features.col(0);  // math duplicates language
  try {
    build_design(features, {}, std::vector<uint8_t>(n, 0), 1);
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CollinearColumn);
    CHECK(std::string(e.what()).find("math_pct") != std::string::npos);
  }

  // one archetype for everyone leaves every dummy column zero
  auto ok_features = cohort_features(n, 15);
  std::vector<Archetype> same(n, Archetype::Achievers);
  try {
    build_design(ok_features, same, std::vector<uint8_t>(n, 0), 2);
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CollinearColumn);
    CHECK(std::string(e.what()).find("cluster_") != std::string::npos);
  }
}

TEST_CASE("missing labels fail models 2 through 5 only") {
  const int n = 300;
  auto features = cohort_features(n, 18);
  auto migrated = simulate_migration(features, std::vector<Archetype>(n, Archetype::Resilient), 19);
  auto ladder = model_ladder(features, {}, migrated);
  REQUIRE(ladder.models.size() == 5);
  CHECK(ladder.models[0].ok);
  for (int m = 1; m < 5; ++m) {
    CHECK(!ladder.models[m].ok);
    CHECK(ladder.models[m].error_code == ErrorCode::MissingCluster);
    CHECK(!ladder.models[m].error.empty());
  }
}

TEST_CASE("nested models never lose likelihood") {
  const int n = 4000;
  auto features = cohort_features(n, 23);
  auto clusters = random_clusters(n, 24);
  auto migrated = simulate_migration(features, clusters, 25);
  auto ladder = model_ladder(features, clusters, migrated);
  for (const auto& model : ladder.models) REQUIRE(model.ok);
  const auto ll = [&](int id) { return ladder.models[static_cast<size_t>(id - 1)].fit.log_likelihood; };
  CHECK(ll(2) >= ll(1) - 1e-7);
  CHECK(ll(3) >= ll(2) - 1e-7);
  CHECK(ll(4) >= ll(2) - 1e-7);
  CHECK(ll(5) >= ll(3) - 1e-7);
  CHECK(ll(5) >= ll(4) - 1e-7);
  for (const auto& model : ladder.models) {
    CHECK(model.fit.pseudo_r2 >= 0.0);
    CHECK(model.fit.pseudo_r2 < 1.0);
    CHECK(model.fit.n_observations == n);
  }
}

TEST_CASE("significance stars use the usual thresholds") {
  CHECK(significance_stars(0.005) == "***");
  CHECK(significance_stars(0.03) == "**");
  CHECK(significance_stars(0.07) == "*");
  CHECK(significance_stars(0.2) == "");
  CHECK(significance_stars(0.01) == "**");
  CHECK(significance_stars(0.05) == "*");
  CHECK(significance_stars(0.1) == "");
}

TEST_CASE("comparison renders carry the table structure") {
  const int n = 1500;
  auto features = cohort_features(n, 30);
  auto clusters = random_clusters(n, 31);
  auto migrated = simulate_migration(features, clusters, 32);
  auto ladder = model_ladder(features, clusters, migrated);
  for (const auto& model : ladder.models) REQUIRE(model.ok);

  const std::string text = render_comparison_text(ladder);
  for (int m = 1; m <= 5; ++m) {
    CHECK(text.find("Model " + std::to_string(m)) != std::string::npos);
  }
  CHECK(text.find("Dependent variable: cross-regional migration") != std::string::npos);
  CHECK(text.find("Observations") != std::string::npos);
  CHECK(text.find("Pseudo R2") != std::string::npos);
  CHECK(text.find("Constant") != std::string::npos);
  CHECK(text.find("(0.") != std::string::npos);  // parenthesized standard errors
  CHECK(text.find("Note: * p<0.1; ** p<0.05; *** p<0.01") != std::string::npos);

  const std::string csv = render_comparison_csv(ladder);
  auto rows = parse_csv(csv);
  REQUIRE(rows.size() > 11);
  CHECK(rows[0][0] == "model");
  CHECK(rows[0][7] == "stars");
  // the first data row is model 1's intercept and matches the fit
  CHECK(rows[1][1] == "intercept");
  CHECK(std::stod(rows[1][3]) ==
        doctest::Approx(ladder.models[0].fit.coefficients(0)).epsilon(1e-9));

  auto doc = nlohmann::json::parse(render_comparison_json(ladder));
  REQUIRE(doc["models"].size() == 5);
  CHECK(doc["models"][4]["terms"].size() == 15);
  CHECK(doc["models"][0]["pseudo_r2"].get<double>() ==
        doctest::Approx(ladder.models[0].fit.pseudo_r2));

  // a failed model is footnoted in text and flagged in JSON
  auto broken = model_ladder(features, {}, migrated);
  const std::string note = render_comparison_text(broken);
  CHECK(note.find("Model 2 failed:") != std::string::npos);
  auto broken_doc = nlohmann::json::parse(render_comparison_json(broken));
  CHECK(broken_doc["models"][1]["ok"].get<bool>() == false);
}

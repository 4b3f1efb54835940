#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "doctest.h"

#include "eduspace/error.hpp"
#include "eduspace/kde.hpp"
#include "eduspace/pca.hpp"
#include "eduspace/rng.hpp"

using namespace eduspace;

namespace {

// six features driven by two independent latent factors, like the real
// feature set: three performance proxies, two school proxies, one SES proxy
Eigen::MatrixXd two_factor_features(int n, uint64_t seed, Eigen::VectorXd* perf_out,
                                    Eigen::VectorXd* ses_out) {
  Eigen::MatrixXd x(n, 6);
  Eigen::VectorXd perf(n), ses(n);
  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    double p = rng.uniform();
    double s = rng.uniform();
    perf(i) = p;
    ses(i) = s;
    x(i, 0) = p + rng.normal(0, 0.05);
    x(i, 1) = p + rng.normal(0, 0.05);
    x(i, 2) = p + rng.normal(0, 0.05);
    x(i, 3) = 0.2 + 0.6 * p + rng.normal(0, 0.08);
    x(i, 4) = 0.2 + 0.6 * p + rng.normal(0, 0.08);
    x(i, 5) = s + rng.normal(0, 0.05);
  }
  if (perf_out) *perf_out = perf;
  if (ses_out) *ses_out = ses;
  return x;
}

double correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double ma = a.mean(), mb = b.mean();
  Eigen::VectorXd da = a.array() - ma, db = b.array() - mb;
  return da.dot(db) / std::sqrt(da.squaredNorm() * db.squaredNorm());
}

}  // namespace

TEST_CASE("standardization produces zero mean and unit population variance") {
  Eigen::MatrixXd x(4, 2);
  x << 1, 10, 2, 20, 3, 30, 4, 40;
  auto params = standardize_fit(x);
  CHECK(params.means(0) == doctest::Approx(2.5));
  CHECK(params.means(1) == doctest::Approx(25));
  // population sd of {1,2,3,4} is sqrt(1.25)
  CHECK(params.stds(0) == doctest::Approx(std::sqrt(1.25)));
  Eigen::MatrixXd z = standardize_apply(x, params);
  CHECK(z.col(0).mean() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(z.col(0).squaredNorm() / 4.0 == doctest::Approx(1.0));
}

TEST_CASE("a constant column is rejected by name") {
  Eigen::MatrixXd x(3, 6);
  x.setRandom();
  x.col(3).setConstant(0.7);
  try {
    standardize_fit(x);
    FAIL("expected ConstantColumn");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConstantColumn);
    CHECK(std::string(e.what()).find(kFeatureNames[3]) != std::string::npos);
  }
}

TEST_CASE("components are orthonormal and the spectrum is complete") {
  Eigen::VectorXd perf, ses;
  Eigen::MatrixXd x = two_factor_features(2000, 5, &perf, &ses);
  auto model = fit_space<double>(x);
  REQUIRE(model.fitted);
  Eigen::MatrixXd gram = model.components * model.components.transpose();
  CHECK((gram - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-9);
  REQUIRE(model.spectrum.size() == 6);
  // descending, non-negative, and summing to the total standardized variance 6
  for (int i = 1; i < 6; ++i) CHECK(model.spectrum(i) <= model.spectrum(i - 1) + 1e-12);
  CHECK(model.spectrum.minCoeff() >= 0);
  CHECK(model.spectrum.sum() == doctest::Approx(6.0).epsilon(1e-9));
  CHECK(model.explained_variance_ratio[0] ==
        doctest::Approx(model.spectrum(0) / model.spectrum.sum()));
}

TEST_CASE("pc1 score variance equals the top eigenvalue") {
  Eigen::MatrixXd x = two_factor_features(3000, 8, nullptr, nullptr);
  auto model = fit_space<double>(x);
  Eigen::MatrixXd scores = project(model, x);
  const double n = static_cast<double>(scores.rows());
  Eigen::VectorXd pc1 = scores.col(0);
  const double var = (pc1.array() - pc1.mean()).square().sum() / n;
  CHECK(var == doctest::Approx(model.spectrum(0)).epsilon(1e-6));
}

TEST_CASE("planted factors are recovered by the two axes") {
  Eigen::VectorXd perf, ses;
  Eigen::MatrixXd x = two_factor_features(5000, 21, &perf, &ses);
  auto model = fit_space<double>(x);
  Eigen::MatrixXd scores = project(model, x);
  CHECK(std::abs(correlation(scores.col(0), perf)) >= 0.9);
  CHECK(std::abs(correlation(scores.col(1), ses)) >= 0.9);
}

TEST_CASE("axis signs follow the documented convention") {
  for (uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    Eigen::MatrixXd x = two_factor_features(1500, seed, nullptr, nullptr);
    auto model = fit_space<double>(x);
    CHECK(model.components.row(0).head(3).sum() <= 1e-12);
    CHECK(model.components(1, 5) >= -1e-12);
    CHECK((model.orientation[0] == 1 || model.orientation[0] == -1));
  }
}

TEST_CASE("projection matches the explicit formula") {
  Eigen::MatrixXd x = two_factor_features(50, 4, nullptr, nullptr);
  auto model = fit_space<double>(x);
  Eigen::MatrixXd scores = project(model, x);
  Eigen::MatrixXd z(50, 6);
  for (int j = 0; j < 6; ++j) z.col(j) = (x.col(j).array() - model.means(j)) / model.stds(j);
  Eigen::MatrixXd manual = z * model.components.transpose();
  CHECK((scores - manual).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("projection guards its preconditions") {
  SpaceModel<double> empty;
  Eigen::MatrixXd x = two_factor_features(10, 6, nullptr, nullptr);
  CHECK_THROWS_AS(project(empty, x), Error);
  auto model = fit_space<double>(x);
  Eigen::MatrixXd narrow(10, 3);
  narrow.setRandom();
  CHECK_THROWS_AS(project(model, narrow), Error);
}

TEST_CASE("rank-one data is degenerate, not silently projected") {
  Eigen::MatrixXd x(100, 6);
  Rng rng(12);
  for (int i = 0; i < 100; ++i) {
    double t = rng.uniform();
    for (int j = 0; j < 6; ++j) x(i, j) = (j + 1) * t;
  }
  try {
    fit_space<double>(x);
    FAIL("expected DegenerateCovariance");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateCovariance);
  }
}

TEST_CASE("pca needs enough rows") {
  Eigen::MatrixXd x(4, 6);
  x.setRandom();
  CHECK_THROWS_AS(fit_space<double>(x), Error);
}

TEST_CASE("scott bandwidth follows the rule") {
  CHECK(scott_bandwidth<double>(2.0, 64) == doctest::Approx(2.0 * std::pow(64.0, -1.0 / 6.0)));
  CHECK_THROWS_AS(scott_bandwidth<double>(1.0, 0), Error);
}

TEST_CASE("density mass is conserved") {
  Rng rng(3);
  Eigen::MatrixXd pts(500, 2);
  for (int i = 0; i < 500; ++i) {
    pts(i, 0) = rng.normal(0, 1);
    pts(i, 1) = rng.normal(0, 2);
  }
  DensityOptions opt;
  opt.grid_size = 64;
  auto map = density_map<double>(pts, opt);
  CHECK(map.grid.sum() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(map.grid.minCoeff() >= 0);
  CHECK(map.grid.rows() == 64);
  CHECK(map.grid.cols() == 64);
}

TEST_CASE("the density peak sits on the data mode") {
  Rng rng(17);
  // 700 points near (2, 0), 300 near (-2, 0)
  Eigen::MatrixXd pts(1000, 2);
  for (int i = 0; i < 1000; ++i) {
    double cx = i < 700 ? 2.0 : -2.0;
    pts(i, 0) = cx + rng.normal(0, 0.2);
    pts(i, 1) = rng.normal(0, 0.2);
  }
  DensityOptions opt;
  opt.grid_size = 100;
  opt.has_bounds = true;
  opt.x_lo = -4;
  opt.x_hi = 4;
  opt.y_lo = -4;
  opt.y_hi = 4;
  auto map = density_map<double>(pts, opt);
  Eigen::Index best_y = 0, best_x = 0;
  map.grid.maxCoeff(&best_y, &best_x);
  const double cell = 8.0 / 100;
  const double peak_x = -4 + (static_cast<double>(best_x) + 0.5) * cell;
  const double peak_y = -4 + (static_cast<double>(best_y) + 0.5) * cell;
  CHECK(std::abs(peak_x - 2.0) < 0.3);
  CHECK(std::abs(peak_y - 0.0) < 0.3);
  // mass splits roughly 70/30 across the y axis
  double right = 0;
  for (int ix = 50; ix < 100; ++ix) right += map.grid.col(ix).sum();
  CHECK(right == doctest::Approx(0.7).epsilon(0.05));
  CHECK(map.x_lo == -4);
  CHECK(map.x_hi == 4);
}

TEST_CASE("densities with shared bounds are comparable") {
  Eigen::MatrixXd a(2, 2), b(2, 2);
  a << 0, 0, 1, 1;
  b << 9, 9, 10, 10;
  DensityOptions opt;
  opt.grid_size = 32;
  opt.has_bounds = true;
  opt.x_lo = -1;
  opt.x_hi = 11;
  opt.y_lo = -1;
  opt.y_hi = 11;
  opt.bandwidth_x = 0.5;
  opt.bandwidth_y = 0.5;
  auto ma = density_map<double>(a, opt);
  auto mb = density_map<double>(b, opt);
  CHECK(ma.grid.rows() == mb.grid.rows());
  CHECK(ma.grid.sum() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(mb.grid.sum() == doctest::Approx(1.0).epsilon(1e-9));
  // disjoint supports peak in different corners
  Eigen::Index ay, ax, by, bx;
  ma.grid.maxCoeff(&ay, &ax);
  mb.grid.maxCoeff(&by, &bx);
  CHECK(ax < bx);
  CHECK(ay < by);
}

TEST_CASE("density maps are thread-count invariant") {
  Rng rng(29);
  Eigen::MatrixXd pts(2000, 2);
  for (int i = 0; i < 2000; ++i) {
    pts(i, 0) = rng.normal(0, 1);
    pts(i, 1) = rng.normal(0, 1);
  }
  DensityOptions opt;
  opt.grid_size = 80;
  opt.threads = 1;
  auto a = density_map<double>(pts, opt);
  opt.threads = 4;
  auto b = density_map<double>(pts, opt);
  CHECK(a.grid == b.grid);  // bitwise
}

TEST_CASE("density input contracts") {
  Eigen::MatrixXd one(1, 2);
  one << 0, 0;
  CHECK_THROWS_AS(density_map<double>(one, {}), Error);
  Eigen::MatrixXd wide(5, 3);
  wide.setRandom();
  CHECK_THROWS_AS(density_map<double>(wide, {}), Error);
  Eigen::MatrixXd fine(5, 2);
  fine.setRandom();
  DensityOptions opt;
  opt.grid_size = 1;
  CHECK_THROWS_AS(density_map<double>(fine, opt), Error);
}

TEST_CASE("identical points produce a point mass, not a crash") {
  Eigen::MatrixXd pts(10, 2);
  for (int i = 0; i < 10; ++i) {
    pts(i, 0) = 3;
    pts(i, 1) = -1;
  }
  DensityOptions opt;
  opt.grid_size = 16;
  auto map = density_map<double>(pts, opt);
  CHECK(map.grid.sum() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(map.grid.maxCoeff() > 0.2);  // concentrated
}

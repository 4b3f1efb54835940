#pragma once

#include <Eigen/Dense>
#include <array>

#include "eduspace/error.hpp"
#include "eduspace/types.hpp"

namespace eduspace {

template <typename Scalar>
struct StandardizeParams {
  VectorX<Scalar> means;
  VectorX<Scalar> stds;  // population convention (1/n)
};

/// Per-column mean and population standard deviation. Throws
/// Error{ConstantColumn} naming the first zero-variance column and
/// Error{TooFewPoints} when n < 2.
template <typename Scalar>
StandardizeParams<Scalar> standardize_fit(const MatrixX<Scalar>& features) {
  if (features.rows() < 2) throw Error(ErrorCode::TooFewPoints, "standardize needs n >= 2");
  StandardizeParams<Scalar> params;
  params.means = features.colwise().mean();
  params.stds.resize(features.cols());
  for (Eigen::Index c = 0; c < features.cols(); ++c) {
    // max == min is exact; the arithmetic variance of a constant column can
    // round to a tiny positive value and slip past a <= 0 test
    if (features.col(c).maxCoeff() == features.col(c).minCoeff()) {
      const std::string name =
          features.cols() == static_cast<Eigen::Index>(kFeatureNames.size())
              ? std::string(kFeatureNames[static_cast<size_t>(c)])
              : "column " + std::to_string(c);
      throw Error(ErrorCode::ConstantColumn, name + " is constant");
    }
    Scalar var = (features.col(c).array() - params.means(c)).square().sum() /
                 static_cast<Scalar>(features.rows());
    params.stds(c) = std::sqrt(var);
  }
  return params;
}

template <typename Scalar>
MatrixX<Scalar> standardize_apply(const MatrixX<Scalar>& features,
                                  const StandardizeParams<Scalar>& params) {
  return (features.rowwise() - params.means.transpose()).array().rowwise() /
         params.stds.transpose().array();
}

/// Two-component PCA of the six features plus the diagnostics needed to audit
/// it: the full eigenvalue spectrum and the orientation signs applied to each
/// retained component.
template <typename Scalar>
struct SpaceModel {
  VectorX<Scalar> means;       // 6
  VectorX<Scalar> stds;        // 6
  MatrixX<Scalar> components;  // 2 x 6, orthonormal rows
  std::array<Scalar, 2> explained_variance_ratio{};
  VectorX<Scalar> spectrum;    // all 6 eigenvalues, descending
  std::array<int, 2> orientation{1, 1};
  bool fitted = false;
};

/// Eigendecomposition of the 6 x 6 covariance (population 1/n) of
/// standardized data. Signs are pinned so axes read the same way on every
/// fit: PC1's summed loading over (lang, math, gpa) is <= 0 and PC2's income
/// loading is >= 0. Means/stds are identity; compose with standardize_fit via
/// fit_space for raw features. Throws Error{DegenerateCovariance} when fewer
/// than two eigenvalues are positive.
template <typename Scalar>
SpaceModel<Scalar> pca_fit(const MatrixX<Scalar>& standardized) {
  const Eigen::Index n = standardized.rows();
  const Eigen::Index d = standardized.cols();
  if (n < d) throw Error(ErrorCode::TooFewPoints, "pca_fit needs n >= number of features");
  if (!standardized.allFinite()) throw Error(ErrorCode::NonFinite, "pca input must be finite");

  MatrixX<Scalar> centered = standardized.rowwise() - standardized.colwise().mean();
  MatrixX<Scalar> cov = centered.transpose() * centered / static_cast<Scalar>(n);
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver(cov);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::DegenerateCovariance, "eigendecomposition failed");
  }

  SpaceModel<Scalar> model;
  model.means = VectorX<Scalar>::Zero(d);
  model.stds = VectorX<Scalar>::Ones(d);
  model.spectrum.resize(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    model.spectrum(i) = std::max(Scalar(0), solver.eigenvalues()(d - 1 - i));
  }
  if (d < 2 || model.spectrum(1) <= Scalar(1e-12)) {
    throw Error(ErrorCode::DegenerateCovariance, "covariance rank below 2");
  }

  model.components.resize(2, d);
  model.components.row(0) = solver.eigenvectors().col(d - 1).transpose();
  model.components.row(1) = solver.eigenvectors().col(d - 2).transpose();

  Scalar academic = model.components(0, kLangIdx) + model.components(0, kMathIdx) +
                    model.components(0, kGpaIdx);
  if (academic > Scalar(0)) {
    model.components.row(0) = -model.components.row(0);
    model.orientation[0] = -1;
  }
  if (model.components(1, kIncomeIdx) < Scalar(0)) {
    model.components.row(1) = -model.components.row(1);
    model.orientation[1] = -1;
  }

  Scalar total = model.spectrum.sum();
  model.explained_variance_ratio = {model.spectrum(0) / total, model.spectrum(1) / total};
  model.fitted = true;
  return model;
}

/// standardize_fit + pca_fit on raw features; the returned model projects raw
/// feature rows directly.
template <typename Scalar>
SpaceModel<Scalar> fit_space(const MatrixX<Scalar>& features) {
  auto params = standardize_fit(features);
  auto model = pca_fit(MatrixX<Scalar>(standardize_apply(features, params)));
  model.means = params.means;
  model.stds = params.stds;
  return model;
}

/// coords = standardized(features) * components^T. Throws
/// Error{ModelNotFitted} and Error{ShapeMismatch}.
template <typename Scalar>
MatrixX<Scalar> project(const SpaceModel<Scalar>& model, const MatrixX<Scalar>& features) {
  if (!model.fitted) throw Error(ErrorCode::ModelNotFitted, "project before fit");
  if (features.cols() != model.means.size()) {
    throw Error(ErrorCode::ShapeMismatch, "feature width differs from the fitted model");
  }
  MatrixX<Scalar> standardized = (features.rowwise() - model.means.transpose()).array().rowwise() /
                                 model.stds.transpose().array();
  return standardized * model.components.transpose();
}

}  // namespace eduspace

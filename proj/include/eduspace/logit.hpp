#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>

#include "eduspace/error.hpp"
#include "eduspace/types.hpp"

namespace eduspace {

struct LogitOptions {
  double tol = 1e-10;  // relative log-likelihood change
  int max_iter = 100;
};

template <typename Scalar>
struct LogitFit {
  VectorX<Scalar> coefficients;
  VectorX<Scalar> std_errors;
  VectorX<Scalar> z_values;
  VectorX<Scalar> p_values;
  Scalar log_likelihood = 0;
  Scalar null_log_likelihood = 0;
  Scalar pseudo_r2 = 0;
  int64_t n_observations = 0;
  int n_parameters = 0;
  int n_iterations = 0;
  bool converged = false;
};

/// Bernoulli log-likelihood sum(y*eta - log(1 + e^eta)), evaluated without
/// overflow for any eta.
template <typename Scalar>
Scalar logit_loglik(const MatrixX<Scalar>& design, const VectorX<Scalar>& response,
                    const VectorX<Scalar>& beta) {
  VectorX<Scalar> eta = design * beta;
  Scalar ll = 0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    Scalar e = eta(i);
    Scalar log1pexp = e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e));
    ll += response(i) * e - log1pexp;
  }
  return ll;
}

/// Score vector X^T (y - p).
template <typename Scalar>
VectorX<Scalar> logit_score(const MatrixX<Scalar>& design, const VectorX<Scalar>& response,
                            const VectorX<Scalar>& beta) {
  VectorX<Scalar> eta = design * beta;
  VectorX<Scalar> p = (Scalar(1) / (Scalar(1) + (-eta.array()).exp())).matrix();
  return design.transpose() * (response - p);
}

template <typename Scalar>
Scalar mcfadden_pseudo_r2(Scalar log_likelihood, Scalar null_log_likelihood) {
  return Scalar(1) - log_likelihood / null_log_likelihood;
}

/// Maximum-likelihood logit via Newton-Raphson with step-halving, so the
/// log-likelihood never decreases across iterations. Standard errors come
/// from the inverse observed information at the optimum. Throws:
///   TooFewPoints          n <= p
///   ConstantColumn        response has a single class
///   ShapeMismatch         response not 0/1 or sizes disagree
///   Separation            probabilities saturate while ||beta|| diverges
///   SingularInformation   Newton system or final information not solvable
///   NotConverged          max_iter reached, or a step cannot improve
template <typename Scalar>
LogitFit<Scalar> fit_logit(const MatrixX<Scalar>& design, const VectorX<Scalar>& response,
                           const LogitOptions& options = {}) {
  const Eigen::Index n = design.rows();
  const Eigen::Index p = design.cols();
  if (response.size() != n) throw Error(ErrorCode::ShapeMismatch, "response length");
  if (n <= p) throw Error(ErrorCode::TooFewPoints, "logit needs n > p");
  if (!design.allFinite()) throw Error(ErrorCode::NonFinite, "design must be finite");

  int64_t ones = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (response(i) == Scalar(0)) continue;
    if (response(i) == Scalar(1)) { ++ones; continue; }
    throw Error(ErrorCode::ShapeMismatch, "response must be 0/1");
  }
  if (ones == 0 || ones == n) {
    throw Error(ErrorCode::ConstantColumn, "response has a single class");
  }

  LogitFit<Scalar> fit;
  fit.n_observations = n;
  fit.n_parameters = static_cast<int>(p);
  const Scalar n1 = static_cast<Scalar>(ones);
  const Scalar n0 = static_cast<Scalar>(n - ones);
  const Scalar nn = static_cast<Scalar>(n);
  fit.null_log_likelihood = n1 * std::log(n1 / nn) + n0 * std::log(n0 / nn);

  VectorX<Scalar> beta = VectorX<Scalar>::Zero(p);
  Scalar ll = logit_loglik(design, response, beta);
  Scalar previous_norm = 0;
  int growth_streak = 0;

  for (int iter = 1; iter <= options.max_iter; ++iter) {
    VectorX<Scalar> eta = design * beta;
    VectorX<Scalar> prob = (Scalar(1) / (Scalar(1) + (-eta.array()).exp())).matrix();
    VectorX<Scalar> score = design.transpose() * (response - prob);
    VectorX<Scalar> w = (prob.array() * (Scalar(1) - prob.array())).matrix();
    MatrixX<Scalar> information = design.transpose() * w.asDiagonal() * design;

    Eigen::LDLT<MatrixX<Scalar>> ldlt(information);
    if (ldlt.info() != Eigen::Success) {
      throw Error(ErrorCode::SingularInformation, "information matrix not factorizable");
    }
    VectorX<Scalar> direction = ldlt.solve(score);
    if (!direction.allFinite()) {
      throw Error(ErrorCode::SingularInformation, "Newton direction not finite");
    }

    Scalar step = 1;
    VectorX<Scalar> candidate;
    Scalar candidate_ll = -std::numeric_limits<Scalar>::max();
    bool improved = false;
    for (int halving = 0; halving < 40; ++halving) {
      candidate = beta + step * direction;
      candidate_ll = logit_loglik(design, response, candidate);
      if (candidate_ll >= ll) {
        improved = true;
        break;
      }
      step /= 2;
    }
    if (!improved) {
      throw Error(ErrorCode::NotConverged, "step-halving could not improve the likelihood");
    }

    Scalar change = candidate_ll - ll;
    beta = candidate;
    fit.n_iterations = iter;

    Scalar norm = beta.norm();
    growth_streak = norm > previous_norm ? growth_streak + 1 : 0;
    previous_norm = norm;
    VectorX<Scalar> new_prob =
        (Scalar(1) / (Scalar(1) + (-(design * beta).array()).exp())).matrix();
    bool saturated = new_prob.maxCoeff() > Scalar(1) - Scalar(1e-10) ||
                     new_prob.minCoeff() < Scalar(1e-10);
    if (saturated && growth_streak >= 3 && norm > Scalar(10)) {
      throw Error(ErrorCode::Separation,
                  "fitted probabilities saturate while coefficients diverge");
    }

    ll = candidate_ll;
    if (std::abs(change) < options.tol * (std::abs(ll) + Scalar(1))) {
      fit.converged = true;
      break;
    }
  }
  if (!fit.converged) {
    throw Error(ErrorCode::NotConverged,
                "no convergence in " + std::to_string(options.max_iter) + " iterations");
  }

  fit.coefficients = beta;
  fit.log_likelihood = ll;
  fit.pseudo_r2 = mcfadden_pseudo_r2(ll, fit.null_log_likelihood);

  VectorX<Scalar> eta = design * beta;
  VectorX<Scalar> prob = (Scalar(1) / (Scalar(1) + (-eta.array()).exp())).matrix();
  VectorX<Scalar> w = (prob.array() * (Scalar(1) - prob.array())).matrix();
  MatrixX<Scalar> information = design.transpose() * w.asDiagonal() * design;
  Eigen::FullPivLU<MatrixX<Scalar>> lu(information);
  if (!lu.isInvertible()) {
    throw Error(ErrorCode::SingularInformation, "information matrix singular at the optimum");
  }
  MatrixX<Scalar> covariance = lu.inverse();

  fit.std_errors.resize(p);
  fit.z_values.resize(p);
  fit.p_values.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    Scalar variance = covariance(j, j);
    if (!(variance > 0)) {
      throw Error(ErrorCode::SingularInformation,
                  "non-positive variance for coefficient " + std::to_string(j));
    }
    fit.std_errors(j) = std::sqrt(variance);
    fit.z_values(j) = beta(j) / fit.std_errors(j);
    fit.p_values(j) = std::erfc(std::abs(fit.z_values(j)) / std::sqrt(Scalar(2)));
  }
  return fit;
}

}  // namespace eduspace

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "eduspace/archetype.hpp"
#include "eduspace/error.hpp"
#include "eduspace/logit.hpp"
#include "eduspace/types.hpp"

namespace eduspace {

struct DesignSpec {
  int model_id = 0;                        // 1..5
  std::vector<std::string> column_names;   // machine names, intercept first
  std::vector<std::string> display_names;  // table row labels
  Archetype baseline = Archetype::Achievers;
};

struct DesignMatrix {
  DesignSpec spec;
  Eigen::MatrixXd X;  // column 0 is the intercept
  Eigen::VectorXd y;  // migrated indicator
};

/// Design matrix for one ladder model. Covariates are min-max scaled over the
/// rows given here (the estimation sample); interaction columns multiply the
/// scaled covariates. Models 2..5 add a dummy per archetype except the
/// baseline, in name order. Column counts: M1 7, M2 13, M3/M4 14, M5 15.
/// Throws Error{MissingCluster} when models 2..5 lack an aligned label per
/// student and Error{CollinearColumn} naming the first exactly dependent
/// column.
DesignMatrix build_design(const Eigen::MatrixXd& features, const std::vector<Archetype>& clusters,
                          const std::vector<uint8_t>& migrated, int model_id,
                          Archetype baseline = Archetype::Achievers);

struct ModelResult {
  DesignSpec spec;
  bool ok = false;
  LogitFit<double> fit;  // meaningful only when ok
  std::string error;     // set when !ok
  ErrorCode error_code = ErrorCode::ModelNotFitted;
};

struct LadderResult {
  std::vector<ModelResult> models;  // Model 1..5 in order
};

/// Fits the five Table-style specifications on a common sample. A model that
/// errors is marked failed and the rest still fit.
LadderResult model_ladder(const Eigen::MatrixXd& features, const std::vector<Archetype>& clusters,
                          const std::vector<uint8_t>& migrated,
                          Archetype baseline = Archetype::Achievers,
                          const LogitOptions& options = {});

/// Comparison table: one column per model, coefficient rows with the
/// parenthesized SE beneath, star thresholds {0.1, 0.05, 0.01}, Observations
/// and Pseudo R2 rows, and a footnote per failed model.
std::string render_comparison_text(const LadderResult& ladder);

/// Long-format CSV: model,term,display,coefficient,std_error,z_value,p_value,
/// stars plus one summary row per model.
std::string render_comparison_csv(const LadderResult& ladder);

/// Full numeric results (coefficients, SEs, z, p, likelihoods, convergence)
/// as a JSON document.
std::string render_comparison_json(const LadderResult& ladder);

/// "***" below 0.01, "**" below 0.05, "*" below 0.1, else "".
std::string significance_stars(double p_value);

}  // namespace eduspace

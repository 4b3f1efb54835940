#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "eduspace/types.hpp"

namespace eduspace {

// raw ranges the feature-space positions are mapped onto
inline constexpr double kSynthScoreLo = 150.0;
inline constexpr double kSynthScoreHi = 850.0;
inline constexpr double kSynthGpaLo = 4.0;
inline constexpr double kSynthGpaHi = 7.0;
inline constexpr double kSynthIncomeBase = 150000.0;
inline constexpr double kSynthIncomeSpread = 2.8;  // income = base * exp(spread * x)

enum class SynthMode {
  Mixture,    // Gaussian blobs around the component means
  TwoFactor,  // latent performance/SES factors drive all six features
};

enum class MigrationMode {
  Logistic,   // migrated ~ Bernoulli(logit^-1(lp))
  Threshold,  // migrated = lp > 0, a deterministic rule the logit cannot fit
};

struct ClusterComponent {
  std::string name;  // intended archetype for presets; informational
  double weight = 0;
  std::array<double, 6> mean{};  // feature-space position, each in [0,1]
  double cov_scale = 0.05;       // isotropic sd around the mean
};

struct MigrationSpec {
  MigrationMode mode = MigrationMode::Logistic;
  double intercept = 0;
  std::array<double, 6> feature_coeffs{};  // applied to the feature-space x
  std::vector<double> cluster_offsets;     // per component; empty means zeros
};

struct SynthConfig {
  SynthMode mode = SynthMode::Mixture;
  int64_t n_students = 30000;
  int n_schools = 60;
  int n_regions = 16;  // region codes 1..n_regions
  int year_lo = 2021;
  int year_hi = 2024;
  double enroll_prob = 0.9;
  std::vector<ClusterComponent> components;
  MigrationSpec migration;
  uint64_t seed = 7;
};

struct GroundTruth {
  std::vector<int> cluster;              // component index
  std::vector<double> performance;      // latent academic factor
  std::vector<double> ses;              // latent socioeconomic factor
  std::vector<double> migration_prob;   // (0,1) in Logistic mode, {0,1} in Threshold mode
  std::vector<uint8_t> enrolled;
  std::vector<uint8_t> migrated;        // 0 whenever not enrolled
};

struct SynthCohort {
  std::vector<SecondaryRecord> secondary;
  std::vector<EnrollmentRecord> enrollment;  // subset of students, join key student_id
  GroundTruth truth;
};

/// Draws a cohort from the planted process. Each student consumes an
/// independent RNG stream derived from (seed, student index), so the output
/// is byte-identical under any parallel schedule and any two configs
/// differing only in n_students agree on their common prefix. Generated raw
/// values always satisfy ingest validation. Throws Error{InvalidConfig}.
SynthCohort generate(const SynthConfig& config);

/// Named generator setups used across tests and docs:
///   fig1a      7 components in the qualitative archetype geometry
///   twofactor  planted performance/SES factors for PCA recovery
///   rates3     3 components with migration rates 0.1 / 0.4 / 0.7
///   separable  threshold migration rule that forces logit Separation
///   blobs3     3 tight blobs for elbow/silhouette checks
SynthConfig synth_preset(const std::string& name);

/// Permutation-adjusted agreement between two labelings, in [-1, 1].
/// Degenerate contingencies (both partitions trivial) return 1. Throws
/// Error{LengthMismatch}.
double adjusted_rand_index(const std::vector<int>& truth, const std::vector<int>& predicted);

/// Writes secondary.csv, enrollment.csv, and ground_truth.csv under dir using
/// the same schemas ingest consumes.
void write_synth_csvs(const SynthCohort& cohort, const std::string& dir);

}  // namespace eduspace

#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>

namespace eduspace {

enum class Archetype {
  Achievers,
  Strivers,
  Atypical,
  Privileged,
  Challenged,
  Resilient,
  Disadvantaged,
};

inline constexpr std::array<const char*, 7> kArchetypeNames = {
    "Achievers", "Strivers", "Atypical", "Privileged",
    "Challenged", "Resilient", "Disadvantaged",
};

const char* to_string(Archetype a);
Archetype archetype_from_string(const std::string& name);

/// Bump when any deciding comparison below changes; emitted with every run so
/// stored labels stay auditable.
inline constexpr const char* kArchetypeRuleVersion = "1";

/// Names the seven centroids of a 7 x 6 centroid matrix (columns in
/// kFeatureNames order). Composites: A = mean(lang, math, gpa), Q = mean of
/// the two school percentiles, I = income. Rules apply in order, each
/// consuming one centroid:
///   Achievers      max A among centroids with I >= median centroid income
///   Strivers       max A among the rest with I < median
///   Disadvantaged  min A, which must also be min I
///   Atypical       max gpa - mean(lang, math)
///   Privileged     max I
///   Challenged     max Q - I
///   Resilient      the last one standing
/// Result maps cluster index -> archetype and is a bijection. Throws
/// Error{AmbiguousLabeling} when a deciding comparison is an exact tie (both
/// candidates reported) and Error{ShapeMismatch} unless centroids is 7 x 6.
std::array<Archetype, 7> label_archetypes(const Eigen::MatrixXd& centroids);

}  // namespace eduspace

#include "eduspace/archetype.hpp"

#include <algorithm>
#include <vector>

#include "eduspace/error.hpp"
#include "eduspace/types.hpp"

namespace eduspace {

const char* to_string(Archetype a) { return kArchetypeNames[static_cast<size_t>(a)]; }

Archetype archetype_from_string(const std::string& name) {
  for (size_t i = 0; i < kArchetypeNames.size(); ++i) {
    if (name == kArchetypeNames[i]) return static_cast<Archetype>(i);
  }
  throw Error(ErrorCode::InvalidConfig, "unknown archetype name: " + name);
}

namespace {

// argmax over `pool` of `value`, throwing when the winner is tied exactly
int pick(const std::vector<int>& pool, const std::vector<double>& value, const char* rule,
         bool minimize = false) {
  if (pool.empty()) {
    throw Error(ErrorCode::AmbiguousLabeling, std::string("rule '") + rule + "' has no candidates");
  }
  int best = pool.front();
  for (size_t i = 1; i < pool.size(); ++i) {
    int c = pool[i];
    if (minimize ? value[c] < value[best] : value[c] > value[best]) best = c;
  }
  for (int c : pool) {
    if (c != best && value[c] == value[best]) {
      throw Error(ErrorCode::AmbiguousLabeling,
                  std::string("rule '") + rule + "' ties between centroids " +
                      std::to_string(std::min(best, c)) + " and " +
                      std::to_string(std::max(best, c)));
    }
  }
  return best;
}

void drop(std::vector<int>& pool, int c) {
  pool.erase(std::remove(pool.begin(), pool.end(), c), pool.end());
}

}  // namespace

std::array<Archetype, 7> label_archetypes(const Eigen::MatrixXd& centroids) {
  if (centroids.rows() != 7 || centroids.cols() != 6) {
    throw Error(ErrorCode::ShapeMismatch, "label_archetypes expects a 7 x 6 centroid matrix");
  }

  std::vector<double> a(7), q(7), income(7), gap(7), q_minus_i(7);
  for (int c = 0; c < 7; ++c) {
    a[c] = (centroids(c, kLangIdx) + centroids(c, kMathIdx) + centroids(c, kGpaIdx)) / 3.0;
    q[c] = (centroids(c, kSchoolLangIdx) + centroids(c, kSchoolMathIdx)) / 2.0;
    income[c] = centroids(c, kIncomeIdx);
    gap[c] = centroids(c, kGpaIdx) - (centroids(c, kLangIdx) + centroids(c, kMathIdx)) / 2.0;
    q_minus_i[c] = q[c] - income[c];
  }
  std::vector<double> sorted_income = income;
  std::nth_element(sorted_income.begin(), sorted_income.begin() + 3, sorted_income.end());
  const double median_income = sorted_income[3];

  std::array<Archetype, 7> label{};
  std::vector<int> pool = {0, 1, 2, 3, 4, 5, 6};

  std::vector<int> rich, poor;
  for (int c : pool) (income[c] >= median_income ? rich : poor).push_back(c);
  int achievers = pick(rich, a, "Achievers");
  label[static_cast<size_t>(achievers)] = Archetype::Achievers;
  drop(pool, achievers);

  int strivers = pick(poor, a, "Strivers");
  label[static_cast<size_t>(strivers)] = Archetype::Strivers;
  drop(pool, strivers);

  int lowest_a = pick(pool, a, "Disadvantaged", true);
  int lowest_i = pick(pool, income, "Disadvantaged", true);
  if (lowest_a != lowest_i) {
    throw Error(ErrorCode::AmbiguousLabeling,
                "rule 'Disadvantaged' disagrees: min academic is centroid " +
                    std::to_string(lowest_a) + ", min income is centroid " +
                    std::to_string(lowest_i));
  }
  label[static_cast<size_t>(lowest_a)] = Archetype::Disadvantaged;
  drop(pool, lowest_a);

  int atypical = pick(pool, gap, "Atypical");
  label[static_cast<size_t>(atypical)] = Archetype::Atypical;
  drop(pool, atypical);

  int privileged = pick(pool, income, "Privileged");
  label[static_cast<size_t>(privileged)] = Archetype::Privileged;
  drop(pool, privileged);

  int challenged = pick(pool, q_minus_i, "Challenged");
  label[static_cast<size_t>(challenged)] = Archetype::Challenged;
  drop(pool, challenged);

  label[static_cast<size_t>(pool.front())] = Archetype::Resilient;
  return label;
}

}  // namespace eduspace

#include "eduspace/features.hpp"

#include <cmath>
#include <map>

#include "eduspace/csv.hpp"
#include "eduspace/stats.hpp"

namespace eduspace {

double student_overall_score(double math, double reading) {
  if (!std::isfinite(math) || !std::isfinite(reading)) {
    throw Error(ErrorCode::NonFinite, "overall score needs finite math and reading inputs");
  }
  return (math + reading) / 2.0;
}

double school_performance(const std::vector<double>& scores) {
  if (scores.empty()) throw Error(ErrorCode::EmptySchool, "school has no scored students");
  return median(scores);
}

std::vector<SchoolScore> rank_schools(std::vector<SchoolScore> schools) {
  std::vector<double> overall(schools.size());
  for (size_t i = 0; i < schools.size(); ++i) overall[i] = schools[i].overall;
  auto ranks = competition_ranks_desc(overall);
  for (size_t i = 0; i < schools.size(); ++i) schools[i].rank = ranks[i];
  return schools;
}

std::vector<double> percentile_transform(const std::vector<double>& values) {
  if (values.empty()) return {};
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "percentile input must be finite");
  }
  return midrank_percentiles(values);
}

namespace {

struct SchoolAccumulator {
  std::vector<double> math;
  std::vector<double> reading;
  std::vector<double> overall;
};

bool row_complete(const SecondaryRecord& r, ExclusionCounts& excl) {
  if (is_missing(r.math_score) || is_missing(r.reading_score)) {
    ++excl.missing_score;
    return false;
  }
  if (is_missing(r.gpa)) {
    ++excl.missing_gpa;
    return false;
  }
  if (is_missing(r.family_income)) {
    ++excl.missing_income;
    return false;
  }
  if (r.school_id.empty()) {
    ++excl.missing_school;
    return false;
  }
  return true;
}

}  // namespace

FeatureBuildResult build_features(const std::vector<StudentTrajectory>& trajectories,
                                  const FeatureOptions& options) {
  FeatureBuildResult result;

  // year -> indexes of complete rows
  std::map<int, std::vector<size_t>> by_year;
  for (size_t i = 0; i < trajectories.size(); ++i) {
    const auto& rec = trajectories[i].secondary;
    if (row_complete(rec, result.exclusions)) by_year[rec.cohort_year].push_back(i);
  }

  for (auto& [year, rows] : by_year) {
    // school aggregates first, so small schools can be dropped before the
    // student-level transforms
    std::map<std::string, SchoolAccumulator> schools;
    for (size_t idx : rows) {
      const auto& rec = trajectories[idx].secondary;
      auto& acc = schools[rec.school_id];
      acc.math.push_back(rec.math_score);
      acc.reading.push_back(rec.reading_score);
      acc.overall.push_back(student_overall_score(rec.math_score, rec.reading_score));
    }

    std::map<std::string, size_t> school_slot;  // school_id -> index into per-year school list
    std::vector<SchoolScore> year_schools;
    std::vector<double> school_median_math, school_median_lang;
    for (auto& [school_id, acc] : schools) {
      if (static_cast<int>(acc.overall.size()) < options.min_school_size) continue;
      SchoolScore s;
      s.school_id = school_id;
      s.cohort_year = year;
      s.overall = school_performance(acc.overall);
      s.n_students = static_cast<int>(acc.overall.size());
      s.median_math = median(acc.math);
      s.median_lang = median(acc.reading);
      school_slot[school_id] = year_schools.size();
      year_schools.push_back(std::move(s));
      school_median_math.push_back(year_schools.back().median_math);
      school_median_lang.push_back(year_schools.back().median_lang);
    }

    std::vector<size_t> kept;
    kept.reserve(rows.size());
    for (size_t idx : rows) {
      if (school_slot.count(trajectories[idx].secondary.school_id)) {
        kept.push_back(idx);
      } else {
        ++result.exclusions.school_too_small;
      }
    }
    if (kept.empty()) continue;

    std::vector<double> lang(kept.size()), math(kept.size()), income(kept.size());
    for (size_t i = 0; i < kept.size(); ++i) {
      const auto& rec = trajectories[kept[i]].secondary;
      lang[i] = rec.reading_score;
      math[i] = rec.math_score;
      income[i] = rec.family_income;
    }
    auto lang_pct = midrank_percentiles(lang);
    auto math_pct = midrank_percentiles(math);
    auto income_scaled = minmax_scale(income);

    std::vector<double> gpa_pct(kept.size());
    if (options.gpa_mode == GpaMode::Cohort) {
      std::vector<double> gpa(kept.size());
      for (size_t i = 0; i < kept.size(); ++i) gpa[i] = trajectories[kept[i]].secondary.gpa;
      gpa_pct = midrank_percentiles(gpa);
    } else {
      // intra-school GPA standing
      std::map<std::string, std::vector<size_t>> members;
      for (size_t i = 0; i < kept.size(); ++i) {
        members[trajectories[kept[i]].secondary.school_id].push_back(i);
      }
      for (auto& [school_id, local] : members) {
        std::vector<double> gpa(local.size());
        for (size_t i = 0; i < local.size(); ++i) {
          gpa[i] = trajectories[kept[local[i]]].secondary.gpa;
        }
        auto pct = midrank_percentiles(gpa);
        for (size_t i = 0; i < local.size(); ++i) gpa_pct[local[i]] = pct[i];
      }
    }

    auto school_math_pct = midrank_percentiles(school_median_math);
    auto school_lang_pct = midrank_percentiles(school_median_lang);

    for (size_t i = 0; i < kept.size(); ++i) {
      const auto& rec = trajectories[kept[i]].secondary;
      FeatureVector f;
      f.student_id = rec.student_id;
      f.cohort_year = year;
      f.lang_pct = lang_pct[i];
      f.math_pct = math_pct[i];
      f.gpa_pct = gpa_pct[i];
      size_t slot = school_slot.at(rec.school_id);
      f.school_lang_pct = school_lang_pct[slot];
      f.school_math_pct = school_math_pct[slot];
      f.income_scaled = income_scaled[i];
      result.features.push_back(std::move(f));
    }

    auto ranked = rank_schools(std::move(year_schools));
    result.schools.insert(result.schools.end(), ranked.begin(), ranked.end());
  }

  return result;
}

void write_features_csv(const std::string& path, const std::vector<FeatureVector>& features) {
  CsvWriter w(path);
  std::vector<std::string> header = {"student_id", "cohort_year"};
  for (const char* name : kFeatureNames) header.push_back(name);
  w.write_row(header);
  for (const auto& f : features) {
    std::vector<std::string> row = {f.student_id, format_int(f.cohort_year)};
    for (int j = 0; j < 6; ++j) row.push_back(format_double(f[j], 9));
    w.write_row(row);
  }
  w.close();
}

void write_schools_csv(const std::string& path, const std::vector<SchoolScore>& schools) {
  CsvWriter w(path);
  w.write_row({"school_id", "year", "sp", "rank", "n_students"});
  for (const auto& s : schools) {
    w.write_row({s.school_id, format_int(s.cohort_year), format_double(s.overall, 9),
                 format_int(s.rank), format_int(s.n_students)});
  }
  w.close();
}

std::vector<FeatureVector> read_features_csv(const std::string& path) {
  CsvTable table = read_csv_file(path);
  int id_col = table.column_index("student_id");
  int year_col = table.column_index("cohort_year");
  std::array<int, 6> cols{};
  for (int j = 0; j < 6; ++j) cols[static_cast<size_t>(j)] = table.column_index(kFeatureNames[static_cast<size_t>(j)]);
  if (id_col < 0 || year_col < 0) throw Error(ErrorCode::MissingColumn, "features csv header");
  for (int c : cols) {
    if (c < 0) throw Error(ErrorCode::MissingColumn, "features csv header");
  }
  std::vector<FeatureVector> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    FeatureVector f;
    f.student_id = row[static_cast<size_t>(id_col)];
    f.cohort_year = std::stoi(row[static_cast<size_t>(year_col)]);
    f.lang_pct = std::stod(row[static_cast<size_t>(cols[0])]);
    f.math_pct = std::stod(row[static_cast<size_t>(cols[1])]);
    f.gpa_pct = std::stod(row[static_cast<size_t>(cols[2])]);
    f.school_lang_pct = std::stod(row[static_cast<size_t>(cols[3])]);
    f.school_math_pct = std::stod(row[static_cast<size_t>(cols[4])]);
    f.income_scaled = std::stod(row[static_cast<size_t>(cols[5])]);
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace eduspace

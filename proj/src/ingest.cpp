#include "eduspace/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_map>

#include "eduspace/csv.hpp"
#include "eduspace/error.hpp"

namespace eduspace {

namespace {

std::string rejoin(const std::vector<std::string>& cells) {
  std::string row;
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) row += ',';
    row += csv_escape(cells[i]);
  }
  return row;
}

int require_column(const CsvTable& table, const std::string& name, const std::string& path) {
  int idx = table.column_index(name);
  if (idx < 0) {
    throw Error(ErrorCode::MissingColumn, path + " lacks column '" + name + "'");
  }
  return idx;
}

bool parse_int(const std::string& cell, int& out) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

// empty -> NaN (missing); bracket labels resolve through the rules; anything
// else must parse fully as a number
bool parse_numeric(const std::string& cell, const std::map<std::string, double>& brackets,
                   double& out) {
  if (cell.empty()) {
    out = std::nan("");
    return true;
  }
  auto bracket = brackets.find(cell);
  if (bracket != brackets.end()) {
    out = bracket->second;
    return true;
  }
  try {
    size_t used = 0;
    out = std::stod(cell, &used);
    return used == cell.size() && std::isfinite(out);
  } catch (const std::exception&) {
    return false;
  }
}

bool in_range(double v, double lo, double hi) { return !(v < lo) && !(v > hi); }

}  // namespace

SecondaryLoad load_secondary(const std::string& path, const SecondarySchema& schema,
                             const ValidationRules& rules) {
  const CsvTable table = read_csv_file(path);
  const int id_col = require_column(table, schema.student_id, path);
  const int year_col = require_column(table, schema.cohort_year, path);
  const int region_col = require_column(table, schema.home_region, path);
  const int school_col = require_column(table, schema.school_id, path);
  const int math_col = require_column(table, schema.math_score, path);
  const int reading_col = require_column(table, schema.reading_score, path);
  const int gpa_col = require_column(table, schema.gpa, path);
  const int income_col = require_column(table, schema.family_income, path);
  const int width = static_cast<int>(table.header.size());

  SecondaryLoad load;
  std::set<std::pair<std::string, int>> seen;  // (student_id, cohort_year)
  static const std::map<std::string, double> kNoBrackets;

  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto& cells = table.rows[r];
    const int64_t line = static_cast<int64_t>(r) + 2;
    ++load.raw_rows;
    auto reject = [&](const std::string& reason) {
      load.rejects.push_back({path, line, reason, rejoin(cells)});
    };

    if (static_cast<int>(cells.size()) != width) {
      reject("ParseError");
      continue;
    }
    SecondaryRecord rec;
    rec.student_id = cells[static_cast<size_t>(id_col)];
    rec.source_line = static_cast<size_t>(line);
    if (rec.student_id.empty()) {
      reject("EmptyId");
      continue;
    }
    if (!parse_int(cells[static_cast<size_t>(year_col)], rec.cohort_year) ||
        rec.cohort_year < rules.year_lo || rec.cohort_year > rules.year_hi) {
      reject("YearOutOfRange");
      continue;
    }
    if (!parse_int(cells[static_cast<size_t>(region_col)], rec.home_region) ||
        rec.home_region < rules.region_lo || rec.home_region > rules.region_hi) {
      reject("RegionUnknown");
      continue;
    }
    rec.school_id = cells[static_cast<size_t>(school_col)];
    if (!parse_numeric(cells[static_cast<size_t>(math_col)], kNoBrackets, rec.math_score) ||
        !parse_numeric(cells[static_cast<size_t>(reading_col)], kNoBrackets,
                       rec.reading_score)) {
      reject("ParseError");
      continue;
    }
    if ((!is_missing(rec.math_score) &&
         !in_range(rec.math_score, rules.score_lo, rules.score_hi)) ||
        (!is_missing(rec.reading_score) &&
         !in_range(rec.reading_score, rules.score_lo, rules.score_hi))) {
      reject("ScoreOutOfRange");
      continue;
    }
    if (!parse_numeric(cells[static_cast<size_t>(gpa_col)], kNoBrackets, rec.gpa)) {
      reject("ParseError");
      continue;
    }
    if (!is_missing(rec.gpa) && !in_range(rec.gpa, rules.gpa_lo, rules.gpa_hi)) {
      reject("GpaOutOfRange");
      continue;
    }
    if (!parse_numeric(cells[static_cast<size_t>(income_col)], rules.income_brackets,
                       rec.family_income)) {
      reject("ParseError");
      continue;
    }
    if (!is_missing(rec.family_income) && rec.family_income < 0) {
      reject("IncomeNegative");
      continue;
    }

    if (!seen.insert({rec.student_id, rec.cohort_year}).second) {
      if (!rules.allow_duplicate_ids) {
        throw Error(ErrorCode::DuplicateId,
                    path + ":" + std::to_string(line) + " repeats student '" + rec.student_id +
                        "' within cohort " + std::to_string(rec.cohort_year));
      }
      reject("DuplicateId");
      continue;
    }
    load.records.push_back(std::move(rec));
  }
  return load;
}

EnrollmentLoad load_enrollment(const std::string& path, const EnrollmentSchema& schema,
                               const ValidationRules& rules) {
  const CsvTable table = read_csv_file(path);
  const int id_col = require_column(table, schema.student_id, path);
  const int year_col = require_column(table, schema.enroll_year, path);
  const int inst_col = require_column(table, schema.institution_id, path);
  const int region_col = require_column(table, schema.campus_region, path);
  const int name_col = require_column(table, schema.career_name, path);
  const int area_col = require_column(table, schema.career_area, path);
  const int level_col = require_column(table, schema.degree_level, path);
  const int width = static_cast<int>(table.header.size());

  EnrollmentLoad load;
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto& cells = table.rows[r];
    const int64_t line = static_cast<int64_t>(r) + 2;
    ++load.raw_rows;
    auto reject = [&](const std::string& reason) {
      load.rejects.push_back({path, line, reason, rejoin(cells)});
    };

    if (static_cast<int>(cells.size()) != width) {
      reject("ParseError");
      continue;
    }
    EnrollmentRecord rec;
    rec.student_id = cells[static_cast<size_t>(id_col)];
    rec.source_line = static_cast<size_t>(line);
    if (rec.student_id.empty()) {
      reject("EmptyId");
      continue;
    }
    if (!parse_int(cells[static_cast<size_t>(year_col)], rec.enroll_year) ||
        rec.enroll_year < rules.year_lo || rec.enroll_year > rules.year_hi) {
      reject("YearOutOfRange");
      continue;
    }
    if (!parse_int(cells[static_cast<size_t>(region_col)], rec.campus_region) ||
        rec.campus_region < rules.region_lo || rec.campus_region > rules.region_hi) {
      reject("RegionUnknown");
      continue;
    }
    rec.institution_id = cells[static_cast<size_t>(inst_col)];
    rec.career_name = cells[static_cast<size_t>(name_col)];
    rec.career_area = cells[static_cast<size_t>(area_col)];
    std::string level = cells[static_cast<size_t>(level_col)];
    std::transform(level.begin(), level.end(), level.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (level == "professional") {
      rec.degree_level = DegreeLevel::Professional;
    } else if (level == "technical") {
      rec.degree_level = DegreeLevel::Technical;
    } else {
      reject("BadDegreeLevel");
      continue;
    }
    load.records.push_back(std::move(rec));
  }
  return load;
}

std::vector<StudentTrajectory> join_cohort(const std::vector<SecondaryRecord>& secondary,
                                           const std::vector<EnrollmentRecord>& enrollment,
                                           JoinReport* report) {
  // (enroll_year, technical-after-professional, institution_id) picks the
  // winning enrollment per student
  auto better = [](const EnrollmentRecord& a, const EnrollmentRecord& b) {
    if (a.enroll_year != b.enroll_year) return a.enroll_year < b.enroll_year;
    if (a.degree_level != b.degree_level) return a.degree_level == DegreeLevel::Professional;
    return a.institution_id < b.institution_id;
  };

  std::unordered_map<std::string, const EnrollmentRecord*> best;
  best.reserve(enrollment.size());
  for (const auto& e : enrollment) {
    auto [it, inserted] = best.emplace(e.student_id, &e);
    if (!inserted && better(e, *it->second)) it->second = &e;
  }

  std::vector<StudentTrajectory> trajectories;
  trajectories.reserve(secondary.size());
  std::set<std::string> matched_ids;
  JoinReport counts;
  for (const auto& s : secondary) {
    StudentTrajectory t;
    t.secondary = s;
    auto it = best.find(s.student_id);
    if (it != best.end()) {
      t.enrollment = *it->second;
      matched_ids.insert(s.student_id);
      ++counts.matched;
    } else {
      ++counts.unmatched_secondary;
    }
    trajectories.push_back(std::move(t));
  }
  std::set<std::string> orphan_ids;
  for (const auto& e : enrollment) {
    if (!matched_ids.count(e.student_id)) orphan_ids.insert(e.student_id);
  }
  counts.orphan_enrollments = static_cast<int64_t>(orphan_ids.size());
  if (report) *report = counts;
  return trajectories;
}

void write_rejects_csv(const std::string& path, const std::vector<Reject>& rejects) {
  CsvWriter out(path);
  out.write_row({"file", "line", "reason", "raw_row"});
  for (const auto& r : rejects) {
    out.write_row({r.file, format_int(r.line), r.reason, r.raw_row});
  }
  out.close();
}

void write_trajectories_csv(const std::string& path,
                            const std::vector<StudentTrajectory>& trajectories) {
  CsvWriter out(path);
  out.write_row({"student_id", "cohort_year", "home_region", "school_id", "math_score",
                 "reading_score", "gpa", "family_income", "enroll_year", "institution_id",
                 "campus_region", "career_name", "career_area", "degree_level"});
  auto numeric = [](double v) { return is_missing(v) ? std::string() : format_double(v); };
  for (const auto& t : trajectories) {
    const auto& s = t.secondary;
    std::vector<std::string> row = {s.student_id,
                                    format_int(s.cohort_year),
                                    format_int(s.home_region),
                                    s.school_id,
                                    numeric(s.math_score),
                                    numeric(s.reading_score),
                                    numeric(s.gpa),
                                    numeric(s.family_income)};
    if (t.enrollment) {
      const auto& e = *t.enrollment;
      row.insert(row.end(), {format_int(e.enroll_year), e.institution_id,
                             format_int(e.campus_region), e.career_name, e.career_area,
                             to_string(e.degree_level)});
    } else {
      row.insert(row.end(), {"", "", "", "", "", ""});
    }
    out.write_row(row);
  }
  out.close();
}

std::vector<StudentTrajectory> read_trajectories_csv(const std::string& path) {
  const CsvTable table = read_csv_file(path);
  auto col = [&](const char* name) { return require_column(table, name, path); };
  const int id = col("student_id"), year = col("cohort_year"), region = col("home_region"),
            school = col("school_id"), math = col("math_score"), reading = col("reading_score"),
            gpa = col("gpa"), income = col("family_income"), eyear = col("enroll_year"),
            inst = col("institution_id"), eregion = col("campus_region"),
            cname = col("career_name"), carea = col("career_area"), level = col("degree_level");

  std::vector<StudentTrajectory> trajectories;
  trajectories.reserve(table.rows.size());
  static const std::map<std::string, double> kNoBrackets;
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto& cells = table.rows[r];
    const std::string where = path + ":" + std::to_string(r + 2);
    StudentTrajectory t;
    auto& s = t.secondary;
    s.student_id = cells[static_cast<size_t>(id)];
    s.school_id = cells[static_cast<size_t>(school)];
    s.source_line = r + 2;
    if (!parse_int(cells[static_cast<size_t>(year)], s.cohort_year) ||
        !parse_int(cells[static_cast<size_t>(region)], s.home_region) ||
        !parse_numeric(cells[static_cast<size_t>(math)], kNoBrackets, s.math_score) ||
        !parse_numeric(cells[static_cast<size_t>(reading)], kNoBrackets, s.reading_score) ||
        !parse_numeric(cells[static_cast<size_t>(gpa)], kNoBrackets, s.gpa) ||
        !parse_numeric(cells[static_cast<size_t>(income)], kNoBrackets, s.family_income)) {
      throw Error(ErrorCode::ParseError, where + ": bad trajectory row");
    }
    if (!cells[static_cast<size_t>(eyear)].empty()) {
      EnrollmentRecord e;
      e.student_id = s.student_id;
      e.source_line = r + 2;
      if (!parse_int(cells[static_cast<size_t>(eyear)], e.enroll_year) ||
          !parse_int(cells[static_cast<size_t>(eregion)], e.campus_region)) {
        throw Error(ErrorCode::ParseError, where + ": bad enrollment columns");
      }
      e.institution_id = cells[static_cast<size_t>(inst)];
      e.career_name = cells[static_cast<size_t>(cname)];
      e.career_area = cells[static_cast<size_t>(carea)];
      e.degree_level = cells[static_cast<size_t>(level)] == "technical"
                           ? DegreeLevel::Technical
                           : DegreeLevel::Professional;
      t.enrollment = std::move(e);
    }
    trajectories.push_back(std::move(t));
  }
  return trajectories;
}

}  // namespace eduspace

#include "eduspace/design.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "json.hpp"

#include "eduspace/csv.hpp"
#include "eduspace/error.hpp"
#include "eduspace/stats.hpp"

namespace eduspace {

namespace {

constexpr std::array<const char*, 6> kCovariateDisplay = {
    "Language Percentile", "Math Percentile",        "GPA Percentile",
    "Language School Percentile", "Math School Percentile", "Family Income",
};
constexpr const char* kLangMathName = "lang_x_math";
constexpr const char* kLangMathDisplay = "Language × Math";
constexpr const char* kIncomeLangMathName = "income_x_lang_x_math";
constexpr const char* kIncomeLangMathDisplay = "Family Income × Language × Math";

std::vector<Archetype> dummy_order(Archetype baseline) {
  std::vector<Archetype> order;
  for (size_t i = 0; i < kArchetypeNames.size(); ++i) {
    auto a = static_cast<Archetype>(i);
    if (a != baseline) order.push_back(a);
  }
  std::sort(order.begin(), order.end(), [](Archetype a, Archetype b) {
    return std::string(to_string(a)) < to_string(b);
  });
  return order;
}

Eigen::VectorXd minmax_column(const Eigen::VectorXd& column) {
  double lo = column.minCoeff();
  double hi = column.maxCoeff();
  if (hi <= lo) return Eigen::VectorXd::Constant(column.size(), kZeroRangeValue);
  return (column.array() - lo) / (hi - lo);
}

// first column that is an exact linear combination of its predecessors
void check_collinearity(const Eigen::MatrixXd& X, const DesignSpec& spec) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() == X.cols()) return;
  for (Eigen::Index j = 1; j < X.cols(); ++j) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> prefix(X.leftCols(j + 1));
    if (prefix.rank() <= j) {
      throw Error(ErrorCode::CollinearColumn,
                  "column '" + spec.column_names[static_cast<size_t>(j)] +
                      "' is linearly dependent on earlier columns");
    }
  }
  throw Error(ErrorCode::CollinearColumn, "design matrix is rank deficient");
}

std::string format3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

std::string significance_stars(double p_value) {
  if (p_value < 0.01) return "***";
  if (p_value < 0.05) return "**";
  if (p_value < 0.1) return "*";
  return "";
}

DesignMatrix build_design(const Eigen::MatrixXd& features, const std::vector<Archetype>& clusters,
                          const std::vector<uint8_t>& migrated, int model_id, Archetype baseline) {
  if (model_id < 1 || model_id > 5) {
    throw Error(ErrorCode::InvalidConfig, "model_id must be in 1..5");
  }
  const Eigen::Index n = features.rows();
  if (features.cols() != 6) throw Error(ErrorCode::ShapeMismatch, "features must be n x 6");
  if (static_cast<Eigen::Index>(migrated.size()) != n) {
    throw Error(ErrorCode::LengthMismatch, "migrated does not align with features");
  }
  const bool wants_dummies = model_id >= 2;
  if (wants_dummies && static_cast<Eigen::Index>(clusters.size()) != n) {
    throw Error(ErrorCode::MissingCluster, "models 2..5 need a cluster label per student");
  }

  DesignMatrix design;
  design.spec.model_id = model_id;
  design.spec.baseline = baseline;
  auto& names = design.spec.column_names;
  auto& display = design.spec.display_names;

  const bool wants_lang_math = model_id == 3 || model_id == 5;
  const bool wants_three_way = model_id == 4 || model_id == 5;
  const auto dummies = wants_dummies ? dummy_order(baseline) : std::vector<Archetype>{};
  const Eigen::Index p = 1 + 6 + static_cast<Eigen::Index>(dummies.size()) +
                         (wants_lang_math ? 1 : 0) + (wants_three_way ? 1 : 0);

  design.X.resize(n, p);
  design.X.col(0).setOnes();
  names.emplace_back("intercept");
  display.emplace_back("Constant");

  for (int f = 0; f < 6; ++f) {
    design.X.col(1 + f) = minmax_column(features.col(f));
    names.emplace_back(kFeatureNames[static_cast<size_t>(f)]);
    display.emplace_back(kCovariateDisplay[static_cast<size_t>(f)]);
  }

  Eigen::Index next = 7;
  for (Archetype a : dummies) {
    for (Eigen::Index i = 0; i < n; ++i) {
      design.X(i, next) = clusters[static_cast<size_t>(i)] == a ? 1.0 : 0.0;
    }
    names.emplace_back(std::string("cluster_") + to_string(a));
    display.emplace_back(to_string(a));
    ++next;
  }
  if (wants_lang_math) {
    design.X.col(next) =
        design.X.col(1 + kLangIdx).cwiseProduct(design.X.col(1 + kMathIdx));
    names.emplace_back(kLangMathName);
    display.emplace_back(kLangMathDisplay);
    ++next;
  }
  if (wants_three_way) {
    design.X.col(next) = design.X.col(1 + kIncomeIdx)
                             .cwiseProduct(design.X.col(1 + kLangIdx))
                             .cwiseProduct(design.X.col(1 + kMathIdx));
    names.emplace_back(kIncomeLangMathName);
    display.emplace_back(kIncomeLangMathDisplay);
    ++next;
  }

  design.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    design.y(i) = migrated[static_cast<size_t>(i)] ? 1.0 : 0.0;
  }

  check_collinearity(design.X, design.spec);
  return design;
}

LadderResult model_ladder(const Eigen::MatrixXd& features, const std::vector<Archetype>& clusters,
                          const std::vector<uint8_t>& migrated, Archetype baseline,
                          const LogitOptions& options) {
  LadderResult ladder;
  for (int id = 1; id <= 5; ++id) {
    ModelResult result;
    result.spec.model_id = id;
    try {
      DesignMatrix design = build_design(features, clusters, migrated, id, baseline);
      result.spec = design.spec;
      result.fit = fit_logit<double>(design.X, design.y, options);
      result.ok = true;
    } catch (const Error& e) {
      result.error = e.what();
      result.error_code = e.code();
    }
    ladder.models.push_back(std::move(result));
  }
  return ladder;
}

namespace {

struct Cell {
  std::string top;     // coefficient + stars
  std::string bottom;  // (SE)
};

// display row -> per-model cells, in Table order: covariates, interactions,
// dummies, constant
std::vector<std::pair<std::string, std::vector<Cell>>> collect_rows(const LadderResult& ladder) {
  std::vector<std::string> row_order;
  for (const char* name : kCovariateDisplay) row_order.emplace_back(name);
  row_order.emplace_back(kLangMathDisplay);
  row_order.emplace_back(kIncomeLangMathDisplay);
  for (const auto& model : ladder.models) {
    if (!model.ok) continue;
    for (const auto& d : model.spec.display_names) {
      if (std::find(row_order.begin(), row_order.end(), d) == row_order.end() &&
          d != "Constant") {
        row_order.push_back(d);
      }
    }
  }
  row_order.emplace_back("Constant");

  std::vector<std::pair<std::string, std::vector<Cell>>> rows;
  for (const auto& label : row_order) {
    std::vector<Cell> cells(ladder.models.size());
    bool any = false;
    for (size_t m = 0; m < ladder.models.size(); ++m) {
      const auto& model = ladder.models[m];
      if (!model.ok) continue;
      for (size_t j = 0; j < model.spec.display_names.size(); ++j) {
        if (model.spec.display_names[j] != label) continue;
        auto idx = static_cast<Eigen::Index>(j);
        cells[m].top = format3(model.fit.coefficients(idx)) +
                       significance_stars(model.fit.p_values(idx));
        cells[m].bottom = "(" + format3(model.fit.std_errors(idx)) + ")";
        any = true;
      }
    }
    if (any) rows.emplace_back(label, std::move(cells));
  }
  return rows;
}

}  // namespace

std::string render_comparison_text(const LadderResult& ladder) {
  const auto rows = collect_rows(ladder);
  size_t label_width = std::string("Pseudo R2").size();
  for (const auto& [label, cells] : rows) label_width = std::max(label_width, label.size());
  const size_t column_width = 12;
  const size_t total = label_width + column_width * ladder.models.size();

  std::ostringstream out;
  auto pad_label = [&](const std::string& s) {
    out << s << std::string(label_width - s.size(), ' ');
  };
  auto pad_cell = [&](const std::string& s) {
    out << std::string(column_width - std::min(column_width - 1, s.size()), ' ')
        << s.substr(0, column_width - 1);
  };

  out << std::string(total, '=') << "\n";
  pad_label("");
  for (size_t m = 0; m < ladder.models.size(); ++m) {
    pad_cell("Model " + std::to_string(ladder.models[m].spec.model_id));
  }
  out << "\n";
  out << "Dependent variable: cross-regional migration\n";
  out << std::string(total, '-') << "\n";
  for (const auto& [label, cells] : rows) {
    pad_label(label);
    for (const auto& cell : cells) pad_cell(cell.top);
    out << "\n";
    pad_label("");
    for (const auto& cell : cells) pad_cell(cell.bottom);
    out << "\n";
  }
  out << std::string(total, '-') << "\n";
  pad_label("Observations");
  for (const auto& model : ladder.models) {
    pad_cell(model.ok ? std::to_string(model.fit.n_observations) : "");
  }
  out << "\n";
  pad_label("Pseudo R2");
  for (const auto& model : ladder.models) {
    pad_cell(model.ok ? format3(model.fit.pseudo_r2) : "");
  }
  out << "\n" << std::string(total, '=') << "\n";
  out << "Note: * p<0.1; ** p<0.05; *** p<0.01\n";
  for (const auto& model : ladder.models) {
    if (!model.ok) {
      out << "Model " << model.spec.model_id << " failed: " << model.error << "\n";
    }
  }
  return out.str();
}

std::string render_comparison_csv(const LadderResult& ladder) {
  std::ostringstream out;
  out << "model,term,display,coefficient,std_error,z_value,p_value,stars\n";
  for (const auto& model : ladder.models) {
    const std::string id = std::to_string(model.spec.model_id);
    if (!model.ok) {
      out << id << ",_error," << csv_escape(model.error) << ",,,,,\n";
      continue;
    }
    for (size_t j = 0; j < model.spec.column_names.size(); ++j) {
      auto idx = static_cast<Eigen::Index>(j);
      out << id << ',' << model.spec.column_names[j] << ','
          << csv_escape(model.spec.display_names[j]) << ','
          << format_double(model.fit.coefficients(idx)) << ','
          << format_double(model.fit.std_errors(idx)) << ','
          << format_double(model.fit.z_values(idx)) << ','
          << format_double(model.fit.p_values(idx)) << ','
          << significance_stars(model.fit.p_values(idx)) << "\n";
    }
    out << id << ",_observations,," << model.fit.n_observations << ",,,,\n";
    out << id << ",_pseudo_r2,," << format_double(model.fit.pseudo_r2) << ",,,,\n";
    out << id << ",_log_likelihood,," << format_double(model.fit.log_likelihood) << ",,,,\n";
  }
  return out.str();
}

std::string render_comparison_json(const LadderResult& ladder) {
  nlohmann::json doc;
  doc["models"] = nlohmann::json::array();
  for (const auto& model : ladder.models) {
    nlohmann::json m;
    m["model_id"] = model.spec.model_id;
    m["ok"] = model.ok;
    if (!model.ok) {
      m["error"] = model.error;
      doc["models"].push_back(std::move(m));
      continue;
    }
    m["baseline"] = to_string(model.spec.baseline);
    m["n_observations"] = model.fit.n_observations;
    m["log_likelihood"] = model.fit.log_likelihood;
    m["null_log_likelihood"] = model.fit.null_log_likelihood;
    m["pseudo_r2"] = model.fit.pseudo_r2;
    m["n_iterations"] = model.fit.n_iterations;
    m["converged"] = model.fit.converged;
    m["terms"] = nlohmann::json::array();
    for (size_t j = 0; j < model.spec.column_names.size(); ++j) {
      auto idx = static_cast<Eigen::Index>(j);
      nlohmann::json term;
      term["name"] = model.spec.column_names[j];
      term["display"] = model.spec.display_names[j];
      term["coefficient"] = model.fit.coefficients(idx);
      term["std_error"] = model.fit.std_errors(idx);
      term["z_value"] = model.fit.z_values(idx);
      term["p_value"] = model.fit.p_values(idx);
      term["stars"] = significance_stars(model.fit.p_values(idx));
      m["terms"].push_back(std::move(term));
    }
    doc["models"].push_back(std::move(m));
  }
  return doc.dump(2) + "\n";
}

}  // namespace eduspace

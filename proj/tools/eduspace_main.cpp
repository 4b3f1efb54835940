// Batch CLI over the pipeline library. Every subcommand runs the pipeline
// prefix ending at its stage and writes that prefix's artifacts plus
// manifest.json into the output directory.
//
// Exit codes: 0 success, 2 config error, 3 data validation, 4 model failure,
// 5 I/O.

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "eduspace/config.hpp"
#include "eduspace/csv.hpp"
#include "eduspace/design.hpp"
#include "eduspace/error.hpp"
#include "eduspace/manifest.hpp"
#include "eduspace/pipeline.hpp"

namespace {

using eduspace::Error;
using eduspace::ErrorCode;
using eduspace::GroupKey;
using eduspace::PipelineResult;
using eduspace::RunConfig;
using eduspace::Stage;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream stream(text);
  std::string part;
  while (std::getline(stream, part, ',')) {
    if (!part.empty()) parts.push_back(part);
  }
  return parts;
}

std::string rates_csv(const eduspace::RateTable& table) {
  std::string text = "cluster,career_area,home_region,enroll_year,numerator,denominator,rate\n";
  for (const auto& row : table.rows) {
    if (row.suppressed) continue;
    text += eduspace::csv_escape(row.cluster_label) + "," + eduspace::csv_escape(row.career_area) +
            "," + (row.home_region >= 0 ? eduspace::format_int(row.home_region) : "") + "," +
            (row.enroll_year >= 0 ? eduspace::format_int(row.enroll_year) : "") + "," +
            eduspace::format_int(row.numerator) + "," + eduspace::format_int(row.denominator) +
            "," + eduspace::format_double(row.rate) + "\n";
  }
  return text;
}

std::string rates_json(const eduspace::RateTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    if (row.suppressed) continue;
    nlohmann::json entry;
    if (!row.cluster_label.empty()) entry["cluster"] = row.cluster_label;
    if (!row.career_area.empty()) entry["career_area"] = row.career_area;
    if (row.home_region >= 0) entry["home_region"] = row.home_region;
    if (row.enroll_year >= 0) entry["enroll_year"] = row.enroll_year;
    entry["numerator"] = row.numerator;
    entry["denominator"] = row.denominator;
    entry["rate"] = row.rate;
    rows.push_back(std::move(entry));
  }
  return rows.dump(2) + "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"educational-trajectory batch analytics"};
  app.set_version_flag("--version", eduspace::kEngineVersion);
  app.require_subcommand(1);
  app.footer("exit codes: 0 success, 2 config error, 3 data validation, 4 model failure, 5 I/O");

  std::string config_path;
  std::string out_dir;
  uint64_t seed = 0;
  int threads = 0;
  std::string preset;
  int64_t synth_n = 0;
  int cluster_k = 0;
  int cluster_restarts = 0;
  std::string scan;
  std::string group_by;
  bool exclude_metro = false;
  bool include_metro = false;
  int64_t min_cell = -1;
  std::string models;
  std::string baseline;
  std::string format = "text";

  const std::vector<std::string> stage_names = {"synth",   "ingest", "features", "cluster",
                                                "space",   "migrate", "fit",      "report",
                                                "run"};
  const std::vector<std::string> stage_help = {
      "generate a synthetic cohort from a preset",
      "load, validate, and join the input CSVs",
      "build the six per-student features",
      "k-means clustering and archetype labels",
      "2-D projection of the feature space",
      "migration rates and region flow matrix",
      "the five-model logistic-regression ladder",
      "figure-analogue CSV/SVG bundle",
      "the full pipeline end to end"};
  // a subcommand runs every stage before its own, so it accepts the options
  // of each stage in that prefix
  const size_t cluster_pos = 3, migrate_pos = 5, fit_pos = 6;
  std::vector<CLI::App*> subs;
  for (size_t i = 0; i < stage_names.size(); ++i) {
    CLI::App* sub = app.add_subcommand(stage_names[i], stage_help[i]);
    sub->add_option("--config", config_path, "run config JSON file");
    sub->add_option("--out", out_dir, "output directory (overrides config and env)");
    sub->add_option("--seed", seed, "top-level seed override");
    sub->add_option("--threads", threads, "worker thread count (0 = hardware)");
    sub->add_option("--preset", preset, "synthetic preset name");
    sub->add_option("--n", synth_n, "synthetic cohort size override");
    if (i >= cluster_pos) {
      sub->add_option("--k", cluster_k, "number of clusters");
      sub->add_option("--restarts", cluster_restarts, "k-means restarts");
      sub->add_option("--scan", scan, "k scan range LO:HI for the validation curve");
    }
    if (i >= migrate_pos) {
      sub->add_option("--group-by", group_by,
                      "comma list of cluster,career,region,year rate groupings");
      sub->add_flag("--exclude-metro", exclude_metro, "drop metropolitan-home records");
      sub->add_flag("--include-metro", include_metro, "keep metropolitan-home records");
      sub->add_option("--min-cell", min_cell, "suppression threshold for rate cells");
    }
    if (i >= fit_pos) {
      sub->add_option("--models", models, "comma list of ladder models to fit, from 1..5");
      sub->add_option("--baseline", baseline, "baseline archetype for cluster dummies");
    }
    if (stage_names[i] == "migrate" || stage_names[i] == "fit") {
      sub->add_option("--format", format, "stdout table format: text, csv, or json")
          ->check(CLI::IsMember({"text", "csv", "json"}));
    }
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : eduspace::kExitConfig;
  }

  CLI::App* picked = nullptr;
  size_t picked_index = 0;
  for (size_t i = 0; i < subs.size(); ++i) {
    if (app.got_subcommand(subs[i])) {
      picked = subs[i];
      picked_index = i;
    }
  }

  auto given = [&](const std::string& name) {
    const CLI::Option* option = picked->get_option_no_throw(name);
    return option != nullptr && option->count() > 0;
  };
  auto parse_int = [](const std::string& text, const std::string& what) {
    try {
      size_t used = 0;
      const int value = std::stoi(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return value;
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidConfig, what + " expects an integer, got '" + text + "'");
    }
  };

  try {
    RunConfig config;
    if (given("--config")) config = eduspace::load_config(config_path);
    if (const char* env = std::getenv("EDUSPACE_OUTPUT_DIR")) config.output_dir = env;
    if (given("--out")) config.output_dir = out_dir;
    if (given("--seed")) {
      config.seed = seed;
      config.seed_explicit = true;
    }
    if (given("--threads")) config.threads = threads;
    if (given("--preset")) {
      config.synth_preset = preset;
      config.secondary_path.clear();
      config.enrollment_path.clear();
    }
    if (given("--n")) config.synth_n = synth_n;
    if (given("--k")) config.cluster_k = cluster_k;
    if (given("--restarts")) config.cluster_restarts = cluster_restarts;
    if (given("--scan")) {
      const auto colon = scan.find(':');
      if (colon == std::string::npos) {
        throw Error(ErrorCode::InvalidConfig, "--scan expects LO:HI");
      }
      config.scan_lo = parse_int(scan.substr(0, colon), "--scan");
      config.scan_hi = parse_int(scan.substr(colon + 1), "--scan");
    }
    if (given("--group-by")) {
      config.group_by.clear();
      for (const auto& key : split_list(group_by)) {
        config.group_by.push_back(eduspace::group_key_from_string(key));
      }
    }
    if (exclude_metro) config.exclude_metro = true;
    if (include_metro) config.exclude_metro = false;
    if (min_cell >= 0) config.min_cell = min_cell;
    if (given("--models")) {
      config.models.clear();
      for (const auto& id : split_list(models)) {
        config.models.push_back(parse_int(id, "--models"));
      }
    }
    if (given("--baseline")) config.baseline = baseline;

    const std::string stage_name = stage_names[picked_index];
    const Stage stage =
        stage_name == "run" ? Stage::Report : eduspace::stage_from_string(stage_name);
    PipelineResult result = eduspace::run_pipeline(config, stage);

    if (stage_name == "fit") {
      if (format == "csv") {
        std::cout << eduspace::render_comparison_csv(result.ladder);
      } else if (format == "json") {
        std::cout << eduspace::render_comparison_json(result.ladder);
      } else {
        std::cout << eduspace::render_comparison_text(result.ladder);
      }
    } else if (stage_name == "migrate") {
      if (format == "json") {
        std::cout << rates_json(result.rates);
      } else if (format == "csv") {
        std::cout << rates_csv(result.rates);
      } else {
        for (const auto& row : result.rates.rows) {
          if (row.suppressed) continue;
          std::string key;
          if (!row.cluster_label.empty()) key += row.cluster_label + " ";
          if (!row.career_area.empty()) key += row.career_area + " ";
          if (row.home_region >= 0) key += "region " + std::to_string(row.home_region) + " ";
          if (row.enroll_year >= 0) key += std::to_string(row.enroll_year) + " ";
          if (key.empty()) key = "all ";
          std::cout << key << eduspace::format_double(row.rate) << " (" << row.numerator << "/"
                    << row.denominator << ")\n";
        }
      }
    } else {
      for (const auto& notice : result.notices) std::cout << notice << "\n";
      std::cout << stage_name << ": " << result.artifacts.size() << " artifacts in "
                << config.output_dir << "\n";
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return eduspace::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

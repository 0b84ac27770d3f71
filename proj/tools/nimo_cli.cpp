#include <cstdio>
#include <exception>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nimo/data.hpp"
#include "nimo/errors.hpp"
#include "nimo/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;
constexpr int kExitIo = 4;

int run_cli(int argc, char** argv) {
  CLI::App app{"Experiment runner: generate or load a dataset, grid-search the "
               "penalties on the validation split, and write metric/coefficient "
               "reports"};

  std::string config_path;
  std::string setting;
  std::string csv_path;
  std::string target_column;
  std::string out_dir;
  std::vector<std::string> methods;
  std::int64_t seed = -1;
  int repeats = 0;

  app.add_option("--config", config_path, "JSON experiment config");
  app.add_option("--setting", setting, "synthetic setting name (e.g. toy, reg1, cls1)");
  app.add_option("--csv", csv_path, "CSV dataset path");
  app.add_option("--target-col", target_column, "target column for --csv");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--method", methods, "method to run (repeatable)");
  app.add_option("--seed", seed, "base seed");
  app.add_option("--repeats", repeats, "number of seeded repetitions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  nimo::Json doc = nimo::Json::object();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw nimo::IoError("cannot open config " + config_path);
    try {
      doc = nimo::Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw nimo::ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
  }
  if (!setting.empty()) doc["setting"] = setting;
  if (!csv_path.empty()) doc["csv_path"] = csv_path;
  if (!target_column.empty()) doc["target_column"] = target_column;
  if (!out_dir.empty()) doc["out_dir"] = out_dir;
  if (!methods.empty()) doc["methods"] = methods;
  if (seed >= 0) doc["seed"] = static_cast<std::uint64_t>(seed);
  if (repeats > 0) doc["repeats"] = repeats;

  const nimo::ExperimentConfig config = nimo::parse_experiment_config(doc);
  const nimo::MetricsReport report = nimo::run(config);

  for (const nimo::MethodSummary& summary : report.methods) {
    std::printf("%-8s %s mean %.6f stddev %.6f", nimo::method_name(summary.method).c_str(),
                summary.metric_name.c_str(), summary.mean, summary.stddev);
    if (summary.reference)
      std::printf("  reference %.6f ratio %.3f", *summary.reference, *summary.ratio);
    std::printf("\n");
  }
  std::printf("report written to %s/report.json\n", config.out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const nimo::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const nimo::UnknownSettingError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const nimo::UnknownTableRowError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const nimo::DimensionMismatchError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const nimo::DivergedError& e) {
    std::fprintf(stderr, "training diverged: %s\n", e.what());
    return kExitDiverged;
  } catch (const nimo::MaxIterationsError& e) {
    std::fprintf(stderr, "training diverged: %s\n", e.what());
    return kExitDiverged;
  } catch (const nimo::NotSpdError& e) {
    std::fprintf(stderr, "training diverged: %s\n", e.what());
    return kExitDiverged;
  } catch (const nimo::NonFiniteError& e) {
    std::fprintf(stderr, "training diverged: %s\n", e.what());
    return kExitDiverged;
  } catch (const nimo::IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kExitIo;
  } catch (const nimo::ParseError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kExitIo;
  } catch (const nimo::MissingColumnError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kExitIo;
  } catch (const nimo::InsufficientRowsError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

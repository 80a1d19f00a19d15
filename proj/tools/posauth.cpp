// posauth: dataset generation, tracker training and authentication sweeps.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "posauth/config.hpp"
#include "posauth/error.hpp"
#include "posauth/experiments.hpp"
#include "posauth/text.hpp"

namespace fs = std::filesystem;
using namespace posauth;

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "Experiment config file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", opts.seed, "Master seed, overrides [run] seed");
  cmd->add_option("--out", opts.out_dir, "Output directory");
}

ExperimentConfig resolve(const CommonOptions& opts) {
  ExperimentConfig cfg = opts.config_path.empty() ? ExperimentConfig{} : load_config(opts.config_path);
  if (opts.seed) cfg.master_seed = *opts.seed;
  if (!opts.out_dir.empty()) {
    cfg.output_dir = opts.out_dir;
  } else if (cfg.output_dir.empty()) {
    const char* env = std::getenv("POSAUTH_OUT_DIR");
    cfg.output_dir = env != nullptr && *env != '\0' ? env : ".";
  }
  validate(cfg);
  return cfg;
}

fs::path prepare_output(const ExperimentConfig& cfg) {
  const fs::path dir = cfg.output_dir;
  fs::create_directories(dir);
  std::ofstream out(dir / "config.resolved.ini", std::ios::binary);
  if (!out) throw IoError("cannot write to output directory '" + dir.string() + "'");
  ExperimentConfig canonical = cfg;
  canonical.output_dir.clear();
  out << serialize_config(canonical);
  return dir;
}

void report_error(const std::string& kind, const std::string& message) {
  std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Position-based physical-layer authentication simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", code_version());

  CommonOptions dataset_opts, train_opts, sweep_opts, roc_opts, bench_opts;
  std::string train_dataset, sweep_model, roc_model, bench_dataset, decision_log;
  std::optional<std::string> train_kind;

  auto* dataset_cmd = app.add_subcommand("dataset", "Generate the tracker training dataset");
  add_common(dataset_cmd, dataset_opts);

  auto* train_cmd = app.add_subcommand("train", "Train the mobility tracker");
  add_common(train_cmd, train_opts);
  train_cmd->add_option("--dataset", train_dataset, "Dataset CSV to train from")
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--model-kind", train_kind, "dt or svr");

  auto* sweep_cmd = app.add_subcommand("sweep", "Error probabilities versus link quality");
  add_common(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--model", sweep_model, "Trained model file")->check(CLI::ExistingFile);
  sweep_cmd->add_option("--decision-log", decision_log,
                        "Write decisions of the first sweep point at the first threshold");

  auto* roc_cmd = app.add_subcommand("roc", "ROC curves per link quality and speed");
  add_common(roc_cmd, roc_opts);
  roc_cmd->add_option("--model", roc_model, "Trained model file")->check(CLI::ExistingFile);

  auto* bench_cmd = app.add_subcommand("bench", "Compare decision tree and SVR trackers");
  add_common(bench_cmd, bench_opts);
  bench_cmd->add_option("--dataset", bench_dataset, "Dataset CSV")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("usage", e.what());
    return 2;
  }

  try {
    if (dataset_cmd->parsed()) {
      const ExperimentConfig cfg = resolve(dataset_opts);
      const fs::path dir = prepare_output(cfg);
      GenerationReport report;
      const Dataset data = obtain_dataset(cfg, &report);
      write_dataset_csv(dir / "dataset.csv", data);
      std::cout << "dataset: " << data.rows.size() << " rows, " << report.skipped_slots
                << " skipped slots -> " << (dir / "dataset.csv").string() << '\n';
    } else if (train_cmd->parsed()) {
      ExperimentConfig cfg = resolve(train_opts);
      if (!train_dataset.empty()) cfg.model.dataset_path = train_dataset;
      if (train_kind) cfg.model.kind = parse_regressor_kind(*train_kind);
      const fs::path dir = prepare_output(cfg);
      const TrainingResult result = train_model(cfg, obtain_dataset(cfg), cfg.model.kind);
      result.model.save(dir / "model.json");
      ResultTable metrics("train", {"model", "rmse", "mse", "mae", "r2"}, provenance_of(cfg));
      const RegressionMetrics& m = result.test_metrics;
      metrics.add_row({std::string(to_string(cfg.model.kind)), m.rmse, m.mse, m.mae, m.r2});
      metrics.save(dir / "train_metrics.csv");
      std::cout << "train: " << to_string(cfg.model.kind) << " on " << result.train_rows
                << " rows, test rmse " << format_double(m.rmse) << " r2 " << format_double(m.r2)
                << " -> " << (dir / "model.json").string() << '\n';
    } else if (sweep_cmd->parsed()) {
      ExperimentConfig cfg = resolve(sweep_opts);
      if (!sweep_model.empty()) cfg.model.path = sweep_model;
      const fs::path dir = prepare_output(cfg);
      const SweepOutcome outcome = run_error_sweep(cfg);
      write_sweep_outputs(outcome, dir);
      if (!decision_log.empty()) {
        write_decision_log(decision_log,
                           decision_records(outcome.points.front().scores, cfg.sweep.thresholds.front()));
      }
      std::cout << "sweep: " << outcome.table.rows().size() << " rows over "
                << outcome.points.size() << " points x " << cfg.sweep.trials << " trials -> "
                << (dir / "sweep.csv").string() << '\n';
    } else if (roc_cmd->parsed()) {
      ExperimentConfig cfg = resolve(roc_opts);
      if (!roc_model.empty()) cfg.model.path = roc_model;
      const fs::path dir = prepare_output(cfg);
      const ResultTable table = run_roc(cfg);
      table.save(dir / "roc.csv");
      std::cout << "roc: " << table.rows().size() << " rows -> " << (dir / "roc.csv").string()
                << '\n';
    } else if (bench_cmd->parsed()) {
      ExperimentConfig cfg = resolve(bench_opts);
      if (!bench_dataset.empty()) cfg.model.dataset_path = bench_dataset;
      const fs::path dir = prepare_output(cfg);
      const ResultTable table = run_ml_benchmark(cfg);
      table.save(dir / "bench.csv");
      std::cout << "bench:";
      for (std::size_t i = 0; i < table.rows().size(); ++i) {
        std::cout << ' ' << table.text(i, "model") << " rmse "
                  << format_double(table.number(i, "rmse")) << " r2 "
                  << format_double(table.number(i, "r2")) << ';';
      }
      std::cout << " -> " << (dir / "bench.csv").string() << '\n';
    }
  } catch (const Error& e) {
    report_error(std::string(to_string(e.kind())), e.what());
    return 1;
  } catch (const std::exception& e) {
    report_error("internal", e.what());
    return 1;
  }
  return 0;
}

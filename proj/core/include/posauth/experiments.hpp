#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "posauth/authenticator.hpp"
#include "posauth/config.hpp"
#include "posauth/dataset.hpp"
#include "posauth/metrics.hpp"
#include "posauth/regressor.hpp"
#include "posauth/result_table.hpp"

namespace posauth {

inline constexpr const char* kSweepCsvHeader =
    "lq_db,threshold,speed,pfa,pmd,pfa_baseline,pmd_baseline";
inline constexpr const char* kRocCsvHeader = "lq_db,speed,threshold,pfa,pd";
inline constexpr const char* kBenchCsvHeader = "model,rmse,mse,mae,r2";

Provenance provenance_of(const ExperimentConfig& config);

/// Loads `model.dataset_path` when set, otherwise generates from the config.
Dataset obtain_dataset(const ExperimentConfig& config, GenerationReport* report = nullptr);

struct TrainingResult {
  Regressor model;
  RegressionMetrics test_metrics;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
};

/// Seeded split of `data`, then fits the configured regressor kind.
TrainingResult train_model(const ExperimentConfig& config, const Dataset& data,
                           RegressorKind kind);

/// Loads `model.path` when set, otherwise trains on obtain_dataset().
Regressor obtain_model(const ExperimentConfig& config);

/// Test statistics from one sweep point, one entry per scored trial in trial
/// order. A trial is unscored when it has no fix, or when it only seeds the
/// tracker (the first fix after a start or reset).
struct AuthenticationScores {
  std::vector<double> ts_h0;
  std::vector<double> ts_h1;
  std::vector<double> aoa_h0;
  std::vector<double> aoa_h1;
  std::size_t trials = 0;
  std::size_t coverage_failures = 0;
  std::size_t warmups = 0;
};

/// Drives the legitimate vehicle along the road for `trials` slots. Each slot
/// the tracker predicts the reference position from the previous fix, then
/// the legitimate vehicle and the attacker are localized against it.
AuthenticationScores simulate_authentication(const ExperimentConfig& config,
                                             const Regressor& model, double lq_db,
                                             double speed, std::uint64_t stream_seed);

struct SweepPoint {
  double lq_db = 0.0;
  double speed = 0.0;
  AuthenticationScores scores;
};

struct SweepOutcome {
  ResultTable table;
  std::vector<SweepPoint> points;
};

SweepOutcome run_error_sweep(const ExperimentConfig& config, const Regressor& model);
SweepOutcome run_error_sweep(const ExperimentConfig& config);

/// Writes sweep.csv plus the per-figure pfa_vs_lq.csv and pmd_vs_lq.csv.
void write_sweep_outputs(const SweepOutcome& outcome, const std::filesystem::path& dir);

/// Thresholds for one ROC curve: 0 first, above every score last, sorted
/// and de-duplicated, at most `spec.grid_points` entries.
std::vector<double> roc_thresholds(std::span<const double> ts_h0, std::span<const double> ts_h1,
                                   const RocSpec& spec);

ResultTable run_roc(const ExperimentConfig& config, const Regressor& model);
ResultTable run_roc(const ExperimentConfig& config);

ResultTable run_ml_benchmark(const ExperimentConfig& config);
ResultTable run_ml_benchmark(const ExperimentConfig& config, const Dataset& data);

/// Decision records of one sweep point at one threshold, legit trials first.
std::vector<DecisionRecord> decision_records(const AuthenticationScores& scores,
                                             double threshold);

}  // namespace posauth

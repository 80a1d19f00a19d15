#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "posauth/channel.hpp"
#include "posauth/dataset.hpp"
#include "posauth/regressor.hpp"
#include "posauth/scenario.hpp"

namespace posauth {

struct SweepSpec {
  std::vector<double> lq_db;       // default 0..20 dB in 1 dB steps
  std::vector<double> thresholds{1, 2, 5, 10, 20, 50, 100, 200, 500};  // m
  std::vector<double> speeds{1.0};      // m/s
  std::size_t trials = 10000;
  double slot_duration = 1.0;      // s
  double aoa_threshold = 0.5;      // rad, AoA baseline
  /// Sweeps abort when more than this share of trials has no position fix.
  double max_coverage_failure = 0.1;

  SweepSpec();
};

enum class RocGrid { quantile, linear };

struct RocSpec {
  std::vector<double> lq_db{0.0, 20.0};
  std::vector<double> speeds{1.0};
  std::size_t grid_points = 200;
  RocGrid grid = RocGrid::quantile;
  /// Upper end of a linear grid; 0 means max observed score + 1.
  double max_threshold = 0.0;
};

struct ModelSpec {
  RegressorKind kind = RegressorKind::svr;
  /// Trained model to load; empty means train from a generated dataset.
  std::string path;
  /// Dataset CSV to train from; empty means generate one.
  std::string dataset_path;
  double split_ratio = 0.7;
  TreeParams tree;
  SvrParams svr;
};

/// Every experiment input. Defaults describe the standard road setup, so an
/// empty config file runs it.
struct ExperimentConfig {
  ScenarioConfig scenario;
  ChannelParams channel;
  SweepSpec sweep;
  RocSpec roc;
  DatasetConfig dataset;
  ModelSpec model;
  std::uint64_t master_seed = 1;
  std::string output_dir;
};

void validate(const ExperimentConfig& config);

/// INI-style text: [section] headers, key = value lines, '#' or ';'
/// comments. Lists are comma separated; "a:step:b" expands to an inclusive
/// range. Unknown sections or keys are rejected.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_string(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical text with every field materialized.
std::string serialize_config(const ExperimentConfig& config);

/// FNV-1a of the canonical text.
std::uint64_t config_hash(const ExperimentConfig& config);

}  // namespace posauth

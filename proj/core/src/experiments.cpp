#include "posauth/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "posauth/channel.hpp"
#include "posauth/error.hpp"
#include "posauth/localizer.hpp"
#include "posauth/parallel.hpp"
#include "posauth/scenario.hpp"

namespace posauth {

namespace {

constexpr std::uint64_t kDatasetTag = 0x4453455400000001ULL;
constexpr std::uint64_t kSplitTag = 0x53504c5400000002ULL;
constexpr std::uint64_t kSweepTag = 0x5357455000000003ULL;
constexpr std::uint64_t kRocTag = 0x524f430000000004ULL;
constexpr std::uint64_t kLegitRole = 0;
constexpr std::uint64_t kAttackerRole = 1;
constexpr std::uint64_t kLegitAngleRole = 2;
constexpr std::uint64_t kAttackerAngleRole = 3;

struct Fix {
  std::array<double, kAnchorsPerFix> toas{};
  std::array<double, kAnchorsPerFix> toa_diffs{};
  Vec2 position = Vec2::Zero();
};

struct Measurement {
  std::vector<Rsu> anchors;
  std::array<double, kAnchorsPerFix> toas{};
  Vec2 position = Vec2::Zero();
};

Measurement measure(std::span<const Rsu> anchors, const Vec2& tx, LinkQuality lq,
                    const ChannelParams& channel, std::uint64_t seed, std::uint64_t trial,
                    std::uint64_t role) {
  Measurement m;
  m.anchors.assign(anchors.begin(), anchors.end());
  std::array<ToaObservation, kAnchorsPerFix> obs;
  for (std::size_t j = 0; j < kAnchorsPerFix; ++j) {
    RandomStream rng = make_stream(seed, {trial, role, j});
    obs[j] = observe_toa(rng, anchors[j], tx, lq, channel);
    m.toas[j] = obs[j].toa;
  }
  m.position = locate(anchors, obs, channel).position;
  return m;
}

FeatureVector features_of(double lq_db, const Fix& fix) {
  FeatureRow row;
  row.lq_db = lq_db;
  row.toas = fix.toas;
  row.toa_diffs = fix.toa_diffs;
  row.current_position = fix.position;
  return row.features();
}

Fix next_fix(const std::optional<Fix>& previous, const Measurement& m) {
  Fix f;
  f.toas = m.toas;
  f.position = m.position;
  for (std::size_t j = 0; j < kAnchorsPerFix; ++j) {
    f.toa_diffs[j] = previous ? m.toas[j] - previous->toas[j] : 0.0;
  }
  return f;
}

std::vector<double> angles_from(const Vec2& tx, std::span<const Rsu> anchors, LinkQuality lq,
                                std::uint64_t seed, std::uint64_t trial, std::uint64_t role) {
  std::vector<double> out;
  for (std::size_t j = 0; j < anchors.size(); ++j) {
    RandomStream rng = make_stream(seed, {trial, role, j});
    out.push_back(aoa_estimate(tx, anchors[j], lq, rng));
  }
  return out;
}

void check_coverage(const ExperimentConfig& config, const AuthenticationScores& s, double lq_db,
                    double speed) {
  const double rate =
      s.trials == 0 ? 0.0 : static_cast<double>(s.coverage_failures) / static_cast<double>(s.trials);
  if (rate > config.sweep.max_coverage_failure) {
    throw InsufficientCoverage("coverage failure rate " + std::to_string(rate) + " at LQ " +
                               std::to_string(lq_db) + " dB, speed " + std::to_string(speed) +
                               " m/s exceeds the configured limit");
  }
}

}  // namespace

Provenance provenance_of(const ExperimentConfig& config) {
  return Provenance{config_hash(config), config.master_seed, code_version()};
}

Dataset obtain_dataset(const ExperimentConfig& config, GenerationReport* report) {
  if (!config.model.dataset_path.empty()) return read_dataset_csv(config.model.dataset_path);
  return generate_dataset(config.dataset, config.channel,
                          derive_seed(config.master_seed, {kDatasetTag}), report);
}

TrainingResult train_model(const ExperimentConfig& config, const Dataset& data,
                           RegressorKind kind) {
  RandomStream rng = make_stream(config.master_seed, {kSplitTag});
  auto [train, test] = split_dataset(data, config.model.split_ratio, rng);
  Regressor model = kind == RegressorKind::decision_tree ? fit_decision_tree(train, config.model.tree)
                                                         : fit_svr(train, config.model.svr);
  const RegressionMetrics metrics = evaluate(model, test);
  return TrainingResult{std::move(model), metrics, train.rows.size(), test.rows.size()};
}

Regressor obtain_model(const ExperimentConfig& config) {
  if (!config.model.path.empty()) return Regressor::load(config.model.path);
  return train_model(config, obtain_dataset(config), config.model.kind).model;
}

AuthenticationScores simulate_authentication(const ExperimentConfig& config,
                                             const Regressor& model, double lq_db,
                                             double speed, std::uint64_t stream_seed) {
  if (speed < 0.0 || speed > kMaxVehicleSpeed) {
    throw InvalidArgument("speed must lie within [0, 33] m/s");
  }
  ScenarioConfig sc = config.scenario;
  sc.speed = speed;
  Scenario scenario = build_road_scenario(sc);
  const LinkQuality lq{lq_db};
  const ChannelParams& channel = config.channel;
  const double dt = config.sweep.slot_duration;

  AuthenticationScores out;
  out.trials = config.sweep.trials;
  std::optional<Fix> previous;

  for (std::size_t trial = 0; trial < config.sweep.trials; ++trial) {
    const Vec2 legit_pos = scenario.legit.position;
    const Vec2 attacker_pos = attacker_step(scenario).position;
    try {
      const auto anchors = select_rsus(scenario, legit_pos, kAnchorsPerFix);
      const Measurement legit = measure(anchors, legit_pos, lq, channel, stream_seed, trial, kLegitRole);
      if (!previous) {
        ++out.warmups;
        previous = next_fix(previous, legit);
      } else {
        const Vec2 reference = model.predict(features_of(lq_db, *previous));
        const auto attacker_anchors = select_rsus(scenario, attacker_pos, kAnchorsPerFix);
        const Measurement attacker =
            measure(attacker_anchors, attacker_pos, lq, channel, stream_seed, trial,
                    kAttackerRole);
        out.ts_h0.push_back(test_statistic(legit.position, reference));
        out.ts_h1.push_back(test_statistic(attacker.position, reference));

        std::vector<double> ground;
        for (const Rsu& r : anchors) ground.push_back(true_bearing(legit_pos, r));
        out.aoa_h0.push_back(aoa_test_statistic(
            angles_from(legit_pos, anchors, lq, stream_seed, trial, kLegitAngleRole), ground));
        out.aoa_h1.push_back(aoa_test_statistic(
            angles_from(attacker_pos, anchors, lq, stream_seed, trial, kAttackerAngleRole),
            ground));
        previous = next_fix(previous, legit);
      }
    } catch (const InsufficientCoverage&) {
      ++out.coverage_failures;
      previous.reset();
    } catch (const DegenerateGeometry&) {
      ++out.coverage_failures;
      previous.reset();
    }

    VehicleState next = step_vehicle(scenario.legit, dt);
    if (next.position.x() > scenario.road_length || !within_road(scenario, next.position)) {
      next.position = sc.legit_start;
      previous.reset();
    }
    scenario.legit = next;
    scenario.attacker = attacker_step(scenario);
  }
  return out;
}

SweepOutcome run_error_sweep(const ExperimentConfig& config, const Regressor& model) {
  validate(config);
  const auto& spec = config.sweep;
  std::vector<SweepPoint> points;
  for (double lq : spec.lq_db) {
    for (double speed : spec.speeds) points.push_back(SweepPoint{lq, speed, {}});
  }
  parallel_for(points.size(), [&](std::size_t i) {
    points[i].scores = simulate_authentication(config, model, points[i].lq_db, points[i].speed,
                                               derive_seed(config.master_seed, {kSweepTag, i}));
  });
  for (const SweepPoint& p : points) check_coverage(config, p.scores, p.lq_db, p.speed);

  ResultTable table("sweep",
                    {"lq_db", "threshold", "speed", "pfa", "pmd", "pfa_baseline", "pmd_baseline"},
                    provenance_of(config));
  std::size_t base = 0;
  for (double lq : spec.lq_db) {
    for (double eps : spec.thresholds) {
      for (std::size_t s = 0; s < spec.speeds.size(); ++s) {
        const AuthenticationScores& sc = points[base + s].scores;
        const ErrorRates proposed = error_rates_at(sc.ts_h0, sc.ts_h1, eps);
        const ErrorRates baseline = error_rates_at(sc.aoa_h0, sc.aoa_h1, spec.aoa_threshold);
        table.add_row({lq, eps, spec.speeds[s], proposed.p_fa, proposed.p_md, baseline.p_fa,
                       baseline.p_md});
      }
    }
    base += spec.speeds.size();
  }
  return SweepOutcome{std::move(table), std::move(points)};
}

SweepOutcome run_error_sweep(const ExperimentConfig& config) {
  validate(config);
  return run_error_sweep(config, obtain_model(config));
}

void write_sweep_outputs(const SweepOutcome& outcome, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  outcome.table.save(dir / "sweep.csv");
  outcome.table.project("pfa_vs_lq", {"lq_db", "threshold", "speed", "pfa", "pfa_baseline"})
      .save(dir / "pfa_vs_lq.csv");
  outcome.table.project("pmd_vs_lq", {"lq_db", "threshold", "speed", "pmd", "pmd_baseline"})
      .save(dir / "pmd_vs_lq.csv");
}

std::vector<double> roc_thresholds(std::span<const double> ts_h0, std::span<const double> ts_h1,
                                   const RocSpec& spec) {
  if (ts_h0.empty() || ts_h1.empty()) throw InvalidArgument("score arrays must be non-empty");
  std::vector<double> pooled(ts_h0.begin(), ts_h0.end());
  pooled.insert(pooled.end(), ts_h1.begin(), ts_h1.end());
  std::sort(pooled.begin(), pooled.end());
  const double top = pooled.back() + 1.0;
  const std::size_t n = spec.grid_points;

  std::vector<double> grid;
  grid.reserve(n);
  grid.push_back(0.0);
  if (spec.grid == RocGrid::linear) {
    const double hi = spec.max_threshold > 0.0 ? spec.max_threshold : top;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      grid.push_back(hi * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    grid.push_back(std::max(hi, top));
  } else {
    const auto last = static_cast<double>(pooled.size() - 1);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double q = static_cast<double>(i) / static_cast<double>(n - 1);
      grid.push_back(pooled[static_cast<std::size_t>(std::lround(q * last))]);
    }
    grid.push_back(top);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

ResultTable run_roc(const ExperimentConfig& config, const Regressor& model) {
  validate(config);
  const RocSpec& spec = config.roc;
  std::vector<SweepPoint> points;
  for (double lq : spec.lq_db) {
    for (double speed : spec.speeds) points.push_back(SweepPoint{lq, speed, {}});
  }
  parallel_for(points.size(), [&](std::size_t i) {
    points[i].scores = simulate_authentication(config, model, points[i].lq_db, points[i].speed,
                                               derive_seed(config.master_seed, {kRocTag, i}));
  });
  ResultTable table("roc", {"lq_db", "speed", "threshold", "pfa", "pd"}, provenance_of(config));
  for (const SweepPoint& p : points) {
    check_coverage(config, p.scores, p.lq_db, p.speed);
    const auto grid = roc_thresholds(p.scores.ts_h0, p.scores.ts_h1, spec);
    for (const RocPoint& r : roc_sweep(p.scores.ts_h0, p.scores.ts_h1, grid)) {
      table.add_row({p.lq_db, p.speed, r.threshold, r.p_fa, r.p_d});
    }
  }
  return table;
}

ResultTable run_roc(const ExperimentConfig& config) {
  validate(config);
  return run_roc(config, obtain_model(config));
}

ResultTable run_ml_benchmark(const ExperimentConfig& config, const Dataset& data) {
  validate(config);
  ResultTable table("bench", {"model", "rmse", "mse", "mae", "r2"}, provenance_of(config));
  for (RegressorKind kind : {RegressorKind::decision_tree, RegressorKind::svr}) {
    const RegressionMetrics m = train_model(config, data, kind).test_metrics;
    table.add_row({std::string(to_string(kind)), m.rmse, m.mse, m.mae, m.r2});
  }
  return table;
}

ResultTable run_ml_benchmark(const ExperimentConfig& config) {
  validate(config);
  return run_ml_benchmark(config, obtain_dataset(config));
}

std::vector<DecisionRecord> decision_records(const AuthenticationScores& scores,
                                             double threshold) {
  std::vector<DecisionRecord> out;
  out.reserve(scores.ts_h0.size() + scores.ts_h1.size());
  for (double ts : scores.ts_h0) out.push_back(make_record(ts, threshold, Truth::legit));
  for (double ts : scores.ts_h1) out.push_back(make_record(ts, threshold, Truth::malicious));
  return out;
}

}  // namespace posauth

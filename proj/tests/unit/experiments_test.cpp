#include <gtest/gtest.h>

#include <filesystem>
#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "posauth/error.hpp"
#include "posauth/experiments.hpp"

using namespace posauth;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.master_seed = 5;
  c.model.kind = RegressorKind::decision_tree;
  c.dataset.lq_step_db = 5.0;
  c.dataset.slots_per_lq = 150;
  c.sweep.trials = 200;
  c.sweep.thresholds = {50.0};
  c.roc.grid_points = 50;
  return c;
}

const Regressor& small_model() {
  static const Regressor m = obtain_model(small_config());
  return m;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST(Experiments, SweepShapeAndRanges) {
  const SweepOutcome out = run_error_sweep(small_config(), small_model());
  ASSERT_EQ(out.table.rows().size(), 21u);
  ASSERT_EQ(out.points.size(), 21u);
  for (std::size_t i = 0; i < 21; ++i) {
    EXPECT_EQ(out.table.number(i, "lq_db"), static_cast<double>(i));
    for (const char* col : {"pfa", "pmd", "pfa_baseline", "pmd_baseline"}) {
      EXPECT_GE(out.table.number(i, col), 0.0);
      EXPECT_LE(out.table.number(i, col), 1.0);
    }
    const AuthenticationScores& s = out.points[i].scores;
    EXPECT_EQ(s.trials, 200u);
    EXPECT_EQ(s.ts_h0.size() + s.coverage_failures + s.warmups, s.trials);
    EXPECT_GE(s.warmups, 1u);
    EXPECT_EQ(s.ts_h0.size(), s.ts_h1.size());
    EXPECT_EQ(s.aoa_h0.size(), s.aoa_h1.size());
  }
}

TEST(Experiments, SweepIsDeterministic) {
  ExperimentConfig c = small_config();
  c.sweep.lq_db = {3.0, 17.0};
  const auto a = run_error_sweep(c, small_model());
  const auto b = run_error_sweep(c, small_model());
  std::ostringstream sa, sb;
  a.table.write_csv(sa);
  b.table.write_csv(sb);
  EXPECT_EQ(sa.str(), sb.str());
  c.master_seed = 6;
  std::ostringstream sc;
  run_error_sweep(c, small_model()).table.write_csv(sc);
  EXPECT_NE(sa.str(), sc.str());
}

TEST(Experiments, SweepFilesAndProjections) {
  ExperimentConfig c = small_config();
  c.sweep.lq_db = {0.0, 10.0};
  c.sweep.thresholds = {5.0, 500.0};
  const auto dir = std::filesystem::temp_directory_path() / "posauth_experiments_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  write_sweep_outputs(run_error_sweep(c, small_model()), dir);
  const std::string sweep = read_file(dir / "sweep.csv");
  EXPECT_EQ(sweep.substr(0, sweep.find('\n')), kSweepCsvHeader);
  const std::string pfa = read_file(dir / "pfa_vs_lq.csv");
  EXPECT_EQ(pfa.substr(0, pfa.find('\n')), "lq_db,threshold,speed,pfa,pfa_baseline");
  const std::string pmd = read_file(dir / "pmd_vs_lq.csv");
  EXPECT_EQ(pmd.substr(0, pmd.find('\n')), "lq_db,threshold,speed,pmd,pmd_baseline");
  EXPECT_TRUE(std::filesystem::exists(dir / "sweep.meta.json"));
  std::filesystem::remove_all(dir);
}

TEST(Experiments, CoverageAbort) {
  ExperimentConfig c = small_config();
  c.scenario.rsu_spacing = 1500.0;
  c.sweep.lq_db = {10.0};
  EXPECT_THROW(run_error_sweep(c, small_model()), InsufficientCoverage);
}

TEST(Experiments, RocThresholdGrid) {
  const std::vector<double> h0{0.5, 1.0, 2.0, 2.0};
  const std::vector<double> h1{3.0, 4.0};
  RocSpec spec;
  spec.grid_points = 200;
  const auto q = roc_thresholds(h0, h1, spec);
  EXPECT_EQ(q.front(), 0.0);
  EXPECT_EQ(q.back(), 5.0);
  EXPECT_TRUE(std::is_sorted(q.begin(), q.end()));
  EXPECT_EQ(std::adjacent_find(q.begin(), q.end()), q.end());
  EXPECT_LE(q.size(), 200u);
  spec.grid = RocGrid::linear;
  spec.grid_points = 11;
  const auto lin = roc_thresholds(h0, h1, spec);
  ASSERT_EQ(lin.size(), 11u);
  EXPECT_DOUBLE_EQ(lin[1], 0.5);
}

TEST(Experiments, RocEndpoints) {
  const ResultTable roc = run_roc(small_config(), small_model());
  std::map<std::pair<double, double>, std::vector<std::size_t>> curves;
  for (std::size_t i = 0; i < roc.rows().size(); ++i) {
    curves[{roc.number(i, "lq_db"), roc.number(i, "speed")}].push_back(i);
  }
  ASSERT_EQ(curves.size(), 2u);
  for (const auto& [key, rows] : curves) {
    EXPECT_LE(rows.size(), 50u);
    EXPECT_EQ(roc.number(rows.front(), "pfa"), 1.0);
    EXPECT_EQ(roc.number(rows.front(), "pd"), 1.0);
    EXPECT_EQ(roc.number(rows.back(), "pfa"), 0.0);
    EXPECT_EQ(roc.number(rows.back(), "pd"), 0.0);
  }
}

TEST(Experiments, BenchmarkRows) {
  ExperimentConfig c = small_config();
  const ResultTable t = run_ml_benchmark(c);
  ASSERT_EQ(t.rows().size(), 2u);
  EXPECT_EQ(t.text(0, "model"), "dt");
  EXPECT_EQ(t.text(1, "model"), "svr");
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_NEAR(t.number(i, "mse"), t.number(i, "rmse") * t.number(i, "rmse"),
                1e-9 * t.number(i, "mse"));
    EXPECT_LE(t.number(i, "mae"), t.number(i, "rmse"));
  }
}

TEST(Experiments, DecisionRecordsOrder) {
  AuthenticationScores s;
  s.ts_h0 = {1.0, 3.0};
  s.ts_h1 = {2.0};
  const auto recs = decision_records(s, 2.0);
  ASSERT_EQ(recs.size(), 3u);
  EXPECT_EQ(recs[0].truth, Truth::legit);
  EXPECT_EQ(recs[1].decision, Hypothesis::h1);
  EXPECT_EQ(recs[2].truth, Truth::malicious);
  EXPECT_EQ(recs[2].decision, Hypothesis::h1);
}

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "oracles.hpp"
#include "posauth/authenticator.hpp"
#include "posauth/error.hpp"

using namespace posauth;

TEST(TestStatistic, Basics) {
  EXPECT_EQ(test_statistic(Vec2(1, 1), Vec2(1, 1)), 0.0);
  EXPECT_DOUBLE_EQ(test_statistic(Vec2(4, 5), Vec2(1, 1)), 5.0);
  EXPECT_EQ(test_statistic(Vec2(-2, 7), Vec2(3, 1)), test_statistic(Vec2(3, 1), Vec2(-2, 7)));
}

TEST(Decide, BranchesAndTie) {
  EXPECT_EQ(decide(0.1, 2.0), Hypothesis::h0);
  EXPECT_EQ(decide(5.0, 2.0), Hypothesis::h1);
  EXPECT_EQ(decide(2.0, 2.0), Hypothesis::h1);
  EXPECT_THROW(decide(1.0, -0.1), InvalidArgument);
}

TEST(Decide, PropertyMonotone) {
  RandomStream rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double eps = uniform(rng, 0, 10);
    const double ts = uniform(rng, 0, 10);
    if (decide(ts, eps) == Hypothesis::h1) {
      EXPECT_EQ(decide(ts + uniform(rng, 0, 5), eps), Hypothesis::h1);
    }
  }
}

TEST(EmpiricalErrorRates, LimitThresholds) {
  std::vector<DecisionRecord> records;
  const std::vector<double> ts{0.0, 0.5, 3.0, 7.0};
  for (double t : ts) records.push_back(make_record(t, 100.0, Truth::legit));
  for (double t : ts) records.push_back(make_record(t, 100.0, Truth::malicious));
  ErrorRates r = empirical_error_rates(records);
  EXPECT_EQ(r.p_fa, 0.0);
  EXPECT_EQ(r.p_md, 1.0);
  EXPECT_EQ(r.n_h0, 4u);
  EXPECT_EQ(r.n_h1, 4u);
  for (auto& rec : records) rec = make_record(rec.test_statistic, 0.0, rec.truth);
  r = empirical_error_rates(records);
  EXPECT_EQ(r.p_fa, 1.0);
  EXPECT_EQ(r.p_md, 0.0);
}

TEST(EmpiricalErrorRates, Counting) {
  const std::vector<DecisionRecord> records{
      make_record(1.0, 2.0, Truth::legit), make_record(3.0, 2.0, Truth::legit),
      make_record(0.5, 2.0, Truth::legit), make_record(2.5, 2.0, Truth::malicious),
      make_record(1.5, 2.0, Truth::malicious)};
  const ErrorRates r = empirical_error_rates(records);
  EXPECT_DOUBLE_EQ(r.p_fa, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.p_md, 0.5);
  const std::vector<DecisionRecord> one_class{make_record(1.0, 2.0, Truth::legit)};
  EXPECT_THROW(empirical_error_rates(one_class), InvalidArgument);
}

TEST(ErrorRatesAt, AgreesWithRecords) {
  RandomStream rng(2);
  std::vector<double> h0, h1;
  for (int i = 0; i < 500; ++i) {
    h0.push_back(std::abs(standard_normal(rng)));
    h1.push_back(std::abs(2.0 + standard_normal(rng)));
  }
  for (double eps : {0.0, 0.3, 1.0, 2.2, 9.0}) {
    std::vector<DecisionRecord> recs;
    for (double t : h0) recs.push_back(make_record(t, eps, Truth::legit));
    for (double t : h1) recs.push_back(make_record(t, eps, Truth::malicious));
    const ErrorRates a = empirical_error_rates(recs);
    const ErrorRates b = error_rates_at(h0, h1, eps);
    EXPECT_EQ(a.p_fa, b.p_fa);
    EXPECT_EQ(a.p_md, b.p_md);
  }
}

TEST(RocSweep, EndpointsAndStaircase) {
  RandomStream rng(3);
  std::vector<double> h0, h1;
  for (int i = 0; i < 300; ++i) {
    h0.push_back(std::abs(standard_normal(rng)));
    h1.push_back(std::abs(1.0 + standard_normal(rng)));
  }
  const double top = std::max(*std::max_element(h0.begin(), h0.end()), *std::max_element(h1.begin(), h1.end()));
  std::vector<double> grid;
  for (int k = 0; k <= 100; ++k) grid.push_back((top + 1.0) * k / 100.0);
  const auto roc = roc_sweep(h0, h1, grid);
  ASSERT_EQ(roc.size(), grid.size());
  EXPECT_EQ(roc.front().p_fa, 1.0);
  EXPECT_EQ(roc.front().p_d, 1.0);
  EXPECT_EQ(roc.back().p_fa, 0.0);
  EXPECT_EQ(roc.back().p_d, 0.0);
  for (std::size_t k = 1; k < roc.size(); ++k) {
    EXPECT_LE(roc[k].p_fa, roc[k - 1].p_fa);
    EXPECT_LE(roc[k].p_d, roc[k - 1].p_d);
    const ErrorRates r = error_rates_at(h0, h1, grid[k]);
    EXPECT_EQ(roc[k].p_fa, r.p_fa);
    EXPECT_NEAR(roc[k].p_d, 1.0 - r.p_md, 1e-12);
  }
  const std::vector<double> unsorted{1.0, 0.5};
  EXPECT_THROW(roc_sweep(h0, h1, unsorted), InvalidArgument);
}

TEST(RocSweep, ZeroOffsetIndistinguishable) {
  RandomStream rng(4);
  std::vector<double> h0, h1;
  for (int i = 0; i < 20000; ++i) {
    h0.push_back(std::abs(standard_normal(rng)));
    h1.push_back(std::abs(standard_normal(rng)));
  }
  for (double eps : {0.2, 0.7, 1.5}) {
    const ErrorRates r = error_rates_at(h0, h1, eps);
    EXPECT_NEAR(r.p_fa, 1.0 - r.p_md, 0.02);
  }
}

TEST(Aoa, GeometryAndWrap) {
  const Rsu rsu{0, Vec2(0, 0)};
  EXPECT_DOUBLE_EQ(true_bearing(Vec2(1, 1), rsu), std::numbers::pi / 4);
  EXPECT_THROW(true_bearing(Vec2(0, 0), rsu), InvalidArgument);
  EXPECT_DOUBLE_EQ(wrap_angle(std::numbers::pi), std::numbers::pi);
  EXPECT_DOUBLE_EQ(wrap_angle(-std::numbers::pi), std::numbers::pi);
  EXPECT_NEAR(wrap_angle(3 * std::numbers::pi / 2), -std::numbers::pi / 2, 1e-12);
  RandomStream rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double a = aoa_estimate(Vec2(-1, 1e-9), rsu, {30.0}, rng);
    EXPECT_GT(a, -std::numbers::pi);
    EXPECT_LE(a, std::numbers::pi);
  }
}

TEST(Aoa, NoiseVariance) {
  const Rsu rsu{0, Vec2(0, 0)};
  RandomStream rng(6);
  for (double lq_db : {5.0, 15.0}) {
    std::vector<double> draws;
    for (int i = 0; i < 100000; ++i) draws.push_back(aoa_estimate(Vec2(10, 0), rsu, {lq_db}, rng));
    EXPECT_NEAR(oracle::variance(draws) / (1.0 / (2.0 * std::pow(10.0, lq_db / 10.0))), 1.0, 0.05);
  }
}

TEST(Aoa, DecideArithmetic) {
  const std::vector<double> ground{0.1, -0.2, 1.0};
  EXPECT_EQ(aoa_test_statistic(ground, ground), 0.0);
  EXPECT_EQ(aoa_decide(ground, ground, 0.01), Hypothesis::h0);
  const std::vector<double> moved{0.4, -0.2, 1.4};
  EXPECT_NEAR(aoa_test_statistic(moved, ground), 0.5, 1e-12);
  EXPECT_EQ(aoa_decide(moved, ground, 0.4), Hypothesis::h1);
  const std::vector<double> wrapped{std::numbers::pi - 0.1};
  const std::vector<double> across{-std::numbers::pi + 0.1};
  EXPECT_NEAR(aoa_test_statistic(wrapped, across), 0.2, 1e-12);
  EXPECT_THROW(aoa_test_statistic(ground, wrapped), InvalidArgument);
}

TEST(Aoa, OneMeterBehindIsSubDegree) {
  for (const Vec2 rsu_pos : {Vec2(100, 0), Vec2(400, 20), Vec2(0, 0)}) {
    const Rsu rsu{0, rsu_pos};
    const Vec2 legit(201, 10);
    const double sep = std::abs(wrap_angle(true_bearing(legit, rsu) - true_bearing(legit - Vec2(1, 0), rsu)));
    EXPECT_LT(sep, 0.6 * std::numbers::pi / 180.0);
  }
}

TEST(DecisionLog, Format) {
  const std::vector<DecisionRecord> recs{make_record(1.5, 2.0, Truth::legit),
                                         make_record(2.0, 2.0, Truth::malicious)};
  std::ostringstream out;
  write_decision_log(out, recs);
  EXPECT_EQ(out.str(), "trial,truth,ts,threshold,decision\n0,legit,1.5,2,H0\n1,malicious,2,2,H1\n");
}

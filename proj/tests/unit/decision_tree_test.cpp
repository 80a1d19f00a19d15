#include <gtest/gtest.h>

#include <limits>
#include <map>

#include "posauth/decision_tree.hpp"
#include "posauth/error.hpp"
#include "posauth/random.hpp"

using namespace posauth;

namespace {

FeatureMatrix column(const std::vector<double>& v) {
  FeatureMatrix x(static_cast<Eigen::Index>(v.size()), 1);
  for (std::size_t i = 0; i < v.size(); ++i) x(static_cast<Eigen::Index>(i), 0) = v[i];
  return x;
}

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double sse = std::numeric_limits<double>::infinity();
};

// Every midpoint of every feature, scored from scratch.
Split brute_force_root(const FeatureMatrix& x, const std::vector<double>& y, std::size_t min_leaf) {
  Split best;
  for (Eigen::Index f = 0; f < x.cols(); ++f) {
    std::vector<double> values(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) values[i] = x(i, f);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t k = 0; k + 1 < values.size(); ++k) {
      const double t = 0.5 * (values[k] + values[k + 1]);
      double sl = 0, sr = 0, ql = 0, qr = 0;
      std::size_t nl = 0, nr = 0;
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double v = y[i];
        if (x(i, f) <= t) { sl += v; ql += v * v; ++nl; } else { sr += v; qr += v * v; ++nr; }
      }
      if (nl < min_leaf || nr < min_leaf) continue;
      const double sse = (ql - sl * sl / nl) + (qr - sr * sr / nr);
      if (sse < best.sse - 1e-9) best = {static_cast<int>(f), t, sse};
    }
  }
  return best;
}

}  // namespace

TEST(RegressionTree, ConstantLabelsGiveSingleLeaf) {
  const FeatureMatrix x = column({1, 2, 3, 4, 5, 6});
  const std::vector<double> y(6, 7.5);
  const RegressionTree t = RegressionTree::fit(x, y, {20, 1});
  ASSERT_EQ(t.nodes().size(), 1u);
  EXPECT_TRUE(t.nodes()[0].is_leaf());
  for (double v : {0.0, 3.0, 100.0}) EXPECT_EQ(t.predict(std::vector<double>{v}), 7.5);
}

TEST(RegressionTree, SeparableStep) {
  std::vector<double> xs, ys;
  for (int i = 0; i < 10; ++i) {
    xs.push_back(i);
    ys.push_back(i < 5 ? 0.0 : 10.0);
  }
  const RegressionTree t = RegressionTree::fit(column(xs), ys, {20, 1});
  const auto& root = t.nodes()[0];
  ASSERT_FALSE(root.is_leaf());
  EXPECT_GT(root.threshold, 4.0);
  EXPECT_LE(root.threshold, 5.0);
  for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_EQ(t.predict(std::vector<double>{xs[i]}), ys[i]);
  EXPECT_EQ(t.depth(), 1u);
}

TEST(RegressionTree, RootSplitMatchesBruteForce) {
  RandomStream rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    FeatureMatrix x(60, 3);
    std::vector<double> y;
    for (Eigen::Index i = 0; i < 60; ++i) {
      for (Eigen::Index f = 0; f < 3; ++f) x(i, f) = std::round(uniform(rng, 0, 50));
      y.push_back(std::sin(x(i, 0) / 8.0) + 0.3 * x(i, 2) / 50.0 + 0.1 * standard_normal(rng));
    }
    const Split expected = brute_force_root(x, y, 5);
    const RegressionTree t = RegressionTree::fit(x, y, {1, 5});
    const auto& root = t.nodes()[0];
    ASSERT_FALSE(root.is_leaf());
    EXPECT_EQ(root.feature, expected.feature);
    EXPECT_DOUBLE_EQ(root.threshold, expected.threshold);
  }
}

TEST(RegressionTree, PropertyLeafMeansAndLimits) {
  RandomStream rng(12);
  FeatureMatrix x(400, 4);
  std::vector<double> y;
  for (Eigen::Index i = 0; i < 400; ++i) {
    for (Eigen::Index f = 0; f < 4; ++f) x(i, f) = uniform(rng, -1, 1);
    y.push_back(x(i, 0) * x(i, 1) + standard_normal(rng) * 0.05);
  }
  const TreeParams params{6, 7};
  const RegressionTree t = RegressionTree::fit(x, y, params);
  EXPECT_LE(t.depth(), 6u);
  std::map<std::size_t, std::pair<double, std::size_t>> per_leaf;
  for (Eigen::Index i = 0; i < 400; ++i) {
    const std::vector<double> f(x.row(i).begin(), x.row(i).end());
    const std::size_t leaf = t.leaf_index(f);
    ASSERT_TRUE(t.nodes()[leaf].is_leaf());
    EXPECT_EQ(t.predict(f), t.nodes()[leaf].value);
    per_leaf[leaf].first += y[static_cast<std::size_t>(i)];
    per_leaf[leaf].second += 1;
  }
  for (const auto& [leaf, acc] : per_leaf) {
    EXPECT_GE(acc.second, params.min_leaf);
    EXPECT_EQ(acc.second, t.nodes()[leaf].samples);
    EXPECT_NEAR(t.nodes()[leaf].value, acc.first / static_cast<double>(acc.second), 1e-12);
  }
}

TEST(RegressionTree, Errors) {
  const FeatureMatrix x = column({1, 2});
  EXPECT_THROW(RegressionTree::fit(x, std::vector<double>{1.0}, {}), InvalidArgument);
  const RegressionTree t = RegressionTree::fit(x, std::vector<double>{1.0, 2.0}, {});
  EXPECT_THROW(t.predict(std::vector<double>{1.0, 2.0}), InvalidArgument);
  EXPECT_THROW(RegressionTree({}, 1), InvalidArgument);
}

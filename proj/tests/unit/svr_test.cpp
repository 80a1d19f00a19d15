#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "posauth/error.hpp"
#include "posauth/random.hpp"
#include "posauth/svr.hpp"

using namespace posauth;

namespace {

// Maximal KKT violation recomputed from the dual coefficients alone.
double kkt_violation(const FeatureMatrix& x, const std::vector<double>& y,
                     const std::vector<double>& beta, const SvrParams& p, double gamma) {
  const auto n = static_cast<std::size_t>(x.rows());
  std::vector<double> f(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (beta[j] == 0.0) continue;
      const std::vector<double> a(x.row(static_cast<Eigen::Index>(i)).begin(), x.row(static_cast<Eigen::Index>(i)).end());
      const std::vector<double> b(x.row(static_cast<Eigen::Index>(j)).begin(), x.row(static_cast<Eigen::Index>(j)).end());
      f[i] += beta[j] * kernel_value(p.kernel, gamma, a, b);
    }
  }
  double up = -1e300, low = 1e300;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::max(beta[i], 0.0);
    const double as = std::max(-beta[i], 0.0);
    const double g = f[i] + p.epsilon - y[i];   // alpha, y = +1
    const double gs = -f[i] + p.epsilon + y[i]; // alpha*, y = -1
    if (a < p.c) up = std::max(up, -g);
    if (a > 0) low = std::min(low, -g);
    if (as > 0) up = std::max(up, gs);
    if (as < p.c) low = std::min(low, gs);
  }
  return up - low;
}

}  // namespace

TEST(Svr, RecoversExactLine) {
  RandomStream rng(1);
  FeatureMatrix x(80, 2);
  std::vector<double> y;
  for (Eigen::Index i = 0; i < 80; ++i) {
    x(i, 0) = uniform(rng, -2, 2);
    x(i, 1) = uniform(rng, -2, 2);
    y.push_back(2.0 * x(i, 0));
  }
  SvrParams p;
  p.epsilon = 0.01;
  p.c = 100.0;
  p.tolerance = 1e-6;
  const SvrModel m = SvrModel::fit(x, y, p);
  // Every training point sits inside the tube; the flattest such line has a
  // slope just under 2.
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const std::vector<double> row{x(i, 0), x(i, 1)};
    EXPECT_NEAR(m.predict(row), y[static_cast<std::size_t>(i)], p.epsilon + 1e-4);
  }
  ASSERT_EQ(m.weights().size(), 2u);
  EXPECT_NEAR(m.weights()[0], 2.0, p.epsilon);
  EXPECT_LE(m.weights()[0], 2.0);
  EXPECT_NEAR(m.weights()[1], 0.0, p.epsilon);
}

TEST(Svr, ConstantLabels) {
  FeatureMatrix x(20, 1);
  for (Eigen::Index i = 0; i < 20; ++i) x(i, 0) = static_cast<double>(i) / 10.0;
  const std::vector<double> y(20, 0.05);
  SvrFitInfo info;
  const SvrModel m = SvrModel::fit(x, y, SvrParams{}, &info);
  for (double beta : info.dual_coefficients) EXPECT_EQ(beta, 0.0);
  for (Eigen::Index i = 0; i < 20; ++i) {
    EXPECT_NEAR(m.predict(std::vector<double>{x(i, 0)}), 0.05, 0.1);
  }
}

TEST(Svr, PropertyKktAndBoxAfterFit) {
  RandomStream rng(2);
  for (KernelType kernel : {KernelType::linear, KernelType::rbf}) {
    FeatureMatrix x(120, 3);
    std::vector<double> y;
    for (Eigen::Index i = 0; i < 120; ++i) {
      for (Eigen::Index k = 0; k < 3; ++k) x(i, k) = standard_normal(rng);
      y.push_back(std::sin(x(i, 0)) + 0.5 * x(i, 1) + 0.3 * standard_normal(rng));
    }
    SvrParams p;
    p.kernel = kernel;
    SvrFitInfo info;
    SvrModel::fit(x, y, p, &info);
    EXPECT_LE(info.kkt_violation, p.tolerance);
    for (double beta : info.dual_coefficients) {
      EXPECT_GE(beta, -p.c);
      EXPECT_LE(beta, p.c);
    }
    const double gamma = 1.0 / 3.0;
    EXPECT_LE(kkt_violation(x, y, info.dual_coefficients, p, gamma), p.tolerance + 1e-9);
  }
}

TEST(Svr, RbfFitsNonlinearFunction) {
  RandomStream rng(3);
  FeatureMatrix x(200, 1);
  std::vector<double> y;
  for (Eigen::Index i = 0; i < 200; ++i) {
    x(i, 0) = uniform(rng, -3, 3);
    y.push_back(std::sin(2.0 * x(i, 0)));
  }
  SvrParams p;
  p.kernel = KernelType::rbf;
  p.gamma = 2.0;
  p.c = 10.0;
  p.epsilon = 0.05;
  const SvrModel m = SvrModel::fit(x, y, p);
  for (double v : {-2.0, -0.5, 0.4, 1.3}) {
    EXPECT_NEAR(m.predict(std::vector<double>{v}), std::sin(2.0 * v), 0.1);
  }
}

TEST(Svr, IterationBudgetRaisesNonConvergence) {
  RandomStream rng(4);
  FeatureMatrix x(100, 2);
  std::vector<double> y;
  for (Eigen::Index i = 0; i < 100; ++i) {
    x(i, 0) = standard_normal(rng);
    x(i, 1) = standard_normal(rng);
    y.push_back(x(i, 0) - x(i, 1) + standard_normal(rng));
  }
  SvrParams p;
  p.max_iterations = 3;
  try {
    SvrModel::fit(x, y, p);
    FAIL() << "expected NonConvergence";
  } catch (const NonConvergence& e) {
    EXPECT_GT(e.kkt_violation(), p.tolerance);
  }
}

TEST(Svr, Preconditions) {
  FeatureMatrix x(2, 1);
  x << 0, 1;
  EXPECT_THROW(SvrModel::fit(x, std::vector<double>{1.0}, {}), InvalidArgument);
  SvrParams p;
  p.c = 0.0;
  EXPECT_THROW(SvrModel::fit(x, std::vector<double>{1.0, 2.0}, p), InvalidArgument);
  const SvrModel m = SvrModel::fit(x, std::vector<double>{1.0, 2.0}, {});
  EXPECT_THROW(m.predict(std::vector<double>{1.0, 2.0}), InvalidArgument);
}

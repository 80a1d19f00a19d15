#include "posauth/metrics.hpp"

#include <cmath>
#include <vector>

#include "posauth/error.hpp"

namespace posauth {

RegressionMetrics compute_metrics(std::span<const Vec2> actual, std::span<const Vec2> predicted) {
  if (actual.empty() || actual.size() != predicted.size()) {
    throw InvalidArgument("metrics need equal-length, non-empty prediction sets");
  }
  const double n = static_cast<double>(actual.size());
  Vec2 mean = Vec2::Zero();
  for (const Vec2& p : actual) mean += p;
  mean /= n;

  double abs_sum = 0.0;
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const Vec2 e = actual[i] - predicted[i];
    abs_sum += e.cwiseAbs().sum();
    ss_res += e.squaredNorm();
    ss_tot += (actual[i] - mean).squaredNorm();
  }
  if (!(ss_tot > 0.0)) {
    throw UndefinedMetric("R^2 is undefined: the actual positions have zero spread");
  }
  RegressionMetrics m;
  m.mae = abs_sum / (2.0 * n);
  m.mse = ss_res / (2.0 * n);
  m.rmse = std::sqrt(m.mse);
  m.r2 = 1.0 - ss_res / ss_tot;
  return m;
}

RegressionMetrics evaluate(const Regressor& model, const Dataset& test) {
  if (test.rows.empty()) throw InvalidArgument("cannot evaluate on an empty test set");
  std::vector<Vec2> actual;
  std::vector<Vec2> predicted;
  actual.reserve(test.rows.size());
  predicted.reserve(test.rows.size());
  for (const FeatureRow& row : test.rows) {
    const FeatureVector f = row.features();
    actual.push_back(row.label_next_position);
    predicted.push_back(model.predict(f));
  }
  return compute_metrics(actual, predicted);
}

}  // namespace posauth

#pragma once

#include <span>

#include "posauth/dataset.hpp"
#include "posauth/regressor.hpp"

namespace posauth {

struct RegressionMetrics {
  double mae = 0.0;
  double mse = 0.0;
  double rmse = 0.0;
  double r2 = 0.0;
};

/// Position-error metrics pooled over both coordinates:
///   MAE = sum |p - q|_1 / (2n),  MSE = sum |p - q|_2^2 / (2n),
///   R^2 = 1 - SS_res / SS_tot,  SS_tot = sum |p - mean(p)|_2^2.
/// Throws UndefinedMetric when SS_tot is zero.
RegressionMetrics compute_metrics(std::span<const Vec2> actual, std::span<const Vec2> predicted);

RegressionMetrics evaluate(const Regressor& model, const Dataset& test);

}  // namespace posauth

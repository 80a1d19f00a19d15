#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "posauth/decision_tree.hpp"  // FeatureMatrix

namespace posauth {

enum class KernelType { linear, rbf };

struct SvrParams {
  double c = 1.0;
  double epsilon = 0.1;
  KernelType kernel = KernelType::linear;
  /// RBF width; 0 selects 1 / feature_count.
  double gamma = 0.0;
  /// Stop when the maximal violating pair gap falls to this value.
  double tolerance = 1e-3;
  /// 0 selects max(10^7, 100 * n).
  std::size_t max_iterations = 0;
};

struct SvrFitInfo {
  std::size_t iterations = 0;
  /// Final maximal violating pair gap m(alpha) - M(alpha).
  double kkt_violation = 0.0;
  /// beta_i = alpha_i - alpha*_i for every training sample, in [-C, C].
  std::vector<double> dual_coefficients;
};

double kernel_value(KernelType kernel, double gamma, std::span<const double> a,
                    std::span<const double> b);

/// Epsilon-insensitive support vector regression,
///   f(x) = sum_i beta_i k(x_i, x) + bias.
class SvrModel {
 public:
  SvrModel() = default;
  SvrModel(KernelType kernel, double gamma, FeatureMatrix support_vectors,
           std::vector<double> coefficients, double bias);
  /// Linear model stored by its primal weights only.
  SvrModel(std::vector<double> weights, double bias);

  /// Solves the dual with sequential minimal optimization: the working pair
  /// is chosen by maximal violation with second-order gain and updated
  /// analytically, the gradient is refreshed, and the loop stops when the
  /// violating-pair gap is within tolerance. Throws NonConvergence with the
  /// final gap if the iteration budget runs out.
  static SvrModel fit(const FeatureMatrix& x, std::span<const double> y, const SvrParams& params,
                      SvrFitInfo* info = nullptr);

  double predict(std::span<const double> features) const;

  KernelType kernel() const { return kernel_; }
  double gamma() const { return gamma_; }
  double bias() const { return bias_; }
  const FeatureMatrix& support_vectors() const { return support_vectors_; }
  const std::vector<double>& coefficients() const { return coefficients_; }
  /// Primal weights; populated for the linear kernel.
  const std::vector<double>& weights() const { return weights_; }

 private:
  KernelType kernel_ = KernelType::linear;
  double gamma_ = 0.0;
  FeatureMatrix support_vectors_;
  std::vector<double> coefficients_;
  std::vector<double> weights_;
  double bias_ = 0.0;
};

}  // namespace posauth

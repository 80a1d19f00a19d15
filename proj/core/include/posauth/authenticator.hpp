#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "posauth/channel.hpp"
#include "posauth/random.hpp"
#include "posauth/scenario.hpp"

namespace posauth {

enum class Hypothesis { h0, h1 };  // h0: legitimate, h1: impersonation
enum class Truth { legit, malicious };

struct DecisionRecord {
  double test_statistic = 0.0;
  double threshold = 0.0;
  Hypothesis decision = Hypothesis::h0;
  Truth truth = Truth::legit;
};

struct ErrorRates {
  double p_fa = 0.0;
  double p_md = 0.0;
  std::size_t n_h0 = 0;
  std::size_t n_h1 = 0;
};

struct RocPoint {
  double threshold = 0.0;
  double p_fa = 0.0;
  double p_d = 0.0;
};

/// Euclidean distance between the estimated position and the tracker's
/// predicted ground truth.
double test_statistic(const Vec2& p_hat, const Vec2& p_ground);

/// H1 when ts >= threshold (equality is treated as an attack), else H0.
Hypothesis decide(double ts, double threshold);

DecisionRecord make_record(double ts, double threshold, Truth truth);

/// Empirical false-alarm and missed-detection frequencies. Throws
/// InvalidArgument unless both classes are present.
ErrorRates empirical_error_rates(std::span<const DecisionRecord> records);

/// Error rates of the thresholded test over fixed score arrays.
ErrorRates error_rates_at(std::span<const double> ts_h0, std::span<const double> ts_h1,
                          double threshold);

/// One ROC point per threshold (thresholds must be ascending) from the same
/// score arrays. p_fa and p_d are non-increasing in the threshold.
std::vector<RocPoint> roc_sweep(std::span<const double> ts_h0, std::span<const double> ts_h1,
                                std::span<const double> thresholds);

/// Wraps an angle to (-pi, pi].
double wrap_angle(double angle);

/// Bearing from an RSU to the transmitter.
double true_bearing(const Vec2& tx, const Rsu& rsu);

/// Noisy bearing for the angle-of-arrival baseline: true bearing plus
/// Gaussian noise of variance 1 / (2 LQ_linear), wrapped to (-pi, pi].
double aoa_estimate(const Vec2& tx, const Rsu& rsu, LinkQuality lq, RandomStream& rng);

/// l2 norm of the wrapped angular differences.
double aoa_test_statistic(std::span<const double> angles, std::span<const double> ground_angles);

Hypothesis aoa_decide(std::span<const double> angles, std::span<const double> ground_angles,
                      double threshold);

inline constexpr const char* kDecisionLogHeader = "trial,truth,ts,threshold,decision";

/// CSV decision log; trial indices are the record positions.
void write_decision_log(std::ostream& out, std::span<const DecisionRecord> records);
void write_decision_log(const std::filesystem::path& path,
                        std::span<const DecisionRecord> records);

}  // namespace posauth

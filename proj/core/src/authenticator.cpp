#include "posauth/authenticator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <string>

#include "posauth/error.hpp"
#include "posauth/text.hpp"

namespace posauth {

double test_statistic(const Vec2& p_hat, const Vec2& p_ground) { return (p_hat - p_ground).norm(); }

Hypothesis decide(double ts, double threshold) {
  if (threshold < 0.0) throw InvalidArgument("threshold must be non-negative");
  return ts >= threshold ? Hypothesis::h1 : Hypothesis::h0;
}

DecisionRecord make_record(double ts, double threshold, Truth truth) {
  return DecisionRecord{ts, threshold, decide(ts, threshold), truth};
}

ErrorRates empirical_error_rates(std::span<const DecisionRecord> records) {
  ErrorRates r;
  std::size_t false_alarms = 0;
  std::size_t misses = 0;
  for (const DecisionRecord& rec : records) {
    if (rec.truth == Truth::legit) {
      ++r.n_h0;
      if (rec.decision == Hypothesis::h1) ++false_alarms;
    } else {
      ++r.n_h1;
      if (rec.decision == Hypothesis::h0) ++misses;
    }
  }
  if (r.n_h0 == 0 || r.n_h1 == 0) {
    throw InvalidArgument("error rates need at least one legitimate and one malicious record");
  }
  r.p_fa = static_cast<double>(false_alarms) / static_cast<double>(r.n_h0);
  r.p_md = static_cast<double>(misses) / static_cast<double>(r.n_h1);
  return r;
}

namespace {

std::size_t count_at_least(const std::vector<double>& sorted, double threshold) {
  return static_cast<std::size_t>(sorted.end() -
                                  std::lower_bound(sorted.begin(), sorted.end(), threshold));
}

}  // namespace

ErrorRates error_rates_at(std::span<const double> ts_h0, std::span<const double> ts_h1,
                          double threshold) {
  if (ts_h0.empty() || ts_h1.empty()) throw InvalidArgument("score arrays must be non-empty");
  if (threshold < 0.0) throw InvalidArgument("threshold must be non-negative");
  std::size_t fa = 0;
  for (double t : ts_h0) fa += t >= threshold ? 1 : 0;
  std::size_t md = 0;
  for (double t : ts_h1) md += t < threshold ? 1 : 0;
  ErrorRates r;
  r.n_h0 = ts_h0.size();
  r.n_h1 = ts_h1.size();
  r.p_fa = static_cast<double>(fa) / static_cast<double>(r.n_h0);
  r.p_md = static_cast<double>(md) / static_cast<double>(r.n_h1);
  return r;
}

std::vector<RocPoint> roc_sweep(std::span<const double> ts_h0, std::span<const double> ts_h1,
                                std::span<const double> thresholds) {
  if (ts_h0.empty() || ts_h1.empty()) throw InvalidArgument("score arrays must be non-empty");
  if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
    throw InvalidArgument("ROC thresholds must be sorted ascending");
  }
  std::vector<double> h0(ts_h0.begin(), ts_h0.end());
  std::vector<double> h1(ts_h1.begin(), ts_h1.end());
  std::sort(h0.begin(), h0.end());
  std::sort(h1.begin(), h1.end());
  const auto n0 = static_cast<double>(h0.size());
  const auto n1 = static_cast<double>(h1.size());
  std::vector<RocPoint> out;
  out.reserve(thresholds.size());
  for (double eps : thresholds) {
    out.push_back(RocPoint{eps, static_cast<double>(count_at_least(h0, eps)) / n0,
                           static_cast<double>(count_at_least(h1, eps)) / n1});
  }
  return out;
}

double wrap_angle(double angle) {
  double r = std::remainder(angle, 2.0 * std::numbers::pi);
  if (r <= -std::numbers::pi) r += 2.0 * std::numbers::pi;
  return r;
}

double true_bearing(const Vec2& tx, const Rsu& rsu) {
  const Vec2 d = tx - rsu.position;
  if (d.x() == 0.0 && d.y() == 0.0) {
    throw InvalidArgument("bearing is undefined for a transmitter at the RSU position");
  }
  return std::atan2(d.y(), d.x());
}

double aoa_estimate(const Vec2& tx, const Rsu& rsu, LinkQuality lq, RandomStream& rng) {
  const double bearing = true_bearing(tx, rsu);
  const double sigma = std::sqrt(1.0 / (2.0 * lq.linear()));
  return wrap_angle(bearing + sigma * standard_normal(rng));
}

double aoa_test_statistic(std::span<const double> angles, std::span<const double> ground_angles) {
  if (angles.size() != ground_angles.size()) {
    throw InvalidArgument("angle vectors differ in length");
  }
  double sq = 0.0;
  for (std::size_t j = 0; j < angles.size(); ++j) {
    const double d = wrap_angle(angles[j] - ground_angles[j]);
    sq += d * d;
  }
  return std::sqrt(sq);
}

Hypothesis aoa_decide(std::span<const double> angles, std::span<const double> ground_angles,
                      double threshold) {
  return decide(aoa_test_statistic(angles, ground_angles), threshold);
}

void write_decision_log(std::ostream& out, std::span<const DecisionRecord> records) {
  out << kDecisionLogHeader << '\n';
  for (std::size_t i = 0; i < records.size(); ++i) {
    const DecisionRecord& r = records[i];
    out << i << ',' << (r.truth == Truth::legit ? "legit" : "malicious") << ','
        << format_double(r.test_statistic) << ',' << format_double(r.threshold) << ','
        << (r.decision == Hypothesis::h0 ? "H0" : "H1") << '\n';
  }
}

void write_decision_log(const std::filesystem::path& path,
                        std::span<const DecisionRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_decision_log(out, records);
}

}  // namespace posauth

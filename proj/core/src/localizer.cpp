#include "posauth/localizer.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "posauth/error.hpp"

namespace posauth {

RangeSystem build_system(std::span<const Rsu> rsus, std::span<const RangeEstimate> ranges) {
  if (rsus.size() != ranges.size()) {
    throw InvalidArgument("RSU and range lists differ in length");
  }
  const auto n = static_cast<Eigen::Index>(rsus.size());
  if (n < 3) {
    throw InvalidArgument("range system needs at least 3 anchors, got " + std::to_string(n));
  }

  RangeSystem sys;
  sys.design.resize(n, 3);
  sys.observation.resize(n);
  sys.anchor_ids.reserve(rsus.size());
  for (Eigen::Index j = 0; j < n; ++j) {
    const Rsu& rsu = rsus[static_cast<std::size_t>(j)];
    const RangeEstimate* match = nullptr;
    for (const RangeEstimate& r : ranges) {
      if (r.rsu_id == rsu.id) {
        if (match != nullptr) {
          throw InvalidArgument("duplicate range for RSU " + std::to_string(rsu.id));
        }
        match = &r;
      }
    }
    if (match == nullptr) {
      throw InvalidArgument("no range estimate for RSU " + std::to_string(rsu.id));
    }
    const double x = rsu.position.x();
    const double y = rsu.position.y();
    sys.design.row(j) << -2.0 * x, -2.0 * y, 1.0;
    sys.observation(j) = match->range * match->range - x * x - y * y;
    sys.anchor_ids.push_back(rsu.id);
  }
  return sys;
}

PositionEstimate solve_ls(const RangeSystem& system) {
  const Eigen::MatrixX3d& a = system.design;
  const Eigen::VectorXd& b = system.observation;
  const Eigen::Index n = a.rows();
  if (n < 3 || b.size() != n) {
    throw InvalidArgument("malformed range system");
  }
  if (!a.allFinite() || !b.allFinite()) {
    throw InvalidArgument("range system contains non-finite entries");
  }

  // Anchor coordinates are recoverable from the design matrix.
  const Eigen::MatrixX2d anchors = -0.5 * a.leftCols<2>();
  const Eigen::RowVector2d centre = anchors.colwise().mean();
  const Eigen::MatrixX2d shifted = anchors.rowwise() - centre;

  // Same residuals in the shifted frame:
  //   b'_j = b_j + (x_j^2 - x'_j^2) + (y_j^2 - y'_j^2)
  //        = b_j + 2 c . p'_j + |c|^2
  Eigen::VectorXd b_shift = b;
  b_shift.array() += 2.0 * (shifted * centre.transpose()).array() + centre.squaredNorm();

  Eigen::MatrixX3d a_shift(n, 3);
  a_shift.leftCols<2>() = -2.0 * shifted;
  a_shift.col(2).setOnes();

  // One scale for both coordinates so that a flat anchor layout still shows
  // up in the conditioning; the constant column gets its own.
  const Eigen::Vector3d norms = a_shift.colwise().norm().transpose();
  const double spatial = std::max(norms(0), norms(1));
  Eigen::Vector3d scale(spatial, spatial, norms(2));
  for (int c = 0; c < 3; ++c) {
    if (scale(c) == 0.0) scale(c) = 1.0;
  }
  const Eigen::MatrixX3d a_scaled = a_shift * scale.cwiseInverse().asDiagonal();

  const Eigen::JacobiSVD<Eigen::MatrixX3d> svd(a_scaled);
  const Eigen::Vector3d sv = svd.singularValues();
  const double cond_a = sv(2) > 0.0 ? sv(0) / sv(2) : std::numeric_limits<double>::infinity();
  const double cond_normal = cond_a * cond_a;
  if (!(cond_normal <= kDegenerateCondition)) {
    throw DegenerateGeometry("anchor geometry is degenerate (normal-matrix condition " +
                                 std::to_string(cond_normal) + ")",
                             cond_normal);
  }

  const Eigen::ColPivHouseholderQR<Eigen::MatrixX3d> qr(a_scaled);
  const Eigen::Vector3d theta_scaled = qr.solve(b_shift);
  const Eigen::Vector3d theta_shift = theta_scaled.cwiseQuotient(scale);

  const double xs = theta_shift(0);
  const double ys = theta_shift(1);
  Eigen::Vector3d theta;
  theta(0) = xs + centre(0);
  theta(1) = ys + centre(1);
  theta(2) = theta_shift(2) + 2.0 * (centre(0) * xs + centre(1) * ys) + centre.squaredNorm();

  PositionEstimate est;
  est.theta = theta;
  est.position = extract_position(theta);
  est.residual_norm = (a * theta - b).norm();
  est.condition_number = cond_normal;
  est.condition_flag = cond_normal > kIllConditioned ? Conditioning::ill_conditioned
                                                     : Conditioning::ok;
  return est;
}

Vec2 extract_position(const Eigen::Vector3d& theta) { return Vec2(theta(0), theta(1)); }

Vec2 grid_oracle(std::span<const Rsu> rsus, std::span<const RangeEstimate> ranges,
                 const Bounds& bounds, double step, GridObjective objective) {
  if (!(step > 0.0)) throw InvalidArgument("grid step must be positive");
  if (rsus.size() != ranges.size() || rsus.empty()) {
    throw InvalidArgument("RSU and range lists must be non-empty and of equal length");
  }
  if (!(bounds.max.x() >= bounds.min.x()) || !(bounds.max.y() >= bounds.min.y())) {
    throw InvalidArgument("empty grid: bounds are inverted");
  }
  const auto nx = static_cast<long>(std::floor((bounds.max.x() - bounds.min.x()) / step + 1e-9));
  const auto ny = static_cast<long>(std::floor((bounds.max.y() - bounds.min.y()) / step + 1e-9));

  const std::size_t m = rsus.size();
  std::vector<double> px(m), py(m), r(m);
  for (std::size_t j = 0; j < m; ++j) {
    px[j] = rsus[j].position.x();
    py[j] = rsus[j].position.y();
    r[j] = ranges[j].range;
  }
  std::vector<double> u(m);

  double best = std::numeric_limits<double>::infinity();
  Vec2 arg = bounds.min;
  for (long i = 0; i <= nx; ++i) {
    const double x = bounds.min.x() + static_cast<double>(i) * step;
    for (long k = 0; k <= ny; ++k) {
      const double y = bounds.min.y() + static_cast<double>(k) * step;
      double cost = 0.0;
      if (objective == GridObjective::range_residual) {
        for (std::size_t j = 0; j < m; ++j) {
          const double e = std::hypot(x - px[j], y - py[j]) - r[j];
          cost += e * e;
        }
      } else {
        // Residual row j is theta_3 - u_j with u_j = b_j + 2 x_j x + 2 y_j y;
        // the best theta_3 is mean(u), leaving the spread of u.
        double mean = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
          u[j] = r[j] * r[j] - px[j] * px[j] - py[j] * py[j] + 2.0 * px[j] * x + 2.0 * py[j] * y;
          mean += u[j];
        }
        mean /= static_cast<double>(m);
        for (std::size_t j = 0; j < m; ++j) {
          cost += (u[j] - mean) * (u[j] - mean);
        }
      }
      if (cost < best) {
        best = cost;
        arg = Vec2(x, y);
      }
    }
  }
  return arg;
}

PositionEstimate locate(std::span<const Rsu> anchors, std::span<const ToaObservation> toas,
                        const ChannelParams& params) {
  std::vector<RangeEstimate> ranges;
  ranges.reserve(toas.size());
  for (const ToaObservation& t : toas) {
    ranges.push_back(estimate_range(t, params));
  }
  return solve_ls(build_system(anchors, ranges));
}

}  // namespace posauth

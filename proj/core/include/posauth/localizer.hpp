#pragma once

#include <Eigen/Core>

#include <span>
#include <vector>

#include "posauth/channel.hpp"
#include "posauth/scenario.hpp"

namespace posauth {

/// Linearized squared-range system A theta = b_hat, one row per anchor:
///   A_j = [-2 x_j, -2 y_j, 1],  b_hat_j = r_j^2 - x_j^2 - y_j^2,
/// with theta = [x, y, x^2 + y^2].
struct RangeSystem {
  Eigen::MatrixX3d design;
  Eigen::VectorXd observation;
  std::vector<int> anchor_ids;
};

enum class Conditioning { ok, ill_conditioned };

struct PositionEstimate {
  Vec2 position = Vec2::Zero();
  Eigen::Vector3d theta = Eigen::Vector3d::Zero();
  double residual_norm = 0.0;
  Conditioning condition_flag = Conditioning::ok;
  /// Condition number of the normal matrix in the centred, rescaled
  /// frame (see solve_ls).
  double condition_number = 1.0;
};

/// Above this the normal matrix is treated as singular.
inline constexpr double kDegenerateCondition = 1e12;
/// Above this the estimate is returned but flagged.
inline constexpr double kIllConditioned = 1e8;

/// Pairs each RSU with the range estimate carrying its id. Throws
/// InvalidArgument on size mismatch, fewer than 3 anchors, or unmatched ids.
RangeSystem build_system(std::span<const Rsu> rsus, std::span<const RangeEstimate> ranges);

/// Least-squares solution of the range system.
///
/// The system is translated to the anchor centroid and rescaled (one factor
/// for both coordinates) before a column-pivoted Householder QR. The translation is an
/// affine re-parametrization of theta that leaves every residual unchanged,
/// so the minimizer maps back exactly; it only removes the dependence of the
/// conditioning on where the coordinate origin happens to be.
///
/// Throws DegenerateGeometry when the (translated, scaled) normal matrix has
/// condition number above kDegenerateCondition.
PositionEstimate solve_ls(const RangeSystem& system);

Vec2 extract_position(const Eigen::Vector3d& theta);

struct Bounds {
  Vec2 min = Vec2::Zero();
  Vec2 max = Vec2::Zero();
};

/// Objective evaluated by the brute-force grid search.
enum class GridObjective {
  /// sum_j (|p - p_j| - r_j)^2, the nonlinear range residual.
  range_residual,
  /// min over theta_3 of |A [p; theta_3] - b_hat|^2, i.e. the linearized
  /// least-squares cost with the third unknown profiled out in closed form.
  squared_range,
};

/// Exhaustive grid argmin over bounds with the given step; ties go to the
/// smaller x, then the smaller y. Points outside the bounds are never
/// visited, so a minimum outside yields the best boundary point.
Vec2 grid_oracle(std::span<const Rsu> rsus, std::span<const RangeEstimate> ranges,
                 const Bounds& bounds, double step,
                 GridObjective objective = GridObjective::range_residual);

/// Full pipeline for one transmission: ranges to the given anchors, system,
/// solve.
PositionEstimate locate(std::span<const Rsu> anchors, std::span<const ToaObservation> toas,
                        const ChannelParams& params);

}  // namespace posauth

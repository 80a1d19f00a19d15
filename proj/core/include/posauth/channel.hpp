#pragma once

#include <string>

#include "posauth/random.hpp"
#include "posauth/scenario.hpp"

namespace posauth {

inline constexpr double kSpeedOfLight = 3.0e8;  // m/s

/// Transmit-power to noise-power ratio, in dB.
struct LinkQuality {
  double lq_db = 0.0;

  double linear() const;
};

/// How the ToA variance is scaled relative to sigma^2 * psi / (4P).
///  - literal: factor 1, the bare CRB expression.
///  - carrier: 1 / (2 pi f)^2, i.e. a carrier-phase time resolution term.
///  - fixed:   a user supplied factor.
enum class ToaScaleMode { literal, carrier, fixed };

struct ChannelParams {
  double tx_power = 0.1;          // W
  double carrier_freq = 1.8e9;    // Hz
  double pathloss_exponent = 2.0;
  ToaScaleMode toa_scale_mode = ToaScaleMode::carrier;
  double toa_scale_value = 1.0;   // used only in fixed mode
  double rf_speed = kSpeedOfLight;

  /// The effective calibration factor kappa.
  double toa_scale() const;
};

void validate(const ChannelParams& params);

std::string to_string(ToaScaleMode mode);

struct ToaObservation {
  int rsu_id = 0;
  double toa = 0.0;       // s
  double variance = 0.0;  // s^2
  double true_toa = 0.0;  // s, kept for oracle checks
};

struct RangeEstimate {
  int rsu_id = 0;
  double range = 0.0;     // m
  double variance = 0.0;  // m^2
};

/// Free-space loss (4 pi d f / c)^eta. Throws for d <= 0.
double path_loss(double distance, const ChannelParams& params);

/// sigma^2 = P / 10^(LQ/10).
double noise_power(const ChannelParams& params, LinkQuality lq);

/// sigma_t^2 = kappa * sigma^2 * psi / (4P).
double toa_variance(const ChannelParams& params, double sigma2, double psi);

ToaObservation sample_toa(RandomStream& rng, int rsu_id, double true_distance, double variance,
                          const ChannelParams& params);

/// r = c t, with variance scaled by c^2.
RangeEstimate estimate_range(const ToaObservation& obs, const ChannelParams& params);

/// Convenience composition: path loss at the true distance, CRB variance at
/// the given link quality, one Gaussian ToA draw.
ToaObservation observe_toa(RandomStream& rng, const Rsu& rsu, const Vec2& tx, LinkQuality lq,
                           const ChannelParams& params);

}  // namespace posauth

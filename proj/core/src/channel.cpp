#include "posauth/channel.hpp"

#include <cmath>
#include <numbers>

#include "posauth/error.hpp"

namespace posauth {

double LinkQuality::linear() const { return std::pow(10.0, lq_db / 10.0); }

double ChannelParams::toa_scale() const {
  switch (toa_scale_mode) {
    case ToaScaleMode::literal: return 1.0;
    case ToaScaleMode::carrier: {
      const double w = 2.0 * std::numbers::pi * carrier_freq;
      return 1.0 / (w * w);
    }
    case ToaScaleMode::fixed: return toa_scale_value;
  }
  return 1.0;
}

std::string to_string(ToaScaleMode mode) {
  switch (mode) {
    case ToaScaleMode::literal: return "literal";
    case ToaScaleMode::carrier: return "carrier";
    case ToaScaleMode::fixed: return "fixed";
  }
  return "carrier";
}

void validate(const ChannelParams& params) {
  if (!(params.tx_power > 0.0)) throw InvalidArgument("transmit power must be positive");
  if (!(params.carrier_freq > 0.0)) throw InvalidArgument("carrier frequency must be positive");
  if (!(params.rf_speed > 0.0)) throw InvalidArgument("propagation speed must be positive");
  if (!std::isfinite(params.pathloss_exponent)) {
    throw InvalidArgument("path loss exponent must be finite");
  }
  if (!(params.toa_scale() > 0.0) || !std::isfinite(params.toa_scale())) {
    throw InvalidArgument("toa_scale must be positive and finite");
  }
}

double path_loss(double distance, const ChannelParams& params) {
  if (!(distance > 0.0)) {
    throw InvalidArgument("path loss needs a positive distance");
  }
  const double ratio = 4.0 * std::numbers::pi * distance * params.carrier_freq / params.rf_speed;
  return std::pow(ratio, params.pathloss_exponent);
}

double noise_power(const ChannelParams& params, LinkQuality lq) {
  return params.tx_power / lq.linear();
}

double toa_variance(const ChannelParams& params, double sigma2, double psi) {
  if (sigma2 < 0.0) throw InvalidArgument("noise power must be non-negative");
  if (!(psi > 0.0)) throw InvalidArgument("path loss must be positive");
  return params.toa_scale() * sigma2 * psi / (4.0 * params.tx_power);
}

ToaObservation sample_toa(RandomStream& rng, int rsu_id, double true_distance, double variance,
                          const ChannelParams& params) {
  if (variance < 0.0) throw InvalidArgument("ToA variance must be non-negative");
  ToaObservation obs;
  obs.rsu_id = rsu_id;
  obs.true_toa = true_distance / params.rf_speed;
  obs.variance = variance;
  obs.toa = obs.true_toa + std::sqrt(variance) * standard_normal(rng);
  return obs;
}

RangeEstimate estimate_range(const ToaObservation& obs, const ChannelParams& params) {
  const double c = params.rf_speed;
  return RangeEstimate{obs.rsu_id, c * obs.toa, c * c * obs.variance};
}

ToaObservation observe_toa(RandomStream& rng, const Rsu& rsu, const Vec2& tx, LinkQuality lq,
                           const ChannelParams& params) {
  const double d = (tx - rsu.position).norm();
  const double var = toa_variance(params, noise_power(params, lq), path_loss(d, params));
  return sample_toa(rng, rsu.id, d, var, params);
}

}  // namespace posauth

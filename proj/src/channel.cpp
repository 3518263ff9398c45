#include "vanet/channel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "vanet/error.hpp"

namespace vanet {

namespace {

void require_positive(double value, const char* name) {
  require(std::isfinite(value) && value > 0.0, ErrorCode::invalid_argument,
          std::string(name) + " must be positive and finite");
}

}  // namespace

double kmh_to_mps(double kmh) { return kmh / 3.6; }

ChannelSpec ChannelSpec::from_road_units(double speed_kmh, double carrier_ghz,
                                         double symbol_rate, double threshold_ratio) {
  ChannelSpec spec;
  spec.speed = kmh_to_mps(speed_kmh);
  spec.carrier_freq = carrier_ghz * 1e9;
  spec.symbol_rate = symbol_rate;
  spec.threshold_ratio = threshold_ratio;
  spec.validate();
  return spec;
}

void ChannelSpec::validate() const {
  require_positive(speed, "speed");
  require_positive(carrier_freq, "carrier_freq");
  require_positive(symbol_rate, "symbol_rate");
  require_positive(threshold_ratio, "threshold_ratio");
  require_positive(light_speed, "light_speed");
}

double doppler_shift(const ChannelSpec& spec) {
  spec.validate();
  return spec.speed * spec.carrier_freq / spec.light_speed;
}

double level_crossing_rate(double threshold_ratio, double doppler) {
  require_positive(threshold_ratio, "threshold_ratio");
  require_positive(doppler, "doppler");
  return std::sqrt(2.0 * std::numbers::pi * threshold_ratio) * doppler *
         std::exp(-threshold_ratio);
}

TransitionProbs transition_probs(const ChannelSpec& spec) {
  const double r = spec.threshold_ratio;
  const double doppler = doppler_shift(spec);
  // LCR / (R p_G): the exp(-r) of the crossing rate cancels against p_G.
  const double p = std::sqrt(2.0 * std::numbers::pi * r) * doppler / spec.symbol_rate;
  // LCR / (R p_B) = p * p_G / p_B.
  const double q = p * std::exp(-r) / -std::expm1(-r);
  require(p < 1.0, ErrorCode::out_of_range,
          "calibrated p = " + std::to_string(p) + " is not below 1");
  require(q < 1.0, ErrorCode::out_of_range,
          "calibrated q = " + std::to_string(q) + " is not below 1");
  return {p, q};
}

Equilibrium equilibrium(double p, double q) {
  require(p >= 0.0 && q >= 0.0, ErrorCode::invalid_argument,
          "transition probabilities must be non-negative");
  require(p + q > 0.0, ErrorCode::degenerate_chain, "p + q = 0 has no unique equilibrium");
  const double good = q / (p + q);
  return {good, 1.0 - good};
}

double max_timestep(double doppler) {
  require_positive(doppler, "doppler");
  return 1.0 / (2.0 * doppler);
}

double default_timestep(double doppler) {
  require_positive(doppler, "doppler");
  return 1.0 / (10.0 * doppler);
}

MarkovLink::MarkovLink(double p, double q, double dt) : p_(p), q_(q), dt_(dt) {
  require(p >= 0.0 && p <= 1.0, ErrorCode::invalid_argument, "p must lie in [0, 1]");
  require(q >= 0.0 && q <= 1.0, ErrorCode::invalid_argument, "q must lie in [0, 1]");
  require_positive(dt, "dt");
  const Equilibrium eq = equilibrium(p, q);
  p_good_ = eq.good;
  p_bad_ = eq.bad;
}

MarkovLink MarkovLink::absorbing(double p_good, double dt) {
  require(p_good >= 0.0 && p_good <= 1.0, ErrorCode::invalid_argument,
          "p_good must lie in [0, 1]");
  require_positive(dt, "dt");
  MarkovLink link;
  link.dt_ = dt;
  link.p_good_ = p_good;
  link.p_bad_ = 1.0 - p_good;
  return link;
}

Calibration calibrate(const ChannelSpec& spec, std::optional<double> dt, TimestepRule rule) {
  const double doppler = doppler_shift(spec);
  const double dt_max = max_timestep(doppler);
  const double dt_default = default_timestep(doppler);
  double step = rule == TimestepRule::standard ? dt_default : dt_max;
  if (dt) {
    require_positive(*dt, "dt");
    require(*dt <= dt_max, ErrorCode::nyquist_violation,
            "dt = " + std::to_string(*dt) + " s exceeds 1/(2 f_D) = " +
                std::to_string(dt_max) + " s");
    step = *dt;
  }
  const TransitionProbs probs = transition_probs(spec);
  return Calibration{spec, doppler, dt_max, dt_default, MarkovLink(probs.p, probs.q, step)};
}

}  // namespace vanet

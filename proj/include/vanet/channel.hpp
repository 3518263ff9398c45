#pragma once

#include <optional>

namespace vanet {

inline constexpr double kLightSpeed = 2.998e8;  // m/s

/// Physical-layer inputs of one inter-vehicle link, in SI units.
///
/// The mean SNR and the decision threshold only ever enter the model through
/// their ratio, so only the ratio is stored.
struct ChannelSpec {
  double speed = 0.0;            // m/s
  double carrier_freq = 0.0;     // Hz
  double symbol_rate = 0.0;      // symbols/s
  double threshold_ratio = 0.0;  // threshold over mean SNR
  double light_speed = kLightSpeed;

  /// Builds a spec from the units used on the road: km/h and GHz.
  static ChannelSpec from_road_units(double speed_kmh, double carrier_ghz,
                                     double symbol_rate, double threshold_ratio);

  void validate() const;
};

double kmh_to_mps(double kmh);

double doppler_shift(const ChannelSpec& spec);

/// Rate of downward crossings of the threshold by a Rayleigh envelope under
/// the Clarke scattering model.
double level_crossing_rate(double threshold_ratio, double doppler);

struct TransitionProbs {
  double p = 0.0;  // Good -> Bad per step
  double q = 0.0;  // Bad -> Good per step
};

/// Throws ErrorCode::out_of_range when either probability leaves (0, 1).
TransitionProbs transition_probs(const ChannelSpec& spec);

struct Equilibrium {
  double good = 0.0;
  double bad = 0.0;
};

Equilibrium equilibrium(double p, double q);

double max_timestep(double doppler);
double default_timestep(double doppler);

/// A calibrated two-state Good/Bad chain with timestep dt.
///
/// p and q may sit on the closed interval [0, 1] so boundary chains stay
/// expressible; p = q = 0 requires an explicit initial distribution via
/// absorbing().
class MarkovLink {
public:
  MarkovLink(double p, double q, double dt);

  static MarkovLink absorbing(double p_good, double dt);

  double p() const noexcept { return p_; }
  double q() const noexcept { return q_; }
  double dt() const noexcept { return dt_; }
  double p_good() const noexcept { return p_good_; }
  double p_bad() const noexcept { return p_bad_; }

private:
  MarkovLink() = default;

  double p_ = 0.0;
  double q_ = 0.0;
  double dt_ = 0.0;
  double p_good_ = 0.0;
  double p_bad_ = 0.0;
};

enum class TimestepRule { standard, nyquist_limit };

/// Everything the physical calibration produces, kept together for reports.
struct Calibration {
  ChannelSpec spec;
  double doppler = 0.0;
  double dt_max = 0.0;
  double dt_default = 0.0;
  MarkovLink link;
};

/// Calibrates a link from physics. An explicit dt is checked against the
/// Nyquist bound (ErrorCode::nyquist_violation); otherwise `rule` picks it.
Calibration calibrate(const ChannelSpec& spec, std::optional<double> dt = std::nullopt,
                      TimestepRule rule = TimestepRule::standard);

}  // namespace vanet

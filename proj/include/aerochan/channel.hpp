#pragma once

// Closed-form aerosol channel: a wind-aided advection-diffusion channel with
// downwind wind speed u, eddy diffusivity K(x) and a reflecting ground at
// z = 0. All lengths in cm, times in s. Emission rates are abstract
// "units/s" and jet masses "units"; concentrations are units/cm^3.

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace aerochan {

/// Eddy diffusivity as a function of downwind distance only.
class DiffusivityProfile {
 public:
  /// K(x) = k0 for every x.
  static DiffusivityProfile constant(double k0);

  /// K(x) = k0 * (x / x_ref)^exponent.
  static DiffusivityProfile power_law(double k0, double x_ref, double exponent);

  /// Arbitrary user-supplied profile. Must be strictly positive and finite on
  /// (0, inf); positivity is checked at every evaluation.
  static DiffusivityProfile custom(std::function<double(double)> k,
                                   std::string label = "custom");

  double operator()(double x) const;

  bool is_constant() const noexcept { return kind_ == Kind::Constant; }
  bool is_power_law() const noexcept { return kind_ == Kind::PowerLaw; }
  double k0() const noexcept { return k0_; }
  double x_ref() const noexcept { return x_ref_; }
  double exponent() const noexcept { return exponent_; }
  const std::string& label() const noexcept { return label_; }

 private:
  enum class Kind { Constant, PowerLaw, Custom };
  DiffusivityProfile() = default;

  Kind kind_ = Kind::Constant;
  double k0_ = 0.0;
  double x_ref_ = 1.0;
  double exponent_ = 0.0;
  std::string label_ = "constant";
  std::shared_ptr<const std::function<double(double)>> fn_;
};

struct ChannelParams {
  double wind_speed = 140.0;  // u, cm/s
  DiffusivityProfile diffusivity = DiffusivityProfile::constant(0.242);
  double x_min = 1.0;  // near-field cutoff, cm

  /// u = 140 cm/s, K = 0.242 cm^2/s, x_min = 1 cm.
  static ChannelParams table_defaults();

  void validate() const;
};

/// Default source (mouth) height, cm.
inline constexpr double kDefaultSourceHeight = 180.0;
/// Default receiver radius, cm.
inline constexpr double kDefaultReceiverRadius = 2.0;

struct Position {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct SpaceTimePoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double t = 0.0;

  Position position() const { return {x, y, z}; }
};

/// Impulsive (cough / sneeze) release.
struct JetRelease {
  double time = 0.0;  // s
  double mass = 0.0;  // R_s, units
};

/// One person: continuous breath from `entry_time` on, plus jets. The
/// location's z coordinate is the source height H.
struct SourceSpec {
  Position location{0.0, 0.0, kDefaultSourceHeight};
  double breath_rate = 0.0;  // R_b, units/s
  std::vector<JetRelease> jets;
  double entry_time = 0.0;  // s

  double height() const noexcept { return location.z; }
  void validate() const;
};

/// Sneeze probabilities on an equally spaced time grid. probabilities[i][j]
/// is the probability that user j releases a jet in interval i; the release
/// is placed at the interval start i * interval.
struct StochasticGrid {
  double interval = 1.0;  // T_1, s
  double horizon = 1.0;   // T, s
  double jet_mass = 1.0;  // R_s per release, units
  std::vector<std::vector<double>> probabilities;

  /// ceil(horizon / interval).
  int num_intervals() const;
};

struct MultiUserScenario {
  std::vector<SourceSpec> users;
  std::optional<StochasticGrid> stochastic;

  void validate() const;
};

struct ComplexResponse {
  double magnitude = 0.0;
  double phase = 0.0;            // principal value in (-pi, pi]
  double unwrapped_phase = 0.0;  // -omega * x / u, continuous in omega

  std::complex<double> value() const { return std::polar(magnitude, phase); }
};

/// Transformed coordinate (1/u) * integral_0^x K(s) ds, in cm^2. Exact for
/// constant and power-law profiles, adaptive Simpson (rel. tol 1e-10)
/// otherwise.
double eta(double x, const ChannelParams& params);

/// Response at p (t = time since release) to a unit impulse released at
/// (0, 0, H) at t = 0. Returns 0 for x <= 0 (no upwind transport); throws
/// DomainError for 0 < x < x_min or z < 0.
double impulse_response(const SpaceTimePoint& p, const ChannelParams& params,
                        double source_height);

/// Concentration due to a jet of mass `jet_mass` released at `release_time`.
/// Exactly zero for t < release_time.
double jet_concentration(double jet_mass, double release_time,
                         const SpaceTimePoint& p, const ChannelParams& params,
                         double source_height);

/// Concentration due to continuous breath of rate `breath_rate` starting at
/// `entry_time`. Zero for t <= entry_time, nondecreasing afterwards.
double breath_response(double breath_rate, double entry_time,
                       const SpaceTimePoint& p, const ChannelParams& params,
                       double source_height);

/// Breath plus all jets of one person. Evaluated in coordinates relative to
/// the person's (x, y) location with the location's z as source height.
double person_response(const SourceSpec& source, const SpaceTimePoint& p,
                       const ChannelParams& params);

/// Sum of person responses, each gated by downwind position and entry time.
double multi_user_response(const MultiUserScenario& scenario,
                           const SpaceTimePoint& p, const ChannelParams& params);

/// Expected jet response under the stochastic sneeze model. Throws
/// ConfigError if the scenario carries no stochastic grid.
double stochastic_expected_response(const MultiUserScenario& scenario,
                                    const SpaceTimePoint& p,
                                    const ChannelParams& params);

/// Steady plume of a continuous source of rate `rate` at (0, 0, H).
double steady_state_concentration(double rate, const Position& p,
                                  const ChannelParams& params,
                                  double source_height);

/// Transfer function H(omega) of the impulse response at p, in the closed
/// form f(y,z) / (8 u eta sqrt(pi)) * exp(-(omega^2 eta / u^2 + j omega x / u)).
ComplexResponse frequency_response(const Position& p, double omega,
                                   const ChannelParams& params,
                                   double source_height);

/// Wraps an angle to (-pi, pi].
double wrap_phase(double angle);

}  // namespace aerochan

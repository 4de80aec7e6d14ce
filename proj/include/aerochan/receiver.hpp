#pragma once

// Receiver measurement model and maximum-likelihood detection.
//
// The receiver is a sphere that samples the air over a window of length T_s.
// The accumulated concentration C_mean (space-time integral of C over the
// sphere and window) is scaled by the sampler efficiency xi and the binding
// fraction gamma and corrupted by additive Gaussian noise:
//
//   C_r = xi * gamma * C_mean + n,   n ~ N(0, sigma^2).

#include <functional>
#include <random>

#include "aerochan/channel.hpp"

namespace aerochan {

struct ReceiverSpec {
  Position center{100.0, 0.0, kDefaultSourceHeight};
  double radius = kDefaultReceiverRadius;  // r_d, cm
  double sampling_window = 3.0;            // T_s, s
  double window_start = 0.0;               // s
  double sampler_efficiency = 0.85;        // xi
  double binding_fraction = 0.5;           // gamma

  double volume() const;
  void validate() const;
};

/// Markov binding parameters. gamma = P_a / (P_a + K * P_d).
struct BindingParams {
  double association_probability = 0.0;
  double dissociation_probability = 0.0;
  int num_states = 1;
  // Stored for completeness; the detection chain only uses gamma.
  int num_antigens = 1;

  double binding_fraction() const;
  void validate() const;
};

struct NoiseModel {
  double variance = 1.0;  // sigma^2, in squared units of C_r

  double sigma() const;
  void validate() const;
};

enum class Decision { Healthy, Infected };

const char* to_string(Decision d);

struct DetectionResult {
  double received = 0.0;
  double threshold = 0.0;
  Decision decision = Decision::Healthy;
  double pmd_paper = 0.0;
  double pmd_consistent = 0.0;
};

/// Tensor Gauss-Legendre orders for c_mean.
struct QuadratureOrders {
  int radial = 16;
  int polar = 16;
  int azimuthal = 16;
  int time = 8;
};

using ConcentrationField = std::function<double(const SpaceTimePoint&)>;

/// Space-time integral of `field` over the receiver sphere and sampling
/// window, in concentration * cm^3 * s. The polar axis of the spherical
/// coordinates points downwind (+x) so an in-line plume is axisymmetric in
/// the azimuth. Throws ConfigError if the sphere intersects the ground.
double c_mean(const ReceiverSpec& receiver, const ConcentrationField& field,
              const QuadratureOrders& orders = {});

/// Time-independent variant: T_s times the volume integral. Equals c_mean of
/// the same field with a constant-in-time value, without the time quadrature.
double c_mean_steady(const ReceiverSpec& receiver,
                     const std::function<double(const Position&)>& field,
                     const QuadratureOrders& orders = {});

/// c_mean divided by V_rx * T_s: the mean concentration seen by the receiver.
double c_mean_average(const ReceiverSpec& receiver, double c_mean_value);

/// One noisy measurement xi * gamma * C_mean + n.
double sample_received(double c_mean_value, const ReceiverSpec& receiver,
                       const NoiseModel& noise, std::mt19937_64& rng);

/// Maximum-likelihood threshold gamma * xi * C_mean / 2 (equal priors).
double ml_threshold(double c_mean_value, double xi, double gamma);

/// MAP threshold for arbitrary priors; reduces to ml_threshold at 0.5/0.5.
double map_threshold(double c_mean_value, double xi, double gamma,
                     double sigma, double prior_infected);

/// Infected iff received >= threshold; ties go to Infected.
Decision decide(double received, double threshold);

/// Upper tail of the standard normal, erfc(x / sqrt 2) / 2.
double q_function(double x);

/// Missed-detection probability Q(gamma xi C_mean / sqrt(8 sigma^2)), the
/// closed form as usually quoted for this receiver.
double pmd_paper(double c_mean_value, double xi, double gamma, double sigma);

/// Missed-detection probability implied by the ML threshold and the noise
/// model: P(xi gamma C + n <= xi gamma C / 2) = Q(gamma xi C_mean / (2 sigma)).
double pmd_consistent(double c_mean_value, double xi, double gamma, double sigma);

/// Samples one measurement and applies the ML decision.
DetectionResult detect(double c_mean_value, const ReceiverSpec& receiver,
                       const NoiseModel& noise, std::mt19937_64& rng);

}  // namespace aerochan

#pragma once

// Independent numerical ground truth for the closed-form channel and
// detection formulas. Nothing here calls the closed forms it is meant to
// check, except to build initial conditions and to report errors.

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "aerochan/channel.hpp"
#include "aerochan/receiver.hpp"

namespace aerochan::oracles {

struct OracleReport {
  std::string name;
  double max_rel_error = 0.0;
  double l2_rel_error = 0.0;
  double budget = 0.0;
  bool passed = true;
  double runtime_seconds = 0.0;
  std::map<std::string, double> grid;  // grid metadata (steps, extents, counts)
  std::vector<std::string> warnings;
};

// ---------------------------------------------------------------------------
// Steady plume: march the crosswind heat equation C_eta = C_yy + C_zz.

enum class MarchScheme {
  Explicit,  // forward Euler, centered second differences
  Implicit,  // Peaceman-Rachford ADI, unconditionally stable
};

struct MarchGrid {
  double eta_start = 0.0;
  double eta_end = 0.0;
  double y_max = 0.0;  // y in [-y_max, y_max]
  double z_max = 0.0;  // z in [0, z_max]
  double dy = 0.0;
  double dz = 0.0;
  double deta = 0.0;
  MarchScheme scheme = MarchScheme::Explicit;

  /// Grid for marching up to eta_end with `cells_per_side` cells across
  /// [0, y_max], y_max = 6 sqrt(eta_end) and z_max = H + y_max. The start
  /// is where the plume standard deviation equals two cells, and the step is
  /// `stability_fraction` of the explicit limit.
  static MarchGrid for_plume(double eta_end, double source_height,
                             int cells_per_side = 20,
                             double stability_fraction = 1.0);

  /// Same extents and eta range with all steps halved.
  MarchGrid refined() const;

  void validate(double source_height) const;
};

struct SteadyMarchResult {
  std::vector<double> y;      // cell centres
  std::vector<double> z;      // cell centres
  std::vector<double> field;  // C at eta_end, index iy * z.size() + iz
  std::vector<double> eta_samples;
  std::vector<double> slice_mass;  // integral of C dy dz at each sample
  double eta_final = 0.0;
  OracleReport report;

  double at(std::size_t iy, std::size_t iz) const { return field[iy * z.size() + iz]; }
};

/// Marches from the closed-form narrow Gaussian at eta_start (the point
/// source smoothed to a finite width) with a reflecting ground at z = 0
/// and zero far-field values. The report's errors compare against the
/// closed-form steady plume at eta_end.
SteadyMarchResult fd_march_steady(const ChannelParams& params, double source_height,
                                  const MarchGrid& grid, double rate = 1.0);

// ---------------------------------------------------------------------------
// Transient jet: C_t + u C_x = K (C_xx + C_yy + C_zz), constant K.

struct TransientGrid {
  double dx = 0.1;
  double dy = 0.1;
  double dz = 0.1;
  double half_width_x = 4.0;  // window half-widths around the moving puff, cm
  double half_width_y = 4.0;
  double half_width_z = 4.0;
  double t_start = 0.1;  // s; the puff is initialised here
  double t_end = 1.0;    // s

  void validate(const ChannelParams& params, double source_height) const;
};

struct ProbeSeries {
  Position where;
  std::vector<double> values;  // one per entry of TransientMarchResult::times
};

struct TransientMarchResult {
  double dt = 0.0;
  std::vector<double> times;
  std::vector<double> mass;            // total mass per step
  std::vector<double> sample_times;    // requested snapshot times (clamped to steps)
  std::vector<double> sample_mass;
  std::vector<ProbeSeries> probes;
  OracleReport report;
};

/// Upwind advection at unit Courant number (dt = dx / u) on a window that
/// follows the puff, operator-split with explicit centered diffusion. The
/// puff starts as the free-space Gaussian of a unit release at t_start.
/// The report compares probe series with the closed-form jet wherever the
/// closed form exceeds `comparison_floor` times its peak at that probe.
TransientMarchResult fd_march_transient(const ChannelParams& params, double source_height,
                                        const TransientGrid& grid,
                                        const std::vector<Position>& probes,
                                        const std::vector<double>& t_samples = {},
                                        double jet_mass = 1.0,
                                        double comparison_floor = 0.3);

// ---------------------------------------------------------------------------
// Breath response as a numeric convolution of the impulse response with a
// unit step.

double numeric_step_convolution(const SpaceTimePoint& p, const ChannelParams& params,
                                double source_height, double breath_rate = 1.0,
                                double entry_time = 0.0, double rel_tol = 1e-8);

// ---------------------------------------------------------------------------
// Frequency response from the DFT of the sampled impulse response.

struct Spectrum {
  double sample_interval = 0.0;
  std::vector<double> omega;  // rad/s, bins 0 .. n/2
  std::vector<std::complex<double>> value;

  /// |X(omega)| / |X(0)|.
  std::vector<double> normalized_magnitude() const;
  /// Least-squares slope of the unwrapped phase over omega in [0, omega_max].
  double phase_slope(double omega_max) const;
};

Spectrum sampled_transfer_function(const Position& p, const ChannelParams& params,
                                   double source_height, double sample_interval,
                                   std::size_t n_samples, double time_shift = 0.0);

// ---------------------------------------------------------------------------
// Mass integrals by nested adaptive Gauss-Kronrod quadrature.

/// Integral of the steady plume over the crosswind plane y in R, z > 0 at
/// downwind distance x.
double crosswind_mass(double rate, double x, const ChannelParams& params,
                      double source_height);

/// Integral of a jet's concentration over all of space (x > x_min) at time
/// t after release.
double jet_total_mass(double jet_mass, double t, const ChannelParams& params,
                      double source_height);

// ---------------------------------------------------------------------------
// Monte Carlo.

struct BinomialEstimate {
  std::uint64_t misses = 0;
  std::uint64_t trials = 0;
  double estimate = 0.0;
  double lower = 0.0;  // Wilson interval
  double upper = 0.0;

  bool contains(double p) const { return p >= lower && p <= upper; }
};

/// Wilson score interval with z standard deviations.
BinomialEstimate wilson_interval(std::uint64_t misses, std::uint64_t trials, double z = 3.0);

/// Simulates the infected hypothesis `trials` times, applies the ML
/// threshold and counts misses. Trials run in fixed-size chunks with
/// per-chunk generators, so the result depends only on (inputs, seed).
BinomialEstimate empirical_pmd(double c_mean_value, double xi, double gamma, double sigma,
                               std::uint64_t trials, std::uint64_t seed, int jobs = 1);

struct MonteCarloIntegral {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Uniform rejection sampling in the sphere times uniform sampling of the
/// window. Unbiased estimate of the c_mean space-time integral.
MonteCarloIntegral mc_volume_integral(const ReceiverSpec& receiver,
                                      const ConcentrationField& field,
                                      std::uint64_t samples, std::uint64_t seed);

}  // namespace aerochan::oracles

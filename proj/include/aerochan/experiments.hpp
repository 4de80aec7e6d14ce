#pragma once

// Experiment runners. Each runner is a pure function of the scenario (and
// the seed it carries) and returns a ResultTable whose metadata records the
// configuration hash and seed. Sweep points run concurrently up to
// `experiment.jobs` threads; rows are always emitted in sweep order.

#include <cstdint>
#include <string>

#include "aerochan/results.hpp"
#include "aerochan/scenario.hpp"

namespace aerochan {

/// Rows (u, d_x, ratio, center_ratio, receiver_ratio). center_ratio is the
/// steady plume at the receiver centre over R; receiver_ratio is the mean
/// concentration over the receiver sphere and sampling window over R.
/// `ratio` repeats the column selected by experiment.ratio_mode.
ResultTable run_concentration_vs_distance(const ScenarioConfig& config);

/// Rows (u, d_x, delay): the first time after entry at which the breath
/// response at the receiver centre reaches `fraction` of its steady value,
/// by bisection to relative 1e-6. Unreachable fractions give +inf.
ResultTable run_delay_to_fraction(const ScenarioConfig& config, double fraction);

/// Smallest t with breath_response(t) >= fraction * breath_response(inf) at
/// p (relative to the source). Exposed for tests.
double delay_to_fraction(const ChannelParams& params, double source_height,
                         const Position& p, double fraction, double rel_tol = 1e-6);

/// Noise sigma that satisfies xi gamma R_b / (8 sigma^2) = calibration.
double calibrated_sigma(double xi, double gamma, double breath_rate, double calibration);

/// Rows (d_x, rate_scale, volume_scale, c_mean, pmd_paper, pmd_consistent
/// [, pmd_empirical, pmd_lower, pmd_upper]) for the variants (R_b, V_r),
/// (R_b / 2, V_r) and (R_b, V_r / 2) of the steady breath scenario.
ResultTable run_pmd_vs_distance(const ScenarioConfig& config);

/// Monte Carlo missed detection at experiment.mc_distances against both
/// analytic forms.
ResultTable run_mc_pmd(const ScenarioConfig& config);

/// Rows (x, y, z, C) of the steady plume summed over all users.
ResultTable run_field_grid(const ScenarioConfig& config);

/// Rows (t, C[, C_expected]) at the receiver centre: deterministic
/// multi-user response and, with a stochastic grid, its expected value.
ResultTable run_timeseries(const ScenarioConfig& config);

/// Rows (omega, magnitude, phase, unwrapped_phase) at the receiver centre.
ResultTable run_frequency_response(const ScenarioConfig& config);

/// Runs the oracle suite. Rows (id, value, limit, passed); metadata names
/// each check and its comparison.
ResultTable run_oracle_suite(const ScenarioConfig& config);

/// True if every row of an oracle-suite table passed.
bool oracle_suite_passed(const ResultTable& table);

/// Seed used by a runner: the configured one or a fixed default.
std::uint64_t effective_seed(const ScenarioConfig& config);

}  // namespace aerochan

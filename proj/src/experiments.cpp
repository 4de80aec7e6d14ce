#include "aerochan/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "aerochan/errors.hpp"
#include "aerochan/oracles.hpp"

namespace aerochan {

namespace {

constexpr std::uint64_t kDefaultSeed = 20201109;

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Results land in index
// order regardless of completion order.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t n, int jobs, Fn&& fn) {
  std::vector<T> out(n);
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, n); ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) {
        try {
          out[i] = fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::string number_text(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

ResultTable make_table(const ScenarioConfig& config, const std::string& experiment,
                       std::vector<Column> columns) {
  ResultTable t;
  t.columns = std::move(columns);
  t.set_meta("tool", "aerochan");
  t.set_meta("version", AEROCHAN_VERSION);
  t.set_meta("experiment", experiment);
  t.set_meta("config_hash", config_hash(config));
  t.set_meta("seed", config.seed ? std::to_string(*config.seed) : "none");
  if (config.output.include_timestamp) {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    t.set_meta("timestamp", buf);
  }
  return t;
}

ChannelParams with_wind(const ScenarioConfig& config, double u) {
  ChannelParams p = config.channel;
  p.wind_speed = u;
  return p;
}

const SourceSpec& primary_source(const ScenarioConfig& config) {
  if (config.sources.users.empty()) throw ConfigError("sources.users", "no sources configured");
  return config.sources.users.front();
}

// Receiver in line with the source at downwind distance d.
ReceiverSpec inline_receiver(const ScenarioConfig& config, double d) {
  const auto& src = primary_source(config);
  ReceiverSpec rx = config.receiver;
  rx.center = {src.location.x + d, src.location.y, src.height()};
  return rx;
}

// Steady plume of the primary source evaluated in absolute coordinates.
double steady_at(const ScenarioConfig& config, const ChannelParams& params, double rate,
                 const Position& p) {
  const auto& src = primary_source(config);
  return steady_state_concentration(rate, {p.x - src.location.x, p.y - src.location.y, p.z},
                                    params, src.height());
}

double steady_c_mean(const ScenarioConfig& config, const ChannelParams& params, double rate,
                     const ReceiverSpec& rx) {
  return c_mean_steady(
      rx, [&](const Position& p) { return steady_at(config, params, rate, p); },
      config.quadrature);
}

}  // namespace

std::uint64_t effective_seed(const ScenarioConfig& config) {
  return config.seed.value_or(kDefaultSeed);
}

// ---------------------------------------------------------------------------

ResultTable run_concentration_vs_distance(const ScenarioConfig& config) {
  const auto& e = config.experiment;
  ResultTable t = make_table(config, "conc-vs-dist",
                             {{"u", "cm/s"},
                              {"d_x", "cm"},
                              {"ratio", "s/cm^3"},
                              {"center_ratio", "s/cm^3"},
                              {"receiver_ratio", "s/cm^3"}});
  t.set_meta("ratio_mode", e.ratio_mode);
  t.set_meta("sampling_window_s", number_text(config.receiver.sampling_window));
  const double rate = config.breath_rate() > 0.0 ? config.breath_rate() : 1.0;
  const std::size_t nd = e.distances.size();
  const auto rows = parallel_map<std::vector<double>>(
      e.wind_speeds.size() * nd, e.jobs, [&](std::size_t i) {
        const double u = e.wind_speeds[i / nd];
        const double d = e.distances[i % nd];
        const ChannelParams params = with_wind(config, u);
        const ReceiverSpec rx = inline_receiver(config, d);
        const double center = steady_at(config, params, rate, rx.center) / rate;
        const double receiver =
            c_mean_average(rx, steady_c_mean(config, params, rate, rx)) / rate;
        const double chosen = e.ratio_mode == "center" ? center : receiver;
        return std::vector<double>{u, d, chosen, center, receiver};
      });
  for (const auto& r : rows) t.add_row(r);
  return t;
}

// ---------------------------------------------------------------------------

double delay_to_fraction(const ChannelParams& params, double source_height, const Position& p,
                         double fraction, double rel_tol) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw DomainError("fraction must lie in (0, 1)");
  const double u = params.wind_speed;
  const double root_eta = std::sqrt(eta(p.x, params));
  // Far enough that both erfc terms have saturated: the steady limit.
  const double t_inf = (std::max(p.x, 0.0) + 80.0 * root_eta) / u + 1.0;
  const auto response = [&](double t) {
    return breath_response(1.0, 0.0, {p.x, p.y, p.z, t}, params, source_height);
  };
  const double limit = response(t_inf);
  if (!(limit > 0.0)) return std::numeric_limits<double>::infinity();
  const double target = fraction * limit;
  double lo = 0.0;
  double hi = t_inf;
  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (response(mid) >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

ResultTable run_delay_to_fraction(const ScenarioConfig& config, double fraction) {
  const auto& e = config.experiment;
  ResultTable t = make_table(config, "delay", {{"u", "cm/s"}, {"d_x", "cm"}, {"delay", "s"}});
  t.set_meta("fraction", number_text(fraction));
  const auto& src = primary_source(config);
  const std::size_t nd = e.distances.size();
  const auto rows = parallel_map<std::vector<double>>(
      e.wind_speeds.size() * nd, e.jobs, [&](std::size_t i) {
        const double u = e.wind_speeds[i / nd];
        const double d = e.distances[i % nd];
        const double delay =
            delay_to_fraction(with_wind(config, u), src.height(), {d, 0.0, src.height()}, fraction);
        return std::vector<double>{u, d, delay};
      });
  for (const auto& r : rows) t.add_row(r);
  return t;
}

// ---------------------------------------------------------------------------

double calibrated_sigma(double xi, double gamma, double breath_rate, double calibration) {
  if (!(calibration > 0.0)) throw DomainError("calibration constant must be positive");
  return std::sqrt(xi * gamma * breath_rate / (8.0 * calibration));
}

ResultTable run_pmd_vs_distance(const ScenarioConfig& config) {
  const auto& e = config.experiment;
  std::vector<Column> cols{{"d_x", "cm"},         {"rate_scale", "1"},     {"volume_scale", "1"},
                           {"c_mean", "units*s"}, {"pmd_paper", "1"},      {"pmd_consistent", "1"}};
  if (e.pmd_empirical) {
    cols.push_back({"pmd_empirical", "1"});
    cols.push_back({"pmd_lower", "1"});
    cols.push_back({"pmd_upper", "1"});
  }
  ResultTable t = make_table(config, "pmd", std::move(cols));
  const double xi = config.receiver.sampler_efficiency;
  const double gamma = config.receiver.binding_fraction;
  const double rate = config.breath_rate() > 0.0 ? config.breath_rate() : 1.0;
  const double sigma = calibrated_sigma(xi, gamma, rate, e.pmd_calibration);
  t.set_meta("calibration", number_text(e.pmd_calibration));
  t.set_meta("sigma", number_text(sigma));

  struct Variant {
    double rate_scale;
    double volume_scale;
  };
  const Variant variants[] = {{1.0, 1.0}, {0.5, 1.0}, {1.0, 0.5}};
  const std::size_t nd = e.pmd_distances.size();
  const std::uint64_t seed = effective_seed(config);
  const auto rows = parallel_map<std::vector<double>>(3 * nd, e.jobs, [&](std::size_t i) {
    const Variant v = variants[i / nd];
    const double d = e.pmd_distances[i % nd];
    ReceiverSpec rx = inline_receiver(config, d);
    rx.radius *= std::cbrt(v.volume_scale);
    const double cm = steady_c_mean(config, config.channel, rate * v.rate_scale, rx);
    std::vector<double> row{d,  v.rate_scale, v.volume_scale, cm, pmd_paper(cm, xi, gamma, sigma),
                            pmd_consistent(cm, xi, gamma, sigma)};
    if (e.pmd_empirical) {
      const auto est = oracles::empirical_pmd(cm, xi, gamma, sigma, e.mc_trials, seed + i);
      row.insert(row.end(), {est.estimate, est.lower, est.upper});
    }
    return row;
  });
  for (const auto& r : rows) t.add_row(r);
  // Halving the volume against halving the rate: ratio of the resulting c_mean.
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t i = 0; i < nd; ++i) {
    const double r = rows[2 * nd + i][3] / rows[nd + i][3];
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  t.set_meta("c_mean_half_volume_over_half_rate", number_text(lo) + " .. " + number_text(hi));
  return t;
}

ResultTable run_mc_pmd(const ScenarioConfig& config) {
  const auto& e = config.experiment;
  ResultTable t = make_table(config, "mc-pmd",
                             {{"d_x", "cm"},
                              {"c_mean", "units*s"},
                              {"sigma", "units*s"},
                              {"pmd_paper", "1"},
                              {"pmd_consistent", "1"},
                              {"pmd_empirical", "1"},
                              {"pmd_lower", "1"},
                              {"pmd_upper", "1"},
                              {"consistent_in_interval", "1"}});
  const double xi = config.receiver.sampler_efficiency;
  const double gamma = config.receiver.binding_fraction;
  const double rate = config.breath_rate() > 0.0 ? config.breath_rate() : 1.0;
  const double sigma = calibrated_sigma(xi, gamma, rate, e.pmd_calibration);
  const std::uint64_t seed = effective_seed(config);
  t.set_meta("trials", std::to_string(e.mc_trials));
  const auto rows = parallel_map<std::vector<double>>(
      e.mc_distances.size(), e.jobs, [&](std::size_t i) {
        const double d = e.mc_distances[i];
        const ReceiverSpec rx = inline_receiver(config, d);
        const double cm = steady_c_mean(config, config.channel, rate, rx);
        const double analytic = pmd_consistent(cm, xi, gamma, sigma);
        const auto est = oracles::empirical_pmd(cm, xi, gamma, sigma, e.mc_trials, seed + i);
        return std::vector<double>{d,
                                   cm,
                                   sigma,
                                   pmd_paper(cm, xi, gamma, sigma),
                                   analytic,
                                   est.estimate,
                                   est.lower,
                                   est.upper,
                                   est.contains(analytic) ? 1.0 : 0.0};
      });
  for (const auto& r : rows) t.add_row(r);
  return t;
}

// ---------------------------------------------------------------------------

ResultTable run_field_grid(const ScenarioConfig& config) {
  const auto& e = config.experiment;
  ResultTable t =
      make_table(config, "field", {{"x", "cm"}, {"y", "cm"}, {"z", "cm"}, {"C", "units/cm^3"}});
  const auto xs = e.field_x.values();
  const auto ys = e.field_y.values();
  const auto zs = e.field_z.values();
  for (double z : zs) {
    if (z < 0.0) throw ConfigError("experiment.field_z", "grid reaches below ground");
  }
  const auto slices = parallel_map<std::vector<std::vector<double>>>(
      xs.size(), e.jobs, [&](std::size_t ix) {
        std::vector<std::vector<double>> rows;
        const double x = xs[ix];
        for (double y : ys) {
          for (double z : zs) {
            double c = 0.0;
            for (const auto& user : config.sources.users) {
              if (user.breath_rate == 0.0) continue;
              c += steady_state_concentration(
                  user.breath_rate, {x - user.location.x, y - user.location.y, z},
                  config.channel, user.height());
            }
            rows.push_back({x, y, z, c});
          }
        }
        return rows;
      });
  for (const auto& slice : slices) {
    for (const auto& r : slice) t.add_row(r);
  }
  return t;
}

ResultTable run_timeseries(const ScenarioConfig& config) {
  const auto& e = config.experiment;
  const bool stochastic = config.sources.stochastic.has_value();
  std::vector<Column> cols{{"t", "s"}, {"C", "units/cm^3"}};
  if (stochastic) cols.push_back({"C_expected", "units/cm^3"});
  ResultTable t = make_table(config, "timeseries", std::move(cols));
  const Position c = config.receiver.center;
  t.set_meta("probe", number_text(c.x) + " " + number_text(c.y) + " " + number_text(c.z));
  const auto rows = parallel_map<std::vector<double>>(e.times.size(), e.jobs, [&](std::size_t i) {
    const SpaceTimePoint p{c.x, c.y, c.z, e.times[i]};
    std::vector<double> row{e.times[i], multi_user_response(config.sources, p, config.channel)};
    if (stochastic) row.push_back(stochastic_expected_response(config.sources, p, config.channel));
    return row;
  });
  for (const auto& r : rows) t.add_row(r);
  return t;
}

ResultTable run_frequency_response(const ScenarioConfig& config) {
  const auto& e = config.experiment;
  ResultTable t = make_table(config, "freq",
                             {{"omega", "rad/s"},
                              {"magnitude", "s/cm^3"},
                              {"phase", "rad"},
                              {"unwrapped_phase", "rad"}});
  const auto& src = primary_source(config);
  const Position c = config.receiver.center;
  const Position rel{c.x - src.location.x, c.y - src.location.y, c.z};
  for (double w : e.omegas) {
    const auto h = frequency_response(rel, w, config.channel, src.height());
    t.add_row({w, h.magnitude, h.phase, h.unwrapped_phase});
  }
  return t;
}

// ---------------------------------------------------------------------------
// Oracle suite

namespace {

struct Check {
  std::string name;
  std::string comparison;  // "<" or ">=" or "=="
  double value;
  double limit;

  bool passed() const {
    if (comparison == ">=") return value >= limit;
    if (comparison == "==") return value == limit;
    return value < limit;
  }
};

}  // namespace

ResultTable run_oracle_suite(const ScenarioConfig& config) {
  using namespace oracles;
  const ChannelParams& params = config.channel;
  const auto& src = primary_source(config);
  const double height = src.height();
  const double d = std::max(config.receiver.center.x - src.location.x, 10.0 * params.x_min);
  const double eta_d = eta(d, params);
  const double u = params.wind_speed;
  const std::uint64_t seed = effective_seed(config);
  std::vector<Check> checks;

  // Steady march against the closed plume.
  {
    const auto coarse = MarchGrid::for_plume(eta_d, height, 20, 1.0);
    const auto r = fd_march_steady(params, height, coarse);
    checks.push_back({"steady_march_l2_error", "<", r.report.l2_rel_error, 0.02});
    double drift = 0.0;
    for (double m : r.slice_mass) drift = std::max(drift, std::abs(m * u - 1.0));
    checks.push_back({"steady_march_slice_mass_drift", "<", drift, 0.005});

    auto g = MarchGrid::for_plume(eta_d, height, 20, 0.5);
    g.scheme = MarchScheme::Implicit;
    const double e1 = fd_march_steady(params, height, g).report.l2_rel_error;
    const double e2 = fd_march_steady(params, height, g.refined()).report.l2_rel_error;
    checks.push_back({"steady_march_refinement_ratio", ">=", e1 / e2, 3.0});
  }

  // Crosswind mass conservation at 10 stations.
  {
    double worst = 0.0;
    for (int i = 1; i <= 10; ++i) {
      const double x = d * i / 5.0;
      if (x < params.x_min) continue;
      worst = std::max(worst, std::abs(crosswind_mass(1.0, x, params, height) * u - 1.0));
    }
    checks.push_back({"crosswind_mass_rel_error", "<", worst, 1e-6});
  }

  // Transient jet: total mass and FD probes (constant K only).
  if (params.diffusivity.is_constant()) {
    const double t_mass = (d + 10.0 * std::sqrt(eta_d)) / u;
    checks.push_back({"jet_total_mass_rel_error", "<",
                      std::abs(jet_total_mass(1.0, t_mass, params, height) - 1.0), 0.01});

    const double k = params.diffusivity.k0();
    const double t_peak = d / u;
    const double sd_end = std::sqrt(2.0 * k * 1.2 * t_peak);
    TransientGrid tg;
    tg.dx = tg.dy = tg.dz = sd_end / 6.0;
    tg.half_width_x = tg.half_width_y = tg.half_width_z = 7.0 * sd_end;
    tg.t_start = std::min(0.2 * t_peak, 2.0 * tg.dx * tg.dx / k);
    tg.t_start = std::max(tg.t_start, 2.0 * tg.dx * tg.dx / k);
    tg.t_end = 1.2 * t_peak;
    const auto r = fd_march_transient(params, height, tg, {{d, 0.0, height}});
    checks.push_back({"transient_probe_rel_error", "<", r.report.max_rel_error, 0.05});
    checks.push_back({"transient_mass_drift", "<", r.report.grid.at("mass_drift"), 0.01});
    checks.push_back({"transient_peak_time_offset_steps", "<",
                      r.report.grid.at("max_peak_time_offset") / r.dt, 1.0 + 1e-9});
  }

  // Breath response vs numeric step convolution at 20 random points.
  {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const double x = params.x_min + 10.0 + unit(rng) * (2.0 * d);
      const double sd = std::sqrt(2.0 * eta(x, params));
      const double y = (unit(rng) - 0.5) * 2.0 * sd;
      const double z = height + (unit(rng) - 0.5) * 2.0 * sd;
      const double t = (x - 2.0 * sd) / u + unit(rng) * 2.0 * x / u;
      const SpaceTimePoint p{x, y, z, t};
      const double closed = breath_response(1.0, 0.0, p, params, height);
      const double numeric = numeric_step_convolution(p, params, height);
      if (closed > 0.0) worst = std::max(worst, std::abs(numeric / closed - 1.0));
    }
    checks.push_back({"breath_convolution_rel_error", "<", worst, 1e-6});
  }

  // Frequency response shape and phase from the DFT of the impulse response.
  {
    const Position p{d, 0.0, height};
    const double sd_t = std::sqrt(2.0 * eta_d) / u;
    const double dt = 6.0 * sd_t / 64.0;
    // Record of about 4 d / u keeps the phase step per bin well under pi.
    const auto n = static_cast<std::size_t>(std::ceil(4.0 * (d / u + 8.0 * sd_t) / dt));
    const auto s = sampled_transfer_function(p, params, height, dt, n);
    const auto mag = s.normalized_magnitude();
    const double w_max = u / std::sqrt(eta_d);
    double worst = 0.0;
    double ratio_lo = std::numeric_limits<double>::infinity();
    double ratio_hi = 0.0;
    double ratio_sum = 0.0;
    int count = 0;
    for (std::size_t m = 0; m < s.omega.size() && s.omega[m] <= w_max; ++m) {
      const double expected = std::exp(-s.omega[m] * s.omega[m] * eta_d / (u * u));
      worst = std::max(worst, std::abs(mag[m] / expected - 1.0));
      const double ratio = std::abs(s.value[m]) /
                           frequency_response(p, s.omega[m], params, height).magnitude;
      ratio_lo = std::min(ratio_lo, ratio);
      ratio_hi = std::max(ratio_hi, ratio);
      ratio_sum += ratio;
      ++count;
    }
    checks.push_back({"dft_magnitude_rel_error", "<", worst, 0.01});
    const double slope = s.phase_slope(w_max);
    checks.push_back({"dft_phase_slope_rel_error", "<", std::abs(slope / (-d / u) - 1.0), 0.01});
    checks.push_back({"dft_constant_ratio_variation", "<",
                      (ratio_hi - ratio_lo) / (ratio_sum / count), 0.005});
  }

  // Missed detection: Monte Carlo against the threshold-consistent form.
  {
    int outside = 0;
    const double args[] = {0.25, 0.5, 1.0, 1.5, 2.0};
    for (int i = 0; i < 5; ++i) {
      const double cm = 2.0 * args[i];  // xi = gamma = sigma = 1
      const auto est = empirical_pmd(cm, 1.0, 1.0, 1.0, config.experiment.mc_trials,
                                     seed + static_cast<std::uint64_t>(i), config.experiment.jobs);
      if (!est.contains(pmd_consistent(cm, 1.0, 1.0, 1.0))) ++outside;
    }
    checks.push_back({"empirical_pmd_points_outside_interval", "==", static_cast<double>(outside), 0.0});
  }

  // c_mean by Gauss-Legendre against Monte Carlo volume integration.
  {
    ReceiverSpec rx = inline_receiver(config, d);
    const auto field = [&](const SpaceTimePoint& p) {
      return steady_at(config, params, 1.0, p.position());
    };
    const double gl = c_mean(rx, field, config.quadrature);
    const auto mc = mc_volume_integral(rx, field, 10'000'000, seed);
    checks.push_back({"c_mean_vs_monte_carlo_std_errors", "<",
                      std::abs(gl - mc.estimate) / mc.std_error, 3.0});
  }

  ResultTable t =
      make_table(config, "validate-oracles",
                 {{"id", "1"}, {"value", "1"}, {"limit", "1"}, {"passed", "1"}});
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const auto& c = checks[i];
    t.set_meta("check." + std::to_string(i), c.name + " (value " + c.comparison + " limit)");
    t.add_row({static_cast<double>(i), c.value, c.limit, c.passed() ? 1.0 : 0.0});
  }
  return t;
}

bool oracle_suite_passed(const ResultTable& table) {
  const auto passed = table.column("passed");
  return std::all_of(passed.begin(), passed.end(), [](double v) { return v == 1.0; });
}

}  // namespace aerochan

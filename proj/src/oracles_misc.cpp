// Quadrature, DFT and Monte Carlo oracles.

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "aerochan/errors.hpp"
#include "aerochan/oracles.hpp"
#include "aerochan/quadrature.hpp"

namespace aerochan::oracles {

double numeric_step_convolution(const SpaceTimePoint& p, const ChannelParams& params,
                                double source_height, double breath_rate,
                                double entry_time, double rel_tol) {
  const double elapsed = p.t - entry_time;
  if (p.x <= 0.0 || !(elapsed > 0.0)) {
    // Domain checks still apply.
    impulse_response({p.x, p.y, p.z, 0.0}, params, source_height);
    return 0.0;
  }
  const auto kernel = [&](double tau) {
    return impulse_response({p.x, p.y, p.z, tau}, params, source_height);
  };

  // Break the integration range at the pulse centre and a few pulse widths
  // around it so the adaptive rule sees smooth pieces.
  const double u = params.wind_speed;
  const double centre = p.x / u;
  const double width = std::sqrt(2.0 * eta(p.x, params)) / u;
  std::vector<double> cuts{0.0, elapsed};
  for (double k : {-12.0, -6.0, -3.0, -1.0, 0.0, 1.0, 3.0, 6.0, 12.0}) {
    const double c = centre + k * width;
    if (c > 0.0 && c < elapsed) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());

  using boost::math::quadrature::gauss_kronrod;
  double total = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double piece_error = 0.0;
    total += gauss_kronrod<double, 61>::integrate(kernel, cuts[i], cuts[i + 1], 20,
                                                   0.01 * rel_tol, &piece_error);
    error += piece_error;
  }
  if (error > rel_tol * std::abs(total) && error > 1e-300) {
    std::ostringstream os;
    os << "step convolution did not converge: error estimate " << error << " for value "
       << total;
    throw NumericError(os.str());
  }
  return breath_rate * total;
}

// ---------------------------------------------------------------------------

std::vector<double> Spectrum::normalized_magnitude() const {
  std::vector<double> out(value.size());
  const double dc = value.empty() ? 0.0 : std::abs(value.front());
  for (std::size_t i = 0; i < value.size(); ++i) out[i] = dc > 0.0 ? std::abs(value[i]) / dc : 0.0;
  return out;
}

double Spectrum::phase_slope(double omega_max) const {
  std::vector<double> w;
  std::vector<double> ph;
  double prev = 0.0;
  double offset = 0.0;
  for (std::size_t i = 0; i < value.size() && omega[i] <= omega_max; ++i) {
    const double raw = std::arg(value[i]);
    if (i > 0) {
      double d = raw + offset - prev;
      while (d > std::numbers::pi) {
        offset -= 2.0 * std::numbers::pi;
        d -= 2.0 * std::numbers::pi;
      }
      while (d < -std::numbers::pi) {
        offset += 2.0 * std::numbers::pi;
        d += 2.0 * std::numbers::pi;
      }
    }
    prev = raw + offset;
    w.push_back(omega[i]);
    ph.push_back(prev);
  }
  if (w.size() < 2) throw NumericError("phase slope needs at least two bins below omega_max");
  const double n = static_cast<double>(w.size());
  double sw = 0.0, sp = 0.0, sww = 0.0, swp = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    sw += w[i];
    sp += ph[i];
    sww += w[i] * w[i];
    swp += w[i] * ph[i];
  }
  return (n * swp - sw * sp) / (n * sww - sw * sw);
}

Spectrum sampled_transfer_function(const Position& p, const ChannelParams& params,
                                   double source_height, double sample_interval,
                                   std::size_t n_samples, double time_shift) {
  if (!(sample_interval > 0.0) || n_samples < 2) {
    throw ConfigError("oracle.dft", "need a positive sample interval and >= 2 samples");
  }
  const double u = params.wind_speed;
  const double e = eta(p.x, params);
  const double width = std::sqrt(2.0 * e) / u;  // pulse standard deviation in time
  const double centre = p.x / u + time_shift;
  if (6.0 * width / sample_interval < 32.0) {
    std::ostringstream os;
    os << "aliasing guard: pulse (6 sd = " << 6.0 * width << " s) spans fewer than 32 samples";
    throw ConfigError("oracle.dft.sample_interval", os.str());
  }
  if (centre - 8.0 * width < 0.0 ||
      centre + 8.0 * width > sample_interval * static_cast<double>(n_samples - 1)) {
    throw ConfigError("oracle.dft.n_samples", "sampling window does not cover the full pulse");
  }

  std::vector<double> h(n_samples);
  for (std::size_t k = 0; k < n_samples; ++k) {
    const double t = static_cast<double>(k) * sample_interval - time_shift;
    h[k] = impulse_response({p.x, p.y, p.z, t}, params, source_height);
  }

  Spectrum s;
  s.sample_interval = sample_interval;
  const std::size_t bins = n_samples / 2 + 1;
  const double base = 2.0 * std::numbers::pi / (static_cast<double>(n_samples) * sample_interval);
  s.omega.resize(bins);
  s.value.resize(bins);
  for (std::size_t m = 0; m < bins; ++m) {
    const double w = base * static_cast<double>(m);
    // Index phase reduced modulo n keeps the twiddle argument small.
    std::complex<double> acc = 0.0;
    for (std::size_t k = 0; k < n_samples; ++k) {
      if (h[k] == 0.0) continue;
      const auto km = (k * m) % n_samples;
      const double angle =
          -2.0 * std::numbers::pi * static_cast<double>(km) / static_cast<double>(n_samples);
      acc += h[k] * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    s.omega[m] = w;
    s.value[m] = sample_interval * acc;
  }
  return s;
}

// ---------------------------------------------------------------------------

namespace {

// Adaptive Gauss-Kronrod over consecutive pieces [cuts[i], cuts[i+1]].
template <typename F>
double integrate_pieces(F&& f, std::vector<double> cuts, double tol) {
  using boost::math::quadrature::gauss_kronrod;
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += gauss_kronrod<double, 31>::integrate(f, cuts[i], cuts[i + 1], 15, tol);
  }
  return total;
}

// Breakpoints for a Gaussian of width `sd` centred at `centre`, clipped to
// [lo, hi].
std::vector<double> gaussian_cuts(double centre, double sd, double lo, double hi) {
  std::vector<double> cuts{lo, hi};
  for (double k : {-14.0, -7.0, -3.0, 0.0, 3.0, 7.0, 14.0}) {
    const double c = centre + k * sd;
    if (c > lo && c < hi) cuts.push_back(c);
  }
  return cuts;
}

}  // namespace

double crosswind_mass(double rate, double x, const ChannelParams& params,
                      double source_height) {
  const double sd = std::sqrt(2.0 * eta(x, params));
  const double reach = 16.0 * sd;
  const auto y_cuts = gaussian_cuts(0.0, sd, -reach, reach);
  const auto z_cuts = gaussian_cuts(source_height, sd, 0.0, source_height + reach);
  const auto inner = [&](double y) {
    return integrate_pieces(
        [&](double z) { return steady_state_concentration(rate, {x, y, z}, params, source_height); },
        z_cuts, 1e-12);
  };
  return integrate_pieces(inner, y_cuts, 1e-12);
}

double jet_total_mass(double jet_mass, double t, const ChannelParams& params,
                      double source_height) {
  const double centre = params.wind_speed * t;
  const double sd_c = std::sqrt(2.0 * eta(centre, params));
  const double x_lo = std::max(params.x_min, centre - 20.0 * sd_c);
  const double x_hi = centre + 20.0 * sd_c;
  // Fixed 12-point rule per piece between Gaussian cut points, in all three
  // directions. Nested adaptive rules cost minutes here for no gain.
  const auto& rule = quad::gauss_legendre(12);
  const auto pieces = [&](std::vector<double> cuts, auto&& f) {
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double half = 0.5 * (cuts[i + 1] - cuts[i]);
      const double mid = 0.5 * (cuts[i + 1] + cuts[i]);
      for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        total += half * rule.weights[k] * f(mid + half * rule.nodes[k]);
      }
    }
    return total;
  };
  return pieces(gaussian_cuts(centre, sd_c, x_lo, x_hi), [&](double x) {
    const double sd = std::sqrt(2.0 * eta(x, params));
    const double reach = 16.0 * sd;
    return pieces(gaussian_cuts(0.0, sd, -reach, reach), [&](double y) {
      return pieces(gaussian_cuts(source_height, sd, 0.0, source_height + reach), [&](double z) {
        return jet_concentration(jet_mass, 0.0, {x, y, z, t}, params, source_height);
      });
    });
  });
}

// ---------------------------------------------------------------------------

BinomialEstimate wilson_interval(std::uint64_t misses, std::uint64_t trials, double z) {
  BinomialEstimate b;
  b.misses = misses;
  b.trials = trials;
  if (trials == 0) return b;
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(misses) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (phat + z2 / (2.0 * n)) / denom;
  const double half = z / denom * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n));
  b.estimate = phat;
  b.lower = std::max(0.0, centre - half);
  b.upper = std::min(1.0, centre + half);
  return b;
}

BinomialEstimate empirical_pmd(double c_mean_value, double xi, double gamma, double sigma,
                               std::uint64_t trials, std::uint64_t seed, int jobs) {
  if (trials < 10000) throw DomainError("empirical_pmd needs at least 1e4 trials");
  if (!(sigma >= 0.0)) throw DomainError("sigma must be nonnegative");
  constexpr std::uint64_t kChunk = 1u << 16;
  const std::uint64_t chunks = (trials + kChunk - 1) / kChunk;
  std::vector<std::uint64_t> misses(chunks, 0);

  ReceiverSpec rx;
  rx.sampler_efficiency = xi;
  rx.binding_fraction = gamma;
  const NoiseModel noise{sigma * sigma};
  const double threshold = ml_threshold(c_mean_value, xi, gamma);

  auto run_chunk = [&](std::uint64_t chunk) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
    std::mt19937_64 rng(seq);
    const std::uint64_t begin = chunk * kChunk;
    const std::uint64_t end = std::min(trials, begin + kChunk);
    std::uint64_t count = 0;
    for (std::uint64_t i = begin; i < end; ++i) {
      const double received = sample_received(c_mean_value, rx, noise, rng);
      if (decide(received, threshold) == Decision::Healthy) ++count;
    }
    misses[chunk] = count;
  };

  const auto workers = static_cast<std::uint64_t>(std::max(1, jobs));
  if (workers == 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::thread> pool;
    for (std::uint64_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::uint64_t c = w; c < chunks; c += workers) run_chunk(c);
      });
    }
    for (auto& t : pool) t.join();
  }
  std::uint64_t total = 0;
  for (auto m : misses) total += m;
  return wilson_interval(total, trials, 3.0);
}

MonteCarloIntegral mc_volume_integral(const ReceiverSpec& receiver,
                                      const ConcentrationField& field,
                                      std::uint64_t samples, std::uint64_t seed) {
  if (samples < 100000) throw DomainError("mc_volume_integral needs at least 1e5 samples");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> window(0.0, 1.0);
  const double r = receiver.radius;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    double a, b, c;
    do {
      a = unit(rng);
      b = unit(rng);
      c = unit(rng);
    } while (a * a + b * b + c * c > 1.0);
    const double t = receiver.window_start + receiver.sampling_window * window(rng);
    const double v = field({receiver.center.x + r * a, receiver.center.y + r * b,
                            receiver.center.z + r * c, t});
    sum += v;
    sum_sq += v * v;
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq / n - mean * mean) * n / (n - 1.0));
  const double scale = receiver.volume() * receiver.sampling_window;
  return {scale * mean, scale * std::sqrt(var / n)};
}

}  // namespace aerochan::oracles

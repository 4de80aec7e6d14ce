#include "aerochan/channel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "aerochan/errors.hpp"
#include "aerochan/quadrature.hpp"

namespace aerochan {

namespace {

constexpr double kPi = std::numbers::pi;

// Crosswind/vertical factor f(y, z) = e^{-y^2/4eta} (e^{-(z-H)^2/4eta} +
// e^{-(z+H)^2/4eta}); the second term is the image source under the ground.
double crosswind_factor(double y, double z, double height, double eta_x) {
  const double inv = 1.0 / (4.0 * eta_x);
  const double dz_minus = z - height;
  const double dz_plus = z + height;
  return std::exp(-y * y * inv) *
         (std::exp(-dz_minus * dz_minus * inv) + std::exp(-dz_plus * dz_plus * inv));
}

// Validates the evaluation point. Returns false if the point lies upwind of
// the source (response identically zero).
bool in_plume_domain(double x, double z, const ChannelParams& params) {
  if (!std::isfinite(x) || !std::isfinite(z)) {
    throw DomainError("non-finite evaluation point");
  }
  if (z < 0.0) {
    std::ostringstream os;
    os << "evaluation point below ground (z = " << z << ")";
    throw DomainError(os.str());
  }
  if (x <= 0.0) return false;
  if (x < params.x_min) {
    std::ostringstream os;
    os << "x = " << x << " cm is inside the near-field cutoff x_min = "
       << params.x_min << " cm";
    throw DomainError(os.str());
  }
  return true;
}

void check_height(double height) {
  if (!(height > 0.0) || !std::isfinite(height)) {
    throw DomainError("source height must be positive");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// DiffusivityProfile

DiffusivityProfile DiffusivityProfile::constant(double k0) {
  if (!(k0 > 0.0) || !std::isfinite(k0)) {
    throw ConfigError("channel.diffusivity", "constant K must be positive and finite");
  }
  DiffusivityProfile p;
  p.kind_ = Kind::Constant;
  p.k0_ = k0;
  p.label_ = "constant";
  return p;
}

DiffusivityProfile DiffusivityProfile::power_law(double k0, double x_ref,
                                                 double exponent) {
  if (!(k0 > 0.0) || !std::isfinite(k0)) {
    throw ConfigError("channel.diffusivity.value", "K0 must be positive and finite");
  }
  if (!(x_ref > 0.0) || !std::isfinite(x_ref)) {
    throw ConfigError("channel.diffusivity.x_ref", "reference distance must be positive");
  }
  // eta = integral of K from 0 must stay finite.
  if (!(exponent > -1.0) || !std::isfinite(exponent)) {
    throw ConfigError("channel.diffusivity.exponent", "exponent must exceed -1");
  }
  DiffusivityProfile p;
  p.kind_ = Kind::PowerLaw;
  p.k0_ = k0;
  p.x_ref_ = x_ref;
  p.exponent_ = exponent;
  p.label_ = "power";
  return p;
}

DiffusivityProfile DiffusivityProfile::custom(std::function<double(double)> k,
                                              std::string label) {
  if (!k) throw ConfigError("channel.diffusivity", "empty diffusivity function");
  DiffusivityProfile p;
  p.kind_ = Kind::Custom;
  p.label_ = std::move(label);
  p.fn_ = std::make_shared<const std::function<double(double)>>(std::move(k));
  return p;
}

double DiffusivityProfile::operator()(double x) const {
  switch (kind_) {
    case Kind::Constant:
      return k0_;
    case Kind::PowerLaw:
      return k0_ * std::pow(x / x_ref_, exponent_);
    case Kind::Custom: {
      const double k = (*fn_)(x);
      if (!(k > 0.0) || !std::isfinite(k)) {
        std::ostringstream os;
        os << "diffusivity '" << label_ << "' is not positive/finite at x = " << x;
        throw DomainError(os.str());
      }
      return k;
    }
  }
  return k0_;
}

// ---------------------------------------------------------------------------
// Parameter types

ChannelParams ChannelParams::table_defaults() { return ChannelParams{}; }

void ChannelParams::validate() const {
  if (!(wind_speed > 0.0) || !std::isfinite(wind_speed)) {
    throw ConfigError("channel.wind_speed", "wind speed must be positive and finite");
  }
  if (!(x_min > 0.0) || !std::isfinite(x_min)) {
    throw ConfigError("channel.x_min", "near-field cutoff must be positive");
  }
  // Spot-check positivity; custom profiles are checked again on every call.
  for (double x : {x_min, 1.0, 10.0, 100.0, 1000.0}) {
    const double k = diffusivity(x);
    if (!(k > 0.0) || !std::isfinite(k)) {
      throw ConfigError("channel.diffusivity", "diffusivity must be positive");
    }
  }
}

void SourceSpec::validate() const {
  if (!(location.z > 0.0)) {
    throw ConfigError("sources.location", "source height must be positive");
  }
  if (!(breath_rate >= 0.0) || !std::isfinite(breath_rate)) {
    throw ConfigError("sources.breath_rate", "breath rate must be nonnegative");
  }
  for (const auto& jet : jets) {
    if (!(jet.mass > 0.0) || !std::isfinite(jet.mass)) {
      throw ConfigError("sources.jets.mass", "jet mass must be positive");
    }
    if (!(jet.time >= entry_time)) {
      throw ConfigError("sources.jets.time", "jet released before the person's entry time");
    }
  }
}

int StochasticGrid::num_intervals() const {
  return static_cast<int>(std::ceil(horizon / interval - 1e-12));
}

void MultiUserScenario::validate() const {
  for (const auto& user : users) user.validate();
  if (!stochastic) return;
  const auto& g = *stochastic;
  if (!(g.interval > 0.0)) {
    throw ConfigError("sources.stochastic.interval", "interval must be positive");
  }
  if (!(g.horizon > 0.0)) {
    throw ConfigError("sources.stochastic.horizon", "horizon must be positive");
  }
  if (!(g.jet_mass > 0.0)) {
    throw ConfigError("sources.stochastic.jet_mass", "jet mass must be positive");
  }
  const auto rows = static_cast<std::size_t>(g.num_intervals());
  if (g.probabilities.size() != rows) {
    throw ConfigError("sources.stochastic.probabilities",
                      "expected " + std::to_string(rows) + " interval rows");
  }
  for (const auto& row : g.probabilities) {
    if (row.size() != users.size()) {
      throw ConfigError("sources.stochastic.probabilities",
                        "each row needs one probability per user");
    }
    for (double p : row) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw ConfigError("sources.stochastic.probabilities",
                          "probabilities must lie in [0, 1]");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Closed forms

double eta(double x, const ChannelParams& params) {
  if (x < 0.0 || std::isnan(x)) throw DomainError("eta: x must be nonnegative");
  if (x == 0.0) return 0.0;
  const auto& k = params.diffusivity;
  const double u = params.wind_speed;
  if (k.is_constant()) return k.k0() * x / u;
  if (k.is_power_law()) {
    const double p1 = k.exponent() + 1.0;
    return k.k0() * k.x_ref() * std::pow(x / k.x_ref(), p1) / (p1 * u);
  }
  const auto integrand = [&k](double s) {
    return k(s > 0.0 ? s : std::numeric_limits<double>::min());
  };
  return quad::adaptive_simpson(integrand, 0.0, x, 1e-10) / u;
}

double impulse_response(const SpaceTimePoint& p, const ChannelParams& params,
                        double source_height) {
  check_height(source_height);
  if (!std::isfinite(p.t)) throw DomainError("impulse_response: t must be finite");
  if (!in_plume_domain(p.x, p.z, params)) return 0.0;
  const double e = eta(p.x, params);
  const double dx = p.x - params.wind_speed * p.t;
  const double norm = 1.0 / (8.0 * std::pow(kPi * e, 1.5));
  return norm * std::exp(-dx * dx / (4.0 * e)) *
         crosswind_factor(p.y, p.z, source_height, e);
}

double jet_concentration(double jet_mass, double release_time,
                         const SpaceTimePoint& p, const ChannelParams& params,
                         double source_height) {
  if (!(jet_mass >= 0.0)) throw DomainError("jet mass must be nonnegative");
  if (p.t < release_time) {
    // Still validate the location so that errors do not depend on time.
    check_height(source_height);
    in_plume_domain(p.x, p.z, params);
    return 0.0;
  }
  SpaceTimePoint shifted = p;
  shifted.t = p.t - release_time;
  return jet_mass * impulse_response(shifted, params, source_height);
}

double breath_response(double breath_rate, double entry_time,
                       const SpaceTimePoint& p, const ChannelParams& params,
                       double source_height) {
  if (!(breath_rate >= 0.0)) throw DomainError("breath rate must be nonnegative");
  check_height(source_height);
  if (!in_plume_domain(p.x, p.z, params)) return 0.0;
  const double elapsed = p.t - entry_time;
  if (!(elapsed > 0.0)) return 0.0;
  const double e = eta(p.x, params);
  const double u = params.wind_speed;
  const double root = 2.0 * std::sqrt(e);
  const double rise = std::erfc((p.x - u * elapsed) / root) - std::erfc(p.x / root);
  return breath_rate / (8.0 * kPi * e * u) * rise *
         crosswind_factor(p.y, p.z, source_height, e);
}

double person_response(const SourceSpec& source, const SpaceTimePoint& p,
                       const ChannelParams& params) {
  SpaceTimePoint local = p;
  local.x = p.x - source.location.x;
  local.y = p.y - source.location.y;
  const double height = source.height();
  double total = 0.0;
  if (source.breath_rate > 0.0) {
    total += breath_response(source.breath_rate, source.entry_time, local, params, height);
  } else {
    // Keep domain errors independent of which emission terms are present.
    check_height(height);
    in_plume_domain(local.x, local.z, params);
  }
  for (const auto& jet : source.jets) {
    total += jet_concentration(jet.mass, jet.time, local, params, height);
  }
  return total;
}

double multi_user_response(const MultiUserScenario& scenario,
                           const SpaceTimePoint& p, const ChannelParams& params) {
  double total = 0.0;
  for (const auto& user : scenario.users) {
    if (p.x - user.location.x < 0.0) continue;
    if (p.t < user.entry_time) continue;
    total += person_response(user, p, params);
  }
  return total;
}

double stochastic_expected_response(const MultiUserScenario& scenario,
                                    const SpaceTimePoint& p,
                                    const ChannelParams& params) {
  if (!scenario.stochastic) {
    throw ConfigError("sources.stochastic", "scenario has no stochastic grid");
  }
  const auto& grid = *scenario.stochastic;
  const int intervals = grid.num_intervals();
  if (grid.probabilities.size() != static_cast<std::size_t>(intervals)) {
    throw ConfigError("sources.stochastic.probabilities", "row count mismatch");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < scenario.users.size(); ++j) {
    const auto& user = scenario.users[j];
    if (p.x - user.location.x < 0.0) continue;
    if (p.t < user.entry_time) continue;
    SpaceTimePoint local = p;
    local.x = p.x - user.location.x;
    local.y = p.y - user.location.y;
    for (int i = 0; i < intervals; ++i) {
      const double prob = grid.probabilities[i].at(j);
      if (prob == 0.0) continue;
      const double start = i * grid.interval;
      if (start < user.entry_time) continue;
      total += prob * jet_concentration(grid.jet_mass, start, local, params,
                                        user.height());
    }
  }
  return total;
}

double steady_state_concentration(double rate, const Position& p,
                                  const ChannelParams& params,
                                  double source_height) {
  if (!(rate >= 0.0)) throw DomainError("emission rate must be nonnegative");
  check_height(source_height);
  if (!in_plume_domain(p.x, p.z, params)) return 0.0;
  const double e = eta(p.x, params);
  return rate / (4.0 * params.wind_speed * kPi * e) *
         crosswind_factor(p.y, p.z, source_height, e);
}

double wrap_phase(double angle) {
  double a = std::remainder(angle, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

ComplexResponse frequency_response(const Position& p, double omega,
                                   const ChannelParams& params,
                                   double source_height) {
  check_height(source_height);
  if (!std::isfinite(omega)) throw DomainError("omega must be finite");
  if (!in_plume_domain(p.x, p.z, params)) return {};
  const double e = eta(p.x, params);
  const double u = params.wind_speed;
  ComplexResponse r;
  r.magnitude = crosswind_factor(p.y, p.z, source_height, e) /
                (8.0 * u * e * std::sqrt(kPi)) * std::exp(-omega * omega * e / (u * u));
  r.unwrapped_phase = -omega * p.x / u;
  r.phase = wrap_phase(r.unwrapped_phase);
  return r;
}

}  // namespace aerochan

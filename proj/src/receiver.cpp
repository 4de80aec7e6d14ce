#include "aerochan/receiver.hpp"

#include <cmath>
#include <numbers>

#include "aerochan/errors.hpp"
#include "aerochan/quadrature.hpp"

namespace aerochan {

namespace {

void check_fraction(double v, const char* field) {
  if (!(v > 0.0 && v <= 1.0)) throw ConfigError(field, "must lie in (0, 1]");
}

void check_orders(const QuadratureOrders& o) {
  if (o.radial < 1 || o.polar < 1 || o.azimuthal < 1 || o.time < 1) {
    throw ConfigError("receiver.quadrature", "quadrature orders must be >= 1");
  }
}

// Calls fn(point, weight) for every spatial node of the tensor rule.
template <typename Fn>
void for_each_sphere_node(const ReceiverSpec& rx, const QuadratureOrders& o, Fn&& fn) {
  const auto& gr = quad::gauss_legendre(o.radial);
  const auto& gp = quad::gauss_legendre(o.polar);
  const auto& ga = quad::gauss_legendre(o.azimuthal);
  const double half_r = 0.5 * rx.radius;
  const double pi = std::numbers::pi;
  for (int a = 0; a < o.azimuthal; ++a) {
    const double phi = pi * (1.0 + ga.nodes[a]);
    const double wa = pi * ga.weights[a];
    const double cphi = std::cos(phi);
    const double sphi = std::sin(phi);
    for (int p = 0; p < o.polar; ++p) {
      const double mu = gp.nodes[p];
      const double s = std::sqrt(1.0 - mu * mu);
      const double wp = gp.weights[p];
      for (int k = 0; k < o.radial; ++k) {
        const double r = half_r * (1.0 + gr.nodes[k]);
        const double wr = half_r * gr.weights[k] * r * r;
        const Position pos{rx.center.x + r * mu, rx.center.y + r * s * cphi,
                           rx.center.z + r * s * sphi};
        fn(pos, wa * wp * wr);
      }
    }
  }
}

}  // namespace

double ReceiverSpec::volume() const {
  return 4.0 / 3.0 * std::numbers::pi * radius * radius * radius;
}

void ReceiverSpec::validate() const {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw ConfigError("receiver.radius", "radius must be positive");
  }
  if (!(sampling_window > 0.0) || !std::isfinite(sampling_window)) {
    throw ConfigError("receiver.sampling_window", "sampling window must be positive");
  }
  if (!std::isfinite(window_start)) {
    throw ConfigError("receiver.window_start", "window start must be finite");
  }
  check_fraction(sampler_efficiency, "receiver.sampler_efficiency");
  check_fraction(binding_fraction, "receiver.binding_fraction");
  if (!(center.z - radius > 0.0)) {
    throw ConfigError("receiver.center", "receiver sphere intersects the ground");
  }
}

double BindingParams::binding_fraction() const {
  const double denom = association_probability + num_states * dissociation_probability;
  if (!(denom > 0.0)) return 0.0;
  return association_probability / denom;
}

void BindingParams::validate() const {
  if (!(association_probability >= 0.0 && association_probability <= 1.0)) {
    throw ConfigError("receiver.binding.association_probability", "must lie in [0, 1]");
  }
  if (!(dissociation_probability >= 0.0 && dissociation_probability <= 1.0)) {
    throw ConfigError("receiver.binding.dissociation_probability", "must lie in [0, 1]");
  }
  if (num_states < 1) throw ConfigError("receiver.binding.num_states", "must be >= 1");
  if (num_antigens < 1) throw ConfigError("receiver.binding.num_antigens", "must be >= 1");
  if (!(association_probability + num_states * dissociation_probability > 0.0)) {
    throw ConfigError("receiver.binding", "P_a + K P_d must be positive");
  }
}

double NoiseModel::sigma() const { return std::sqrt(variance); }

void NoiseModel::validate() const {
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw ConfigError("noise.variance", "noise variance must be positive");
  }
}

const char* to_string(Decision d) {
  return d == Decision::Infected ? "infected" : "healthy";
}

double c_mean(const ReceiverSpec& receiver, const ConcentrationField& field,
              const QuadratureOrders& orders) {
  receiver.validate();
  check_orders(orders);
  const auto& gt = quad::gauss_legendre(orders.time);
  const double half_t = 0.5 * receiver.sampling_window;
  const double mid_t = receiver.window_start + half_t;
  double total = 0.0;
  for_each_sphere_node(receiver, orders, [&](const Position& pos, double w) {
    double inner = 0.0;
    for (int i = 0; i < orders.time; ++i) {
      const double t = mid_t + half_t * gt.nodes[i];
      inner += gt.weights[i] * field({pos.x, pos.y, pos.z, t});
    }
    total += w * half_t * inner;
  });
  return total;
}

double c_mean_steady(const ReceiverSpec& receiver,
                     const std::function<double(const Position&)>& field,
                     const QuadratureOrders& orders) {
  receiver.validate();
  check_orders(orders);
  double total = 0.0;
  for_each_sphere_node(receiver, orders,
                       [&](const Position& pos, double w) { total += w * field(pos); });
  return total * receiver.sampling_window;
}

double c_mean_average(const ReceiverSpec& receiver, double c_mean_value) {
  return c_mean_value / (receiver.volume() * receiver.sampling_window);
}

double sample_received(double c_mean_value, const ReceiverSpec& receiver,
                       const NoiseModel& noise, std::mt19937_64& rng) {
  std::normal_distribution<double> standard(0.0, 1.0);
  const double signal =
      receiver.sampler_efficiency * receiver.binding_fraction * c_mean_value;
  return signal + noise.sigma() * standard(rng);
}

double ml_threshold(double c_mean_value, double xi, double gamma) {
  return gamma * xi * c_mean_value / 2.0;
}

double map_threshold(double c_mean_value, double xi, double gamma, double sigma,
                     double prior_infected) {
  if (!(prior_infected > 0.0 && prior_infected < 1.0)) {
    throw DomainError("prior must lie in (0, 1)");
  }
  const double mean = gamma * xi * c_mean_value;
  const double base = mean / 2.0;
  if (prior_infected == 0.5 || mean == 0.0) return base;
  return base + sigma * sigma * std::log((1.0 - prior_infected) / prior_infected) / mean;
}

Decision decide(double received, double threshold) {
  return received >= threshold ? Decision::Infected : Decision::Healthy;
}

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double pmd_paper(double c_mean_value, double xi, double gamma, double sigma) {
  if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
  return q_function(gamma * xi * c_mean_value / std::sqrt(8.0 * sigma * sigma));
}

double pmd_consistent(double c_mean_value, double xi, double gamma, double sigma) {
  if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
  return q_function(gamma * xi * c_mean_value / (2.0 * sigma));
}

DetectionResult detect(double c_mean_value, const ReceiverSpec& receiver,
                       const NoiseModel& noise, std::mt19937_64& rng) {
  const double xi = receiver.sampler_efficiency;
  const double gamma = receiver.binding_fraction;
  DetectionResult r;
  r.received = sample_received(c_mean_value, receiver, noise, rng);
  r.threshold = ml_threshold(c_mean_value, xi, gamma);
  r.decision = decide(r.received, r.threshold);
  r.pmd_paper = pmd_paper(c_mean_value, xi, gamma, noise.sigma());
  r.pmd_consistent = pmd_consistent(c_mean_value, xi, gamma, noise.sigma());
  return r;
}

}  // namespace aerochan

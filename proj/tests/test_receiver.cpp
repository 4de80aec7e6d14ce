#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "aerochan/channel.hpp"
#include "aerochan/errors.hpp"
#include "aerochan/receiver.hpp"
#include "reference_values.hpp"

using namespace aerochan;

TEST_CASE("Q function") {
  CHECK(q_function(1.0) == doctest::Approx(ref::q_1).epsilon(1e-15));
  CHECK(q_function(2.5) == doctest::Approx(ref::q_2p5).epsilon(1e-14));
  CHECK(q_function(0.0) == 0.5);
}

TEST_CASE("c_mean of simple fields is exact") {
  ReceiverSpec rx;
  const double v = 4.0 / 3.0 * std::numbers::pi * 8.0;
  CHECK(rx.volume() == doctest::Approx(v).epsilon(1e-15));
  CHECK(c_mean(rx, [](const SpaceTimePoint&) { return 2.5; }) ==
        doctest::Approx(2.5 * v * 3.0).epsilon(1e-13));
  // Linear in space and time: the mean is the value at the centre, mid-window.
  const auto linear = [](const SpaceTimePoint& p) { return 1.0 + 0.1 * p.x - 0.2 * p.z + 3.0 * p.t; };
  CHECK(c_mean(rx, linear) == doctest::Approx((1.0 + 10.0 - 36.0 + 4.5) * v * 3.0).epsilon(1e-12));
  // Second moment: integral of (x - cx)^2 over a ball is V r^2 / 5.
  const auto quad = [](const SpaceTimePoint& p) { return (p.x - 100.0) * (p.x - 100.0); };
  CHECK(c_mean(rx, quad) == doctest::Approx(v * 4.0 / 5.0 * 3.0).epsilon(1e-12));
  CHECK(c_mean_average(rx, 3.0 * v) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("c_mean of the steady plume against the reference integral") {
  const ChannelParams p;
  const ReceiverSpec rx;
  const double cm = c_mean_steady(
      rx, [&](const Position& q) { return steady_state_concentration(1.0, q, p, 180.0); });
  CHECK(std::abs(cm / ref::c_mean_100 - 1.0) < 1e-6);
  const double cm_t = c_mean(rx, [&](const SpaceTimePoint& q) {
    return steady_state_concentration(1.0, q.position(), p, 180.0);
  });
  CHECK(cm_t == doctest::Approx(cm).epsilon(1e-13));
}

TEST_CASE("receiver validation") {
  ReceiverSpec rx;
  rx.center.z = 1.5;
  CHECK_THROWS_AS(rx.validate(), ConfigError);
  rx = {};
  rx.radius = 0.0;
  CHECK_THROWS_AS(rx.validate(), ConfigError);
  NoiseModel n;
  n.variance = 0.0;
  CHECK_THROWS_AS(n.validate(), ConfigError);
}

TEST_CASE("binding fraction") {
  BindingParams b;
  b.association_probability = 0.3;
  b.dissociation_probability = 0.1;
  b.num_states = 3;
  CHECK(b.binding_fraction() == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("thresholds and decisions") {
  CHECK(ml_threshold(4.0, 0.85, 0.5) == doctest::Approx(0.85));
  CHECK(map_threshold(4.0, 0.85, 0.5, 1.3, 0.5) == doctest::Approx(ml_threshold(4.0, 0.85, 0.5)));
  // A smaller infected prior raises the threshold.
  CHECK(map_threshold(4.0, 0.85, 0.5, 1.3, 0.1) > ml_threshold(4.0, 0.85, 0.5));
  CHECK(decide(1.0, 1.0) == Decision::Infected);
  CHECK(decide(std::nextafter(1.0, 0.0), 1.0) == Decision::Healthy);
  CHECK(std::string(to_string(Decision::Infected)) == "infected");
}

TEST_CASE("the two missed-detection forms differ by sqrt(2) in the argument") {
  const double c = 3.0, xi = 0.85, g = 0.5, s = 0.7;
  const double arg = g * xi * c / (2.0 * s);
  CHECK(pmd_consistent(c, xi, g, s) == q_function(arg));
  CHECK(pmd_paper(c, xi, g, s) == doctest::Approx(q_function(arg / std::sqrt(2.0))).epsilon(1e-15));
  CHECK(pmd_paper(c, xi, g, s) > pmd_consistent(c, xi, g, s));
}

TEST_CASE("sampling is reproducible for a seed") {
  const ReceiverSpec rx;
  NoiseModel n;
  n.variance = 0.25;
  std::mt19937_64 a(99), b(99);
  for (int i = 0; i < 10; ++i) CHECK(sample_received(1.0, rx, n, a) == sample_received(1.0, rx, n, b));
  std::mt19937_64 c(5);
  const auto r = detect(1.0, rx, n, c);
  CHECK(r.threshold == doctest::Approx(ml_threshold(1.0, rx.sampler_efficiency, rx.binding_fraction)));
  CHECK(r.decision == decide(r.received, r.threshold));
}

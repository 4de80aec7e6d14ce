#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "aerochan/channel.hpp"
#include "aerochan/errors.hpp"
#include "aerochan/quadrature.hpp"
#include "reference_values.hpp"

using namespace aerochan;

namespace {

constexpr double kH = 180.0;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("quadrature rules") {
  const auto& rule = quad::gauss_legendre(5);
  double wsum = 0.0;
  for (double w : rule.weights) wsum += w;
  CHECK(wsum == doctest::Approx(2.0).epsilon(1e-15));
  // Degree 9 is exact with five nodes.
  CHECK(quad::gauss_legendre_integrate([](double x) { return std::pow(x, 9); }, 0.0, 1.0, 5) ==
        doctest::Approx(0.1).epsilon(1e-14));
  const double e = quad::adaptive_simpson([](double x) { return std::exp(-x); }, 0.0, 1.0);
  CHECK(rel(e, 1.0 - std::exp(-1.0)) < 1e-10);
  const double s = quad::adaptive_simpson([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
  CHECK(rel(s, 2.0) < 1e-10);
}

TEST_CASE("eta for the three diffusivity profiles") {
  ChannelParams p;
  CHECK(rel(eta(100.0, p), ref::eta_100) < 1e-15);

  p.diffusivity = DiffusivityProfile::power_law(0.242, 100.0, 0.5);
  CHECK(rel(eta(200.0, p), ref::eta_power_200) < 1e-14);

  p.diffusivity = DiffusivityProfile::custom([](double x) { return 0.242 * (1.0 + 0.01 * x); });
  CHECK(rel(eta(300.0, p), ref::eta_linear_300) < 1e-9);

  // Custom profile that matches the constant one.
  p.diffusivity = DiffusivityProfile::custom([](double) { return 0.242; });
  CHECK(rel(eta(100.0, p), ref::eta_100) < 1e-10);
}

TEST_CASE("closed forms against high-precision references") {
  const ChannelParams p;
  CHECK(rel(impulse_response({100, 1, 181, 100.0 / 140 + 0.002}, p, kH), ref::impulse_a) < 1e-12);
  CHECK(rel(impulse_response({250, -2, 179, 250.0 / 140 - 0.004}, p, kH), ref::impulse_b) < 1e-12);
  CHECK(rel(breath_response(1.0, 0.0, {100, 0.5, 180.5, 0.72}, p, kH), ref::breath_a) < 1e-10);
  CHECK(rel(steady_state_concentration(1.0, {100, 0, 180}, p, kH), ref::steady_a) < 1e-12);
  CHECK(rel(steady_state_concentration(1.0, {250, 2, 178}, p, kH), ref::steady_b) < 1e-12);
}

TEST_CASE("frequency response: phase exact, constant off by 2/sqrt(pi)") {
  const ChannelParams p;
  const auto h = frequency_response({100, 0, 180}, 100.0, p, kH);
  const std::complex<double> truth(ref::freq_100_re, ref::freq_100_im);
  CHECK(std::abs(wrap_phase(h.phase - std::arg(truth))) < 1e-9);
  CHECK(rel(std::abs(truth) / h.magnitude, 2.0 / std::sqrt(std::numbers::pi)) < 1e-9);
  CHECK(std::abs(h.value() - std::polar(h.magnitude, h.phase)) == 0.0);
  CHECK(h.unwrapped_phase == doctest::Approx(-100.0 * 100.0 / 140.0));
}

TEST_CASE("domain handling") {
  const ChannelParams p;
  CHECK(impulse_response({0, 0, 180, 1}, p, kH) == 0.0);
  CHECK(impulse_response({-5, 0, 180, 1}, p, kH) == 0.0);
  CHECK(steady_state_concentration(1.0, {-1, 0, 180}, p, kH) == 0.0);
  CHECK_THROWS_AS(impulse_response({0.5, 0, 180, 1}, p, kH), DomainError);
  CHECK_THROWS_AS(impulse_response({10, 0, -1, 1}, p, kH), DomainError);
  CHECK(jet_concentration(1.0, 2.0, {100, 0, 180, 1.999}, p, kH) == 0.0);
  CHECK(breath_response(1.0, 2.0, {100, 0, 180, 2.0}, p, kH) == 0.0);
}

TEST_CASE("configuration validation") {
  ChannelParams p;
  p.wind_speed = -1.0;
  try {
    p.validate();
    FAIL("negative wind accepted");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "channel.wind_speed");
  }
  CHECK_THROWS_AS(DiffusivityProfile::constant(0.0), ConfigError);
  CHECK_THROWS_AS(DiffusivityProfile::power_law(0.242, 100.0, -1.5), ConfigError);
}

TEST_CASE("LTI identities over random pairs") {
  const ChannelParams p;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ux(5.0, 500.0), uy(-2.0, 2.0), ut(0.0, 6.0), ur(0.1, 10.0);
  for (int i = 0; i < 100; ++i) {
    const double x = ux(rng);
    const SpaceTimePoint q{x, uy(rng), kH + uy(rng), x / 140.0 + uy(rng) * 0.01};
    const double shift = ut(rng);
    const double a = ur(rng), b = ur(rng);
    // Time invariance of the jet.
    const SpaceTimePoint qs{q.x, q.y, q.z, q.t + shift};
    CHECK(jet_concentration(a, shift, qs, p, kH) ==
          doctest::Approx(a * impulse_response(q, p, kH)).epsilon(1e-12));
    // Superposition of two breaths and time invariance of the step response.
    const double sum = breath_response(a, 0.0, q, p, kH) + breath_response(b, 0.0, q, p, kH);
    CHECK(breath_response(a + b, 0.0, q, p, kH) == doctest::Approx(sum).epsilon(1e-12));
    CHECK(breath_response(a, shift, qs, p, kH) ==
          doctest::Approx(breath_response(a, 0.0, q, p, kH)).epsilon(1e-12));
  }
}

TEST_CASE("physical properties") {
  const ChannelParams p;
  // Crosswind symmetry.
  CHECK(impulse_response({120, 1.3, 180, 0.86}, p, kH) ==
        impulse_response({120, -1.3, 180, 0.86}, p, kH));
  // Breath response rises monotonically to the steady plume.
  double prev = 0.0;
  for (double t = 0.5; t < 1.0; t += 0.01) {
    const double c = breath_response(1.0, 0.0, {100, 0.2, 180, t}, p, kH);
    CHECK(c >= prev);
    prev = c;
  }
  CHECK(breath_response(1.0, 0.0, {100, 0.2, 180, 50.0}, p, kH) ==
        doctest::Approx(steady_state_concentration(1.0, {100, 0.2, 180}, p, kH)).epsilon(1e-12));
  // At the ground the image source doubles the free-space value.
  const double e = eta(100.0, p);
  const double ground = steady_state_concentration(1.0, {100, 0, 0}, p, 1.0);
  const double free = std::exp(-1.0 / (4 * e)) / (4 * 140.0 * std::numbers::pi * e);
  CHECK(ground == doctest::Approx(2.0 * free).epsilon(1e-14));
  CHECK(wrap_phase(3.0 * std::numbers::pi) == doctest::Approx(std::numbers::pi));
  CHECK(wrap_phase(-std::numbers::pi) == doctest::Approx(std::numbers::pi));
}

TEST_CASE("multi-user gating and superposition") {
  const ChannelParams p;
  MultiUserScenario s;
  SourceSpec a;
  a.location = {0, 0, 180};
  a.breath_rate = 1.0;
  SourceSpec b;
  b.location = {50, 1, 170};
  b.breath_rate = 2.0;
  b.entry_time = 1.0;
  b.jets = {{1.5, 3.0}};
  s.users = {a, b};

  const SpaceTimePoint q{120, 0.5, 178, 2.0};
  const double expect_a = breath_response(1.0, 0.0, q, p, 180);
  const double expect_b = breath_response(2.0, 1.0, {70, -0.5, 178, 2.0}, p, 170) +
                          jet_concentration(3.0, 1.5, {70, -0.5, 178, 2.0}, p, 170);
  CHECK(multi_user_response(s, q, p) == doctest::Approx(expect_a + expect_b).epsilon(1e-14));
  CHECK(person_response(b, q, p) == doctest::Approx(expect_b).epsilon(1e-14));

  // Before user b enters only user a contributes.
  const SpaceTimePoint early{120, 0.5, 178, 0.9};
  CHECK(multi_user_response(s, early, p) == breath_response(1.0, 0.0, early, p, 180));
  // Upwind of user b only user a contributes.
  const SpaceTimePoint upwind{40, 0.0, 180, 3.0};
  CHECK(multi_user_response(s, upwind, p) == breath_response(1.0, 0.0, upwind, p, 180));
}

TEST_CASE("stochastic expected response") {
  const ChannelParams p;
  MultiUserScenario s;
  SourceSpec a;
  a.location = {0, 0, 180};
  s.users = {a};
  CHECK_THROWS_AS(stochastic_expected_response(s, {100, 0, 180, 1.0}, p), ConfigError);

  StochasticGrid g;
  g.interval = 0.5;
  g.horizon = 1.2;  // three intervals
  g.jet_mass = 2.0;
  g.probabilities = {{0.1}, {0.4}, {0.2}};
  s.stochastic = g;
  CHECK(g.num_intervals() == 3);
  const SpaceTimePoint q{100, 0, 180, 1.4};
  double expect = 0.0;
  for (int i = 0; i < 3; ++i) {
    expect += g.probabilities[i][0] * jet_concentration(2.0, 0.5 * i, q, p, 180);
  }
  CHECK(stochastic_expected_response(s, q, p) == doctest::Approx(expect).epsilon(1e-14));
}

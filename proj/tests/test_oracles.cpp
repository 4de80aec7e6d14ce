#include <doctest.h>

#include <cmath>

#include "aerochan/channel.hpp"
#include "aerochan/errors.hpp"
#include "aerochan/oracles.hpp"
#include "aerochan/receiver.hpp"

using namespace aerochan;
using namespace aerochan::oracles;

TEST_CASE("Wilson interval") {
  const auto w = wilson_interval(50, 100, 3.0);
  CHECK(w.estimate == 0.5);
  CHECK(w.lower == doctest::Approx(0.5 - 0.14367394).epsilon(1e-7));
  CHECK(w.upper == doctest::Approx(0.5 + 0.14367394).epsilon(1e-7));
  const auto zero = wilson_interval(0, 1000, 3.0);
  CHECK(zero.lower == doctest::Approx(0.0));
  CHECK(zero.upper > 0.0);
}

TEST_CASE("empirical missed detection is seeded and thread-count independent") {
  const auto a = empirical_pmd(1.0, 1.0, 1.0, 1.0, 200000, 42, 1);
  const auto b = empirical_pmd(1.0, 1.0, 1.0, 1.0, 200000, 42, 4);
  CHECK(a.misses == b.misses);
  CHECK(a.contains(pmd_consistent(1.0, 1.0, 1.0, 1.0)));
  const auto c = empirical_pmd(1.0, 1.0, 1.0, 1.0, 200000, 43, 1);
  CHECK(c.misses != a.misses);
  CHECK_THROWS_AS(empirical_pmd(1.0, 1.0, 1.0, 1.0, 10, 1), DomainError);
}

TEST_CASE("crosswind and jet mass integrals") {
  const ChannelParams p;
  for (double x : {2.0, 50.0, 400.0, 3000.0}) {
    CHECK(std::abs(crosswind_mass(1.0, x, p, 180.0) * p.wind_speed - 1.0) < 1e-8);
  }
  // Source near the ground: the reflected half-space still holds all the mass.
  CHECK(std::abs(crosswind_mass(1.0, 100.0, p, 0.5) * p.wind_speed - 1.0) < 1e-8);
  CHECK(std::abs(jet_total_mass(1.0, 2.0, p, 180.0) - 1.0) < 1e-3);
}

TEST_CASE("numeric step convolution matches the breath response") {
  const ChannelParams p;
  for (double t : {0.6, 0.7, 0.75, 1.0}) {
    const SpaceTimePoint q{95.0, 0.3, 180.2, t};
    const double closed = breath_response(1.0, 0.0, q, p, 180.0);
    CHECK(std::abs(numeric_step_convolution(q, p, 180.0) / closed - 1.0) < 1e-7);
  }
}

TEST_CASE("steady march oracle on a small grid") {
  const ChannelParams p;
  const double e = eta(40.0, p);
  const auto g = MarchGrid::for_plume(e, 180.0, 12, 0.9);
  const auto r = fd_march_steady(p, 180.0, g);
  CHECK(r.report.l2_rel_error < 0.05);
  CHECK(r.eta_final == doctest::Approx(e));
  for (double m : r.slice_mass) CHECK(std::abs(m * p.wind_speed - 1.0) < 1e-2);

  MarchGrid bad = g;
  bad.deta = g.dy * g.dy;
  CHECK_THROWS_AS(fd_march_steady(p, 180.0, bad), ConfigError);
}

TEST_CASE("transient oracle rejects what it cannot model") {
  ChannelParams p;
  p.diffusivity = DiffusivityProfile::power_law(0.242, 100.0, 0.5);
  TransientGrid g;
  CHECK_THROWS_AS(fd_march_transient(p, 180.0, g, {{20, 0, 180}}), ConfigError);
  ChannelParams q;
  g.dx = g.dy = g.dz = 0.001;  // diffusion CFL far above one half
  CHECK_THROWS_AS(fd_march_transient(q, 180.0, g, {{20, 0, 180}}), ConfigError);
}

TEST_CASE("sampled transfer function guards") {
  const ChannelParams p;
  const Position q{100, 0, 180};
  CHECK_THROWS_AS(sampled_transfer_function(q, p, 180.0, 0.01, 4096), ConfigError);
  CHECK_THROWS_AS(sampled_transfer_function(q, p, 180.0, 1e-4, 100), ConfigError);
}

TEST_CASE("Monte Carlo volume integral of a constant") {
  const ReceiverSpec rx;
  const auto r = mc_volume_integral(rx, [](const SpaceTimePoint&) { return 1.0; }, 100000, 3);
  CHECK(r.estimate == doctest::Approx(rx.volume() * rx.sampling_window).epsilon(1e-12));
}

#include <doctest.h>

#include <string>

#include <json.hpp>

#include "aerochan/errors.hpp"
#include "aerochan/scenario.hpp"

using namespace aerochan;
using nlohmann::json;

namespace {

std::string field_of(const json& doc) {
  try {
    parse_scenario(doc).validate();
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<accepted>";
}

}  // namespace

TEST_CASE("defaults") {
  const auto c = ScenarioConfig::defaults();
  CHECK_NOTHROW(c.validate());
  CHECK(c.channel.wind_speed == 140.0);
  CHECK(c.sources.users.size() == 1);
  CHECK(c.receiver.center.x == 100.0);
  CHECK(c.receiver.center.z == 180.0);
  CHECK(c.breath_rate() == 1.0);
  const auto parsed = parse_scenario(json::object());
  CHECK(canonical_form(parsed) == canonical_form(c));
}

TEST_CASE("round trip through JSON") {
  const json doc = json::parse(R"({
    "channel": {"wind_speed": 70, "diffusivity": {"kind": "power", "value": 0.3, "x_ref": 50, "exponent": 0.25},
                "source_height": 150},
    "sources": {"users": [{"location": [0, 0, 150], "breath_rate": 2, "jets": [{"time": 1, "mass": 5}]},
                          {"location": [30, 2, 160], "entry_time": 4}],
                "stochastic": {"interval": 1, "horizon": 2, "jet_mass": 3,
                               "probabilities": [[0.1, 0.2], [0.3, 0.4]]}},
    "receiver": {"radius": 1.5, "quadrature": {"radial": 12}},
    "experiment": {"distances": {"start": 10, "stop": 50, "step": 10}, "jobs": 3},
    "seed": 11
  })");
  const auto c = parse_scenario(doc);
  CHECK(c.channel.diffusivity.is_power_law());
  CHECK(c.sources.users.size() == 2);
  CHECK(c.sources.users[1].breath_rate == 1.0);
  CHECK(c.experiment.distances == std::vector<double>{10, 20, 30, 40, 50});
  CHECK(c.receiver.center.z == 150.0);
  CHECK(c.quadrature.radial == 12);
  CHECK(*c.seed == 11);
  const auto again = parse_scenario(to_json(c));
  CHECK(canonical_form(again) == canonical_form(c));
  CHECK(to_json(again) == to_json(c));
}

TEST_CASE("rejections name the offending field") {
  CHECK(field_of(json::parse(R"({"channel": {"wind_speed": -3}})")) == "channel.wind_speed");
  CHECK(field_of(json::parse(R"({"channel": {"windspeed": 3}})")) == "channel.windspeed");
  CHECK(field_of(json::parse(R"({"receiver": {"radius": 0}})")) == "receiver.radius");
  CHECK(field_of(json::parse(R"({"experiment": {"distances": [10, 5]}})")) == "experiment.distances");
  CHECK(field_of(json::parse(R"({"experiment": {"ratio_mode": "peak"}})")) == "experiment.ratio_mode");
  CHECK(field_of(json::parse(R"({"sources": {"users": [{"location": [0, 0]}]}})")) ==
        "sources.users.0.location");
}

TEST_CASE("overrides") {
  json doc = to_json(ScenarioConfig::defaults());
  apply_override(doc, "channel.wind_speed=70");
  apply_override(doc, "experiment.wind_speeds=[10,20]");
  apply_override(doc, "sources.users.0.breath_rate=3");
  apply_override(doc, "output.format=json");
  const auto c = parse_scenario(doc);
  CHECK(c.channel.wind_speed == 70.0);
  CHECK(c.experiment.wind_speeds == std::vector<double>{10, 20});
  CHECK(c.sources.users[0].breath_rate == 3.0);
  CHECK(c.output.format == "json");
  CHECK_THROWS_AS(apply_override(doc, "channel.nope=1"), ConfigError);
  CHECK_THROWS_AS(apply_override(doc, "no_equals_sign"), ConfigError);
}

TEST_CASE("config hash") {
  auto c = ScenarioConfig::defaults();
  const std::string h = config_hash(c);
  CHECK(h.size() == 16);
  c.experiment.jobs = 8;
  c.output.path = "elsewhere.csv";
  CHECK(config_hash(c) == h);
  c.channel.wind_speed = 141.0;
  CHECK(config_hash(c) != h);
}

TEST_CASE("schema text is valid JSON") {
  const json schema = json::parse(scenario_schema());
  CHECK(schema.contains("properties"));
  CHECK(schema["properties"].contains("channel"));
}

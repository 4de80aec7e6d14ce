#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "aerochan/channel.hpp"
#include "aerochan/errors.hpp"
#include "aerochan/experiments.hpp"
#include "aerochan/receiver.hpp"
#include "aerochan/results.hpp"
#include "aerochan/scenario.hpp"

namespace py = pybind11;
using namespace aerochan;

namespace {

ScenarioConfig scenario_from(const std::string& text, const std::vector<std::string>& overrides) {
  nlohmann::json doc = to_json(parse_scenario(text.empty() ? nlohmann::json::object()
                                                           : nlohmann::json::parse(text)));
  for (const auto& o : overrides) apply_override(doc, o);
  ScenarioConfig c = parse_scenario(doc);
  c.validate();
  return c;
}

py::dict table_dict(const ResultTable& t) {
  py::dict meta;
  for (const auto& [k, v] : t.metadata) meta[py::str(k)] = v;
  py::list cols;
  for (const auto& c : t.columns) cols.append(py::make_tuple(c.name, c.unit));
  py::dict out;
  out["metadata"] = meta;
  out["columns"] = cols;
  out["rows"] = t.rows;
  return out;
}

}  // namespace

PYBIND11_MODULE(_aerochan, m) {
  m.doc() = "Advection-diffusion aerosol channel and receiver models";
  m.attr("__version__") = AEROCHAN_VERSION;

  const auto base = py::register_exception<Error>(m, "AerochanError", PyExc_RuntimeError);
  const auto config = py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  // Malformed scenario JSON surfaces as a config error.
  static PyObject* config_type = config.ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const nlohmann::json::exception& e) {
      PyErr_SetString(config_type, e.what());
    }
  });

  py::class_<ChannelParams>(m, "Channel")
      .def(py::init([](double wind_speed, double k0, double x_ref, double exponent, double x_min) {
             ChannelParams p;
             p.wind_speed = wind_speed;
             p.diffusivity = exponent == 0.0 ? DiffusivityProfile::constant(k0)
                                             : DiffusivityProfile::power_law(k0, x_ref, exponent);
             p.x_min = x_min;
             p.validate();
             return p;
           }),
           py::arg("wind_speed") = 140.0, py::arg("diffusivity") = 0.242, py::arg("x_ref") = 100.0,
           py::arg("exponent") = 0.0, py::arg("x_min") = 1.0)
      .def_readonly("wind_speed", &ChannelParams::wind_speed)
      .def_readonly("x_min", &ChannelParams::x_min)
      .def("diffusivity", [](const ChannelParams& p, double x) { return p.diffusivity(x); });

  m.def("eta", &eta, py::arg("x"), py::arg("channel"));
  m.def(
      "impulse_response",
      [](double x, double y, double z, double t, const ChannelParams& c, double h) {
        return impulse_response({x, y, z, t}, c, h);
      },
      py::arg("x"), py::arg("y"), py::arg("z"), py::arg("t"), py::arg("channel"),
      py::arg("source_height") = kDefaultSourceHeight);
  m.def(
      "breath_response",
      [](double x, double y, double z, double t, const ChannelParams& c, double h, double rate,
         double entry) { return breath_response(rate, entry, {x, y, z, t}, c, h); },
      py::arg("x"), py::arg("y"), py::arg("z"), py::arg("t"), py::arg("channel"),
      py::arg("source_height") = kDefaultSourceHeight, py::arg("rate") = 1.0,
      py::arg("entry_time") = 0.0);
  m.def(
      "steady_state",
      [](double x, double y, double z, const ChannelParams& c, double h, double rate) {
        return steady_state_concentration(rate, {x, y, z}, c, h);
      },
      py::arg("x"), py::arg("y"), py::arg("z"), py::arg("channel"),
      py::arg("source_height") = kDefaultSourceHeight, py::arg("rate") = 1.0);
  m.def(
      "frequency_response",
      [](double x, double y, double z, double omega, const ChannelParams& c, double h) {
        return frequency_response({x, y, z}, omega, c, h).value();
      },
      py::arg("x"), py::arg("y"), py::arg("z"), py::arg("omega"), py::arg("channel"),
      py::arg("source_height") = kDefaultSourceHeight);

  m.def("q_function", &q_function);
  m.def("pmd_paper", &pmd_paper, py::arg("c_mean"), py::arg("xi"), py::arg("gamma"), py::arg("sigma"));
  m.def("pmd_consistent", &pmd_consistent, py::arg("c_mean"), py::arg("xi"), py::arg("gamma"),
        py::arg("sigma"));
  m.def("ml_threshold", &ml_threshold, py::arg("c_mean"), py::arg("xi"), py::arg("gamma"));

  m.def("scenario_schema", [] { return std::string(scenario_schema()); });
  m.def(
      "normalize_scenario",
      [](const std::string& text, const std::vector<std::string>& overrides) {
        return to_json(scenario_from(text, overrides)).dump();
      },
      py::arg("scenario_json") = "", py::arg("overrides") = std::vector<std::string>{});
  m.def(
      "run",
      [](const std::string& command, const std::string& text,
         const std::vector<std::string>& overrides) {
        const ScenarioConfig c = scenario_from(text, overrides);
        ResultTable t;
        {
          py::gil_scoped_release release;
          if (command == "field") t = run_field_grid(c);
          else if (command == "timeseries") t = run_timeseries(c);
          else if (command == "freq") t = run_frequency_response(c);
          else if (command == "delay") t = run_delay_to_fraction(c, c.experiment.fraction);
          else if (command == "conc-vs-dist") t = run_concentration_vs_distance(c);
          else if (command == "pmd") t = run_pmd_vs_distance(c);
          else if (command == "mc-pmd") t = run_mc_pmd(c);
          else if (command == "validate-oracles") t = run_oracle_suite(c);
          else throw ConfigError("command", "unknown command '" + command + "'");
        }
        return table_dict(t);
      },
      py::arg("command"), py::arg("scenario_json") = "",
      py::arg("overrides") = std::vector<std::string>{});
}

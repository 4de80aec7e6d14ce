#include "aerochan/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "aerochan/errors.hpp"
#include "aerochan_schema.hpp"

namespace aerochan {

using nlohmann::json;

namespace {

std::string join(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

std::string type_name(const json& j) { return j.type_name(); }

// Reads fields of one JSON object and rejects keys nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) {
      throw ConfigError(path_, std::string("expected an object, got ") + type_name(obj_));
    }
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  std::string path(const std::string& key) const { return join(path_, key); }

  double number(const std::string& key, double fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number()) throw ConfigError(path(key), "expected a number");
    return v->get<double>();
  }

  int integer(const std::string& key, int fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number_integer() && !v->is_number_unsigned()) {
      throw ConfigError(path(key), "expected an integer");
    }
    return v->get<int>();
  }

  bool boolean(const std::string& key, bool fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_boolean()) throw ConfigError(path(key), "expected true or false");
    return v->get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_string()) throw ConfigError(path(key), "expected a string");
    return v->get<std::string>();
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(join(path_, it.key()), "unknown key");
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

Position parse_position(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3) throw ConfigError(path, "expected [x, y, z]");
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError(path, "coordinates must be numbers");
  }
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

json position_json(const Position& p) { return json::array({p.x, p.y, p.z}); }

std::vector<double> parse_sweep(const json& v, const std::string& path) {
  std::vector<double> out;
  if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(path, "sweep values must be numbers");
      out.push_back(e.get<double>());
    }
  } else if (v.is_object()) {
    ObjectReader r(v, path);
    const double start = r.number("start", NAN);
    const double stop = r.number("stop", NAN);
    const double step = r.number("step", NAN);
    r.finish();
    if (!std::isfinite(start) || !std::isfinite(stop) || !(step > 0.0)) {
      throw ConfigError(path, "range needs start, stop and a positive step");
    }
    const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(start + static_cast<double>(i) * step);
  } else {
    throw ConfigError(path, "expected an array or {start, stop, step}");
  }
  if (out.empty()) throw ConfigError(path, "sweep must not be empty");
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (!(out[i] > out[i - 1])) throw ConfigError(path, "sweep must be strictly increasing");
  }
  return out;
}

std::vector<double> sweep_or(ObjectReader& r, const std::string& key,
                             const std::vector<double>& fallback) {
  const json* v = r.find(key);
  return v ? parse_sweep(*v, r.path(key)) : fallback;
}

AxisSpec parse_axis(const json& v, const std::string& path) {
  ObjectReader r(v, path);
  AxisSpec a;
  a.start = r.number("start", NAN);
  a.stop = r.number("stop", NAN);
  a.count = r.integer("count", 0);
  r.finish();
  if (!std::isfinite(a.start) || !std::isfinite(a.stop) || a.count < 1) {
    throw ConfigError(path, "axis needs start, stop and count >= 1");
  }
  if (a.count > 1 && !(a.stop > a.start)) throw ConfigError(path, "axis must be increasing");
  return a;
}

json axis_json(const AxisSpec& a) {
  return {{"start", a.start}, {"stop", a.stop}, {"count", a.count}};
}

DiffusivityProfile parse_diffusivity(const json& v, const std::string& path) {
  if (v.is_number()) return DiffusivityProfile::constant(v.get<double>());
  ObjectReader r(v, path);
  const std::string kind = r.text("kind", "constant");
  const double value = r.number("value", 0.242);
  if (kind == "constant") {
    r.finish();
    return DiffusivityProfile::constant(value);
  }
  if (kind == "power") {
    const double x_ref = r.number("x_ref", 100.0);
    const double exponent = r.number("exponent", 0.0);
    r.finish();
    return DiffusivityProfile::power_law(value, x_ref, exponent);
  }
  throw ConfigError(join(path, "kind"), "unknown diffusivity kind '" + kind + "'");
}

json diffusivity_json(const DiffusivityProfile& k) {
  if (k.is_constant()) return {{"kind", "constant"}, {"value", k.k0()}};
  if (k.is_power_law()) {
    return {{"kind", "power"}, {"value", k.k0()}, {"x_ref", k.x_ref()}, {"exponent", k.exponent()}};
  }
  throw ConfigError("channel.diffusivity", "custom profiles cannot be serialized");
}

SourceSpec parse_user(const json& v, const std::string& path, double default_height) {
  ObjectReader r(v, path);
  SourceSpec s;
  s.location = {0.0, 0.0, default_height};
  if (const json* loc = r.find("location")) s.location = parse_position(*loc, r.path("location"));
  s.breath_rate = r.number("breath_rate", 1.0);
  s.entry_time = r.number("entry_time", 0.0);
  if (const json* jets = r.find("jets")) {
    if (!jets->is_array()) throw ConfigError(r.path("jets"), "expected an array");
    for (std::size_t i = 0; i < jets->size(); ++i) {
      ObjectReader jr((*jets)[i], r.path("jets") + "." + std::to_string(i));
      JetRelease jet;
      jet.time = jr.number("time", 0.0);
      jet.mass = jr.number("mass", 1.0);
      jr.finish();
      s.jets.push_back(jet);
    }
  }
  r.finish();
  return s;
}

void parse_channel(const json* v, ScenarioConfig& c) {
  if (!v) return;
  ObjectReader r(*v, "channel");
  c.channel.wind_speed = r.number("wind_speed", c.channel.wind_speed);
  if (const json* k = r.find("diffusivity")) {
    c.channel.diffusivity = parse_diffusivity(*k, r.path("diffusivity"));
  }
  c.channel.x_min = r.number("x_min", c.channel.x_min);
  c.source_height = r.number("source_height", c.source_height);
  r.finish();
  if (!(c.channel.wind_speed > 0.0)) {
    throw ConfigError("channel.wind_speed", "wind speed must be positive");
  }
}

void parse_sources(const json* v, ScenarioConfig& c) {
  c.sources.users.clear();
  if (v) {
    ObjectReader r(*v, "sources");
    if (const json* users = r.find("users")) {
      if (!users->is_array()) throw ConfigError("sources.users", "expected an array");
      for (std::size_t i = 0; i < users->size(); ++i) {
        c.sources.users.push_back(
            parse_user((*users)[i], "sources.users." + std::to_string(i), c.source_height));
      }
    }
    if (const json* st = r.find("stochastic")) {
      ObjectReader sr(*st, "sources.stochastic");
      StochasticGrid g;
      g.interval = sr.number("interval", g.interval);
      g.horizon = sr.number("horizon", g.horizon);
      g.jet_mass = sr.number("jet_mass", g.jet_mass);
      if (const json* probs = sr.find("probabilities")) {
        if (!probs->is_array()) {
          throw ConfigError("sources.stochastic.probabilities", "expected an array of rows");
        }
        for (const auto& row : *probs) {
          if (!row.is_array()) {
            throw ConfigError("sources.stochastic.probabilities", "each row must be an array");
          }
          std::vector<double> values;
          for (const auto& p : row) {
            if (!p.is_number()) {
              throw ConfigError("sources.stochastic.probabilities", "expected numbers");
            }
            values.push_back(p.get<double>());
          }
          g.probabilities.push_back(std::move(values));
        }
      }
      sr.finish();
      c.sources.stochastic = std::move(g);
    }
    r.finish();
  }
  if (c.sources.users.empty()) {
    SourceSpec s;
    s.location = {0.0, 0.0, c.source_height};
    s.breath_rate = 1.0;
    c.sources.users.push_back(s);
  }
}

void parse_receiver(const json* v, ScenarioConfig& c) {
  c.receiver.center = {100.0, 0.0, c.source_height};
  if (!v) return;
  ObjectReader r(*v, "receiver");
  if (const json* ctr = r.find("center")) c.receiver.center = parse_position(*ctr, "receiver.center");
  c.receiver.radius = r.number("radius", c.receiver.radius);
  c.receiver.sampling_window = r.number("sampling_window", c.receiver.sampling_window);
  c.receiver.window_start = r.number("window_start", c.receiver.window_start);
  c.receiver.sampler_efficiency = r.number("sampler_efficiency", c.receiver.sampler_efficiency);
  c.receiver.binding_fraction = r.number("binding_fraction", c.receiver.binding_fraction);
  c.prior_infected = r.number("prior_infected", c.prior_infected);
  if (const json* b = r.find("binding")) {
    ObjectReader br(*b, "receiver.binding");
    BindingParams bp;
    bp.association_probability = br.number("association_probability", 0.0);
    bp.dissociation_probability = br.number("dissociation_probability", 0.0);
    bp.num_states = br.integer("num_states", 1);
    bp.num_antigens = br.integer("num_antigens", 1);
    br.finish();
    bp.validate();
    c.binding = bp;
    c.receiver.binding_fraction = bp.binding_fraction();
  }
  if (const json* q = r.find("quadrature")) {
    ObjectReader qr(*q, "receiver.quadrature");
    c.quadrature.radial = qr.integer("radial", c.quadrature.radial);
    c.quadrature.polar = qr.integer("polar", c.quadrature.polar);
    c.quadrature.azimuthal = qr.integer("azimuthal", c.quadrature.azimuthal);
    c.quadrature.time = qr.integer("time", c.quadrature.time);
    qr.finish();
  }
  r.finish();
}

void parse_noise(const json* v, ScenarioConfig& c) {
  if (!v) return;
  ObjectReader r(*v, "noise");
  c.noise.variance = r.number("variance", c.noise.variance);
  r.finish();
}

void parse_experiment(const json* v, ScenarioConfig& c) {
  if (!v) return;
  auto& e = c.experiment;
  ObjectReader r(*v, "experiment");
  e.kind = r.text("kind", e.kind);
  e.distances = sweep_or(r, "distances", e.distances);
  e.wind_speeds = sweep_or(r, "wind_speeds", e.wind_speeds);
  e.fraction = r.number("fraction", e.fraction);
  e.ratio_mode = r.text("ratio_mode", e.ratio_mode);
  e.pmd_distances = sweep_or(r, "pmd_distances", e.pmd_distances);
  e.pmd_calibration = r.number("pmd_calibration", e.pmd_calibration);
  e.pmd_empirical = r.boolean("pmd_empirical", e.pmd_empirical);
  e.mc_distances = sweep_or(r, "mc_distances", e.mc_distances);
  if (const json* t = r.find("mc_trials")) {
    if (!t->is_number_integer() && !t->is_number_unsigned() &&
        !(t->is_number_float() && t->get<double>() == std::floor(t->get<double>()))) {
      throw ConfigError("experiment.mc_trials", "expected an integer");
    }
    if (t->get<double>() < 1.0) throw ConfigError("experiment.mc_trials", "must be positive");
    e.mc_trials = static_cast<std::uint64_t>(t->get<double>());
  }
  if (const json* a = r.find("field_x")) e.field_x = parse_axis(*a, "experiment.field_x");
  if (const json* a = r.find("field_y")) e.field_y = parse_axis(*a, "experiment.field_y");
  if (const json* a = r.find("field_z")) e.field_z = parse_axis(*a, "experiment.field_z");
  e.times = sweep_or(r, "times", e.times);
  e.omegas = sweep_or(r, "omegas", e.omegas);
  e.jobs = r.integer("jobs", e.jobs);
  r.finish();
}

void parse_output(const json* v, ScenarioConfig& c) {
  if (!v) return;
  ObjectReader r(*v, "output");
  c.output.format = r.text("format", c.output.format);
  c.output.path = r.text("path", c.output.path);
  c.output.include_timestamp = r.boolean("include_timestamp", c.output.include_timestamp);
  r.finish();
}

json& descend(json& doc, const std::string& segment, const std::string& full) {
  if (doc.is_object()) {
    auto it = doc.find(segment);
    if (it == doc.end()) throw ConfigError(full, "no such scenario field");
    return *it;
  }
  if (doc.is_array()) {
    std::size_t idx = 0;
    try {
      std::size_t used = 0;
      idx = std::stoul(segment, &used);
      if (used != segment.size()) throw std::invalid_argument(segment);
    } catch (const std::exception&) {
      throw ConfigError(full, "array index expected at '" + segment + "'");
    }
    if (idx >= doc.size()) throw ConfigError(full, "array index out of range");
    return doc[idx];
  }
  throw ConfigError(full, "cannot descend into a scalar at '" + segment + "'");
}

}  // namespace

std::vector<double> AxisSpec::values() const {
  std::vector<double> out;
  if (count == 1) return {start};
  for (int i = 0; i < count; ++i) {
    out.push_back(start + (stop - start) * static_cast<double>(i) / (count - 1));
  }
  return out;
}

ScenarioConfig ScenarioConfig::defaults() { return parse_scenario(json::object()); }

double ScenarioConfig::breath_rate() const {
  return sources.users.empty() ? 1.0 : sources.users.front().breath_rate;
}

void ScenarioConfig::validate() const {
  channel.validate();
  if (!(source_height > 0.0)) throw ConfigError("channel.source_height", "must be positive");
  sources.validate();
  receiver.validate();
  if (!(prior_infected > 0.0 && prior_infected < 1.0)) {
    throw ConfigError("receiver.prior_infected", "must lie in (0, 1)");
  }
  if (binding) binding->validate();
  noise.validate();
  const auto& e = experiment;
  if (!(e.fraction > 0.0 && e.fraction < 1.0)) {
    throw ConfigError("experiment.fraction", "must lie in (0, 1)");
  }
  if (e.ratio_mode != "receiver" && e.ratio_mode != "center") {
    throw ConfigError("experiment.ratio_mode", "must be 'receiver' or 'center'");
  }
  for (double u : e.wind_speeds) {
    if (!(u > 0.0)) throw ConfigError("experiment.wind_speeds", "wind speeds must be positive");
  }
  if (!(e.pmd_calibration > 0.0)) {
    throw ConfigError("experiment.pmd_calibration", "must be positive");
  }
  if (e.jobs < 1) throw ConfigError("experiment.jobs", "must be >= 1");
  if (output.format != "csv" && output.format != "json") {
    throw ConfigError("output.format", "must be 'csv' or 'json'");
  }
  if (quadrature.radial < 1 || quadrature.polar < 1 || quadrature.azimuthal < 1 ||
      quadrature.time < 1) {
    throw ConfigError("receiver.quadrature", "orders must be >= 1");
  }
}

ScenarioConfig parse_scenario(const json& doc) {
  ObjectReader top(doc, "");
  ScenarioConfig c;
  parse_channel(top.find("channel"), c);
  parse_sources(top.find("sources"), c);
  parse_receiver(top.find("receiver"), c);
  parse_noise(top.find("noise"), c);
  parse_experiment(top.find("experiment"), c);
  parse_output(top.find("output"), c);
  if (const json* s = top.find("seed")) {
    if (!s->is_number_unsigned() && !(s->is_number_integer() && s->get<long long>() >= 0)) {
      throw ConfigError("seed", "expected a nonnegative integer");
    }
    c.seed = s->get<std::uint64_t>();
  }
  top.finish();
  c.validate();
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  return load_scenario(path, {});
}

ScenarioConfig load_scenario(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides) {
  json doc = json::object();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw IoError(path.string(), "cannot open scenario file");
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("", path.string() + ": parse error: " + e.what());
    }
  }
  if (overrides.empty()) return parse_scenario(doc);
  // Overrides apply to the fully expanded document so that every schema field
  // can be addressed, including ones the file omits.
  json expanded = to_json(parse_scenario(doc));
  for (const auto& o : overrides) apply_override(expanded, o);
  return parse_scenario(expanded);
}

json to_json(const ScenarioConfig& c) {
  json users = json::array();
  for (const auto& u : c.sources.users) {
    json jets = json::array();
    for (const auto& j : u.jets) jets.push_back({{"time", j.time}, {"mass", j.mass}});
    users.push_back({{"location", position_json(u.location)},
                     {"breath_rate", u.breath_rate},
                     {"entry_time", u.entry_time},
                     {"jets", jets}});
  }
  json stochastic = nullptr;
  if (c.sources.stochastic) {
    const auto& g = *c.sources.stochastic;
    stochastic = {{"interval", g.interval},
                  {"horizon", g.horizon},
                  {"jet_mass", g.jet_mass},
                  {"probabilities", g.probabilities}};
  }
  json binding = nullptr;
  if (c.binding) {
    binding = {{"association_probability", c.binding->association_probability},
               {"dissociation_probability", c.binding->dissociation_probability},
               {"num_states", c.binding->num_states},
               {"num_antigens", c.binding->num_antigens}};
  }
  const auto& e = c.experiment;
  json doc = {
      {"channel",
       {{"wind_speed", c.channel.wind_speed},
        {"diffusivity", diffusivity_json(c.channel.diffusivity)},
        {"x_min", c.channel.x_min},
        {"source_height", c.source_height}}},
      {"sources", {{"users", users}, {"stochastic", stochastic}}},
      {"receiver",
       {{"center", position_json(c.receiver.center)},
        {"radius", c.receiver.radius},
        {"sampling_window", c.receiver.sampling_window},
        {"window_start", c.receiver.window_start},
        {"sampler_efficiency", c.receiver.sampler_efficiency},
        {"binding_fraction", c.receiver.binding_fraction},
        {"prior_infected", c.prior_infected},
        {"binding", binding},
        {"quadrature",
         {{"radial", c.quadrature.radial},
          {"polar", c.quadrature.polar},
          {"azimuthal", c.quadrature.azimuthal},
          {"time", c.quadrature.time}}}}},
      {"noise", {{"variance", c.noise.variance}}},
      {"experiment",
       {{"kind", e.kind},
        {"distances", e.distances},
        {"wind_speeds", e.wind_speeds},
        {"fraction", e.fraction},
        {"ratio_mode", e.ratio_mode},
        {"pmd_distances", e.pmd_distances},
        {"pmd_calibration", e.pmd_calibration},
        {"pmd_empirical", e.pmd_empirical},
        {"mc_distances", e.mc_distances},
        {"mc_trials", e.mc_trials},
        {"field_x", axis_json(e.field_x)},
        {"field_y", axis_json(e.field_y)},
        {"field_z", axis_json(e.field_z)},
        {"times", e.times},
        {"omegas", e.omegas},
        {"jobs", e.jobs}}},
      {"output",
       {{"format", c.output.format},
        {"path", c.output.path},
        {"include_timestamp", c.output.include_timestamp}}},
      {"seed", c.seed ? json(*c.seed) : json(nullptr)}};
  return doc;
}

std::string canonical_form(const ScenarioConfig& config) {
  json doc = to_json(config);
  // Execution-only settings do not change results.
  doc["experiment"].erase("jobs");
  doc["output"].erase("path");
  return doc.dump();
}

std::string config_hash(const ScenarioConfig& config) {
  const std::string text = canonical_form(config);
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void apply_override(json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError(std::string(assignment), "override must look like dotted.path=value");
  }
  const std::string path(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }
  json* node = &doc;
  std::size_t begin = 0;
  while (true) {
    const auto dot = path.find('.', begin);
    const std::string segment = path.substr(begin, dot == std::string::npos ? dot : dot - begin);
    if (segment.empty()) throw ConfigError(path, "empty path segment");
    node = &descend(*node, segment, path);
    if (dot == std::string::npos) break;
    begin = dot + 1;
  }
  *node = std::move(value);
}

const char* scenario_schema() { return kScenarioSchema; }

}  // namespace aerochan

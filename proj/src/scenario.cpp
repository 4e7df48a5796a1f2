#include "cascade/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace cascade::scenario {

using nlohmann::json;

namespace {

/// Typed access to one JSON object with the field path kept for messages.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + "expected an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    for (const auto& [key, value] : j_.items()) {
      const bool known = std::any_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; });
      if (!known) throw ConfigError(field(key) + ": unknown field");
    }
  }

  bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  const json& raw(const char* key) const { return j_.at(key); }
  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  double number(const char* key) const {
    if (!has(key)) throw ConfigError(field(key) + ": missing");
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(field(key) + ": expected a number");
    return v.get<double>();
  }
  double number(const char* key, double fallback) const { return has(key) ? number(key) : fallback; }
  std::optional<double> optional_number(const char* key) const {
    if (!has(key)) return std::nullopt;
    return number(key);
  }
  std::string string(const char* key) const {
    if (!has(key)) throw ConfigError(field(key) + ": missing");
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(field(key) + ": expected a string");
    return v.get<std::string>();
  }
  std::vector<double> numbers(const char* key) const {
    const json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(field(key) + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) throw ConfigError(field(key) + ": expected an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }
  std::vector<std::string> strings(const char* key) const {
    const json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(field(key) + ": expected an array of strings");
    std::vector<std::string> out;
    for (const auto& x : v) {
      if (!x.is_string()) throw ConfigError(field(key) + ": expected an array of strings");
      out.push_back(x.get<std::string>());
    }
    return out;
  }
  Reader child(const char* key) const { return Reader(j_.at(key), field(key)); }

 private:
  std::string where() const { return path_.empty() ? "" : path_ + ": "; }
  const json& j_;
  std::string path_;
};

CouplingSchedule read_schedule(const json& j, const std::string& path) {
  if (j.is_number()) return CouplingSchedule::constant(j.get<double>());
  const Reader r(j, path);
  const std::string type = r.string("type");
  if (type == "constant") {
    r.allow({"type", "value"});
    return CouplingSchedule::constant(r.number("value"));
  }
  if (type == "sine_ramp") {
    r.allow({"type", "peak", "tau"});
    return CouplingSchedule::sine_ramp(r.number("peak"), r.number("tau"));
  }
  if (type == "tabulated") {
    r.allow({"type", "times", "values"});
    try {
      return CouplingSchedule::tabulated(r.numbers("times"), r.numbers("values"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(path + ": " + e.what());
    }
  }
  throw ConfigError(path + ".type: unknown schedule type '" + type + "'");
}

CouplingSchedule schedule_field(const Reader& r, const char* key, double fallback) {
  if (!r.has(key)) return CouplingSchedule::constant(fallback);
  return read_schedule(r.raw(key), r.field(key));
}

ReducedBlock read_reduced(const Reader& r) {
  r.allow({"gamma1", "gamma2", "lambda", "epsilon", "phase_difference"});
  ReducedBlock b;
  b.gamma1 = r.number("gamma1", 1.0);
  b.gamma2 = r.optional_number("gamma2");
  b.lambda = r.optional_number("lambda");
  b.epsilon = r.number("epsilon", 1.0);
  b.phase_difference = r.number("phase_difference", 0.0);
  return b;
}

EffectiveParams read_effective(const Reader& r) {
  r.allow({"kappa1", "kappa2", "phi1", "phi2", "epsilon", "omega1", "omega2"});
  EffectiveParams p;
  p.kappa1 = r.number("kappa1", 1.0);
  p.kappa2 = r.number("kappa2", 1.0);
  p.phi1 = r.number("phi1", 0.0);
  p.phi2 = r.number("phi2", 0.0);
  p.epsilon = r.number("epsilon", 1.0);
  p.omega1 = schedule_field(r, "omega1", 0.0);
  p.omega2 = schedule_field(r, "omega2", 0.0);
  return p;
}

SubsystemPhysics read_subsystem(const Reader& r) {
  r.allow({"lamb_dicke", "atom_cavity_coupling", "laser_amplitude", "detuning", "trap_frequency",
           "atomic_linewidth", "cavity_decay"});
  SubsystemPhysics s;
  s.lamb_dicke = r.number("lamb_dicke", s.lamb_dicke);
  s.atom_cavity_coupling = r.number("atom_cavity_coupling", s.atom_cavity_coupling);
  s.laser_amplitude = schedule_field(r, "laser_amplitude", 0.0);
  s.detuning = r.number("detuning", s.detuning);
  s.trap_frequency = r.number("trap_frequency", s.trap_frequency);
  s.atomic_linewidth = r.number("atomic_linewidth", s.atomic_linewidth);
  s.cavity_decay = r.number("cavity_decay", s.cavity_decay);
  return s;
}

PhysicalBlock read_physical(const Reader& r) {
  r.allow({"subsystems", "phi1", "phi2", "epsilon", "nbar_planned", "thresholds"});
  PhysicalBlock b;
  const json& subs = r.raw("subsystems");
  if (!subs.is_array() || subs.size() != 2) {
    throw ConfigError(r.field("subsystems") + ": expected an array of two subsystems");
  }
  for (std::size_t j = 0; j < 2; ++j) {
    b.params.subsystems[j] =
        read_subsystem(Reader(subs[j], r.field("subsystems") + "[" + std::to_string(j) + "]"));
  }
  b.phi1 = r.number("phi1", 0.0);
  b.phi2 = r.number("phi2", 0.0);
  b.epsilon = r.number("epsilon", 1.0);
  b.nbar_planned = r.number("nbar_planned", b.nbar_planned);
  if (r.has("thresholds")) {
    const Reader t = r.child("thresholds");
    t.allow({"rwa", "strong_coupling", "spread_multiplier"});
    b.thresholds.rwa = t.number("rwa", b.thresholds.rwa);
    b.thresholds.strong_coupling = t.number("strong_coupling", b.thresholds.strong_coupling);
    b.thresholds.spread_multiplier = t.number("spread_multiplier", b.thresholds.spread_multiplier);
  }
  return b;
}

Overrides read_overrides(const Reader& r) {
  r.allow({"lambda", "epsilon", "gamma1", "gamma2", "omega", "omega1", "omega2", "tau", "kappa",
           "phase_difference"});
  Overrides o;
  o.lambda = r.optional_number("lambda");
  o.epsilon = r.optional_number("epsilon");
  o.gamma1 = r.optional_number("gamma1");
  o.gamma2 = r.optional_number("gamma2");
  o.omega = r.optional_number("omega");
  o.omega1 = r.optional_number("omega1");
  o.omega2 = r.optional_number("omega2");
  o.tau = r.optional_number("tau");
  o.kappa = r.optional_number("kappa");
  o.phase_difference = r.optional_number("phase_difference");
  return o;
}

SweepSpec read_sweep(const Reader& r) {
  r.allow({"parameter", "values", "range", "reductions", "threshold"});
  SweepSpec s;
  s.parameter = r.string("parameter");
  if (r.has("values")) s.values = r.numbers("values");
  if (r.has("range")) {
    const Reader g = r.child("range");
    g.allow({"start", "stop", "step"});
    s.range = SweepRange{g.number("start"), g.number("stop"), g.number("step")};
  }
  if (r.has("reductions")) s.reductions = r.strings("reductions");
  s.threshold = r.optional_number("threshold");
  return s;
}

std::size_t line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
}

void put(json& j, const char* key, const std::optional<double>& v) {
  if (v) j[key] = *v;
}

json overrides_to_json(const Overrides& o) {
  json j = json::object();
  put(j, "lambda", o.lambda);
  put(j, "epsilon", o.epsilon);
  put(j, "gamma1", o.gamma1);
  put(j, "gamma2", o.gamma2);
  put(j, "omega", o.omega);
  put(j, "omega1", o.omega1);
  put(j, "omega2", o.omega2);
  put(j, "tau", o.tau);
  put(j, "kappa", o.kappa);
  put(j, "phase_difference", o.phase_difference);
  return j;
}

bool contains(const std::vector<std::string>& list, const std::string& x) {
  return std::find(list.begin(), list.end(), x) != list.end();
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

std::string to_string(Engine e) {
  switch (e) {
    case Engine::analytic:
      return "analytic";
    case Engine::adiabatic:
      return "adiabatic";
    case Engine::full:
      return "full";
    case Engine::fock:
      return "fock";
  }
  return "analytic";
}

Engine parse_engine(const std::string& name) {
  if (name == "analytic") return Engine::analytic;
  if (name == "adiabatic") return Engine::adiabatic;
  if (name == "full") return Engine::full;
  if (name == "fock") return Engine::fock;
  throw ConfigError("engine: unknown engine '" + name + "' (expected analytic, adiabatic, full or fock)");
}

ReducedRates ReducedBlock::rates() const {
  ReducedRates r;
  r.gamma1 = gamma1;
  r.gamma2 = gamma2 ? *gamma2 : (lambda ? *lambda * gamma1 : gamma1);
  if (gamma1 > 0.0) r.lambda = r.gamma2 / gamma1;
  return r;
}

bool Overrides::empty() const { return *this == Overrides{}; }

std::vector<double> SweepSpec::points() const {
  if (!values.empty() || !range) return values;
  std::vector<double> out;
  const double span = range->stop - range->start;
  const auto n = static_cast<std::size_t>(std::floor(span / range->step + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) out.push_back(range->start + static_cast<double>(i) * range->step);
  return out;
}

void Scenario::validate() const {
  require(!name.empty(), "name: must not be empty");
  require(std::isfinite(grid.t_start) && std::isfinite(grid.t_end), "grid: bounds must be finite");
  require(grid.step > 0.0, "grid.step: must be positive");
  require(grid.t_end > grid.t_start, "grid: empty time grid (t_end must exceed t_start)");
  if (grid.integration_step) require(*grid.integration_step > 0.0, "grid.integration_step: must be positive");
  require(output.every >= 1, "output.every: must be >= 1");
  for (const auto& c : output.columns) {
    require(contains(kSeries, c), "output.columns: unknown series '" + c + "'");
  }

  const bool has_rates = reduced || effective || physical;
  require(has_rates, "scenario needs a reduced, effective or physical parameter block");
  if (engine == Engine::full || engine == Engine::fock) {
    require(effective || physical,
            "engine " + to_string(engine) + " needs an effective or physical parameter block");
  }
  if (reduced) {
    require(reduced->gamma1 >= 0.0, "reduced.gamma1: must be >= 0");
    require(!(reduced->gamma2 && reduced->lambda), "reduced: give gamma2 or lambda, not both");
    const auto r = reduced->rates();
    require(r.gamma2 >= 0.0, "reduced: gamma2 must be >= 0");
    require(reduced->epsilon >= 0.0 && reduced->epsilon <= 1.0, "reduced.epsilon: must lie in [0, 1]");
  }
  if (effective) {
    try {
      effective->validate();
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("effective.") + e.what());
    }
  }
  if (physical) {
    try {
      physical->params.validate();
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("physical.") + e.what());
    }
    require(physical->epsilon >= 0.0 && physical->epsilon <= 1.0, "physical.epsilon: must lie in [0, 1]");
  }
  if (fock_cutoffs) {
    for (int c : *fock_cutoffs) require(c >= 2, "fock.cutoffs: every cutoff must be >= 2");
    require(fock_cutoffs->size() == 4, "fock.cutoffs: expected four cutoffs (a1, a2, b1, b2)");
  }
  for (std::size_t i = 0; i < curves.size(); ++i) {
    require(!curves[i].label.empty(), "curves[" + std::to_string(i) + "].label: must not be empty");
    for (std::size_t k = 0; k < i; ++k) {
      require(curves[k].label != curves[i].label, "curves: duplicate label '" + curves[i].label + "'");
    }
  }
  if (sweep) {
    require(contains(kSweepParameters, sweep->parameter),
            "sweep.parameter: unknown parameter '" + sweep->parameter + "'");
    if (sweep->range) {
      require(sweep->range->step > 0.0, "sweep.range.step: must be positive");
      require(sweep->range->stop >= sweep->range->start, "sweep.range: stop must be >= start");
    }
    require(!sweep->points().empty(), "sweep: value list is empty");
    require(!sweep->reductions.empty(), "sweep.reductions: must not be empty");
    for (const auto& r : sweep->reductions) {
      require(contains(kReductions, r), "sweep.reductions: unknown reduction '" + r + "'");
      if (r == "threshold_time" || r == "n1_at_threshold") {
        require(sweep->threshold.has_value(), "sweep.threshold: required by reduction '" + r + "'");
        require(engine != Engine::analytic || sweep->parameter == "lambda" || sweep->parameter == "epsilon",
                "sweep: reduction '" + r + "' is not defined for this engine");
      }
    }
    if (engine == Engine::analytic) {
      require(sweep->parameter == "lambda" || sweep->parameter == "epsilon",
              "sweep.parameter: the analytic engine only sweeps lambda or epsilon");
    }
    if (sweep->parameter == "tau") {
      require(engine != Engine::analytic, "sweep.parameter: tau needs a time-dependent engine");
    }
  }
}

Scenario parse(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("parse error at line " + std::to_string(line_of(text, e.byte)) + ": " + e.what());
  }
  const Reader r(doc, "");
  r.allow({"name", "engine", "reduced", "effective", "physical", "initial", "grid", "fock", "output",
           "curves", "sweep"});
  Scenario s;
  s.name = r.string("name");
  s.engine = parse_engine(r.has("engine") ? r.string("engine") : "analytic");
  if (r.has("reduced")) s.reduced = read_reduced(r.child("reduced"));
  if (r.has("effective")) s.effective = read_effective(r.child("effective"));
  if (r.has("physical")) s.physical = read_physical(r.child("physical"));
  if (r.has("initial")) {
    const Reader i = r.child("initial");
    i.allow({"nbar1", "nbar2"});
    s.initial.nbar1 = i.number("nbar1", 0.0);
    s.initial.nbar2 = i.number("nbar2", 0.0);
  }
  if (!r.has("grid")) throw ConfigError("grid: missing");
  {
    const Reader g = r.child("grid");
    g.allow({"t_start", "t_end", "step", "points", "integration_step", "axis"});
    s.grid.t_start = g.number("t_start", 0.0);
    s.grid.t_end = g.number("t_end");
    if (const auto n = g.optional_number("points")) {
      if (!(*n >= 2.0) || *n != std::floor(*n)) throw ConfigError("grid.points: expected an integer >= 2");
      s.grid.points = static_cast<std::size_t>(*n);
      s.grid.step = (s.grid.t_end - s.grid.t_start) / (*n - 1.0);
    } else {
      s.grid.step = g.number("step");
    }
    s.grid.integration_step = g.optional_number("integration_step");
    if (g.has("axis")) {
      const std::string axis = g.string("axis");
      if (axis == "t") {
        s.grid.axis = TimeAxis::t;
      } else if (axis == "gamma1_t") {
        s.grid.axis = TimeAxis::gamma1_t;
      } else {
        throw ConfigError("grid.axis: expected 't' or 'gamma1_t'");
      }
    }
  }
  if (r.has("fock")) {
    const Reader f = r.child("fock");
    f.allow({"cutoffs"});
    std::vector<int> cut;
    for (double c : f.numbers("cutoffs")) {
      if (c != std::floor(c)) throw ConfigError("fock.cutoffs: expected integers");
      cut.push_back(static_cast<int>(c));
    }
    s.fock_cutoffs = std::move(cut);
  }
  if (r.has("output")) {
    const Reader o = r.child("output");
    o.allow({"path", "columns", "every", "threshold"});
    if (o.has("path")) s.output.path = o.string("path");
    if (o.has("columns")) s.output.columns = o.strings("columns");
    if (o.has("every")) {
      const double every = o.number("every");
      if (!(every >= 1.0) || every != std::floor(every)) throw ConfigError("output.every: expected an integer >= 1");
      s.output.every = static_cast<std::size_t>(every);
    }
    s.output.threshold = o.optional_number("threshold");
  }
  if (r.has("curves")) {
    const json& list = r.raw("curves");
    if (!list.is_array()) throw ConfigError("curves: expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const Reader c(list[i], "curves[" + std::to_string(i) + "]");
      c.allow({"label", "overrides"});
      Curve curve;
      curve.label = c.string("label");
      if (c.has("overrides")) curve.overrides = read_overrides(c.child("overrides"));
      s.curves.push_back(std::move(curve));
    }
  }
  if (r.has("sweep")) s.sweep = read_sweep(r.child("sweep"));
  s.validate();
  return s;
}

Scenario load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open scenario file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

json schedule_to_json(const CouplingSchedule& s) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, CouplingSchedule::Constant>) {
          return {{"type", "constant"}, {"value", v.value}};
        } else if constexpr (std::is_same_v<T, CouplingSchedule::SineRamp>) {
          return {{"type", "sine_ramp"}, {"peak", v.peak}, {"tau", v.tau}};
        } else {
          return {{"type", "tabulated"}, {"times", v.times}, {"values", v.values}};
        }
      },
      s.variant());
}

json to_json(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["engine"] = to_string(s.engine);
  if (s.reduced) {
    json r{{"gamma1", s.reduced->gamma1},
           {"epsilon", s.reduced->epsilon},
           {"phase_difference", s.reduced->phase_difference}};
    put(r, "gamma2", s.reduced->gamma2);
    put(r, "lambda", s.reduced->lambda);
    j["reduced"] = std::move(r);
  }
  if (s.effective) {
    const auto& e = *s.effective;
    j["effective"] = {{"kappa1", e.kappa1},
                      {"kappa2", e.kappa2},
                      {"phi1", e.phi1},
                      {"phi2", e.phi2},
                      {"epsilon", e.epsilon},
                      {"omega1", schedule_to_json(e.omega1)},
                      {"omega2", schedule_to_json(e.omega2)}};
  }
  if (s.physical) {
    const auto& p = *s.physical;
    json subs = json::array();
    for (const auto& x : p.params.subsystems) {
      subs.push_back({{"lamb_dicke", x.lamb_dicke},
                      {"atom_cavity_coupling", x.atom_cavity_coupling},
                      {"laser_amplitude", schedule_to_json(x.laser_amplitude)},
                      {"detuning", x.detuning},
                      {"trap_frequency", x.trap_frequency},
                      {"atomic_linewidth", x.atomic_linewidth},
                      {"cavity_decay", x.cavity_decay}});
    }
    j["physical"] = {{"subsystems", std::move(subs)},
                     {"phi1", p.phi1},
                     {"phi2", p.phi2},
                     {"epsilon", p.epsilon},
                     {"nbar_planned", p.nbar_planned},
                     {"thresholds",
                      {{"rwa", p.thresholds.rwa},
                       {"strong_coupling", p.thresholds.strong_coupling},
                       {"spread_multiplier", p.thresholds.spread_multiplier}}}};
  }
  j["initial"] = {{"nbar1", s.initial.nbar1}, {"nbar2", s.initial.nbar2}};
  json grid{{"t_start", s.grid.t_start},
            {"t_end", s.grid.t_end},
            {"step", s.grid.step},
            {"axis", s.grid.axis == TimeAxis::t ? "t" : "gamma1_t"}};
  if (s.grid.points) {
    grid.erase("step");
    grid["points"] = *s.grid.points;
  }
  put(grid, "integration_step", s.grid.integration_step);
  j["grid"] = std::move(grid);
  if (s.fock_cutoffs) j["fock"] = {{"cutoffs", *s.fock_cutoffs}};
  json out{{"columns", s.output.columns}, {"every", s.output.every}};
  if (s.output.path) out["path"] = *s.output.path;
  put(out, "threshold", s.output.threshold);
  j["output"] = std::move(out);
  if (!s.curves.empty()) {
    json curves = json::array();
    for (const auto& c : s.curves) curves.push_back({{"label", c.label}, {"overrides", overrides_to_json(c.overrides)}});
    j["curves"] = std::move(curves);
  }
  if (s.sweep) {
    json sw{{"parameter", s.sweep->parameter}, {"reductions", s.sweep->reductions}};
    if (!s.sweep->values.empty()) sw["values"] = s.sweep->values;
    if (s.sweep->range) {
      sw["range"] = {{"start", s.sweep->range->start}, {"stop", s.sweep->range->stop}, {"step", s.sweep->range->step}};
    }
    put(sw, "threshold", s.sweep->threshold);
    j["sweep"] = std::move(sw);
  }
  return j;
}

std::string serialize(const Scenario& s) { return to_json(s).dump(2) + "\n"; }

}  // namespace cascade::scenario

#include "cascade/regime.hpp"

#include <cmath>
#include <stdexcept>

namespace cascade::regime {

namespace {

double ratio(double num, double den) {
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / den;
}

nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

template <class F>
auto named(const std::string& name, F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    throw ConfigError(name + ": " + e.what());
  } catch (const std::domain_error& e) {
    throw ConfigError(name + ": " + e.what());
  }
}

}  // namespace

double lamb_dicke_bound(double eta, double a) {
  if (!(eta > 0.0)) throw ConfigError("Lamb-Dicke parameter must be positive");
  if (eta >= 1.0) throw ConfigError("Lamb-Dicke regime impossible for eta >= 1");
  if (!(a >= 0.0)) throw ConfigError("spread multiplier must be >= 0");
  return (2.0 / (eta * eta) - 1.0 - 0.5 * a) / (1.0 + a);
}

double lamb_dicke_figure(double eta, double nbar, double sigma, double a) {
  if (!(eta > 0.0) || eta >= 1.0) throw ConfigError("Lamb-Dicke parameter must lie in (0, 1)");
  if (!(nbar >= 0.0) || !(sigma >= 0.0)) throw ConfigError("phonon mean and spread must be >= 0");
  return 0.5 * eta * eta * (1.0 + nbar + a * sigma);
}

double strong_coupling_figure(double g0, double kappa, double gamma) {
  if (!(kappa > 0.0) || !(gamma > 0.0)) {
    throw ConfigError("strong coupling figure needs kappa > 0 and gamma > 0");
  }
  return 10.0 * g0 * g0 / (kappa * gamma);
}

RwaMargins rwa_margins(double nu, double omega_max, double kappa) {
  if (!(nu > 0.0) || !(omega_max >= 0.0) || !(kappa > 0.0)) {
    throw ConfigError("rwa margins need nu > 0, Omega >= 0, kappa > 0");
  }
  return {ratio(nu, omega_max), nu / kappa};
}

double laser_offset(double nu1, double nu2) {
  if (!(nu1 > 0.0) || !(nu2 > 0.0)) throw ConfigError("trap frequencies must be positive");
  return nu1 + nu2;
}

Condition make_condition(std::string name, double value, double threshold, double margin) {
  return Condition{std::move(name), value, threshold, margin, margin >= 1.0};
}

bool RegimeReport::all_pass() const {
  for (const auto& c : conditions) {
    if (!c.pass) return false;
  }
  return true;
}

const Condition& RegimeReport::condition(const std::string& name) const {
  for (const auto& c : conditions) {
    if (c.name == name) return c;
  }
  throw std::out_of_range("no condition named " + name);
}

RegimeReport full_report(const PhysicalParams& p, double planned_nbar, const Thresholds& thresholds) {
  p.validate();
  if (!(planned_nbar >= 0.0)) throw ConfigError("planned phonon number must be >= 0");
  RegimeReport r;
  r.planned_nbar = planned_nbar;
  r.thresholds = thresholds;

  for (std::size_t j = 0; j < 2; ++j) {
    const auto& s = p.subsystems[j];
    const std::string tag = "subsystem" + std::to_string(j + 1) + ".";
    const double omega_max =
        std::abs(s.lamb_dicke * s.atom_cavity_coupling * s.laser_amplitude.peak() / s.detuning);
    r.subsystems[j] = {omega_max, omega_max * omega_max / s.cavity_decay};

    const double bound = named(tag + "lamb_dicke",
                               [&] { return lamb_dicke_bound(s.lamb_dicke, thresholds.spread_multiplier); });
    r.conditions.push_back(make_condition(tag + "lamb_dicke", planned_nbar, bound,
                                          ratio(bound, planned_nbar)));

    const double sc = named(tag + "strong_coupling", [&] {
      return strong_coupling_figure(s.atom_cavity_coupling, s.cavity_decay, s.atomic_linewidth);
    });
    r.conditions.push_back(make_condition(tag + "strong_coupling", sc, thresholds.strong_coupling,
                                          sc / thresholds.strong_coupling));

    const RwaMargins m = named(tag + "rwa",
                               [&] { return rwa_margins(s.trap_frequency, omega_max, s.cavity_decay); });
    r.conditions.push_back(make_condition(tag + "rwa_trap_over_coupling", m.trap_over_coupling,
                                          thresholds.rwa, m.trap_over_coupling / thresholds.rwa));
    r.conditions.push_back(make_condition(tag + "rwa_trap_over_decay", m.trap_over_decay,
                                          thresholds.rwa, m.trap_over_decay / thresholds.rwa));
  }
  if (r.subsystems[0].gamma > 0.0) r.lambda = r.subsystems[1].gamma / r.subsystems[0].gamma;
  r.laser_offset = named("laser_offset", [&] {
    return laser_offset(p.subsystems[0].trap_frequency, p.subsystems[1].trap_frequency);
  });
  return r;
}

nlohmann::json to_json(const RegimeReport& report) {
  nlohmann::json out;
  out["all_pass"] = report.all_pass();
  out["planned_nbar"] = report.planned_nbar;
  out["thresholds"] = {{"rwa", report.thresholds.rwa},
                       {"strong_coupling", report.thresholds.strong_coupling},
                       {"spread_multiplier", report.thresholds.spread_multiplier}};
  nlohmann::json conditions = nlohmann::json::array();
  for (const auto& c : report.conditions) {
    conditions.push_back({{"name", c.name},
                          {"value", number(c.value)},
                          {"threshold", number(c.threshold)},
                          {"margin", number(c.margin)},
                          {"pass", c.pass}});
  }
  out["conditions"] = std::move(conditions);
  nlohmann::json derived;
  for (std::size_t j = 0; j < 2; ++j) {
    derived["omega" + std::to_string(j + 1)] = report.subsystems[j].omega_max;
    derived["gamma" + std::to_string(j + 1)] = report.subsystems[j].gamma;
  }
  derived["lambda"] = report.lambda ? number(*report.lambda) : nlohmann::json(nullptr);
  derived["laser_offset"] = report.laser_offset;
  out["derived"] = std::move(derived);
  return out;
}

}  // namespace cascade::regime

#pragma once

// Validity checks for the approximations behind the effective model:
// Lamb-Dicke, strong coupling (spontaneous emission), rotating wave.

#include <array>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cascade/model.hpp"
#include "json.hpp"

namespace cascade::regime {

inline constexpr double kDefaultSpreadMultiplier = 3.0;

/// Largest mean phonon number n for which 1/2 eta^2 (1 + n + a sigma) stays
/// below one with the thermal spread sigma = n + 1/2:
///   n = (2/eta^2 - 1 - a/2) / (1 + a),  = 1/(2 eta^2) - 5/8 at a = 3.
/// Throws ConfigError unless 0 < eta < 1 and a >= 0.
double lamb_dicke_bound(double eta, double a = kDefaultSpreadMultiplier);

/// 1/2 eta^2 (1 + n + a sigma) for a measured number spread sigma.
double lamb_dicke_figure(double eta, double nbar, double sigma, double a = kDefaultSpreadMultiplier);

/// 10 g0^2 / (kappa gamma).
double strong_coupling_figure(double g0, double kappa, double gamma);

struct RwaMargins {
  double trap_over_coupling = 0.0;  // nu / Omega_max
  double trap_over_decay = 0.0;     // nu / kappa
};
RwaMargins rwa_margins(double nu, double omega_max, double kappa);

/// Laser frequency difference omega_L1 - omega_L2 that puts both cavities on
/// the same frequency.
double laser_offset(double nu1, double nu2);

struct Thresholds {
  double rwa = 10.0;
  double strong_coupling = 10.0;
  double spread_multiplier = kDefaultSpreadMultiplier;

  bool operator==(const Thresholds&) const = default;
};

struct Condition {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  double margin = 0.0;  // value relative to threshold, oriented so larger is safer
  bool pass = false;

  bool operator==(const Condition&) const = default;
};

/// pass == (margin >= 1).
Condition make_condition(std::string name, double value, double threshold, double margin);

struct SubsystemDerived {
  double omega_max = 0.0;  // peak |Omega_j|
  double gamma = 0.0;      // Omega_max^2 / kappa

  bool operator==(const SubsystemDerived&) const = default;
};

struct RegimeReport {
  std::vector<Condition> conditions;
  std::array<SubsystemDerived, 2> subsystems{};
  std::optional<double> lambda;
  double laser_offset = 0.0;
  double planned_nbar = 0.0;
  Thresholds thresholds;

  bool all_pass() const;
  const Condition& condition(const std::string& name) const;

  bool operator==(const RegimeReport&) const = default;
};

RegimeReport full_report(const PhysicalParams& p, double planned_nbar,
                         const Thresholds& thresholds = {});

nlohmann::json to_json(const RegimeReport& report);

}  // namespace cascade::regime

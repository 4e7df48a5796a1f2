#pragma once

// Scenario files: JSON documents with named sections for the engine,
// parameter blocks, grid, output, curve families and sweeps.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cascade/gaussian.hpp"
#include "cascade/model.hpp"
#include "cascade/regime.hpp"
#include "json.hpp"

namespace cascade::scenario {

enum class Engine { analytic, adiabatic, full, fock };

std::string to_string(Engine e);
/// Throws ConfigError for unknown names.
Engine parse_engine(const std::string& name);

/// Constant-rate reduced model. Either gamma2 or lambda is given.
struct ReducedBlock {
  double gamma1 = 1.0;
  std::optional<double> gamma2;
  std::optional<double> lambda;
  double epsilon = 1.0;
  double phase_difference = 0.0;

  ReducedRates rates() const;
  bool operator==(const ReducedBlock&) const = default;
};

struct PhysicalBlock {
  PhysicalParams params;
  double phi1 = 0.0;
  double phi2 = 0.0;
  double epsilon = 1.0;
  double nbar_planned = 6.0;
  regime::Thresholds thresholds;

  bool operator==(const PhysicalBlock&) const = default;
};

enum class TimeAxis { t, gamma1_t };

struct GridSpec {
  double t_start = 0.0;
  double t_end = 1.0;
  double step = 0.01;
  /// When set, the grid is this many evenly spaced points including both ends and step is ignored.
  std::optional<std::size_t> points;
  std::optional<double> integration_step;
  /// gamma1_t: grid values are Gamma1 * t and the first CSV column is Gamma1_t.
  TimeAxis axis = TimeAxis::t;

  bool operator==(const GridSpec&) const = default;
};

struct OutputSpec {
  std::optional<std::string> path;
  std::vector<std::string> columns{"var_minus", "var_plus", "n1", "n2"};
  std::size_t every = 1;
  std::optional<double> threshold;  // var_minus level for the crossing summary

  bool operator==(const OutputSpec&) const = default;
};

/// Parameter changes applied on top of the base blocks.
struct Overrides {
  std::optional<double> lambda;
  std::optional<double> epsilon;
  std::optional<double> gamma1;
  std::optional<double> gamma2;
  std::optional<double> omega;   // both couplings, constant
  std::optional<double> omega1;  // constant
  std::optional<double> omega2;  // constant
  std::optional<double> tau;     // omega1 becomes a sine ramp to its current peak
  std::optional<double> kappa;   // both cavities
  std::optional<double> phase_difference;

  bool empty() const;
  bool operator==(const Overrides&) const = default;
};

struct Curve {
  std::string label;
  Overrides overrides;

  bool operator==(const Curve&) const = default;
};

struct SweepRange {
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;
  bool operator==(const SweepRange&) const = default;
};

struct SweepSpec {
  std::string parameter;  // lambda | epsilon | omega | tau
  std::vector<double> values;
  std::optional<SweepRange> range;
  std::vector<std::string> reductions{"min_variance", "t_min", "n1_at_min"};
  std::optional<double> threshold;

  /// Explicit values, else the expanded range.
  std::vector<double> points() const;
  bool operator==(const SweepSpec&) const = default;
};

inline const std::vector<std::string> kSweepParameters{"lambda", "epsilon", "omega", "tau"};
inline const std::vector<std::string> kReductions{"min_variance", "t_min", "n1_at_min",
                                                  "threshold_time", "n1_at_threshold"};
inline const std::vector<std::string> kSeries{"var_minus", "var_plus", "p_var_minus", "p_var_plus",
                                              "n1", "n2", "cavity1", "cavity2"};

struct Scenario {
  std::string name;
  Engine engine = Engine::analytic;
  std::optional<ReducedBlock> reduced;
  std::optional<EffectiveParams> effective;
  std::optional<PhysicalBlock> physical;
  gaussian::InitialOccupations initial;
  GridSpec grid;
  std::optional<std::vector<int>> fock_cutoffs;
  OutputSpec output;
  std::vector<Curve> curves;
  std::optional<SweepSpec> sweep;

  /// Checks invariants; throws ConfigError naming the offending field.
  void validate() const;
  bool operator==(const Scenario&) const = default;
};

/// Parses and validates. ConfigError messages carry the line number for
/// syntax errors and the field path for structural ones.
Scenario parse(const std::string& text);
Scenario load(const std::filesystem::path& path);

nlohmann::json to_json(const Scenario& s);
std::string serialize(const Scenario& s);

nlohmann::json schedule_to_json(const CouplingSchedule& s);

}  // namespace cascade::scenario

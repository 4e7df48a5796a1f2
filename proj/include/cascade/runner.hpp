#pragma once

// Engine dispatch for scenarios: single runs, curve families, sweeps,
// engine comparisons and regime validation, plus CSV emission.

#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cascade/fock.hpp"
#include "cascade/scenario.hpp"

namespace cascade::runner {

/// Parameters after overrides, in the form each engine consumes.
struct ResolvedModel {
  std::optional<ReducedRates> rates;  // constant reduced rates, when defined
  double epsilon = 1.0;
  double phase_difference = 0.0;
  std::optional<EffectiveParams> effective;
};

ResolvedModel resolve(const scenario::Scenario& s, const scenario::Overrides& o = {});

/// Gamma1 used to convert a gamma1_t axis into time.
double axis_rate(const ResolvedModel& m, scenario::Engine engine);

struct Summary {
  bool has_minimum = true;  // false when var_minus never drops below vacuum
  double min_var_minus = 0.0;
  double t_min = 0.0;
  double gamma1_t_min = 0.0;
  double n1_at_min = 0.0;
  double n2_at_min = 0.0;
  std::optional<gaussian::ThresholdCrossing> crossing;
};

struct CurveResult {
  std::vector<double> axis;  // grid values in the scenario's axis units
  std::vector<double> times;
  std::map<std::string, std::vector<double>> series;
  Summary summary;
  std::optional<fock::Diagnostics> diagnostics;  // fock engine only
  double gamma1 = 0.0;
};

struct RunConfig {
  std::size_t threads = 1;
};

/// Runs one engine for one parameter set.
CurveResult run_curve(const scenario::Scenario& s, scenario::Engine engine,
                      const scenario::Overrides& o = {});

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string format_number(double v);

struct RunOutput {
  Table table;
  std::vector<std::pair<std::string, Summary>> summaries;  // label -> summary
  bool truncation_valid = true;
};

/// One curve per entry of `curves` (or the base parameters if none).
RunOutput run(const scenario::Scenario& s, const RunConfig& config = {});

struct SweepRow {
  double value = 0.0;
  Summary summary;
  bool truncation_valid = true;
};

struct SweepOutput {
  Table table;
  std::vector<SweepRow> rows;
  bool truncation_valid = true;
};

/// Reductions per sweep point; points run in parallel, rows stay ordered.
SweepOutput sweep(const scenario::Scenario& s, const RunConfig& config = {});

struct Gap {
  std::string first;
  std::string second;
  std::string series;
  double absolute = 0.0;
  double relative = 0.0;  // sup|g - f| / max(sup|f|, 1e-6), f from `first`
};

struct CompareOutput {
  Table table;
  std::vector<Gap> gaps;
  std::vector<std::pair<std::string, Summary>> summaries;
  bool truncation_valid = true;
};

CompareOutput compare(const scenario::Scenario& s, const std::vector<scenario::Engine>& engines,
                      const RunConfig& config = {});

/// Regime report for a physical block, or a plain parameter echo otherwise.
nlohmann::json validate(const scenario::Scenario& s);

struct CsvHeader {
  std::string command;
  std::string scenario;
  std::string engine;
  bool reproducible = false;
};

void write_csv(std::ostream& out, const Table& table, const CsvHeader& header);

void print_summary(std::ostream& out, const std::string& label, const Summary& s);

}  // namespace cascade::runner

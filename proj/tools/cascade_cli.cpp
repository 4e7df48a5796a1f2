// Command-line front end: run, sweep, compare and validate scenario files.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cascade/runner.hpp"

namespace {

enum Exit { ok = 0, validation = 2, numerical = 3, io = 4 };

struct Common {
  std::string scenario_path;
  std::string engine;
  std::string out;
  bool reproducible = false;
  std::size_t threads = 1;
};

cascade::scenario::Scenario load(const Common& c) {
  auto s = cascade::scenario::load(c.scenario_path);
  if (!c.engine.empty()) s.engine = cascade::scenario::parse_engine(c.engine);
  return s;
}

std::string output_path(const Common& c, const cascade::scenario::Scenario& s) {
  if (!c.out.empty()) return c.out;
  return s.output.path.value_or("");
}

// CSV goes to the file if one is configured, else to stdout; the summary then
// moves to stderr so stdout stays plain CSV.
void emit(const Common& c, const cascade::scenario::Scenario& s, const cascade::runner::Table& table,
          const std::string& command, const std::string& engine, std::ostream*& summary) {
  const cascade::runner::CsvHeader header{command, s.name, engine, c.reproducible};
  const std::string path = output_path(c, s);
  if (path.empty()) {
    cascade::runner::write_csv(std::cout, table, header);
    summary = &std::cerr;
    return;
  }
  std::ofstream file(path);
  if (!file) throw std::ios_base::failure("cannot open output file " + path);
  cascade::runner::write_csv(file, table, header);
  if (!file) throw std::ios_base::failure("failed writing " + path);
  summary = &std::cout;
}

int run_command(const Common& c) {
  const auto s = load(c);
  const auto out = cascade::runner::run(s, {c.threads});
  std::ostream* summary = nullptr;
  emit(c, s, out.table, "run", cascade::scenario::to_string(s.engine), summary);
  for (const auto& [label, sm] : out.summaries) cascade::runner::print_summary(*summary, label, sm);
  if (!out.truncation_valid) {
    std::cerr << "error: Fock truncation indicator exceeded\n";
    return numerical;
  }
  return ok;
}

int sweep_command(const Common& c) {
  const auto s = load(c);
  const auto out = cascade::runner::sweep(s, {c.threads});
  std::ostream* summary = nullptr;
  emit(c, s, out.table, "sweep", cascade::scenario::to_string(s.engine), summary);
  *summary << "sweep " << s.sweep->parameter << ": " << out.rows.size() << " points\n";
  const cascade::runner::SweepRow* best = nullptr;
  for (const auto& row : out.rows) {
    if (row.summary.has_minimum && (!best || row.summary.min_var_minus < best->summary.min_var_minus)) best = &row;
  }
  if (best) {
    *summary << "global minimum at " << s.sweep->parameter << "=" << cascade::runner::format_number(best->value)
             << ": min_var_minus=" << cascade::runner::format_number(best->summary.min_var_minus) << "\n";
  }
  if (!out.truncation_valid) {
    std::cerr << "error: Fock truncation indicator exceeded\n";
    return numerical;
  }
  return ok;
}

int compare_command(const Common& c, const std::vector<std::string>& engine_names) {
  const auto s = load(c);
  std::vector<cascade::scenario::Engine> engines;
  std::string joined;
  for (const auto& name : engine_names) {
    engines.push_back(cascade::scenario::parse_engine(name));
    joined += (joined.empty() ? "" : ",") + name;
  }
  const auto out = cascade::runner::compare(s, engines, {c.threads});
  std::ostream* summary = nullptr;
  emit(c, s, out.table, "compare", joined, summary);
  for (const auto& [label, sm] : out.summaries) cascade::runner::print_summary(*summary, label, sm);
  for (const auto& g : out.gaps) {
    *summary << "gap " << g.first << " vs " << g.second << " " << g.series
             << ": sup_abs=" << cascade::runner::format_number(g.absolute)
             << " relative=" << cascade::runner::format_number(g.relative) << "\n";
  }
  if (!out.truncation_valid) {
    std::cerr << "error: Fock truncation indicator exceeded\n";
    return numerical;
  }
  return ok;
}

int validate_command(const Common& c) {
  const auto s = load(c);
  const std::string text = cascade::runner::validate(s).dump(2) + "\n";
  if (c.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream file(c.out);
    if (!file) throw std::ios_base::failure("cannot open output file " + c.out);
    file << text;
  }
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cascaded atom-cavity motional entanglement simulator"};
  app.require_subcommand(1);

  Common common;
  std::vector<std::string> engines;
  const auto add_common = [&common](CLI::App* sub, bool with_engine) {
    sub->add_option("scenario", common.scenario_path, "Scenario file (JSON)")->required();
    if (with_engine) sub->add_option("--engine", common.engine, "Override the scenario engine");
    sub->add_option("--out", common.out, "Output path (overrides output.path)");
    sub->add_flag("--reproducible", common.reproducible, "Omit the timestamp from the CSV header");
    sub->add_option("--threads", common.threads, "Worker threads for curves and sweep points")
        ->check(CLI::PositiveNumber);
  };
  auto* run = app.add_subcommand("run", "Integrate a scenario and write its trajectory CSV");
  add_common(run, true);
  auto* sweep = app.add_subcommand("sweep", "Evaluate the scenario's sweep reductions");
  add_common(sweep, true);
  auto* compare = app.add_subcommand("compare", "Run several engines on one scenario");
  add_common(compare, false);
  compare->add_option("--engine", engines, "Engines to compare (at least two)")->required()->delimiter(',');
  auto* validate = app.add_subcommand("validate", "Check a scenario and print its regime report");
  add_common(validate, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : validation;
  }

  try {
    if (*run) return run_command(common);
    if (*sweep) return sweep_command(common);
    if (*compare) return compare_command(common, engines);
    if (*validate) return validate_command(common);
  } catch (const cascade::ConfigError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return validation;
  } catch (const cascade::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return numerical;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return io;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return validation;
  } catch (const std::domain_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return validation;
  } catch (const std::range_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return numerical;
  }
  return ok;
}

#include "cascade/runner.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <exception>
#include <thread>

#include "cascade/analytic.hpp"

namespace cascade::runner {

using scenario::Engine;
using scenario::Overrides;
using scenario::Scenario;
using scenario::TimeAxis;

namespace {

void need(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void apply_to_effective(EffectiveParams& e, const Overrides& o) {
  if (o.kappa) e.kappa1 = e.kappa2 = *o.kappa;
  if (o.omega) e.omega1 = e.omega2 = CouplingSchedule::constant(*o.omega);
  if (o.omega1) e.omega1 = CouplingSchedule::constant(*o.omega1);
  if (o.omega2) e.omega2 = CouplingSchedule::constant(*o.omega2);
  if (o.tau) e.omega1 = CouplingSchedule::sine_ramp(e.omega1.peak(), *o.tau);
  if (o.gamma1) e.omega1 = CouplingSchedule::constant(std::sqrt(*o.gamma1 * e.kappa1));
  if (o.gamma2) e.omega2 = CouplingSchedule::constant(std::sqrt(*o.gamma2 * e.kappa2));
  if (o.lambda) {
    const double g1 = e.omega1.peak() * e.omega1.peak() / e.kappa1;
    e.omega2 = CouplingSchedule::constant(std::sqrt(*o.lambda * g1 * e.kappa2));
  }
  if (o.epsilon) e.epsilon = *o.epsilon;
  if (o.phase_difference) e.phi1 = e.phi2 + *o.phase_difference;
}

void apply_to_reduced(scenario::ReducedBlock& r, const Overrides& o) {
  if (o.gamma1) r.gamma1 = *o.gamma1;
  if (o.gamma2) {
    r.gamma2 = *o.gamma2;
    r.lambda.reset();
  }
  if (o.lambda) {
    r.lambda = *o.lambda;
    r.gamma2.reset();
  }
  if (o.epsilon) r.epsilon = *o.epsilon;
  if (o.phase_difference) r.phase_difference = *o.phase_difference;
}

bool contains(const std::vector<std::string>& list, const std::string& x) {
  return std::find(list.begin(), list.end(), x) != list.end();
}

std::vector<std::string> available_series(Engine e) {
  switch (e) {
    case Engine::analytic:
      return {"var_minus", "var_plus", "n1", "n2"};
    case Engine::adiabatic:
      return {"var_minus", "var_plus", "p_var_minus", "p_var_plus", "n1", "n2"};
    case Engine::full:
    case Engine::fock:
      return scenario::kSeries;
  }
  return {};
}

std::string axis_name(const Scenario& s) { return s.grid.axis == TimeAxis::t ? "t" : "Gamma1_t"; }

fock::DensityMatrix thermal_fock_state(const std::vector<int>& cutoffs,
                                       const gaussian::InitialOccupations& occ) {
  using namespace gaussian::full_mode;
  const fock::Ladder ladder(cutoffs);
  const std::array<double, count> nbar{0.0, 0.0, occ.nbar1, occ.nbar2};
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(ladder.dimension(), ladder.dimension());
  double total = 0.0;
  for (Eigen::Index i = 0; i < ladder.dimension(); ++i) {
    double p = 1.0;
    for (std::size_t k = 0; k < count; ++k) {
      const double n = nbar[k];
      const int level = ladder.occupation(i, k);
      p *= std::pow(n / (1.0 + n), level) / (1.0 + n);
    }
    rho(i, i) = p;
    total += p;
  }
  rho /= total;
  return fock::DensityMatrix(cutoffs, std::move(rho));
}

Summary grid_summary(const std::vector<double>& times, const std::vector<double>& var_minus,
                     const std::vector<double>& n1, const std::vector<double>& n2, double gamma1) {
  Summary s;
  const auto it = std::min_element(var_minus.begin(), var_minus.end());
  const auto i = static_cast<std::size_t>(it - var_minus.begin());
  s.min_var_minus = *it;
  s.t_min = times[i];
  s.gamma1_t_min = gamma1 * times[i];
  s.n1_at_min = n1[i];
  s.n2_at_min = n2[i];
  s.has_minimum = i > 0 && *it < var_minus.front();
  return s;
}

Summary analytic_summary(const ReducedRates& rates, double epsilon, const std::vector<double>& times,
                         const std::vector<double>& var_minus, const std::vector<double>& n1,
                         const std::vector<double>& n2) {
  if (!(rates.gamma1 > 0.0) || !rates.lambda) return grid_summary(times, var_minus, n1, n2, rates.gamma1);
  Summary s;
  const auto m = analytic::min_variance(*rates.lambda, epsilon);
  if (!m) {
    s.has_minimum = false;
    s.min_var_minus = 2.0;
    s.t_min = 0.0;
    s.gamma1_t_min = 0.0;
    s.n1_at_min = 0.0;
    s.n2_at_min = 0.0;
    return s;
  }
  s.min_var_minus = m->variance;
  s.gamma1_t_min = m->scaled_time;
  s.t_min = m->scaled_time / rates.gamma1;
  if (std::isfinite(s.t_min)) {
    s.n1_at_min = analytic::occupation_mode1(rates.gamma1, s.t_min);
    s.n2_at_min = analytic::occupation_mode2(rates.gamma1, rates.gamma2, epsilon, s.t_min);
  } else {
    s.n1_at_min = s.n2_at_min = std::numeric_limits<double>::infinity();
  }
  return s;
}

template <class Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  threads = std::max<std::size_t>(1, std::min(threads, n));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::optional<double> crossing_level(const Scenario& s) {
  if (s.output.threshold) return s.output.threshold;
  if (s.sweep && s.sweep->threshold) return s.sweep->threshold;
  return std::nullopt;
}

Overrides sweep_override(const std::string& parameter, double value) {
  Overrides o;
  if (parameter == "lambda") o.lambda = value;
  else if (parameter == "epsilon") o.epsilon = value;
  else if (parameter == "omega") o.omega = value;
  else if (parameter == "tau") o.tau = value;
  else throw ConfigError("sweep.parameter: unknown parameter '" + parameter + "'");
  return o;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

ResolvedModel resolve(const Scenario& s, const Overrides& o) {
  ResolvedModel m;
  std::optional<scenario::ReducedBlock> red = s.reduced;
  std::optional<EffectiveParams> eff = s.effective;
  if (!eff && s.physical) {
    eff = effective_from_physical(s.physical->params, s.physical->phi1, s.physical->phi2,
                                  s.physical->epsilon);
  }
  const bool coupling_override = o.omega || o.omega1 || o.omega2 || o.tau || o.kappa;
  need(!coupling_override || eff, "overrides omega/omega1/omega2/tau/kappa need an effective parameter block");
  if (eff) {
    apply_to_effective(*eff, o);
    eff->validate();
  }
  if (red) {
    apply_to_reduced(*red, o);
    need(red->epsilon >= 0.0 && red->epsilon <= 1.0, "epsilon must lie in [0, 1]");
    m.rates = red->rates();
    need(m.rates->gamma1 >= 0.0 && m.rates->gamma2 >= 0.0, "reduced rates must be >= 0");
    m.epsilon = red->epsilon;
    m.phase_difference = red->phase_difference;
  } else if (eff) {
    if (eff->omega1.is_constant() && eff->omega2.is_constant()) {
      m.rates = reduced_rates(eff->omega1(0.0), eff->omega2(0.0), eff->kappa1, eff->kappa2);
    }
    m.epsilon = eff->epsilon;
    m.phase_difference = eff->phi1 - eff->phi2;
  }
  m.effective = std::move(eff);
  return m;
}

double axis_rate(const ResolvedModel& m, Engine engine) {
  const bool reduced_engine = engine == Engine::analytic || engine == Engine::adiabatic;
  if (m.rates && (reduced_engine || !m.effective)) return m.rates->gamma1;
  if (m.effective) {
    const double w = m.effective->omega1.peak();
    return w * w / m.effective->kappa1;
  }
  return m.rates ? m.rates->gamma1 : 0.0;
}

CurveResult run_curve(const Scenario& s, Engine engine, const Overrides& o) {
  const ResolvedModel m = resolve(s, o);
  CurveResult r;
  r.gamma1 = axis_rate(m, engine);

  const TimeGrid axis = s.grid.points ? TimeGrid::linspace(s.grid.t_start, s.grid.t_end, *s.grid.points)
                                     : TimeGrid::uniform(s.grid.t_start, s.grid.t_end, s.grid.step);
  r.axis = axis.times();
  double to_time = 1.0;
  double integration_step_scale = 1.0;
  if (s.grid.axis == TimeAxis::gamma1_t) {
    need(r.gamma1 > 0.0, "grid.axis: gamma1_t needs Gamma1 > 0");
    to_time = 1.0 / r.gamma1;
    integration_step_scale = to_time;
  }
  r.times.reserve(r.axis.size());
  for (double x : r.axis) r.times.push_back(x * to_time);
  const TimeGrid grid(r.times);
  std::optional<double> step;
  if (s.grid.integration_step) step = *s.grid.integration_step * integration_step_scale;

  for (const auto& c : s.output.columns) {
    need(contains(available_series(engine), c),
         "output.columns: series '" + c + "' is not produced by the " + scenario::to_string(engine) + " engine");
  }

  std::vector<double> var_minus, n1, n2;
  switch (engine) {
    case Engine::analytic: {
      need(m.rates.has_value(), "analytic engine needs constant couplings");
      need(std::abs(m.phase_difference) < 1e-15, "analytic engine assumes phase difference 0");
      need(s.initial == gaussian::InitialOccupations{}, "analytic engine assumes a vacuum initial state");
      const VarianceReport rep = analytic::variance_report(*m.rates, m.epsilon, grid);
      r.series["var_minus"] = rep.var_minus;
      r.series["var_plus"] = rep.var_plus;
      r.series["n1"] = rep.n1;
      r.series["n2"] = rep.n2;
      r.summary = analytic_summary(*m.rates, m.epsilon, r.times, rep.var_minus, rep.n1, rep.n2);
      break;
    }
    case Engine::adiabatic: {
      const gaussian::AdiabaticModel model =
          s.reduced ? gaussian::AdiabaticModel(*m.rates, m.epsilon, m.phase_difference)
                    : gaussian::AdiabaticModel::from_effective(*m.effective);
      const auto traj = gaussian::integrate_adiabatic(model, gaussian::initial_reduced_state(s.initial),
                                                      grid, {step});
      r.series["var_minus"] = traj.var_minus();
      r.series["var_plus"] = traj.var_plus();
      r.series["p_var_minus"] = traj.p_var_minus();
      r.series["p_var_plus"] = traj.p_var_plus();
      r.series["n1"] = traj.n1();
      r.series["n2"] = traj.n2();
      break;
    }
    case Engine::full:
    case Engine::fock: {
      need(m.effective.has_value(), scenario::to_string(engine) + " engine needs effective parameters");
      std::optional<gaussian::Trajectory> traj;
      if (engine == Engine::full) {
        traj = gaussian::integrate_full(*m.effective, gaussian::initial_full_state(s.initial), grid, {step});
      } else {
        const std::vector<int> cutoffs = s.fock_cutoffs ? *s.fock_cutoffs : fock::kDefaultFullCutoffs;
        fock::EvolveOptions options;
        options.step = step;
        auto run = fock::evolve(thermal_fock_state(cutoffs, s.initial), *m.effective, grid, options);
        r.diagnostics = run.diagnostics;
        traj.emplace(std::move(run.trajectory));
      }
      r.series["var_minus"] = traj->var_minus();
      r.series["var_plus"] = traj->var_plus();
      r.series["p_var_minus"] = traj->p_var_minus();
      r.series["p_var_plus"] = traj->p_var_plus();
      r.series["n1"] = traj->n1();
      r.series["n2"] = traj->n2();
      r.series["cavity1"] = traj->cavity1();
      r.series["cavity2"] = traj->cavity2();
      break;
    }
  }
  if (engine != Engine::analytic) {
    r.summary = grid_summary(r.times, r.series["var_minus"], r.series["n1"], r.series["n2"], r.gamma1);
  }
  if (const auto level = crossing_level(s)) {
    r.summary.crossing = gaussian::first_crossing(r.times, r.series["var_minus"], r.series["n1"], *level);
  }
  return r;
}

RunOutput run(const Scenario& s, const RunConfig& config) {
  std::vector<scenario::Curve> curves = s.curves;
  if (curves.empty()) curves.push_back({s.name, {}});
  std::vector<CurveResult> results(curves.size());
  parallel_for(curves.size(), config.threads,
               [&](std::size_t i) { results[i] = run_curve(s, s.engine, curves[i].overrides); });

  RunOutput out;
  out.table.header.push_back(axis_name(s));
  const bool many = s.curves.size() > 0;
  for (const auto& c : curves) {
    for (const auto& col : s.output.columns) out.table.header.push_back(many ? col + "_" + c.label : col);
  }
  const auto& axis = results.front().axis;
  for (std::size_t i = 0; i < axis.size(); i += s.output.every) {
    std::vector<std::string> row{format_number(axis[i])};
    for (const auto& res : results) {
      for (const auto& col : s.output.columns) row.push_back(format_number(res.series.at(col)[i]));
    }
    out.table.rows.push_back(std::move(row));
  }
  for (std::size_t k = 0; k < curves.size(); ++k) {
    out.summaries.emplace_back(curves[k].label, results[k].summary);
    if (results[k].diagnostics && !results[k].diagnostics->truncation_valid) out.truncation_valid = false;
  }
  return out;
}

SweepOutput sweep(const Scenario& s, const RunConfig& config) {
  need(s.sweep.has_value(), "sweep: scenario has no sweep section");
  const auto& spec = *s.sweep;
  const std::vector<double> points = spec.points();
  SweepOutput out;
  out.rows.resize(points.size());
  parallel_for(points.size(), config.threads, [&](std::size_t i) {
    const CurveResult r = run_curve(s, s.engine, sweep_override(spec.parameter, points[i]));
    out.rows[i].value = points[i];
    out.rows[i].summary = r.summary;
    out.rows[i].truncation_valid = !r.diagnostics || r.diagnostics->truncation_valid;
  });

  out.table.header.push_back(spec.parameter);
  for (const auto& red : spec.reductions) out.table.header.push_back(red);
  out.table.header.push_back("status");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& row : out.rows) {
    std::vector<std::string> cells{format_number(row.value)};
    const Summary& sm = row.summary;
    for (const auto& red : spec.reductions) {
      double v = nan;
      if (red == "min_variance" && sm.has_minimum) v = sm.min_var_minus;
      if (red == "t_min" && sm.has_minimum) v = s.grid.axis == TimeAxis::t ? sm.t_min : sm.gamma1_t_min;
      if (red == "n1_at_min" && sm.has_minimum) v = sm.n1_at_min;
      if (red == "threshold_time" && sm.crossing) v = sm.crossing->time;
      if (red == "n1_at_threshold" && sm.crossing) v = sm.crossing->n1;
      cells.push_back(format_number(v));
    }
    std::string status = sm.has_minimum ? "ok" : "no_minimum_below_vacuum";
    if (!row.truncation_valid) {
      status = "truncation_invalid";
      out.truncation_valid = false;
    }
    cells.push_back(status);
    out.table.rows.push_back(std::move(cells));
  }
  return out;
}

CompareOutput compare(const Scenario& s, const std::vector<Engine>& engines, const RunConfig& config) {
  need(engines.size() >= 2, "compare: needs at least two engines");
  std::vector<CurveResult> results(engines.size());
  parallel_for(engines.size(), config.threads, [&](std::size_t i) { results[i] = run_curve(s, engines[i]); });

  CompareOutput out;
  out.table.header.push_back(axis_name(s));
  for (const auto& e : engines) {
    for (const auto& col : s.output.columns) out.table.header.push_back(col + "_" + scenario::to_string(e));
  }
  const auto& axis = results.front().axis;
  for (std::size_t i = 0; i < axis.size(); i += s.output.every) {
    std::vector<std::string> row{format_number(axis[i])};
    for (const auto& res : results) {
      for (const auto& col : s.output.columns) row.push_back(format_number(res.series.at(col)[i]));
    }
    out.table.rows.push_back(std::move(row));
  }
  for (std::size_t a = 0; a < engines.size(); ++a) {
    for (std::size_t b = a + 1; b < engines.size(); ++b) {
      need(results[a].times == results[b].times,
           "compare: engines " + scenario::to_string(engines[a]) + " and " + scenario::to_string(engines[b]) +
               " produce different time grids (gamma1_t axes differ)");
      for (const auto& col : s.output.columns) {
        const auto& f = results[a].series.at(col);
        const auto& g = results[b].series.at(col);
        double gap = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
          gap = std::max(gap, std::abs(g[i] - f[i]));
          scale = std::max(scale, std::abs(f[i]));
        }
        out.gaps.push_back({scenario::to_string(engines[a]), scenario::to_string(engines[b]), col, gap,
                            gap / std::max(scale, 1e-6)});
      }
    }
  }
  for (std::size_t k = 0; k < engines.size(); ++k) {
    out.summaries.emplace_back(scenario::to_string(engines[k]), results[k].summary);
    if (results[k].diagnostics && !results[k].diagnostics->truncation_valid) out.truncation_valid = false;
  }
  return out;
}

nlohmann::json validate(const Scenario& s) {
  s.validate();
  nlohmann::json out;
  out["scenario"] = s.name;
  out["engine"] = scenario::to_string(s.engine);
  out["valid"] = true;
  const ResolvedModel m = resolve(s);
  if (m.rates) {
    out["rates"] = {{"gamma1", m.rates->gamma1}, {"gamma2", m.rates->gamma2}, {"epsilon", m.epsilon}};
    if (m.rates->lambda) out["rates"]["lambda"] = *m.rates->lambda;
  }
  if (s.physical) {
    const auto report = regime::full_report(s.physical->params, s.physical->nbar_planned, s.physical->thresholds);
    out["regime"] = regime::to_json(report);
  }
  return out;
}

void write_csv(std::ostream& out, const Table& table, const CsvHeader& header) {
  out << "# cascade " << header.command << "\n";
  out << "# scenario: " << header.scenario << "\n";
  if (!header.engine.empty()) out << "# engine: " << header.engine << "\n";
  if (!header.reproducible) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[64];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    out << "# generated: " << buf << "\n";
  }
  const auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << "\n";
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
}

void print_summary(std::ostream& out, const std::string& label, const Summary& s) {
  out << label << ": ";
  if (!s.has_minimum) {
    out << "no minimum below vacuum";
  } else {
    out << "min_var_minus=" << format_number(s.min_var_minus) << " t_min=" << format_number(s.t_min)
        << " Gamma1_t_min=" << format_number(s.gamma1_t_min) << " n1_at_min=" << format_number(s.n1_at_min)
        << " n2_at_min=" << format_number(s.n2_at_min);
  }
  if (s.crossing) {
    out << " threshold_time=" << format_number(s.crossing->time)
        << " n1_at_threshold=" << format_number(s.crossing->n1);
  }
  out << "\n";
}

}  // namespace cascade::runner

#include "cascade/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cascade {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ConfigError(std::string(name) + " must be strictly positive and finite");
  }
}

void validate_schedule(const CouplingSchedule& s, const char* name) {
  std::visit(
      [name](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, CouplingSchedule::Constant>) {
          if (!std::isfinite(v.value)) throw ConfigError(std::string(name) + ": non-finite value");
        } else if constexpr (std::is_same_v<T, CouplingSchedule::SineRamp>) {
          if (!std::isfinite(v.peak)) throw ConfigError(std::string(name) + ": non-finite peak");
          if (!(v.tau > 0.0)) throw ConfigError(std::string(name) + ": tau must be positive");
        } else {
          if (v.times.empty() || v.times.size() != v.values.size()) {
            throw ConfigError(std::string(name) + ": tabulated schedule needs matching, non-empty t/value lists");
          }
          for (std::size_t i = 1; i < v.times.size(); ++i) {
            if (!(v.times[i] > v.times[i - 1])) {
              throw ConfigError(std::string(name) + ": tabulated times must be strictly increasing");
            }
          }
        }
      },
      s.variant());
}

}  // namespace

CouplingSchedule::CouplingSchedule(Variant v) : v_(std::move(v)) {
  validate_schedule(*this, "schedule");
}

CouplingSchedule CouplingSchedule::constant(double value) {
  return CouplingSchedule(Constant{value});
}

CouplingSchedule CouplingSchedule::sine_ramp(double peak, double tau) {
  return CouplingSchedule(SineRamp{peak, tau});
}

CouplingSchedule CouplingSchedule::tabulated(std::vector<double> times, std::vector<double> values) {
  return CouplingSchedule(Tabulated{std::move(times), std::move(values)});
}

double CouplingSchedule::operator()(double t) const {
  return std::visit(
      [t](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return v.value;
        } else if constexpr (std::is_same_v<T, SineRamp>) {
          if (t <= 0.0) return 0.0;
          const double phase = t / v.tau;
          // clamp at the first maximum
          if (phase >= 0.5 * std::numbers::pi) return v.peak;
          return v.peak * std::sin(phase);
        } else {
          if (t <= v.times.front()) return v.values.front();
          if (t >= v.times.back()) return v.values.back();
          const auto it = std::upper_bound(v.times.begin(), v.times.end(), t);
          const auto hi = static_cast<std::size_t>(it - v.times.begin());
          const std::size_t lo = hi - 1;
          const double w = (t - v.times[lo]) / (v.times[hi] - v.times[lo]);
          return (1.0 - w) * v.values[lo] + w * v.values[hi];
        }
      },
      v_);
}

double CouplingSchedule::peak() const {
  return std::visit(
      [](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return std::abs(v.value);
        } else if constexpr (std::is_same_v<T, SineRamp>) {
          return std::abs(v.peak);
        } else {
          double m = 0.0;
          for (double x : v.values) m = std::max(m, std::abs(x));
          return m;
        }
      },
      v_);
}

CouplingSchedule CouplingSchedule::scaled(double factor) const {
  return std::visit(
      [factor](auto v) -> CouplingSchedule {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Constant>) {
          v.value *= factor;
        } else if constexpr (std::is_same_v<T, SineRamp>) {
          v.peak *= factor;
        } else {
          for (double& x : v.values) x *= factor;
        }
        return CouplingSchedule(std::move(v));
      },
      v_);
}

void PhysicalParams::validate() const {
  for (std::size_t j = 0; j < subsystems.size(); ++j) {
    const auto& s = subsystems[j];
    const std::string tag = "subsystem " + std::to_string(j + 1) + ": ";
    require_positive(s.lamb_dicke, (tag + "lamb_dicke").c_str());
    require_positive(s.atom_cavity_coupling, (tag + "atom_cavity_coupling").c_str());
    require_positive(s.trap_frequency, (tag + "trap_frequency").c_str());
    require_positive(s.atomic_linewidth, (tag + "atomic_linewidth").c_str());
    require_positive(s.cavity_decay, (tag + "cavity_decay").c_str());
    if (s.detuning == 0.0 || !std::isfinite(s.detuning)) {
      throw ConfigError(tag + "detuning must be non-zero and finite");
    }
    validate_schedule(s.laser_amplitude, (tag + "laser_amplitude").c_str());
  }
}

double EffectiveParams::cascade_coupling() const {
  return 2.0 * std::sqrt(epsilon * kappa1 * kappa2);
}

void EffectiveParams::validate() const {
  require_positive(kappa1, "kappa1");
  require_positive(kappa2, "kappa2");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw ConfigError("epsilon must satisfy 0 <= epsilon <= 1");
  }
  if (!std::isfinite(phi1) || !std::isfinite(phi2)) throw ConfigError("phases must be finite");
  validate_schedule(omega1, "omega1");
  validate_schedule(omega2, "omega2");
}

double effective_coupling(const PhysicalParams& p, Subsystem j, double t) {
  const auto& s = p[j];
  if (s.detuning == 0.0) {
    throw std::domain_error("effective_coupling: zero atom-laser detuning");
  }
  return -s.lamb_dicke * s.atom_cavity_coupling * s.laser_amplitude(t) / s.detuning;
}

ReducedRates reduced_rates(double omega1, double omega2, double kappa1, double kappa2) {
  if (!(kappa1 > 0.0) || !(kappa2 > 0.0)) {
    throw std::domain_error("reduced_rates: cavity decay rates must be positive");
  }
  ReducedRates r;
  r.gamma1 = omega1 * omega1 / kappa1;
  r.gamma2 = omega2 * omega2 / kappa2;
  if (r.gamma1 > 0.0) r.lambda = r.gamma2 / r.gamma1;
  return r;
}

EffectiveParams effective_from_physical(const PhysicalParams& p, double phi1, double phi2,
                                        double epsilon) {
  p.validate();
  EffectiveParams e;
  e.kappa1 = p[Subsystem::first].cavity_decay;
  e.kappa2 = p[Subsystem::second].cavity_decay;
  e.phi1 = phi1;
  e.phi2 = phi2;
  e.epsilon = epsilon;
  const auto factor = [](const SubsystemPhysics& s) {
    return -s.lamb_dicke * s.atom_cavity_coupling / s.detuning;
  };
  e.omega1 = p[Subsystem::first].laser_amplitude.scaled(factor(p[Subsystem::first]));
  e.omega2 = p[Subsystem::second].laser_amplitude.scaled(factor(p[Subsystem::second]));
  e.validate();
  return e;
}

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
  if (times_.empty()) throw ConfigError("time grid is empty");
  for (double t : times_) {
    if (!std::isfinite(t)) throw ConfigError("time grid contains a non-finite value");
  }
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i] > times_[i - 1])) throw ConfigError("time grid must be strictly increasing");
  }
}

TimeGrid TimeGrid::uniform(double t_start, double t_end, double step) {
  if (!(step > 0.0)) throw ConfigError("time grid step must be positive");
  if (!(t_end > t_start)) throw ConfigError("time grid is empty: t_end must exceed t_start");
  const auto n = static_cast<std::size_t>(std::floor((t_end - t_start) / step + 1e-9));
  std::vector<double> t(n + 1);
  for (std::size_t i = 0; i <= n; ++i) t[i] = t_start + static_cast<double>(i) * step;
  return TimeGrid(std::move(t));
}

TimeGrid TimeGrid::linspace(double t_start, double t_end, std::size_t count) {
  if (count < 2 || !(t_end > t_start)) throw ConfigError("time grid is empty");
  std::vector<double> t(count);
  const double h = (t_end - t_start) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) t[i] = t_start + static_cast<double>(i) * h;
  t.back() = t_end;
  return TimeGrid(std::move(t));
}

}  // namespace cascade

#pragma once

// Parameters, unit conventions and coupling schedules shared by every engine.
//
// Units: hbar = 1. Rates and frequencies are angular frequencies, normally
// expressed in units of kappa1, with time in units of 1/kappa1.

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace cascade {

/// Invalid configuration or violated precondition (CLI exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// NaN, overflow or Fock truncation failure during a run (CLI exit code 3).
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// Time-dependent coupling Omega(t). Defined for every t >= 0.
class CouplingSchedule {
 public:
  struct Constant {
    double value = 0.0;
    bool operator==(const Constant&) const = default;
  };
  /// peak * sin(t / tau) on the rising quarter wave, held at peak afterwards.
  struct SineRamp {
    double peak = 0.0;
    double tau = 1.0;
    bool operator==(const SineRamp&) const = default;
  };
  /// Linear interpolation between samples; endpoint values are held outside.
  struct Tabulated {
    std::vector<double> times;
    std::vector<double> values;
    bool operator==(const Tabulated&) const = default;
  };
  using Variant = std::variant<Constant, SineRamp, Tabulated>;

  CouplingSchedule() = default;
  explicit CouplingSchedule(Variant v);

  static CouplingSchedule constant(double value);
  static CouplingSchedule sine_ramp(double peak, double tau);
  static CouplingSchedule tabulated(std::vector<double> times, std::vector<double> values);

  double operator()(double t) const;

  /// Largest |Omega(t)| over t >= 0.
  double peak() const;

  bool is_constant() const { return std::holds_alternative<Constant>(v_); }

  /// Same shape with every value multiplied by `factor`.
  CouplingSchedule scaled(double factor) const;

  const Variant& variant() const { return v_; }

  bool operator==(const CouplingSchedule&) const = default;

 private:
  Variant v_{Constant{}};
};

enum class Subsystem { first = 0, second = 1 };

/// Hardware-level parameters of one atom-cavity subsystem.
struct SubsystemPhysics {
  double lamb_dicke = 0.1;              // eta
  double atom_cavity_coupling = 1.0;    // g0
  CouplingSchedule laser_amplitude;     // E(t)
  double detuning = 100.0;              // Delta, atom-laser
  double trap_frequency = 10.0;         // nu
  double atomic_linewidth = 1.0;        // gamma
  double cavity_decay = 1.0;            // kappa

  bool operator==(const SubsystemPhysics&) const = default;
};

struct PhysicalParams {
  std::array<SubsystemPhysics, 2> subsystems;

  const SubsystemPhysics& operator[](Subsystem s) const {
    return subsystems[static_cast<std::size_t>(s)];
  }
  void validate() const;

  bool operator==(const PhysicalParams&) const = default;
};

/// Parameters of the effective cascaded model: cavity decay rates, coupling
/// phases, transmission efficiency and the two coupling schedules.
struct EffectiveParams {
  double kappa1 = 1.0;
  double kappa2 = 1.0;
  double phi1 = 0.0;
  double phi2 = 0.0;
  double epsilon = 1.0;
  CouplingSchedule omega1;
  CouplingSchedule omega2;

  /// Cascade coefficient 2 sqrt(epsilon kappa1 kappa2).
  double cascade_coupling() const;
  void validate() const;

  bool operator==(const EffectiveParams&) const = default;
};

struct ReducedRates {
  double gamma1 = 0.0;  // growth rate of motional mode 1
  double gamma2 = 0.0;  // decay rate of motional mode 2
  std::optional<double> lambda;  // gamma2 / gamma1, absent when gamma1 == 0

  bool operator==(const ReducedRates&) const = default;
};

/// Omega_j(t) = -eta_j g0_j E_j(t) / Delta_j.
double effective_coupling(const PhysicalParams& p, Subsystem j, double t);

/// Gamma_j = Omega_j^2 / kappa_j.
ReducedRates reduced_rates(double omega1, double omega2, double kappa1, double kappa2);

/// Builds the effective model from hardware parameters; schedules are the
/// laser amplitude schedules scaled by -eta g0 / Delta.
EffectiveParams effective_from_physical(const PhysicalParams& p, double phi1, double phi2,
                                        double epsilon);

/// Strictly increasing output time grid.
class TimeGrid {
 public:
  TimeGrid() = default;
  explicit TimeGrid(std::vector<double> times);

  /// t_start, t_start + step, ... up to t_end (inclusive within rounding).
  static TimeGrid uniform(double t_start, double t_end, double step);
  /// `count` evenly spaced points including both ends.
  static TimeGrid linspace(double t_start, double t_end, std::size_t count);

  const std::vector<double>& times() const { return times_; }
  std::size_t size() const { return times_.size(); }
  double front() const { return times_.front(); }
  double back() const { return times_.back(); }
  double operator[](std::size_t i) const { return times_[i]; }

 private:
  std::vector<double> times_;
};

}  // namespace cascade

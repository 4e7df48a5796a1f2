#pragma once

// Moment-equation engines: the full four-mode cascaded model and the
// adiabatic two-mode reduced model, both integrated with fixed-step RK4.

#include <cstddef>
#include <optional>
#include <vector>

#include "cascade/analytic.hpp"
#include "cascade/model.hpp"
#include "cascade/moments.hpp"

namespace cascade::gaussian {

/// Mode indices of the full model.
namespace full_mode {
inline constexpr std::size_t a1 = 0;
inline constexpr std::size_t a2 = 1;
inline constexpr std::size_t b1 = 2;
inline constexpr std::size_t b2 = 3;
inline constexpr std::size_t count = 4;
}  // namespace full_mode

/// Mode indices of the reduced model.
namespace reduced_mode {
inline constexpr std::size_t b1 = 0;
inline constexpr std::size_t b2 = 1;
inline constexpr std::size_t count = 2;
}  // namespace reduced_mode

/// Largest allowed h * max_rate.
inline constexpr double kStabilityLimit = 0.05;
/// Default h * max_rate.
inline constexpr double kDefaultStepFactor = 0.01;

struct IntegrationOptions {
  std::optional<double> step;  // RK4 step; default kDefaultStepFactor / max_rate
};

/// Resolves the RK4 step for a model whose fastest rate is `max_rate`;
/// throws ConfigError if a requested step breaks the stability guard.
double resolve_step(const IntegrationOptions& options, double max_rate, const TimeGrid& grid);

struct InitialOccupations {
  double nbar1 = 0.0;
  double nbar2 = 0.0;
  bool operator==(const InitialOccupations&) const = default;
};

/// Cavities in vacuum, motional modes thermal.
MomentState initial_full_state(const InitialOccupations& occ = {});
MomentState initial_reduced_state(const InitialOccupations& occ = {});

/// The cascaded model at time t as a quadratic system over (a1, a2, b1, b2).
QuadraticSystem full_system(const EffectiveParams& p, double t);

/// Moment generator of the full model at time t.
MomentGenerator assemble_full_generator(const EffectiveParams& p, double t);

/// Reduced model for the motional modes. The couplings are stored as
/// amplitudes s_j(t) with Gamma_j(t) = s_j(t)^2; the cross coefficient is
/// 2 sqrt(epsilon) s_1 s_2, which keeps the sign of Omega1 * Omega2.
class AdiabaticModel {
 public:
  AdiabaticModel(const ReducedRates& rates, double epsilon, double phase_difference = 0.0);
  AdiabaticModel(CouplingSchedule amplitude1, CouplingSchedule amplitude2, double epsilon,
                 double phase_difference);

  /// Gamma_j(t) = Omega_j(t)^2 / kappa_j, phase difference phi1 - phi2.
  static AdiabaticModel from_effective(const EffectiveParams& p);

  double gamma1(double t) const;
  double gamma2(double t) const;
  double cross(double t) const;
  double epsilon() const { return epsilon_; }
  double phase_difference() const { return phase_difference_; }
  double peak_rate() const;

  QuadraticSystem system(double t) const;

 private:
  CouplingSchedule amplitude1_;
  CouplingSchedule amplitude2_;
  double epsilon_;
  double phase_difference_;
};

/// Moment snapshots on a time grid plus derived series.
class Trajectory {
 public:
  Trajectory(TimeGrid grid, std::vector<MomentState> states, std::size_t motional1,
             std::size_t motional2, std::optional<std::size_t> cavity1 = std::nullopt,
             std::optional<std::size_t> cavity2 = std::nullopt);

  const TimeGrid& grid() const { return grid_; }
  const std::vector<double>& times() const { return grid_.times(); }
  const std::vector<MomentState>& states() const { return states_; }
  std::size_t motional1() const { return motional1_; }
  std::size_t motional2() const { return motional2_; }

  const std::vector<double>& var_minus() const { return var_minus_; }
  const std::vector<double>& var_plus() const { return var_plus_; }
  const std::vector<double>& p_var_minus() const { return p_var_minus_; }
  const std::vector<double>& p_var_plus() const { return p_var_plus_; }
  const std::vector<double>& n1() const { return n1_; }
  const std::vector<double>& n2() const { return n2_; }
  /// Empty for the reduced model.
  const std::vector<double>& cavity1() const { return cavity1_; }
  const std::vector<double>& cavity2() const { return cavity2_; }

  VarianceReport report() const;

 private:
  TimeGrid grid_;
  std::vector<MomentState> states_;
  std::size_t motional1_;
  std::size_t motional2_;
  std::vector<double> var_minus_, var_plus_, p_var_minus_, p_var_plus_;
  std::vector<double> n1_, n2_, cavity1_, cavity2_;
};

Trajectory integrate_full(const EffectiveParams& p, const MomentState& initial,
                          const TimeGrid& grid, const IntegrationOptions& options = {});

Trajectory integrate_adiabatic(const AdiabaticModel& model, const MomentState& initial,
                               const TimeGrid& grid, const IntegrationOptions& options = {});

/// First time var_minus falls to `level`, linearly interpolated between grid
/// points, together with n1 interpolated at that time.
struct ThresholdCrossing {
  double time = 0.0;
  double n1 = 0.0;
};
std::optional<ThresholdCrossing> first_crossing(const std::vector<double>& times,
                                                const std::vector<double>& var_minus,
                                                const std::vector<double>& n1, double level);

}  // namespace cascade::gaussian

#include "cascade/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cascade/rk4.hpp"

namespace cascade::gaussian {

namespace {

constexpr Complex kI{0.0, 1.0};

Eigen::VectorXcd unit(std::size_t size, std::size_t index, Complex value = 1.0) {
  Eigen::VectorXcd u = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(size));
  u[static_cast<Eigen::Index>(index)] = value;
  return u;
}

void check_finite(const Eigen::VectorXcd& y, double t) {
  for (Eigen::Index k = 0; k < y.size(); ++k) {
    const double re = y[k].real();
    const double im = y[k].imag();
    if (!std::isfinite(re) || !std::isfinite(im) || std::abs(re) > 1e300 || std::abs(im) > 1e300) {
      throw NumericalError("moment integration produced a non-finite value at t = " +
                               std::to_string(t),
                           t);
    }
  }
}

template <class SystemAt>
std::vector<MomentState> integrate_moments(const SystemAt& system_at, const MomentState& initial,
                                           const TimeGrid& grid, double step) {
  const std::size_t modes = initial.modes();
  const auto rhs = [&](double t, const Eigen::VectorXcd& y) -> Eigen::VectorXcd {
    return MomentGenerator(system_at(t)).derivative(y);
  };
  std::vector<MomentState> states;
  states.reserve(grid.size());
  integrate_rk4(rhs, initial.packed(), grid, step,
                [&](std::size_t, double t, const Eigen::VectorXcd& y) {
                  check_finite(y, t);
                  states.push_back(MomentState::unpack(modes, y));
                });
  return states;
}

double interpolate(double x0, double x1, double w) { return (1.0 - w) * x0 + w * x1; }

}  // namespace

double resolve_step(const IntegrationOptions& options, double max_rate, const TimeGrid& grid) {
  const double span = grid.size() > 1 ? grid.back() - grid.front() : 1.0;
  if (options.step) {
    const double h = *options.step;
    if (!(h > 0.0)) throw ConfigError("integration step must be positive");
    if (h * max_rate > kStabilityLimit) {
      throw ConfigError("integration step " + std::to_string(h) + " violates h * max_rate <= " +
                        std::to_string(kStabilityLimit) + " (max_rate = " +
                        std::to_string(max_rate) + ")");
    }
    return h;
  }
  if (max_rate <= 0.0) return span;
  return kDefaultStepFactor / max_rate;
}

MomentState initial_full_state(const InitialOccupations& occ) {
  return MomentState::thermal({0.0, 0.0, occ.nbar1, occ.nbar2});
}

MomentState initial_reduced_state(const InitialOccupations& occ) {
  return MomentState::thermal({occ.nbar1, occ.nbar2});
}

QuadraticSystem full_system(const EffectiveParams& p, double t) {
  using namespace full_mode;
  QuadraticSystem s(count);
  const double omega1 = p.omega1(t);
  const double omega2 = p.omega2(t);
  const double c = p.cascade_coupling();

  // parametric a1-b1 and beamsplitter a2-b2 couplings
  s.add_hamiltonian_term(a1, b1, omega1 * std::exp(kI * p.phi1));
  s.add_hamiltonian_term(s.creator(a1), s.creator(b1), omega1 * std::exp(-kI * p.phi1));
  s.add_hamiltonian_term(s.creator(a2), b2, omega2 * std::exp(-kI * p.phi2));
  s.add_hamiltonian_term(s.creator(b2), a2, omega2 * std::exp(kI * p.phi2));

  // The cascade term equals the Kossakowski cross terms plus the Hermitian
  // part (i c / 2)(a1^dag a2 - a2^dag a1).
  s.add_hamiltonian_term(s.creator(a1), a2, 0.5 * kI * c);
  s.add_hamiltonian_term(s.creator(a2), a1, -0.5 * kI * c);

  const std::size_t j1 = s.add_jump(unit(2 * count, a1));
  const std::size_t j2 = s.add_jump(unit(2 * count, a2));
  s.kossakowski(static_cast<Eigen::Index>(j1), static_cast<Eigen::Index>(j1)) = 2.0 * p.kappa1;
  s.kossakowski(static_cast<Eigen::Index>(j2), static_cast<Eigen::Index>(j2)) = 2.0 * p.kappa2;
  s.kossakowski(static_cast<Eigen::Index>(j1), static_cast<Eigen::Index>(j2)) = c;
  s.kossakowski(static_cast<Eigen::Index>(j2), static_cast<Eigen::Index>(j1)) = c;
  return s;
}

MomentGenerator assemble_full_generator(const EffectiveParams& p, double t) {
  return MomentGenerator(full_system(p, t));
}

AdiabaticModel::AdiabaticModel(const ReducedRates& rates, double epsilon, double phase_difference)
    : AdiabaticModel(CouplingSchedule::constant(std::sqrt(rates.gamma1)),
                     CouplingSchedule::constant(std::sqrt(rates.gamma2)), epsilon,
                     phase_difference) {
  if (rates.gamma1 < 0.0 || rates.gamma2 < 0.0) throw ConfigError("reduced rates must be >= 0");
}

AdiabaticModel::AdiabaticModel(CouplingSchedule amplitude1, CouplingSchedule amplitude2,
                               double epsilon, double phase_difference)
    : amplitude1_(std::move(amplitude1)),
      amplitude2_(std::move(amplitude2)),
      epsilon_(epsilon),
      phase_difference_(phase_difference) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon must lie in [0, 1]");
}

AdiabaticModel AdiabaticModel::from_effective(const EffectiveParams& p) {
  p.validate();
  return AdiabaticModel(p.omega1.scaled(1.0 / std::sqrt(p.kappa1)),
                        p.omega2.scaled(1.0 / std::sqrt(p.kappa2)), p.epsilon, p.phi1 - p.phi2);
}

double AdiabaticModel::gamma1(double t) const {
  const double s = amplitude1_(t);
  return s * s;
}

double AdiabaticModel::gamma2(double t) const {
  const double s = amplitude2_(t);
  return s * s;
}

double AdiabaticModel::cross(double t) const {
  return 2.0 * std::sqrt(epsilon_) * amplitude1_(t) * amplitude2_(t);
}

double AdiabaticModel::peak_rate() const {
  const double s1 = amplitude1_.peak();
  const double s2 = amplitude2_.peak();
  return std::max({s1 * s1, s2 * s2, 2.0 * std::sqrt(epsilon_) * s1 * s2});
}

QuadraticSystem AdiabaticModel::system(double t) const {
  using namespace reduced_mode;
  QuadraticSystem s(count);
  const double d = cross(t);
  const Complex phase = std::exp(-kI * phase_difference_);

  // gain jump e^{-i dphi} b1^dag, loss jump b2, cross coefficient -d
  const std::size_t j1 = s.add_jump(unit(2 * count, s.creator(b1), phase));
  const std::size_t j2 = s.add_jump(unit(2 * count, b2));
  s.kossakowski(static_cast<Eigen::Index>(j1), static_cast<Eigen::Index>(j1)) = 2.0 * gamma1(t);
  s.kossakowski(static_cast<Eigen::Index>(j2), static_cast<Eigen::Index>(j2)) = 2.0 * gamma2(t);
  s.kossakowski(static_cast<Eigen::Index>(j1), static_cast<Eigen::Index>(j2)) = -d;
  s.kossakowski(static_cast<Eigen::Index>(j2), static_cast<Eigen::Index>(j1)) = -d;

  // Hermitian remainder (-i d / 2)(e^{i dphi} b1 b2 - e^{-i dphi} b2^dag b1^dag)
  s.add_hamiltonian_term(b1, b2, -0.5 * kI * d * std::conj(phase));
  s.add_hamiltonian_term(s.creator(b2), s.creator(b1), 0.5 * kI * d * phase);
  return s;
}

Trajectory::Trajectory(TimeGrid grid, std::vector<MomentState> states, std::size_t motional1,
                       std::size_t motional2, std::optional<std::size_t> cavity1,
                       std::optional<std::size_t> cavity2)
    : grid_(std::move(grid)),
      states_(std::move(states)),
      motional1_(motional1),
      motional2_(motional2) {
  if (states_.size() != grid_.size()) {
    throw std::invalid_argument("Trajectory: snapshot count differs from grid length");
  }
  const std::size_t n = states_.size();
  var_minus_.reserve(n);
  var_plus_.reserve(n);
  p_var_minus_.reserve(n);
  p_var_plus_.reserve(n);
  for (const auto& s : states_) {
    const auto v = variances(s, motional1_, motional2_);
    var_minus_.push_back(v.x_minus);
    var_plus_.push_back(v.x_plus);
    p_var_minus_.push_back(v.p_minus);
    p_var_plus_.push_back(v.p_plus);
    n1_.push_back(s.occupation(motional1_));
    n2_.push_back(s.occupation(motional2_));
    if (cavity1) cavity1_.push_back(s.occupation(*cavity1));
    if (cavity2) cavity2_.push_back(s.occupation(*cavity2));
  }
}

VarianceReport Trajectory::report() const {
  VarianceReport r;
  r.times = times();
  r.var_minus = var_minus_;
  r.var_plus = var_plus_;
  r.n1 = n1_;
  r.n2 = n2_;
  locate_minimum(r);
  return r;
}

Trajectory integrate_full(const EffectiveParams& p, const MomentState& initial,
                          const TimeGrid& grid, const IntegrationOptions& options) {
  p.validate();
  if (initial.modes() != full_mode::count) {
    throw ConfigError("integrate_full: initial state must have four modes (a1, a2, b1, b2)");
  }
  const double max_rate = std::max({p.kappa1, p.kappa2, p.omega1.peak(), p.omega2.peak()});
  const double h = resolve_step(options, max_rate, grid);
  auto states = integrate_moments([&p](double t) { return full_system(p, t); }, initial, grid, h);
  return Trajectory(grid, std::move(states), full_mode::b1, full_mode::b2, full_mode::a1,
                    full_mode::a2);
}

Trajectory integrate_adiabatic(const AdiabaticModel& model, const MomentState& initial,
                               const TimeGrid& grid, const IntegrationOptions& options) {
  if (initial.modes() != reduced_mode::count) {
    throw ConfigError("integrate_adiabatic: initial state must have two modes (b1, b2)");
  }
  const double h = resolve_step(options, model.peak_rate(), grid);
  auto states =
      integrate_moments([&model](double t) { return model.system(t); }, initial, grid, h);
  return Trajectory(grid, std::move(states), reduced_mode::b1, reduced_mode::b2);
}

std::optional<ThresholdCrossing> first_crossing(const std::vector<double>& times,
                                                const std::vector<double>& var_minus,
                                                const std::vector<double>& n1, double level) {
  if (times.empty()) return std::nullopt;
  if (var_minus[0] <= level) return ThresholdCrossing{times[0], n1[0]};
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (var_minus[i] <= level) {
      const double w = (var_minus[i - 1] - level) / (var_minus[i - 1] - var_minus[i]);
      return ThresholdCrossing{interpolate(times[i - 1], times[i], w),
                               interpolate(n1[i - 1], n1[i], w)};
    }
  }
  return std::nullopt;
}

}  // namespace cascade::gaussian

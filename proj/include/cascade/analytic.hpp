#pragma once

// Closed-form solutions of the adiabatic two-mode model (ground-state initial
// conditions) and of the cavity-only correlation functions.

#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "cascade/model.hpp"

namespace cascade {

/// Time series of EPR variances and phonon numbers. var_minus is
/// <(X1-X2)^2> = <(P1+P2)^2>, var_plus is <(X1+X2)^2> = <(P1-P2)^2>.
struct VarianceReport {
  std::vector<double> times;
  std::vector<double> var_minus;
  std::vector<double> var_plus;
  std::vector<double> n1;
  std::vector<double> n2;
  double min_var_minus = 0.0;
  double t_min = 0.0;
};

/// Fills min_var_minus / t_min from the sampled var_minus series.
void locate_minimum(VarianceReport& report);

namespace analytic {

/// Gamma1 * t above this is rejected: e^{2 Gamma1 t} squared would overflow.
inline constexpr double kMaxExponent = 300.0;

enum class EprSign { minus, plus };

double occupation_mode1(double gamma1, double t);
double cross_correlation(double gamma1, double gamma2, double epsilon, double t);
double occupation_mode2(double gamma1, double gamma2, double epsilon, double t);

/// 2 [e^{G1 t} +- (2 sqrt(eps G1 G2)/(G1+G2)) (e^{G1 t} - e^{-G2 t})]^2
double epr_variance(double gamma1, double gamma2, double epsilon, double t, EprSign sign);

struct VarianceMinimum {
  double variance = 0.0;        // minimized <(X1-X2)^2>, authoritative
  double scaled_time = 0.0;     // Gamma1 t at the numerical minimum
  double closed_form = 0.0;     // transcribed closed form
  bool closed_form_mismatch = false;  // |closed_form - variance| > 1e-6
};

/// Closed-form minimum of <(X1-X2)^2> over time for lambda = Gamma2/Gamma1.
/// Requires lambda > 1/(4 epsilon).
double min_variance_closed_form(double lambda, double epsilon);

/// Minimum below the vacuum level, or nullopt when lambda <= 1/(4 epsilon).
/// For lambda = epsilon = 1 the infimum 0 is approached as t -> infinity and
/// scaled_time is +infinity.
std::optional<VarianceMinimum> min_variance(double lambda, double epsilon);

/// Gamma1 t_min. nullopt below the boundary lambda = 1/(4 epsilon), 0 on it,
/// +infinity for lambda = epsilon = 1.
std::optional<double> scaled_minimum_time(double lambda, double epsilon);

/// t_min in time units.
std::optional<double> minimum_time(double lambda, double epsilon, double gamma1);

/// Mean cavity amplitudes of the cavity-only model at time t.
std::pair<std::complex<double>, std::complex<double>> cavity_mean_decay(
    double kappa1, double kappa2, double epsilon, std::complex<double> a1_0,
    std::complex<double> a2_0, double t);

enum class CavityCorrelation { a1a1, a2a2, a2a1 };

/// Steady-state two-time correlations <a1(tau) a1^dag(0)>, <a2(tau) a2^dag(0)>
/// and <a2(tau) a1^dag(0)>.
double cavity_two_time(double kappa1, double kappa2, double epsilon, double tau,
                       CavityCorrelation which);

/// Closed-form VarianceReport on `grid` from vacuum.
VarianceReport variance_report(const ReducedRates& rates, double epsilon, const TimeGrid& grid);

}  // namespace analytic
}  // namespace cascade

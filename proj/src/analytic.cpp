#include "cascade/analytic.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cascade {

void locate_minimum(VarianceReport& report) {
  if (report.var_minus.empty()) return;
  const auto it = std::min_element(report.var_minus.begin(), report.var_minus.end());
  report.min_var_minus = *it;
  report.t_min = report.times[static_cast<std::size_t>(it - report.var_minus.begin())];
}

namespace analytic {
namespace {

void check_exponent(double gamma1, double t) {
  if (gamma1 * t > kMaxExponent) {
    throw std::range_error("Gamma1 * t exceeds " + std::to_string(kMaxExponent) +
                           "; closed forms would overflow");
  }
}

void check_domain(double gamma1, double gamma2, double epsilon, double t) {
  if (gamma1 < 0.0 || gamma2 < 0.0) throw std::domain_error("rates must be non-negative");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::domain_error("epsilon must lie in [0, 1]");
  if (t < 0.0) throw std::domain_error("t must be non-negative");
  check_exponent(gamma1, t);
}

/// 2 sqrt(eps G1 G2) / (G1 + G2); zero when both rates vanish.
double coupling_ratio(double gamma1, double gamma2, double epsilon) {
  const double sum = gamma1 + gamma2;
  if (sum == 0.0) return 0.0;
  return 2.0 * std::sqrt(epsilon * gamma1 * gamma2) / sum;
}

/// 1 - e^{-(G1+G2) t}, accurate for small arguments.
double one_minus_decay(double gamma1, double gamma2, double t) {
  return -std::expm1(-(gamma1 + gamma2) * t);
}

/// (e^{-k2 t} - e^{-k1 t}) / (k2 - k1), with the linear limit -t e^{-k t}.
double difference_quotient(double kappa1, double kappa2, double t) {
  const double dk = kappa2 - kappa1;
  if (std::abs(dk) < 1e-9 * (kappa1 + kappa2)) {
    return -t * std::exp(-0.5 * (kappa1 + kappa2) * t);
  }
  return std::exp(-kappa1 * t) * std::expm1(-dk * t) / dk;
}

}  // namespace

double occupation_mode1(double gamma1, double t) {
  check_domain(gamma1, 0.0, 0.0, t);
  return std::expm1(2.0 * gamma1 * t);
}

double cross_correlation(double gamma1, double gamma2, double epsilon, double t) {
  check_domain(gamma1, gamma2, epsilon, t);
  const double k = coupling_ratio(gamma1, gamma2, epsilon);
  return k * std::exp(2.0 * gamma1 * t) * one_minus_decay(gamma1, gamma2, t);
}

double occupation_mode2(double gamma1, double gamma2, double epsilon, double t) {
  check_domain(gamma1, gamma2, epsilon, t);
  const double k = coupling_ratio(gamma1, gamma2, epsilon);
  const double d = std::exp(gamma1 * t) * one_minus_decay(gamma1, gamma2, t);
  return k * k * d * d;
}

double epr_variance(double gamma1, double gamma2, double epsilon, double t, EprSign sign) {
  check_domain(gamma1, gamma2, epsilon, t);
  const double k = coupling_ratio(gamma1, gamma2, epsilon);
  const double decay = std::exp(-(gamma1 + gamma2) * t);
  // bracket / e^{G1 t}: 1 -+ k (1 - decay), rearranged to avoid cancellation
  const double reduced = sign == EprSign::minus ? (1.0 - k) + k * decay : (1.0 + k) - k * decay;
  const double b = std::exp(gamma1 * t) * reduced;
  return 2.0 * b * b;
}

double min_variance_closed_form(double lambda, double epsilon) {
  if (!(4.0 * lambda * epsilon > 1.0)) {
    throw std::domain_error("min_variance_closed_form: requires lambda > 1/(4 epsilon)");
  }
  const double r = std::sqrt(lambda * epsilon);
  const double q = 1.0 + lambda - 2.0 * r;
  const double a = 2.0 * std::sqrt(epsilon) * std::pow(lambda, 1.5);
  const double p = 1.0 / (1.0 + lambda);
  const double first = std::pow(a, p) / std::pow(q, p - 1.0);
  const double second = 2.0 * r * std::pow(a / q, -lambda * p);
  const double bracket = first + second;
  return 2.0 / ((1.0 + lambda) * (1.0 + lambda)) * bracket * bracket;
}

std::optional<VarianceMinimum> min_variance(double lambda, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::domain_error("epsilon must lie in [0, 1]");
  if (!(lambda >= 0.0)) throw std::domain_error("lambda must be non-negative");
  if (!(4.0 * lambda * epsilon > 1.0)) return std::nullopt;

  const double q = 1.0 + lambda - 2.0 * std::sqrt(lambda * epsilon);
  if (q < 1e-12) {
    // lambda = epsilon = 1: monotone decay 2 e^{-2 Gamma1 t}
    return VarianceMinimum{0.0, std::numeric_limits<double>::infinity(), 0.0, false};
  }

  const auto f = [&](double x) { return epr_variance(1.0, lambda, epsilon, x, EprSign::minus); };
  double hi = 0.5;
  while (f(2.0 * hi) <= f(hi)) {
    hi *= 2.0;
    if (2.0 * hi > kMaxExponent) {
      throw std::range_error("min_variance: minimum lies beyond Gamma1 t = 300");
    }
  }
  std::uintmax_t iterations = 500;
  const auto [x, value] = boost::math::tools::brent_find_minima(
      f, 0.0, 2.0 * hi, std::numeric_limits<double>::digits, iterations);

  VarianceMinimum m;
  m.variance = value;
  m.scaled_time = x;
  m.closed_form = min_variance_closed_form(lambda, epsilon);
  m.closed_form_mismatch = std::abs(m.closed_form - m.variance) > 1e-6;
  return m;
}

std::optional<double> scaled_minimum_time(double lambda, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::domain_error("epsilon must lie in [0, 1]");
  if (!(lambda >= 0.0)) throw std::domain_error("lambda must be non-negative");
  const double boundary = 4.0 * lambda * epsilon;
  if (boundary < 1.0 - 1e-12) return std::nullopt;
  if (boundary <= 1.0 + 1e-12) return 0.0;
  const double r = std::sqrt(lambda * epsilon);
  const double q = 1.0 + lambda - 2.0 * r;
  if (q < 1e-12) return std::numeric_limits<double>::infinity();
  return std::log(2.0 * lambda * r / q) / (1.0 + lambda);
}

std::optional<double> minimum_time(double lambda, double epsilon, double gamma1) {
  if (!(gamma1 > 0.0)) throw std::domain_error("minimum_time: gamma1 must be positive");
  const auto x = scaled_minimum_time(lambda, epsilon);
  if (!x) return std::nullopt;
  return *x / gamma1;
}

std::pair<std::complex<double>, std::complex<double>> cavity_mean_decay(
    double kappa1, double kappa2, double epsilon, std::complex<double> a1_0,
    std::complex<double> a2_0, double t) {
  if (t < 0.0) throw std::domain_error("cavity_mean_decay: t must be non-negative");
  const double c = 2.0 * std::sqrt(kappa1 * kappa2 * epsilon);
  const auto a1 = std::exp(-kappa1 * t) * a1_0;
  const auto a2 = std::exp(-kappa2 * t) * a2_0 + c * difference_quotient(kappa1, kappa2, t) * a1_0;
  return {a1, a2};
}

double cavity_two_time(double kappa1, double kappa2, double epsilon, double tau,
                       CavityCorrelation which) {
  if (tau < 0.0) throw std::domain_error("cavity_two_time: tau must be non-negative");
  switch (which) {
    case CavityCorrelation::a1a1:
      return std::exp(-kappa1 * tau);
    case CavityCorrelation::a2a2:
      return std::exp(-kappa2 * tau);
    case CavityCorrelation::a2a1:
      return 2.0 * std::sqrt(kappa1 * kappa2 * epsilon) * difference_quotient(kappa1, kappa2, tau);
  }
  return 0.0;
}

VarianceReport variance_report(const ReducedRates& rates, double epsilon, const TimeGrid& grid) {
  VarianceReport r;
  r.times = grid.times();
  const std::size_t n = grid.size();
  r.var_minus.resize(n);
  r.var_plus.resize(n);
  r.n1.resize(n);
  r.n2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = grid[i];
    r.var_minus[i] = epr_variance(rates.gamma1, rates.gamma2, epsilon, t, EprSign::minus);
    r.var_plus[i] = epr_variance(rates.gamma1, rates.gamma2, epsilon, t, EprSign::plus);
    r.n1[i] = occupation_mode1(rates.gamma1, t);
    r.n2[i] = occupation_mode2(rates.gamma1, rates.gamma2, epsilon, t);
  }
  locate_minimum(r);
  return r;
}

}  // namespace analytic
}  // namespace cascade

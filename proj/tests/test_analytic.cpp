#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <boost/multiprecision/cpp_dec_float.hpp>

#include <cmath>
#include <complex>
#include <limits>
#include <random>

#include "cascade/analytic.hpp"

using namespace cascade;
using namespace cascade::analytic;
using HighPrecision = boost::multiprecision::cpp_dec_float_50;

namespace {

double minus_variance(double lambda, double eps, double x) {
  return epr_variance(1.0, lambda, eps, x, EprSign::minus);
}

// Coarse grid then golden-section refinement of the bracketing cell.
std::pair<double, double> brute_force_minimum(double lambda, double eps) {
  const double span = 40.0;
  const int n = 40000;
  int best = 0;
  for (int i = 1; i <= n; ++i) {
    if (minus_variance(lambda, eps, span * i / n) < minus_variance(lambda, eps, span * best / n)) best = i;
  }
  double a = span * std::max(0, best - 1) / n, b = span * std::min(n, best + 1) / n;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  for (int k = 0; k < 200 && b - a > 1e-14; ++k) {
    if (minus_variance(lambda, eps, c) < minus_variance(lambda, eps, d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - g * (b - a);
    d = a + g * (b - a);
  }
  const double x = 0.5 * (a + b);
  return {x, minus_variance(lambda, eps, x)};
}

HighPrecision hp_cross(double g1, double g2, double eps, double t) {
  const HighPrecision G1(g1), G2(g2), E(eps), T(t);
  using boost::multiprecision::exp;
  using boost::multiprecision::sqrt;
  return 2 * sqrt(E * G1 * G2) / (G1 + G2) * exp(G1 * T) * (exp(G1 * T) - exp(-G2 * T));
}

HighPrecision hp_g21(double k1, double k2, double eps, double tau) {
  const HighPrecision K1(k1), K2(k2), E(eps), T(tau);
  using boost::multiprecision::exp;
  using boost::multiprecision::sqrt;
  return 2 * sqrt(K1 * K2 * E) / (K2 - K1) * (exp(-K2 * T) - exp(-K1 * T));
}

}  // namespace

TEST_CASE("occupation of mode 1") {
  CHECK(occupation_mode1(0.7, 0.0) == 0.0);
  CHECK(occupation_mode1(1.0, 1.0) == doctest::Approx(std::exp(2.0) - 1.0).epsilon(1e-14));
  CHECK(occupation_mode1(0.0, 5.0) == 0.0);
  CHECK_THROWS_AS(occupation_mode1(1.0, 301.0), std::range_error);
}

TEST_CASE("cross correlation against high-precision evaluation") {
  CHECK(cross_correlation(1.0, 2.0, 1.0, 0.0) == 0.0);
  CHECK(cross_correlation(1.0, 2.0, 0.0, 1.3) == 0.0);
  CHECK(cross_correlation(0.0, 0.0, 1.0, 1.3) == 0.0);
  const double oracle = static_cast<double>(hp_cross(1.0, 1.0, 1.0, 0.5));
  CHECK(cross_correlation(1.0, 1.0, 1.0, 0.5) == doctest::Approx(oracle).epsilon(1e-14));
  CHECK(oracle == doctest::Approx(1.718281828459045).epsilon(1e-14));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double g1 = 0.01 + 2.0 * u(rng), g2 = 0.01 + 2.0 * u(rng), eps = u(rng), t = 3.0 * u(rng);
    const double hp = static_cast<double>(hp_cross(g1, g2, eps, t));
    CHECK(cross_correlation(g1, g2, eps, t) == doctest::Approx(hp).epsilon(1e-12));
    CHECK(cross_correlation(g1, g2, eps, t) >= 0.0);
  }
}

TEST_CASE("occupation of mode 2") {
  CHECK(occupation_mode2(1.0, 1.0, 1.0, 0.0) == 0.0);
  for (double t : {0.1, 0.5, 1.0, 2.0}) {
    const double full = occupation_mode2(1.0, 1.0, 1.0, t);
    CHECK(full == doctest::Approx(std::pow(std::exp(t) - std::exp(-t), 2)).epsilon(1e-13));
    CHECK(full < occupation_mode1(1.0, t));
    CHECK(occupation_mode2(1.0, 1.0, 0.5, t) == doctest::Approx(0.5 * full).epsilon(1e-14));
  }
}

TEST_CASE("EPR variances") {
  CHECK(epr_variance(1.0, 2.0, 0.7, 0.0, EprSign::minus) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(epr_variance(1.0, 2.0, 0.7, 0.0, EprSign::plus) == doctest::Approx(2.0).epsilon(1e-15));

  // symmetric perfect-transmission case decays exactly as 2 e^{-2 Gamma t}
  for (int i = 0; i < 1000; ++i) {
    const double t = 3.0 * i / 999.0;
    CHECK(std::abs(epr_variance(1.0, 1.0, 1.0, t, EprSign::minus) - 2.0 * std::exp(-2.0 * t)) < 1e-12);
  }
  CHECK(epr_variance(1.0, 1.0, 1.0, 0.3, EprSign::minus) == doctest::Approx(2.0 * std::exp(-0.6)));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double g1 = 0.01 + 3.0 * u(rng), g2 = 3.0 * u(rng), eps = u(rng), t = 4.0 * u(rng);
    const double plus = epr_variance(g1, g2, eps, t, EprSign::plus);
    const double minus = epr_variance(g1, g2, eps, t, EprSign::minus);
    CHECK(plus >= 2.0);
    CHECK(minus > 0.0);
    CHECK(plus * minus >= 4.0 * (1.0 - 1e-12));
    // expansion in terms of the moment formulas
    const double n1 = occupation_mode1(g1, t), n2 = occupation_mode2(g1, g2, eps, t);
    const double m = cross_correlation(g1, g2, eps, t);
    CHECK(minus == doctest::Approx(2.0 + 2.0 * n1 + 2.0 * n2 - 4.0 * m).epsilon(1e-10));
  }
}

TEST_CASE("minimum variance: closed form, evaluation at t_min and brute force") {
  for (double eps : {0.8, 0.9, 1.0}) {
    for (int i = 0; i <= 94; ++i) {
      const double lambda = 0.3 + 0.05 * i;
      if (4.0 * lambda * eps <= 1.0) continue;
      if (eps == 1.0 && std::abs(lambda - 1.0) < 1e-9) continue;
      CAPTURE(lambda);
      CAPTURE(eps);
      const auto m = min_variance(lambda, eps);
      REQUIRE(m);
      const auto x = scaled_minimum_time(lambda, eps);
      REQUIRE(x);
      CHECK(*x > 0.0);
      CHECK(minus_variance(lambda, eps, *x) == doctest::Approx(m->variance).epsilon(1e-10));
      CHECK(m->closed_form == doctest::Approx(m->variance).epsilon(1e-10));
      CHECK_FALSE(m->closed_form_mismatch);
      const auto [bx, bv] = brute_force_minimum(lambda, eps);
      CHECK(std::abs(bv - m->variance) < 1e-6);
      CHECK(std::abs(bx - *x) < 1e-4 * *x);
      CHECK(std::abs(m->scaled_time - *x) < 1e-4 * *x);
    }
  }
}

TEST_CASE("minimum variance examples") {
  const auto m = min_variance(2.0, 0.8);
  REQUIRE(m);
  CHECK(m->variance == doctest::Approx(0.54).epsilon(0.02));
  CHECK(*scaled_minimum_time(2.0, 0.8) == doctest::Approx(0.8).epsilon(0.025));

  CHECK_FALSE(min_variance(0.25, 1.0).has_value());
  CHECK_FALSE(min_variance(0.2, 1.0).has_value());
  CHECK(*scaled_minimum_time(0.25, 1.0) == 0.0);
  CHECK_FALSE(scaled_minimum_time(0.2, 1.0).has_value());

  const auto decay = min_variance(1.0, 1.0);
  REQUIRE(decay);
  CHECK(decay->variance == 0.0);
  CHECK(std::isinf(decay->scaled_time));
  CHECK(std::isinf(*scaled_minimum_time(1.0, 1.0)));
  CHECK(*minimum_time(2.0, 0.8, 0.5) == doctest::Approx(2.0 * *scaled_minimum_time(2.0, 0.8)));
  CHECK_THROWS_AS(min_variance_closed_form(0.2, 1.0), std::domain_error);
}

TEST_CASE("sub-vacuum minimum exists exactly above the boundary") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> ul(0.01, 5.0), ue(0.05, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double lambda = ul(rng), eps = ue(rng);
    const bool above = lambda > 1.0 / (4.0 * eps);
    const auto x = scaled_minimum_time(lambda, eps);
    CHECK(x.has_value() == above);
    if (x) CHECK(*x > 0.0);
  }
  for (double eps : {0.3, 0.5, 0.8, 1.0}) {
    const auto x = scaled_minimum_time(1.0 / (4.0 * eps), eps);
    REQUIRE(x);
    CHECK(std::abs(*x) < 1e-12);
  }
}

TEST_CASE("cavity mean decay against RK4 of the mean equations") {
  const double k1 = 1.0, k2 = 2.0, eps = 1.0;
  const double c = 2.0 * std::sqrt(eps * k1 * k2);
  using C = std::complex<double>;
  C a1 = 1.0, a2 = 0.0;
  const int steps = 10000;
  const double h = 1.0 / steps;
  const auto f = [&](C x1, C x2) { return std::pair<C, C>{-k1 * x1, -k2 * x2 - c * x1}; };
  for (int s = 0; s < steps; ++s) {
    const auto [p1, q1] = f(a1, a2);
    const auto [p2, q2] = f(a1 + 0.5 * h * p1, a2 + 0.5 * h * q1);
    const auto [p3, q3] = f(a1 + 0.5 * h * p2, a2 + 0.5 * h * q2);
    const auto [p4, q4] = f(a1 + h * p3, a2 + h * q3);
    a1 += h / 6.0 * (p1 + 2.0 * p2 + 2.0 * p3 + p4);
    a2 += h / 6.0 * (q1 + 2.0 * q2 + 2.0 * q3 + q4);
  }
  const auto [m1, m2] = cavity_mean_decay(k1, k2, eps, 1.0, 0.0, 1.0);
  CHECK(std::abs(m1 - a1) < 1e-12);
  CHECK(std::abs(m2 - a2) < 1e-12);

  // the second cavity's own amplitude decays at its own rate
  const auto [z1, z2] = cavity_mean_decay(1.0, 3.0, 0.6, 0.0, C(0.0, 1.0), 0.7);
  CHECK(std::abs(z1) == 0.0);
  CHECK(std::abs(z2 - C(0.0, std::exp(-2.1))) < 1e-15);

  const auto [i1, i2] = cavity_mean_decay(1.0, 2.0, 0.0, C(1.0, 1.0), C(0.5, 0.0), 0.4);
  CHECK(std::abs(i1 - std::exp(-0.4) * C(1.0, 1.0)) < 1e-15);
  CHECK(std::abs(i2 - std::exp(-0.8) * 0.5) < 1e-15);
  const auto [u1, u2] = cavity_mean_decay(1.0, 2.0, 1.0, C(1.0, 1.0), C(0.5, 0.0), 0.0);
  CHECK(u1 == C(1.0, 1.0));
  CHECK(u2 == C(0.5, 0.0));

  // equal decay rates use the limiting form
  const auto [d1, d2] = cavity_mean_decay(1.0, 1.0, 1.0, 1.0, 0.0, 0.5);
  CHECK(std::abs(d2 - C(-2.0 * 0.5 * std::exp(-0.5))) < 1e-15);
}

TEST_CASE("two-time correlations") {
  CHECK(cavity_two_time(1.0, 2.0, 1.0, 0.0, CavityCorrelation::a1a1) == 1.0);
  CHECK(cavity_two_time(1.0, 2.0, 1.0, 0.0, CavityCorrelation::a2a1) == 0.0);
  CHECK(cavity_two_time(1.0, 2.0, 1.0, 0.7, CavityCorrelation::a2a2) == doctest::Approx(std::exp(-1.4)));
  const double hp = static_cast<double>(hp_g21(1.0, 2.0, 1.0, 0.5));
  CHECK(std::abs(cavity_two_time(1.0, 2.0, 1.0, 0.5, CavityCorrelation::a2a1) - hp) < 1e-14);

  for (double tau : {0.1, 0.5, 1.0, 3.0}) {
    const double limit = -2.0 * std::sqrt(0.7) * tau * std::exp(-tau);
    CHECK(cavity_two_time(1.0, 1.0, 0.7, tau, CavityCorrelation::a2a1) ==
          doctest::Approx(limit).epsilon(1e-14));
    for (double k2 : {1.0 + 1e-6, 1.0 - 1e-6}) {
      const double near = static_cast<double>(hp_g21(1.0, k2, 0.7, tau));
      CHECK(cavity_two_time(1.0, k2, 0.7, tau, CavityCorrelation::a2a1) ==
            doctest::Approx(near).epsilon(1e-8));
    }
  }
}

TEST_CASE("integrated cross correlation reproduces the reduced cross coefficient") {
  // Omega1 Omega2 times the tau-integral of the cross correlation equals
  // -2 sqrt(eps Gamma1 Gamma2) with the sign of Omega1 Omega2.
  for (const auto& [k1, k2] : {std::pair{1.0, 2.0}, std::pair{1.0, 1.0}, std::pair{3.0, 0.5}}) {
    const double eps = 0.8, w1 = 0.1, w2 = -0.3;
    const double upper = 60.0 / std::min(k1, k2);
    const int n = 200000;
    const double h = upper / n;
    double integral = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double weight = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      integral += weight * cavity_two_time(k1, k2, eps, i * h, CavityCorrelation::a2a1);
    }
    integral *= h / 3.0;
    const double g1 = w1 * w1 / k1, g2 = w2 * w2 / k2;
    CHECK(w1 * w2 * integral == doctest::Approx(2.0 * std::sqrt(eps * g1 * g2)).epsilon(1e-9));
  }
}

TEST_CASE("variance report") {
  const auto grid = TimeGrid::linspace(0.0, 3.0, 301);
  const auto r = variance_report(reduced_rates(0.1, std::sqrt(2.0) * 0.1, 1.0, 1.0), 0.8, grid);
  REQUIRE(r.var_minus.size() == 301);
  CHECK(r.var_minus.front() == 2.0);
  const double g1 = 0.01;
  CHECK(r.n1[100] == doctest::Approx(occupation_mode1(g1, 1.0)));
  CHECK(r.min_var_minus <= r.var_minus[150]);
}

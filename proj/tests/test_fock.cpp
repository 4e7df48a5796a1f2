#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <boost/multiprecision/cpp_dec_float.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "cascade/fock.hpp"
#include "cascade/gaussian.hpp"

using namespace cascade;
using namespace cascade::fock;

namespace {

EffectiveParams params(double w1, double w2, double eps, double k1 = 1.0, double k2 = 1.0) {
  EffectiveParams p;
  p.kappa1 = k1;
  p.kappa2 = k2;
  p.epsilon = eps;
  p.omega1 = CouplingSchedule::constant(w1);
  p.omega2 = CouplingSchedule::constant(w2);
  return p;
}

Eigen::MatrixXcd random_density(Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = Complex(g(rng), g(rng));
  Eigen::MatrixXcd rho = a * a.adjoint();
  return rho / rho.trace();
}

double sup_relative_gap(const std::vector<double>& reference, const std::vector<double>& other) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    num = std::max(num, std::abs(other[i] - reference[i]));
    den = std::max(den, std::abs(reference[i]));
  }
  return num / std::max(den, 1e-300);
}

void check_series_agree(const gaussian::Trajectory& oracle, const gaussian::Trajectory& engine, double tol) {
  CHECK(sup_relative_gap(oracle.var_minus(), engine.var_minus()) < tol);
  CHECK(sup_relative_gap(oracle.var_plus(), engine.var_plus()) < tol);
  CHECK(sup_relative_gap(oracle.n1(), engine.n1()) < tol);
  CHECK(sup_relative_gap(oracle.n2(), engine.n2()) < tol);
  CHECK(sup_relative_gap(oracle.cavity1(), engine.cavity1()) < tol);
  CHECK(sup_relative_gap(oracle.cavity2(), engine.cavity2()) < tol);
}

}  // namespace

TEST_CASE("ladder operators") {
  const Ladder one({2});
  const Eigen::MatrixXcd a = Eigen::MatrixXcd(one.lower(0));
  CHECK(a(0, 1) == Complex(1.0));
  CHECK(a(1, 0) == Complex(0.0));

  const Ladder l({6});
  const Eigen::MatrixXcd n = Eigen::MatrixXcd(l.number(0));
  for (int k = 0; k < 6; ++k) CHECK(n(k, k).real() == doctest::Approx(k));
  const Eigen::MatrixXcd lower = Eigen::MatrixXcd(l.lower(0));
  const Eigen::MatrixXcd comm = lower * lower.adjoint() - lower.adjoint() * lower;
  Eigen::MatrixXcd expected = Eigen::MatrixXcd::Identity(6, 6);
  expected(5, 5) = 1.0 - 6.0;  // truncation defect at the corner
  CHECK((comm - expected).norm() < 1e-13);

  const Ladder two({3, 4});
  CHECK(two.dimension() == 12);
  CHECK(two.index_of({1, 2}) == 6);
  CHECK(two.occupation(6, 0) == 1);
  CHECK(two.occupation(6, 1) == 2);
  // modes commute
  const Eigen::MatrixXcd a0 = Eigen::MatrixXcd(two.lower(0)), a1 = Eigen::MatrixXcd(two.lower(1));
  CHECK((a0 * a1.adjoint() - a1.adjoint() * a0).norm() < 1e-13);

  CHECK_THROWS_AS(build_ladder({3, 1}), ConfigError);
}

TEST_CASE("generator preserves trace and Hermiticity") {
  const Ladder ladder({3, 3, 3, 3});
  std::mt19937_64 rng(41);
  auto p = params(0.3, -0.2, 0.7, 1.0, 1.5);
  p.phi1 = 0.4;
  p.phi2 = 1.1;
  const auto g = cascade_generator(p, ladder);
  for (int trial = 0; trial < 3; ++trial) {
    const Eigen::MatrixXcd rho = random_density(ladder.dimension(), rng);
    const Eigen::MatrixXcd d = g.apply(rho, 0.0);
    CHECK(std::abs(d.trace()) < 1e-10);
    CHECK((d - d.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((g.apply_hermitian(rho, 0.0) - d).cwiseAbs().maxCoeff() == 0.0);
  }
  const auto dark = cascade_generator(params(0.0, 0.0, 0.7), ladder);
  CHECK(dark.apply(DensityMatrix::vacuum({3, 3, 3, 3}).matrix(), 0.0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("generator against an explicit dense construction") {
  const Ladder ladder({3, 3, 3, 3});
  auto p = params(0.3, 0.25, 0.6, 1.2, 0.8);
  p.phi1 = 0.7;
  p.phi2 = -0.3;
  const double t = 0.0;
  using M = Eigen::MatrixXcd;
  const M a1 = M(ladder.lower(0)), a2 = M(ladder.lower(1)), b1 = M(ladder.lower(2)), b2 = M(ladder.lower(3));
  const Complex i(0.0, 1.0);
  const M h1 = p.omega1(t) * (std::exp(i * p.phi1) * a1 * b1);
  const M h2 = p.omega2(t) * (std::exp(-i * p.phi2) * a2.adjoint() * b2);
  const M h = h1 + h1.adjoint() + h2 + h2.adjoint();
  std::mt19937_64 rng(43);
  const M rho = random_density(ladder.dimension(), rng);
  const auto damp = [&](const M& a, double k) {
    return k * (2.0 * a * rho * a.adjoint() - a.adjoint() * a * rho - rho * a.adjoint() * a);
  };
  const double c = 2.0 * std::sqrt(p.epsilon * p.kappa1 * p.kappa2);
  const M expected = -i * (h * rho - rho * h) + damp(a1, p.kappa1) + damp(a2, p.kappa2) -
                     c * (a2.adjoint() * a1 * rho - a1 * rho * a2.adjoint() +
                          rho * a1.adjoint() * a2 - a2 * rho * a1.adjoint());
  const M got = cascade_generator(p, ladder).apply(rho, t);
  CHECK((got - expected).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("single cavity decays at twice the field rate") {
  LindbladGenerator g(Ladder({4}));
  g.add_damping(0, 0.7);
  const auto grid = TimeGrid::uniform(0.0, 3.0, 0.5);
  const auto run = evolve(g, DensityMatrix::number_state({4}, {1}), grid, 0.7, {0, 0});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(run.trajectory.n1()[i] == doctest::Approx(std::exp(-1.4 * grid[i])).epsilon(1e-9));
  }
}

TEST_CASE("parametric pair follows the two-mode squeezing solution") {
  const int cutoff = 12;
  const Ladder ladder({cutoff, cutoff});
  LindbladGenerator g(ladder);
  const SparseOp pair = ladder.lower(0) * ladder.lower(1);
  const double w = 0.5;
  g.add_hamiltonian(SparseOp(pair + SparseOp(pair.adjoint())), [w](double) { return w; });
  const auto grid = TimeGrid::uniform(0.0, 2.0, 0.25);
  EvolveOptions opt;
  opt.truncation_limit = 1.0;
  const auto run = evolve(g, DensityMatrix::vacuum({cutoff, cutoff}), grid, w, {1, 0, 0, std::nullopt}, opt);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double exact = std::pow(std::sinh(w * grid[i]), 2);
    // leakage out of the top level bounds the truncation error
    const double thermal = exact / (1.0 + exact);
    const double top = std::pow(thermal, cutoff - 1) / (1.0 + exact);
    CAPTURE(grid[i]);
    CHECK(std::abs(run.trajectory.n1()[i] - exact) <= 1e-9 + 10.0 * cutoff * top);
    CHECK(std::abs(run.trajectory.n2()[i] - exact) <= 1e-9 + 10.0 * cutoff * top);
  }
  // below Omega t = 0.5 the truncation error is negligible
  CHECK(run.trajectory.n1()[2] == doctest::Approx(std::pow(std::sinh(0.25), 2)).epsilon(1e-9));
}

TEST_CASE("dark evolution keeps the vacuum") {
  const auto grid = TimeGrid::uniform(0.0, 2.0, 0.5);
  const auto run = evolve(DensityMatrix::vacuum({3, 3, 3, 3}), params(0.0, 0.0, 1.0), grid);
  for (double v : run.trajectory.var_minus()) CHECK(v == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(run.diagnostics.truncation_valid);
  CHECK(run.diagnostics.max_top_population == 0.0);
}

TEST_CASE("oracle equivalence with the moment engine") {
  SUBCASE("partial transmission, weak coupling, t <= 5") {
    const auto p = params(0.1, 0.1, 0.8);
    const auto grid = TimeGrid::uniform(0.0, 5.0, 0.25);
    const auto run = evolve(DensityMatrix::vacuum(kDefaultFullCutoffs), p, grid);
    const auto g = gaussian::integrate_full(p, gaussian::initial_full_state(), grid);
    CHECK(run.diagnostics.truncation_valid);
    CHECK(run.diagnostics.max_trace_defect < 1e-8);
    CHECK(run.diagnostics.max_hermiticity_defect < 1e-10);
    CHECK(run.diagnostics.min_eigenvalue > -1e-8);
    check_series_agree(run.trajectory, g, 1e-3);

    // Gaussian dynamics from the vacuum: third moments vanish
    const SparseOp b1 = Ladder(kDefaultFullCutoffs).lower(gaussian::full_mode::b1);
    const SparseOp b2 = Ladder(kDefaultFullCutoffs).lower(gaussian::full_mode::b2);
    const SparseOp third = b1 * b1 * b2;
    CHECK(std::abs(run.final_state.expectation(third)) < 1e-8);
    const SparseOp mixed = SparseOp(b1.adjoint()) * b1 * b2;
    CHECK(std::abs(run.final_state.expectation(mixed)) < 1e-8);
  }
  SUBCASE("stronger coupling, short horizon") {
    const auto p = params(0.2, 0.2, 1.0);
    const auto grid = TimeGrid::uniform(0.0, 1.0, 0.125);
    const auto run = evolve(DensityMatrix::vacuum(kDefaultFullCutoffs), p, grid);
    const auto g = gaussian::integrate_full(p, gaussian::initial_full_state(), grid);
    CHECK(run.diagnostics.truncation_valid);
    check_series_agree(run.trajectory, g, 1e-3);
  }
}

TEST_CASE("truncation convergence") {
  SUBCASE("two-mode damped amplifier, cutoffs doubled") {
    const auto run_at = [](int cutoff) {
      const Ladder ladder({cutoff, cutoff});
      LindbladGenerator g(ladder);
      const SparseOp pair = ladder.lower(0) * ladder.lower(1);
      g.add_hamiltonian(SparseOp(pair + SparseOp(pair.adjoint())), [](double) { return 0.2; });
      g.add_damping(0, 1.0);
      return evolve(g, DensityMatrix::vacuum({cutoff, cutoff}), TimeGrid::uniform(0.0, 3.0, 0.5), 1.0,
                    {1, 0, 0, std::nullopt});
    };
    const auto coarse = run_at(12);
    const auto fine = run_at(24);
    CHECK(coarse.diagnostics.truncation_valid);
    CHECK(sup_relative_gap(fine.trajectory.n1(), coarse.trajectory.n1()) < 1e-4);
    CHECK(sup_relative_gap(fine.trajectory.cavity1(), coarse.trajectory.cavity1()) < 1e-4);
  }
  SUBCASE("full model, motional cutoffs raised") {
    const auto p = params(0.1, 0.1, 1.0);
    // a doubled four-mode basis does not fit in memory, so raise the motional cutoffs by one
    const auto grid = TimeGrid::uniform(0.0, 2.0, 0.5);
    EvolveOptions opt;
    opt.positivity_checks = 1;
    const auto base = evolve(DensityMatrix::vacuum(kDefaultFullCutoffs), p, grid, opt);
    const auto raised = evolve(DensityMatrix::vacuum({5, 5, 8, 8}), p, grid, opt);
    check_series_agree(raised.trajectory, base.trajectory, 1e-4);
  }
}

TEST_CASE("truncation overflow is flagged with its first time") {
  const auto p = params(0.5, 0.5, 1.0);
  const auto run = evolve(DensityMatrix::vacuum({3, 3, 3, 3}), p, TimeGrid::uniform(0.0, 4.0, 0.5));
  CHECK_FALSE(run.diagnostics.truncation_valid);
  REQUIRE(run.diagnostics.first_truncation_time);
  CHECK(*run.diagnostics.first_truncation_time > 0.0);
  CHECK(run.diagnostics.max_top_population > 1e-6);
}

TEST_CASE("two-time correlations from the regression theorem") {
  using boost::multiprecision::cpp_dec_float_50;
  const auto taus = TimeGrid::uniform(0.0, 6.0, 0.5);
  const auto p = params(0.0, 0.0, 1.0, 1.0, 2.0);
  const auto g11 = regression_two_time(p, CavityOp::a1, CavityOp::a1_dag, taus);
  const auto g21 = regression_two_time(p, CavityOp::a2, CavityOp::a1_dag, taus);
  CHECK(std::abs(g21[0]) < 1e-14);
  for (std::size_t i = 0; i < taus.size(); ++i) {
    CHECK(std::abs(g11[i] - std::exp(-taus[i])) < 1e-8);
    const cpp_dec_float_50 tau(taus[i]);
    const cpp_dec_float_50 exact =
        2 * boost::multiprecision::sqrt(cpp_dec_float_50(2)) *
        (boost::multiprecision::exp(-2 * tau) - boost::multiprecision::exp(-tau));
    CHECK(std::abs(g21[i] - static_cast<double>(exact)) < 1e-8);
  }
  CHECK(std::abs(g21.back()) < 0.01);

  const auto long_taus = TimeGrid::uniform(0.0, 40.0, 10.0);
  const auto tail = regression_two_time(p, CavityOp::a2, CavityOp::a1_dag, long_taus);
  CHECK(std::abs(tail.back()) < 1e-14);

  CHECK_THROWS_AS(regression_two_time(params(0.1, 0.0, 1.0), CavityOp::a1, CavityOp::a1_dag, taus),
                  ConfigError);
}

TEST_CASE("rotating-wave check") {
  SUBCASE("no coupling gives identical vacuum runs") {
    SingleSystemParams sp;
    sp.omega = 0.0;
    RwaOptions opt;
    opt.cutoffs = {3, 3};
    const auto r = rwa_check(sp, TimeGrid::uniform(0.0, 2.0, 0.5), opt);
    CHECK(r.max_relative_deviation == 0.0);
    for (double n : r.counter_rotating.trajectory.n1()) CHECK(n == 0.0);
  }
  SUBCASE("counter-rotating terms shrink as the trap frequency grows") {
    SingleSystemParams sp;
    sp.omega = 0.1;
    sp.kappa = 1.0;
    RwaOptions opt;
    opt.cutoffs = {5, 10};
    const auto grid = TimeGrid::uniform(0.0, 5.0, 0.5);
    sp.trap_frequency = 3.0;
    const auto slow = rwa_check(sp, grid, opt);
    sp.trap_frequency = 10.0;
    const auto fast = rwa_check(sp, grid, opt);
    CHECK(fast.max_relative_deviation < slow.max_relative_deviation);
    CHECK(fast.counter_rotating.diagnostics.truncation_valid);
    CHECK(fast.counter_rotating.diagnostics.min_eigenvalue > -1e-8);
  }
}

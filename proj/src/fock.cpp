#include "cascade/fock.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "cascade/rk4.hpp"

namespace cascade::fock {

namespace {

constexpr Complex kI{0.0, 1.0};

void check_finite(const Eigen::MatrixXcd& rho, double t) {
  if (!rho.allFinite()) {
    throw NumericalError("Fock evolution produced a non-finite value at t = " + std::to_string(t),
                         t);
  }
}

}  // namespace

Ladder::Ladder(std::vector<int> cutoffs) : cutoffs_(std::move(cutoffs)) {
  if (cutoffs_.empty()) throw ConfigError("at least one mode is required");
  for (int c : cutoffs_) {
    if (c < 2) throw ConfigError("every Fock cutoff must be >= 2");
  }
  strides_.assign(cutoffs_.size(), 1);
  for (std::size_t k = cutoffs_.size(); k-- > 0;) {
    strides_[k] = dimension_;
    dimension_ *= cutoffs_[k];
  }
  lower_.reserve(cutoffs_.size());
  for (std::size_t k = 0; k < cutoffs_.size(); ++k) {
    std::vector<Eigen::Triplet<Complex>> entries;
    entries.reserve(static_cast<std::size_t>(dimension_));
    for (Eigen::Index i = 0; i < dimension_; ++i) {
      const int n = occupation(i, k);
      if (n > 0) entries.emplace_back(i - strides_[k], i, std::sqrt(static_cast<double>(n)));
    }
    SparseOp a(dimension_, dimension_);
    a.setFromTriplets(entries.begin(), entries.end());
    a.makeCompressed();
    lower_.push_back(std::move(a));
  }
}

int Ladder::occupation(Eigen::Index index, std::size_t mode) const {
  return static_cast<int>((index / strides_[mode]) % cutoffs_[mode]);
}

Eigen::Index Ladder::index_of(const std::vector<int>& occupations) const {
  if (occupations.size() != cutoffs_.size()) throw ConfigError("occupation list has wrong length");
  Eigen::Index idx = 0;
  for (std::size_t k = 0; k < cutoffs_.size(); ++k) {
    if (occupations[k] < 0 || occupations[k] >= cutoffs_[k]) {
      throw ConfigError("occupation exceeds the Fock cutoff");
    }
    idx += occupations[k] * strides_[k];
  }
  return idx;
}

SparseOp Ladder::number(std::size_t mode) const {
  SparseOp n = raise(mode) * lower(mode);
  n.makeCompressed();
  return n;
}

SparseOp Ladder::identity() const {
  SparseOp id(dimension_, dimension_);
  id.setIdentity();
  return id;
}

SparseOp Ladder::top_projector(std::size_t mode) const {
  std::vector<Eigen::Triplet<Complex>> entries;
  for (Eigen::Index i = 0; i < dimension_; ++i) {
    if (occupation(i, mode) == cutoffs_[mode] - 1) entries.emplace_back(i, i, 1.0);
  }
  SparseOp p(dimension_, dimension_);
  p.setFromTriplets(entries.begin(), entries.end());
  return p;
}

Ladder build_ladder(std::vector<int> cutoffs) { return Ladder(std::move(cutoffs)); }

Complex trace_product(const SparseOp& op, const Eigen::MatrixXcd& x) {
  // Tr(O X) = sum_ij O_ij X_ji
  Complex sum{};
  for (Eigen::Index col = 0; col < op.outerSize(); ++col) {
    for (SparseOp::InnerIterator it(op, col); it; ++it) {
      sum += it.value() * x(it.col(), it.row());
    }
  }
  return sum;
}

DensityMatrix::DensityMatrix(std::vector<int> cutoffs, Eigen::MatrixXcd rho)
    : cutoffs_(std::move(cutoffs)), rho_(std::move(rho)) {
  Eigen::Index dim = 1;
  for (int c : cutoffs_) dim *= c;
  if (rho_.rows() != dim || rho_.cols() != dim) {
    throw ConfigError("density matrix dimension does not match the cutoffs");
  }
}

DensityMatrix DensityMatrix::vacuum(std::vector<int> cutoffs) {
  return number_state(cutoffs, std::vector<int>(cutoffs.size(), 0));
}

DensityMatrix DensityMatrix::number_state(std::vector<int> cutoffs,
                                          const std::vector<int>& occupations) {
  const Ladder ladder(cutoffs);
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(ladder.dimension(), ladder.dimension());
  const Eigen::Index i = ladder.index_of(occupations);
  rho(i, i) = 1.0;
  return DensityMatrix(std::move(cutoffs), std::move(rho));
}

Complex DensityMatrix::expectation(const SparseOp& op) const { return trace_product(op, rho_); }

double DensityMatrix::trace_defect() const { return std::abs(rho_.trace() - Complex{1.0}); }

double DensityMatrix::hermiticity_defect() const {
  return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  const Eigen::MatrixXcd h = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

std::vector<double> DensityMatrix::top_level_populations() const {
  const Ladder ladder(cutoffs_);
  std::vector<double> pops(cutoffs_.size(), 0.0);
  for (Eigen::Index i = 0; i < ladder.dimension(); ++i) {
    const double p = rho_(i, i).real();
    for (std::size_t k = 0; k < cutoffs_.size(); ++k) {
      if (ladder.occupation(i, k) == cutoffs_[k] - 1) pops[k] += p;
    }
  }
  return pops;
}

LindbladGenerator::LindbladGenerator(Ladder ladder) : ladder_(std::move(ladder)) {
  rebuild_static();
}

void LindbladGenerator::add_damping(std::size_t mode, double kappa) {
  if (mode >= ladder_.modes()) throw ConfigError("damping mode out of range");
  if (kappa < 0.0) throw ConfigError("damping rate must be >= 0");
  damping_.push_back({mode, kappa});
  rebuild_static();
}

void LindbladGenerator::set_cascade(std::size_t from, std::size_t to, double coefficient) {
  if (from >= ladder_.modes() || to >= ladder_.modes() || from == to) {
    throw ConfigError("invalid cascade modes");
  }
  cascade_ = Cascade{from, to, coefficient};
  rebuild_static();
}

namespace {

Diagonals to_diagonals(const SparseOp& op) {
  const Eigen::Index dim = op.rows();
  std::map<Eigen::Index, Eigen::VectorXcd> by_offset;
  for (Eigen::Index col = 0; col < op.outerSize(); ++col) {
    for (SparseOp::InnerIterator it(op, col); it; ++it) {
      if (it.value() == Complex{}) continue;
      auto [pos, fresh] = by_offset.try_emplace(it.col() - it.row());
      if (fresh) pos->second = Eigen::VectorXcd::Zero(dim);
      pos->second[it.row()] += it.value();
    }
  }
  Diagonals out;
  for (auto& [offset, values] : by_offset) out.push_back({offset, std::move(values)});
  return out;
}

void accumulate(Diagonals& into, const Diagonals& from, Complex c) {
  for (const auto& d : from) {
    auto pos = std::find_if(into.begin(), into.end(),
                            [&](const Diagonal& e) { return e.offset == d.offset; });
    if (pos == into.end()) {
      into.push_back({d.offset, c * d.values});
    } else {
      pos->values += c * d.values;
    }
  }
}

// col += (M x)(:, j) with M(i, i + offset) = values(i)
void add_left(Eigen::Ref<Eigen::VectorXcd> col, const Diagonals& m, const Eigen::Ref<const Eigen::VectorXcd>& xj) {
  const Eigen::Index dim = col.size();
  for (const auto& d : m) {
    const Eigen::Index lo = std::max<Eigen::Index>(0, -d.offset);
    const Eigen::Index len = dim - std::abs(d.offset);
    if (len <= 0) continue;
    col.segment(lo, len).array() += d.values.segment(lo, len).array() * xj.segment(lo + d.offset, len).array();
  }
}

// col += (x M^dag)(:, j) = sum_d conj(M(j, j + d)) x(:, j + d)
void add_right(Eigen::Ref<Eigen::VectorXcd> col, const Diagonals& m, const Eigen::MatrixXcd& x,
               Eigen::Index j) {
  const Eigen::Index dim = x.cols();
  for (const auto& d : m) {
    const Eigen::Index k = j + d.offset;
    if (k < 0 || k >= dim) continue;
    const Complex v = std::conj(d.values[j]);
    if (v == Complex{}) continue;
    col.noalias() += v * x.col(k);
  }
}

}  // namespace

void LindbladGenerator::add_hamiltonian(SparseOp op, std::function<double(double)> coefficient) {
  if (op.rows() != ladder_.dimension() || op.cols() != ladder_.dimension()) {
    throw ConfigError("Hamiltonian term has the wrong dimension");
  }
  hamiltonian_.push_back({to_diagonals(op), std::move(coefficient)});
}

void LindbladGenerator::rebuild_static() {
  const Eigen::Index dim = ladder_.dimension();
  SparseOp g(dim, dim);
  for (const auto& d : damping_) g -= Complex{d.kappa} * ladder_.number(d.mode);
  if (cascade_) {
    const SparseOp hop = ladder_.raise(cascade_->to) * ladder_.lower(cascade_->from);
    g -= Complex{cascade_->coefficient} * hop;
  }
  static_part_ = to_diagonals(g);

  // Jump part written as sum_m C_m X D_m^dag:
  //   C = a_m, D = 2 kappa_m a_m (+ c a_to if m == from, + c a_from if m == to)
  jumps_.clear();
  std::vector<std::size_t> modes;
  for (const auto& d : damping_) {
    if (std::find(modes.begin(), modes.end(), d.mode) == modes.end()) modes.push_back(d.mode);
  }
  if (cascade_) {
    for (std::size_t m : {cascade_->from, cascade_->to}) {
      if (std::find(modes.begin(), modes.end(), m) == modes.end()) modes.push_back(m);
    }
  }
  for (std::size_t m : modes) {
    SparseOp d(dim, dim);
    for (const auto& dm : damping_) {
      if (dm.mode == m) d += Complex{2.0 * dm.kappa} * ladder_.lower(m);
    }
    if (cascade_ && m == cascade_->from) d += Complex{cascade_->coefficient} * ladder_.lower(cascade_->to);
    if (cascade_ && m == cascade_->to) d += Complex{cascade_->coefficient} * ladder_.lower(cascade_->from);
    Diagonals right = to_diagonals(d);
    if (right.empty()) continue;
    jumps_.push_back({to_diagonals(ladder_.lower(m)), std::move(right)});
  }
}

Eigen::MatrixXcd LindbladGenerator::apply(const Eigen::MatrixXcd& x, double t) const {
  // out = G X + X G^dag + sum_m C_m X D_m^dag with G = static - i H(t), built
  // one column at a time.
  Diagonals g = static_part_;
  for (const auto& term : hamiltonian_) {
    const Complex c = -kI * term.coefficient(t);
    if (c != Complex{}) accumulate(g, term.diagonals, c);
  }

  const Eigen::Index dim = x.rows();
  Eigen::MatrixXcd out(dim, x.cols());
  Eigen::VectorXcd tmp(dim);
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    auto col = out.col(j);
    col.setZero();
    add_left(col, g, x.col(j));
    add_right(col, g, x, j);
    for (const auto& jump : jumps_) {
      tmp.setZero();
      add_right(tmp, jump.right, x, j);
      add_left(col, jump.left, tmp);
    }
  }
  return out;
}

Eigen::MatrixXcd LindbladGenerator::apply_hermitian(const Eigen::MatrixXcd& rho, double t) const {
  return apply(rho, t);
}

LindbladGenerator cascade_generator(const EffectiveParams& p, const Ladder& ladder) {
  using namespace gaussian::full_mode;
  if (ladder.modes() != count) throw ConfigError("cascade model needs four modes (a1, a2, b1, b2)");
  p.validate();
  LindbladGenerator g(ladder);
  const SparseOp& la1 = ladder.lower(a1);
  const SparseOp& la2 = ladder.lower(a2);
  const SparseOp& lb1 = ladder.lower(b1);
  const SparseOp& lb2 = ladder.lower(b2);

  // Omega1 (a1 b1 e^{i phi1} + h.c.)
  const SparseOp pair1 = la1 * lb1;
  SparseOp pa = std::exp(kI * p.phi1) * pair1;
  SparseOp h1 = pa + SparseOp(pa.adjoint());
  // Omega2 (a2^dag b2 e^{-i phi2} + h.c.)
  const SparseOp swap2 = SparseOp(la2.adjoint()) * lb2;
  SparseOp ms = std::exp(-kI * p.phi2) * swap2;
  SparseOp h2 = ms + SparseOp(ms.adjoint());

  const CouplingSchedule s1 = p.omega1;
  const CouplingSchedule s2 = p.omega2;
  g.add_hamiltonian(std::move(h1), [s1](double t) { return s1(t); });
  g.add_hamiltonian(std::move(h2), [s2](double t) { return s2(t); });
  g.add_damping(a1, p.kappa1);
  g.add_damping(a2, p.kappa2);
  g.set_cascade(a1, a2, p.cascade_coupling());
  return g;
}

MomentState extract_moments(const Ladder& ladder, const Eigen::MatrixXcd& rho) {
  const std::size_t n = ladder.modes();
  MomentState m(n);
  for (std::size_t i = 0; i < n; ++i) {
    m.set_mean(i, trace_product(ladder.lower(i), rho));
    for (std::size_t j = i; j < n; ++j) {
      m.set_pair(i, j, trace_product(ladder.lower(i) * ladder.lower(j), rho));
      m.set_number(i, j, trace_product(ladder.raise(i) * ladder.lower(j), rho));
    }
  }
  return m;
}

FockRun evolve(const LindbladGenerator& generator, const DensityMatrix& rho0, const TimeGrid& grid,
               double max_rate, const ModeRoles& roles, const EvolveOptions& options) {
  const Ladder& ladder = generator.ladder();
  if (rho0.cutoffs() != ladder.cutoffs()) throw ConfigError("initial state cutoffs differ from the model");
  const double h = gaussian::resolve_step({options.step}, max_rate, grid);

  // precomputed moment operators
  const std::size_t n = ladder.modes();
  std::vector<SparseOp> pair_ops, number_ops;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      pair_ops.push_back(ladder.lower(i) * ladder.lower(j));
      number_ops.push_back(ladder.raise(i) * ladder.lower(j));
    }
  }
  std::vector<SparseOp> top;
  for (std::size_t k = 0; k < n; ++k) top.push_back(ladder.top_projector(k));

  std::size_t checks = options.positivity_checks;
  if (checks == 0) checks = ladder.dimension() <= 256 ? grid.size() : 5;
  checks = std::min(checks, grid.size());
  std::vector<bool> diagonalize(grid.size(), false);
  if (checks == 1) {
    diagonalize.back() = true;
  } else {
    for (std::size_t c = 0; c < checks; ++c) {
      diagonalize[c * (grid.size() - 1) / (checks - 1)] = true;
    }
  }

  Diagnostics diag;
  diag.min_eigenvalue = std::numeric_limits<double>::infinity();
  std::vector<MomentState> states;
  states.reserve(grid.size());
  Eigen::MatrixXcd last;

  const auto rhs = [&generator](double t, const Eigen::MatrixXcd& rho) -> Eigen::MatrixXcd {
    return generator.apply_hermitian(rho, t);
  };
  integrate_rk4(rhs, rho0.matrix(), grid, h, [&](std::size_t idx, double t, const Eigen::MatrixXcd& rho) {
    check_finite(rho, t);
    MomentState m(n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
      m.set_mean(i, trace_product(ladder.lower(i), rho));
      for (std::size_t j = i; j < n; ++j, ++k) {
        m.set_pair(i, j, trace_product(pair_ops[k], rho));
        m.set_number(i, j, trace_product(number_ops[k], rho));
      }
    }
    states.push_back(std::move(m));

    diag.max_trace_defect = std::max(diag.max_trace_defect, std::abs(rho.trace() - Complex{1.0}));
    diag.max_hermiticity_defect =
        std::max(diag.max_hermiticity_defect, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
    for (const auto& p : top) {
      const double pop = trace_product(p, rho).real();
      diag.max_top_population = std::max(diag.max_top_population, pop);
      if (pop >= options.truncation_limit && diag.truncation_valid) {
        diag.truncation_valid = false;
        diag.first_truncation_time = t;
      }
    }
    if (diagonalize[idx]) {
      const Eigen::MatrixXcd herm = 0.5 * (rho + rho.adjoint());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
      diag.min_eigenvalue = std::min(diag.min_eigenvalue, solver.eigenvalues().minCoeff());
    }
    if (idx + 1 == grid.size()) last = rho;
  });

  gaussian::Trajectory traj(grid, std::move(states), roles.motional1, roles.motional2,
                            roles.cavity1, roles.cavity2);
  return FockRun{std::move(traj), diag, DensityMatrix(ladder.cutoffs(), std::move(last))};
}

FockRun evolve(const DensityMatrix& rho0, const EffectiveParams& p, const TimeGrid& grid,
               const EvolveOptions& options) {
  using namespace gaussian::full_mode;
  const Ladder ladder(rho0.cutoffs());
  const LindbladGenerator g = cascade_generator(p, ladder);
  const double max_rate = std::max({p.kappa1, p.kappa2, p.omega1.peak(), p.omega2.peak()});
  return evolve(g, rho0, grid, max_rate, ModeRoles{b1, b2, a1, a2}, options);
}

namespace {

const SparseOp& pick(const Ladder& ladder, CavityOp op, SparseOp& scratch) {
  switch (op) {
    case CavityOp::a1:
      return ladder.lower(0);
    case CavityOp::a2:
      return ladder.lower(1);
    case CavityOp::a1_dag:
      scratch = ladder.raise(0);
      return scratch;
    case CavityOp::a2_dag:
      scratch = ladder.raise(1);
      return scratch;
  }
  return ladder.lower(0);
}

}  // namespace

std::vector<Complex> regression_two_time(const EffectiveParams& p, CavityOp a, CavityOp b,
                                         const TimeGrid& taus, const RegressionOptions& options) {
  p.validate();
  if (p.omega1.peak() != 0.0 || p.omega2.peak() != 0.0) {
    throw ConfigError("regression_two_time: the cavity-only model requires Omega1 = Omega2 = 0");
  }
  if (taus.front() != 0.0) throw ConfigError("regression_two_time: tau grid must start at 0");
  const Ladder ladder({options.cutoff, options.cutoff});
  LindbladGenerator g(ladder);
  g.add_damping(0, p.kappa1);
  g.add_damping(1, p.kappa2);
  g.set_cascade(0, 1, p.cascade_coupling());

  // vacuum is the steady state of the cavity-only model
  Eigen::MatrixXcd rho_ss = Eigen::MatrixXcd::Zero(ladder.dimension(), ladder.dimension());
  rho_ss(0, 0) = 1.0;
  if (g.apply(rho_ss, 0.0).cwiseAbs().maxCoeff() > 1e-14) {
    throw NumericalError("cavity vacuum is not stationary", 0.0);
  }

  SparseOp scratch_a, scratch_b;
  const SparseOp& op_a = pick(ladder, a, scratch_a);
  const SparseOp& op_b = pick(ladder, b, scratch_b);
  const Eigen::MatrixXcd x0 = op_b * rho_ss;

  const double max_rate = std::max(p.kappa1, p.kappa2);
  const double h = options.step ? *options.step : 1e-3 / max_rate;
  std::vector<Complex> out;
  out.reserve(taus.size());
  const auto rhs = [&g](double t, const Eigen::MatrixXcd& x) -> Eigen::MatrixXcd { return g.apply(x, t); };
  integrate_rk4(rhs, x0, taus, h, [&](std::size_t, double, const Eigen::MatrixXcd& x) {
    out.push_back(trace_product(op_a, x));
  });
  return out;
}

LindbladGenerator single_system_generator(const SingleSystemParams& p, bool counter_rotating,
                                          const Ladder& ladder) {
  if (ladder.modes() != 2) throw ConfigError("single-system model needs two modes (a, b)");
  if (!(p.kappa >= 0.0) || !(p.trap_frequency > 0.0)) {
    throw ConfigError("single-system model needs kappa >= 0 and nu > 0");
  }
  LindbladGenerator g(ladder);
  const SparseOp& a = ladder.lower(0);
  const SparseOp& b = ladder.lower(1);
  const SparseOp ad = ladder.raise(0);
  const SparseOp bd = ladder.raise(1);

  const SparseOp pair = a * b;
  SparseOp pa = std::exp(kI * p.phi) * pair;
  g.add_hamiltonian(pa + SparseOp(pa.adjoint()), [w = p.omega](double) { return w; });

  if (counter_rotating) {
    // e^{-i theta} a^dag b + e^{i theta} a b^dag = cos(theta) X + sin(theta) Y,
    // theta = 2 nu t + phi
    const SparseOp mix = ad * b;
    const SparseOp mix_dag = a * bd;
    SparseOp x = mix + mix_dag;
    SparseOp y = -kI * (mix - mix_dag);
    const double w = p.omega;
    const double nu = p.trap_frequency;
    const double phi = p.phi;
    g.add_hamiltonian(std::move(x), [=](double t) { return w * std::cos(2.0 * nu * t + phi); });
    g.add_hamiltonian(std::move(y), [=](double t) { return w * std::sin(2.0 * nu * t + phi); });
  }
  g.add_damping(0, p.kappa);
  return g;
}

RwaComparison rwa_check(const SingleSystemParams& p, const TimeGrid& grid, const RwaOptions& options) {
  if (options.cutoffs.size() != 2) throw ConfigError("rwa_check needs cutoffs for (a, b)");
  const Ladder ladder(options.cutoffs);
  const double cr_rate = std::max({p.kappa, std::abs(p.omega), 2.0 * p.trap_frequency});
  const double rwa_rate = std::max(p.kappa, std::abs(p.omega));
  EvolveOptions cr_options;
  cr_options.step = gaussian::resolve_step({options.step}, cr_rate, grid);
  EvolveOptions rwa_options;
  rwa_options.step = gaussian::resolve_step({options.rwa_step}, rwa_rate, grid);
  const ModeRoles roles{1, 0, 0, std::nullopt};
  const auto rho0 = DensityMatrix::vacuum(options.cutoffs);

  FockRun rwa = evolve(single_system_generator(p, false, ladder), rho0, grid, rwa_rate, roles,
                       rwa_options);
  FockRun cr = evolve(single_system_generator(p, true, ladder), rho0, grid, cr_rate, roles,
                      cr_options);

  const auto& n_rwa = rwa.trajectory.n1();
  const auto& n_cr = cr.trajectory.n1();
  double gap = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < n_rwa.size(); ++i) {
    gap = std::max(gap, std::abs(n_cr[i] - n_rwa[i]));
    scale = std::max(scale, std::abs(n_rwa[i]));
  }
  RwaComparison out{std::move(rwa), std::move(cr), scale > 0.0 ? gap / scale : gap};
  return out;
}

}  // namespace cascade::fock

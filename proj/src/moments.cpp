#include "cascade/moments.hpp"

#include <Eigen/Eigenvalues>

#include <stdexcept>

namespace cascade {

namespace {

constexpr Complex kI{0.0, 1.0};

std::size_t triangle(std::size_t n) { return n * (n + 1) / 2; }

/// [xi_p, xi_q]
Eigen::MatrixXcd commutator_matrix(std::size_t modes) {
  const auto n = static_cast<Eigen::Index>(modes);
  Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  k.topRightCorner(n, n).setIdentity();
  k.bottomLeftCorner(n, n) = -Eigen::MatrixXcd::Identity(n, n);
  return k;
}

/// xi-basis coefficients of L^dag given those of L.
Eigen::VectorXcd adjoint_coefficients(const Eigen::VectorXcd& u, std::size_t modes) {
  const auto n = static_cast<Eigen::Index>(modes);
  Eigen::VectorXcd v(2 * n);
  v.head(n) = u.tail(n).conjugate();
  v.tail(n) = u.head(n).conjugate();
  return v;
}

}  // namespace

MomentState::MomentState(std::size_t modes)
    : modes_(modes),
      mean_(modes, Complex{}),
      pair_(triangle(modes), Complex{}),
      number_(triangle(modes), Complex{}) {}

MomentState MomentState::vacuum(std::size_t modes) { return MomentState(modes); }

MomentState MomentState::thermal(const std::vector<double>& occupations) {
  MomentState m(occupations.size());
  for (std::size_t i = 0; i < occupations.size(); ++i) {
    if (occupations[i] < 0.0) throw std::invalid_argument("thermal occupations must be >= 0");
    m.set_number(i, i, occupations[i]);
  }
  return m;
}

std::size_t MomentState::index(std::size_t i, std::size_t j) const {
  // i <= j, row-major upper triangle
  return i * (2 * modes_ - i + 1) / 2 + (j - i);
}

Complex MomentState::pair(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  return pair_[index(i, j)];
}

void MomentState::set_pair(std::size_t i, std::size_t j, Complex v) {
  if (i > j) std::swap(i, j);
  pair_[index(i, j)] = v;
}

Complex MomentState::number(std::size_t i, std::size_t j) const {
  if (i <= j) return number_[index(i, j)];
  return std::conj(number_[index(j, i)]);
}

void MomentState::set_number(std::size_t i, std::size_t j, Complex v) {
  if (i <= j) {
    number_[index(i, j)] = v;
  } else {
    number_[index(j, i)] = std::conj(v);
  }
}

std::size_t MomentState::packed_size(std::size_t modes) { return modes + 2 * triangle(modes); }

Eigen::VectorXcd MomentState::packed() const {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(packed_size(modes_)));
  Eigen::Index k = 0;
  for (const auto& x : mean_) v[k++] = x;
  for (const auto& x : pair_) v[k++] = x;
  for (const auto& x : number_) v[k++] = x;
  return v;
}

MomentState MomentState::unpack(std::size_t modes, const Eigen::VectorXcd& v) {
  if (static_cast<std::size_t>(v.size()) != packed_size(modes)) {
    throw std::invalid_argument("MomentState::unpack: size mismatch");
  }
  MomentState m(modes);
  Eigen::Index k = 0;
  for (auto& x : m.mean_) x = v[k++];
  for (auto& x : m.pair_) x = v[k++];
  for (auto& x : m.number_) x = v[k++];
  return m;
}

Eigen::MatrixXcd MomentState::second_moment_matrix() const {
  const std::size_t n = modes_;
  Eigen::MatrixXcd s(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto I = static_cast<Eigen::Index>(i);
      const auto J = static_cast<Eigen::Index>(j);
      const auto N = static_cast<Eigen::Index>(n);
      s(I, J) = pair(i, j);
      s(I, N + J) = number(j, i) + (i == j ? 1.0 : 0.0);
      s(N + I, J) = number(i, j);
      s(N + I, N + J) = std::conj(pair(i, j));
    }
  }
  return s;
}

Eigen::VectorXcd MomentState::mean_vector() const {
  const auto n = static_cast<Eigen::Index>(modes_);
  Eigen::VectorXcd mu(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    mu[i] = mean_[static_cast<std::size_t>(i)];
    mu[n + i] = std::conj(mu[i]);
  }
  return mu;
}

Eigen::MatrixXd MomentState::covariance() const {
  const auto n = static_cast<Eigen::Index>(modes_);
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  for (Eigen::Index k = 0; k < n; ++k) {
    t(2 * k, k) = 1.0;
    t(2 * k, n + k) = 1.0;
    t(2 * k + 1, k) = -kI;
    t(2 * k + 1, n + k) = kI;
  }
  const Eigen::VectorXcd r = t * mean_vector();
  const Eigen::MatrixXcd c = t * second_moment_matrix() * t.transpose() - r * r.transpose();
  return (0.5 * (c + c.transpose())).real();
}

double symplectic_min_eigenvalue(const Eigen::MatrixXd& covariance) {
  const Eigen::Index n = covariance.rows();
  Eigen::MatrixXcd m = covariance.cast<Complex>();
  for (Eigen::Index k = 0; k + 1 < n; k += 2) {
    m(k, k + 1) += kI;
    m(k + 1, k) -= kI;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

QuadratureVariances variances(const MomentState& m, std::size_t i, std::size_t j) {
  const Eigen::MatrixXd s = m.covariance();
  const auto xi = static_cast<Eigen::Index>(2 * i);
  const auto xj = static_cast<Eigen::Index>(2 * j);
  const Eigen::Index pi = xi + 1;
  const Eigen::Index pj = xj + 1;
  QuadratureVariances v;
  v.x_minus = s(xi, xi) + s(xj, xj) - 2.0 * s(xi, xj);
  v.x_plus = s(xi, xi) + s(xj, xj) + 2.0 * s(xi, xj);
  v.p_minus = s(pi, pi) + s(pj, pj) - 2.0 * s(pi, pj);
  v.p_plus = s(pi, pi) + s(pj, pj) + 2.0 * s(pi, pj);
  return v;
}

QuadraticSystem::QuadraticSystem(std::size_t modes)
    : modes(modes),
      hamiltonian(Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(2 * modes),
                                         static_cast<Eigen::Index>(2 * modes))),
      jumps(0, static_cast<Eigen::Index>(2 * modes)),
      kossakowski(0, 0) {}

void QuadraticSystem::add_hamiltonian_term(std::size_t p, std::size_t q, Complex coefficient) {
  hamiltonian(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) += coefficient;
}

std::size_t QuadraticSystem::add_jump(const Eigen::VectorXcd& u) {
  if (u.size() != jumps.cols()) throw std::invalid_argument("jump operator has wrong length");
  const Eigen::Index m = jumps.rows();
  jumps.conservativeResize(m + 1, Eigen::NoChange);
  jumps.row(m) = u.transpose();
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(m + 1, m + 1);
  g.topLeftCorner(m, m) = kossakowski;
  kossakowski = g;
  return static_cast<std::size_t>(m);
}

MomentGenerator::MomentGenerator(const QuadraticSystem& system) : modes_(system.modes) {
  const Eigen::MatrixXcd k = commutator_matrix(modes_);
  const Eigen::MatrixXcd& h = system.hamiltonian;
  drift_ = kI * ((h + h.transpose()) * k).transpose();
  diffusion_ = Eigen::MatrixXcd::Zero(drift_.rows(), drift_.cols());

  const Eigen::Index jumps = system.jumps.rows();
  for (Eigen::Index m = 0; m < jumps; ++m) {
    const Eigen::VectorXcd u_m = system.jumps.row(m).transpose();
    const Eigen::VectorXcd ku_m = k * u_m;
    for (Eigen::Index n = 0; n < jumps; ++n) {
      const Complex g = system.kossakowski(m, n);
      if (g == Complex{}) continue;
      const Eigen::VectorXcd v_n = adjoint_coefficients(system.jumps.row(n).transpose(), modes_);
      const Eigen::VectorXcd ktv_n = k.transpose() * v_n;
      drift_ += 0.5 * g * (ku_m * v_n.transpose() + ktv_n * u_m.transpose());
      diffusion_ += g * ktv_n * ku_m.transpose();
    }
  }
}

MomentState MomentGenerator::derivative(const MomentState& m) const {
  const Eigen::MatrixXcd s = m.second_moment_matrix();
  const Eigen::VectorXcd dmu = drift_ * m.mean_vector();
  const Eigen::MatrixXcd ds = drift_ * s + s * drift_.transpose() + diffusion_;
  MomentState d(modes_);
  const auto n = static_cast<Eigen::Index>(modes_);
  for (std::size_t i = 0; i < modes_; ++i) {
    const auto I = static_cast<Eigen::Index>(i);
    d.set_mean(i, dmu[I]);
    for (std::size_t j = i; j < modes_; ++j) {
      const auto J = static_cast<Eigen::Index>(j);
      d.set_pair(i, j, ds(I, J));
      d.set_number(i, j, ds(n + I, J));
    }
  }
  return d;
}

Eigen::VectorXcd MomentGenerator::derivative(const Eigen::VectorXcd& packed) const {
  return derivative(MomentState::unpack(modes_, packed)).packed();
}

}  // namespace cascade

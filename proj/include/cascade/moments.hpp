#pragma once

// First and second moments of bosonic modes, and the exact moment generator
// of a quadratic Hamiltonian with linear Lindblad dissipation.
//
// Operator vector convention: xi = (c_0 .. c_{N-1}, c_0^dag .. c_{N-1}^dag).

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <vector>

namespace cascade {

using Complex = std::complex<double>;

/// <c_i>, <c_i c_j> and <c_i^dag c_j> for N modes. The pair block is stored
/// as an upper triangle (it is symmetric) and so is the number block (it is
/// Hermitian).
class MomentState {
 public:
  MomentState() = default;
  explicit MomentState(std::size_t modes);

  static MomentState vacuum(std::size_t modes);
  /// Uncorrelated thermal states with the given mean occupations.
  static MomentState thermal(const std::vector<double>& occupations);

  std::size_t modes() const { return modes_; }

  Complex mean(std::size_t i) const { return mean_[i]; }
  void set_mean(std::size_t i, Complex v) { mean_[i] = v; }

  /// <c_i c_j>
  Complex pair(std::size_t i, std::size_t j) const;
  void set_pair(std::size_t i, std::size_t j, Complex v);

  /// <c_i^dag c_j>
  Complex number(std::size_t i, std::size_t j) const;
  void set_number(std::size_t i, std::size_t j, Complex v);

  /// Mean occupation <c_i^dag c_i>.
  double occupation(std::size_t i) const { return number(i, i).real(); }

  /// Packed storage, length modes + modes (modes + 1).
  Eigen::VectorXcd packed() const;
  static MomentState unpack(std::size_t modes, const Eigen::VectorXcd& v);
  static std::size_t packed_size(std::size_t modes);

  /// <xi xi^T>, 2N x 2N.
  Eigen::MatrixXcd second_moment_matrix() const;
  /// <xi>, length 2N.
  Eigen::VectorXcd mean_vector() const;

  /// Quadrature covariance sigma_ij = 1/2 <{dR_i, dR_j}> for
  /// R = (X_0, P_0, X_1, P_1, ...), X = c + c^dag, P = -i (c - c^dag).
  Eigen::MatrixXd covariance() const;

 private:
  std::size_t index(std::size_t i, std::size_t j) const;

  std::size_t modes_ = 0;
  std::vector<Complex> mean_;
  std::vector<Complex> pair_;
  std::vector<Complex> number_;
};

/// Smallest eigenvalue of sigma + iJ, J = (+) [[0, 1], [-1, 0]]. Non-negative
/// for every physical state ([X, P] = 2i).
double symplectic_min_eigenvalue(const Eigen::MatrixXd& covariance);

struct QuadratureVariances {
  double x_minus = 0.0;  // <(X1 - X2)^2>, centered
  double x_plus = 0.0;   // <(X1 + X2)^2>
  double p_minus = 0.0;  // <(P1 - P2)^2>
  double p_plus = 0.0;   // <(P1 + P2)^2>
};

/// Centered sum/difference quadrature variances of modes i and j.
QuadratureVariances variances(const MomentState& m, std::size_t i, std::size_t j);

/// H = sum_pq h_pq xi_p xi_q and Kossakowski dissipator
/// D(rho) = sum_mn gamma_mn (L_m rho L_n^dag - 1/2 {L_n^dag L_m, rho}) with
/// L_m = sum_p u_mp xi_p.
struct QuadraticSystem {
  explicit QuadraticSystem(std::size_t modes);

  std::size_t modes;
  Eigen::MatrixXcd hamiltonian;  // 2N x 2N
  Eigen::MatrixXcd jumps;        // M x 2N, row m holds u_m
  Eigen::MatrixXcd kossakowski;  // M x M, Hermitian positive semidefinite

  /// Adds coefficient * xi_p xi_q to H.
  void add_hamiltonian_term(std::size_t p, std::size_t q, Complex coefficient);
  /// Appends a jump operator; returns its index.
  std::size_t add_jump(const Eigen::VectorXcd& u);
  static std::size_t annihilator(std::size_t mode) { return mode; }
  std::size_t creator(std::size_t mode) const { return modes + mode; }
};

/// Linear map for the moments: d<xi>/dt = A <xi>, d<xi xi^T>/dt = A S + S A^T + D.
class MomentGenerator {
 public:
  explicit MomentGenerator(const QuadraticSystem& system);

  const Eigen::MatrixXcd& drift() const { return drift_; }
  const Eigen::MatrixXcd& diffusion() const { return diffusion_; }

  MomentState derivative(const MomentState& m) const;
  Eigen::VectorXcd derivative(const Eigen::VectorXcd& packed) const;

 private:
  std::size_t modes_;
  Eigen::MatrixXcd drift_;
  Eigen::MatrixXcd diffusion_;
};

}  // namespace cascade

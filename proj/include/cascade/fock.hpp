#pragma once

// Truncated Fock-space Lindblad integrator: brute-force oracle for the
// moment engines, the quantum regression theorem for the cavity-only model,
// and the rotating-wave check with counter-rotating terms kept.

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "cascade/gaussian.hpp"
#include "cascade/model.hpp"
#include "cascade/moments.hpp"

namespace cascade::fock {

using SparseOp = Eigen::SparseMatrix<Complex>;

/// One stored diagonal: M(i, i + offset) = values(i).
struct Diagonal {
  Eigen::Index offset = 0;
  Eigen::VectorXcd values;
};
using Diagonals = std::vector<Diagonal>;

/// Annihilation operators of each mode embedded in the tensor product.
/// Basis index = sum_k n_k * stride_k, the last mode varying fastest.
class Ladder {
 public:
  explicit Ladder(std::vector<int> cutoffs);

  std::size_t modes() const { return cutoffs_.size(); }
  Eigen::Index dimension() const { return dimension_; }
  const std::vector<int>& cutoffs() const { return cutoffs_; }

  const SparseOp& lower(std::size_t mode) const { return lower_[mode]; }
  SparseOp raise(std::size_t mode) const { return lower_[mode].adjoint(); }
  SparseOp number(std::size_t mode) const;
  SparseOp identity() const;
  /// Projector onto the highest retained Fock level of `mode`.
  SparseOp top_projector(std::size_t mode) const;

  /// Occupation of `mode` in basis state `index`.
  int occupation(Eigen::Index index, std::size_t mode) const;
  Eigen::Index index_of(const std::vector<int>& occupations) const;

 private:
  std::vector<int> cutoffs_;
  std::vector<Eigen::Index> strides_;
  Eigen::Index dimension_ = 1;
  std::vector<SparseOp> lower_;
};

/// Throws ConfigError for any cutoff < 2.
Ladder build_ladder(std::vector<int> cutoffs);

class DensityMatrix {
 public:
  DensityMatrix(std::vector<int> cutoffs, Eigen::MatrixXcd rho);

  static DensityMatrix vacuum(std::vector<int> cutoffs);
  static DensityMatrix number_state(std::vector<int> cutoffs, const std::vector<int>& occupations);

  const std::vector<int>& cutoffs() const { return cutoffs_; }
  const Eigen::MatrixXcd& matrix() const { return rho_; }

  Complex expectation(const SparseOp& op) const;
  double trace_defect() const;
  double hermiticity_defect() const;
  double min_eigenvalue() const;
  /// Population of each mode's top Fock level.
  std::vector<double> top_level_populations() const;

 private:
  std::vector<int> cutoffs_;
  Eigen::MatrixXcd rho_;
};

/// Tr(op * x) for sparse op and dense x.
Complex trace_product(const SparseOp& op, const Eigen::MatrixXcd& x);

/// rho' = -i[H(t), rho] + sum_j kappa_j (2 a_j rho a_j^dag - a_j^dag a_j rho - rho a_j^dag a_j)
///        - c ([a_to^dag, a_from rho] + [rho a_from^dag, a_to])
/// with H(t) = sum_k f_k(t) H_k, every H_k Hermitian and f_k real.
class LindbladGenerator {
 public:
  explicit LindbladGenerator(Ladder ladder);

  void add_hamiltonian(SparseOp op, std::function<double(double)> coefficient);
  void add_damping(std::size_t mode, double kappa);
  void set_cascade(std::size_t from, std::size_t to, double coefficient);

  const Ladder& ladder() const { return ladder_; }

  /// Generator applied to an arbitrary (not necessarily Hermitian) operator.
  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& x, double t) const;
  /// Density-matrix entry point; same kernel as apply().
  Eigen::MatrixXcd apply_hermitian(const Eigen::MatrixXcd& rho, double t) const;

 private:
  struct HamiltonianTerm {
    Diagonals diagonals;
    std::function<double(double)> coefficient;
  };
  struct Damping {
    std::size_t mode;
    double kappa;
  };
  struct Jump {
    Diagonals left;
    Diagonals right;
  };
  struct Cascade {
    std::size_t from;
    std::size_t to;
    double coefficient;
  };

  void rebuild_static();

  Ladder ladder_;
  std::vector<HamiltonianTerm> hamiltonian_;
  std::vector<Damping> damping_;
  std::optional<Cascade> cascade_;
  Diagonals static_part_;  // -sum kappa_j n_j - c a_to^dag a_from
  std::vector<Jump> jumps_;
};

/// Full cascaded model over modes (a1, a2, b1, b2).
LindbladGenerator cascade_generator(const EffectiveParams& p, const Ladder& ladder);

struct EvolveOptions {
  std::optional<double> step;           // RK4 step, same guard as the moment engines
  double truncation_limit = 1e-6;       // top-level population bound
  std::size_t positivity_checks = 0;    // snapshots diagonalized; 0 = all if dim <= 256, else 5
};

struct Diagnostics {
  double max_trace_defect = 0.0;
  double max_hermiticity_defect = 0.0;
  double min_eigenvalue = 0.0;  // over the diagonalized snapshots
  double max_top_population = 0.0;
  bool truncation_valid = true;
  std::optional<double> first_truncation_time;
};

/// Mode roles used to build the derived series of a Fock run.
struct ModeRoles {
  std::size_t motional1;
  std::size_t motional2;
  std::optional<std::size_t> cavity1;
  std::optional<std::size_t> cavity2;
};

struct FockRun {
  gaussian::Trajectory trajectory;
  Diagnostics diagnostics;
  DensityMatrix final_state;
};

/// Moments <c_i>, <c_i c_j>, <c_i^dag c_j> of a density matrix.
MomentState extract_moments(const Ladder& ladder, const Eigen::MatrixXcd& rho);

FockRun evolve(const LindbladGenerator& generator, const DensityMatrix& rho0, const TimeGrid& grid,
               double max_rate, const ModeRoles& roles, const EvolveOptions& options = {});

/// Full cascaded model; default cutoffs (5, 5, 7, 7).
FockRun evolve(const DensityMatrix& rho0, const EffectiveParams& p, const TimeGrid& grid,
               const EvolveOptions& options = {});

inline const std::vector<int> kDefaultFullCutoffs{5, 5, 7, 7};

enum class CavityOp { a1, a2, a1_dag, a2_dag };

struct RegressionOptions {
  int cutoff = 3;
  std::optional<double> step;  // default 1e-3 / max(kappa)
};

/// <A(tau) B(0)> in the vacuum steady state of the cavity-only model,
/// obtained by evolving B rho_ss under the same generator and tracing with A.
/// The coupling schedules of `p` must vanish.
std::vector<Complex> regression_two_time(const EffectiveParams& p, CavityOp a, CavityOp b,
                                         const TimeGrid& taus,
                                         const RegressionOptions& options = {});

/// Single subsystem (cavity a1, motional b1) with parametric coupling.
struct SingleSystemParams {
  double omega = 0.1;
  double kappa = 1.0;
  double trap_frequency = 10.0;
  double phi = 0.0;
};

/// Parametric Hamiltonian, optionally with the e^{+-2 i nu t} terms. Modes (a, b).
LindbladGenerator single_system_generator(const SingleSystemParams& p, bool counter_rotating,
                                          const Ladder& ladder);

struct RwaComparison {
  FockRun rotating_wave;
  FockRun counter_rotating;
  /// sup_t |n_cr - n_rwa| / sup_t n_rwa for the phonon number.
  double max_relative_deviation = 0.0;
};

struct RwaOptions {
  std::vector<int> cutoffs{5, 32};  // (a, b)
  std::optional<double> step;       // counter-rotating run; default kDefaultStepFactor / max(kappa, omega, 2 nu)
  std::optional<double> rwa_step;   // rotating-wave run; default kDefaultStepFactor / max(kappa, omega)
};

/// Runs both Hamiltonians from vacuum on the same output grid.
RwaComparison rwa_check(const SingleSystemParams& p, const TimeGrid& grid,
                        const RwaOptions& options = {});

}  // namespace cascade::fock

#pragma once

// Cascaded master equation for M chirally coupled, resonantly driven
// two-level atoms, its steady state, and multi-time correlators of the
// transmitted field via the quantum regression theorem.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <map>
#include <stdexcept>
#include <vector>

#include "wqed/correlators.hpp"
#include "wqed/params.hpp"

namespace wqed::oracle {

using cplx = std::complex<double>;
using SparseOp = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;
using DenseOp = Eigen::MatrixXcd;

inline constexpr int kMaxAtoms = 11;

class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Basis state index bit m set <=> atom m excited. Atom 0 is driven first.
class HilbertSpace {
 public:
  explicit HilbertSpace(int num_atoms, int cap = kMaxAtoms);
  int num_atoms() const { return m_; }
  int dim() const { return 1 << m_; }

  SparseOp lowering(int atom) const;
  SparseOp identity() const;

 private:
  int m_;
};

/// L rho = -i (H_eff rho - rho H_eff^dag) + C rho C^dag + sum_m c_m rho c_m^dag
/// with the collective waveguide jump C = sqrt(Gamma) sum_m sigma_m and
/// individual loss jumps c_m = sqrt(gamma) sigma_m.
class LiouvilleOperator {
 public:
  explicit LiouvilleOperator(const EnsembleParams& params);

  const EnsembleParams& params() const { return params_; }
  const HilbertSpace& space() const { return space_; }
  int dim() const { return space_.dim(); }
  double drive_amplitude() const { return alpha_; }

  const SparseOp& hamiltonian() const { return h_; }
  const SparseOp& effective_hamiltonian() const { return heff_; }
  const SparseOp& collective_jump() const { return cjump_; }

  /// Matrix-free action on a density-like operator.
  DenseOp apply(const DenseOp& rho) const;

  /// Row-major vectorized superoperator, dimension 4^M. Intended for M <= 8.
  SparseOp assemble() const;

  /// max over columns of |sum_i L[(i,i), col]|: deviation from trace preservation.
  double trace_preservation_residual() const;

 private:
  EnsembleParams params_;
  HilbertSpace space_;
  double alpha_;
  SparseOp h_, heff_, cjump_;
  std::vector<SparseOp> sigma_;
};

LiouvilleOperator build_liouvillian(const EnsembleParams& params);

struct SteadyStateOptions {
  int direct_max_atoms = 5;     ///< sparse LU on the superoperator up to this M
  double residual_tol = 1e-11;  ///< target ||L rho|| for time integration
  double max_step = 0.25;       ///< RK4 step upper bound
  double max_time = 400.0;      ///< integration horizon
};

struct SteadyState {
  DenseOp rho;
  double residual = 0;  ///< Frobenius norm of L rho
  bool direct = false;  ///< solved by sparse LU rather than integration

  double hermiticity_error() const;
  double trace_error() const;
  double min_eigenvalue() const;
};

SteadyState steady_state(const LiouvilleOperator& L, const SteadyStateOptions& opts = {});

/// Transmitted-field annihilation operator alpha - i sqrt(Gamma) sum_m sigma_m.
SparseOp output_field(const LiouvilleOperator& L);

/// Time evolution e^{L t}. Dense matrix exponentials (cached per step) for
/// small systems, RK4 substeps otherwise.
class Propagator {
 public:
  explicit Propagator(const LiouvilleOperator& L, int dense_max_atoms = 4, double max_step = 0.02);
  DenseOp advance(const DenseOp& rho, double dt);
  bool dense() const { return dense_; }

 private:
  const LiouvilleOperator& L_;
  bool dense_;
  double max_step_;
  DenseOp super_;
  std::map<double, DenseOp> cache_;
};

struct QrtOptions {
  int dense_max_atoms = 4;
  double max_step = 0.02;
  SteadyStateOptions steady;
  int threads = 1;
};

/// Normalized g2(tau) on an ascending tau grid (one column).
CorrelationGrid qrt_g2(const EnsembleParams& params, const Eigen::VectorXd& tau, const QrtOptions& opts = {});

struct QrtG3 {
  CorrelationGrid g3;            ///< g3(t1, t2, 0)
  CorrelationGrid g3_connected;  ///< 2 + g3 - g2(t1) - g2(t2) - g2(|t1 - t2|)
  double photon_flux = 0;        ///< <a^dag a> in the steady state
};

/// Three-time correlators g3(t1, t2, 0) for t1 in t1_grid, t2 in t2_grid
/// (both ascending, non-negative).
QrtG3 qrt_g3(const EnsembleParams& params, const Eigen::VectorXd& t1, const Eigen::VectorXd& t2,
             const QrtOptions& opts = {});

/// Equal-time normally ordered moments <a^dag^n a^n> / <a^dag a>^n for n = 2.
double equal_time_g2(const LiouvilleOperator& L, const SteadyState& ss);

}  // namespace wqed::oracle

#pragma once

#include <atomic>
#include <vector>

#include <Eigen/Dense>

#include "sclab/classical.hpp"
#include "sclab/fock.hpp"
#include "sclab/krylov.hpp"

namespace sclab {

inline constexpr double kTruncationMassThreshold = 1e-6;

// H2(t) = dGamma(A) + V2(t)^Wick along a classical trajectory, in the eps = 1
// normalization (both terms carry one power of eps, so H2/eps is eps-free).
//
// The trajectory grid has an even number of intervals; coarse step k runs from
// fine point 2k to 2k+2 and samples V2 at its midpoint 2k+1.
class QuadraticGenerator {
 public:
  QuadraticGenerator(const OneParticleSpace& space, const Symbol& v, ClassicalTrajectory traj, int nmax);

  const OneParticleSpace& one_particle() const noexcept { return space_; }
  const FockSpace& fock() const noexcept { return fock_; }
  const ClassicalTrajectory& trajectory() const noexcept { return traj_; }
  const Symbol& v2(std::size_t fine_index) const { return v2_.at(fine_index); }
  std::size_t fine_points() const noexcept { return v2_.size(); }

  // Fine grid index of t; ValidationError unless t is a grid point divisible by `multiple`.
  std::size_t grid_index(double t, std::size_t multiple = 1) const;

  SparseMatrixXc h2(std::size_t fine_index) const;
  const SparseMatrixXc& free_part() const noexcept { return dgamma_; }

  // (dGamma(A) + V2^Wick)/eps assembled on a truncation with that eps.
  SparseMatrixXc h2_scaled(std::size_t fine_index, double epsilon) const;

  // int_0^t |V2(s)| ds by the trapezoidal rule on the fine grid.
  double v2_norm_integral(double t) const;

  // Number of forward propagations performed with this generator.
  long propagations() const noexcept { return propagations_.load(); }
  void count_propagation() const noexcept { ++propagations_; }

 private:
  OneParticleSpace space_;
  ClassicalTrajectory traj_;
  FockSpace fock_;
  std::vector<Symbol> v2_;
  SparseMatrixXc dgamma_;
  std::vector<SparseMatrixXc> unit_;  // Wick matrices of the degree-2 basis monomials
  mutable std::atomic<long> propagations_{0};
};

struct U2Result {
  VectorXc psi;
  double norm_drift = 0.0;
  double top_mass = 0.0;
  bool truncated = false;
  int steps = 0;
};

/// U2(t,0) psi by exponential-midpoint steps with Krylov exponentials.
/// stride 2 doubles the step (used for the Richardson estimate).
U2Result propagate_u2(const QuadraticGenerator& gen, const VectorXc& psi, double t, int stride = 1,
                      const KrylovOptions& opts = {40, 1e-12});

// U2(t,0)^* psi = U2(0,t) psi.
VectorXc propagate_u2_adjoint(const QuadraticGenerator& gen, const VectorXc& psi, double t);

// |U2 psi - U2' psi| / 3 with U2' at twice the step.
double u2_richardson_estimate(const QuadraticGenerator& gen, const VectorXc& psi, double t);

// Real 2d x 2d matrix acting on (Re xi, Im xi).
struct SymplecticMap {
  Eigen::MatrixXd m;

  int modes() const { return static_cast<int>(m.rows() / 2); }
  OneParticleVector apply(const OneParticleVector& xi) const;
  static SymplecticMap identity(int d);
};

// max entry of |beta^T J beta - J| with Im<x,y> = x^T J y.
double symplectic_defect(const SymplecticMap& beta);

// Real generator of i d/dt xi = e^{itA} dF_{V2(t)}/dzbar(e^{-itA} xi) at a fine grid point.
Eigen::MatrixXd linearized_generator(const QuadraticGenerator& gen, std::size_t fine_index);

/// beta(t, s) by RK4 on the coarse grid (t >= s, both coarse grid points).
SymplecticMap symplectic_beta(const QuadraticGenerator& gen, double t, double s = 0.0);

/// max over test states of |U2~(t,0) W(i xi0) U2~(0,t) psi - W(i beta(t,0) xi0) psi|
/// with U2~(t,0) = e^{it dGamma(A)} U2(t,0), all at eps = 1. The residual is
/// truncation-limited, roughly sqrt of the top-sector mass of the intermediate
/// state U2(0,t) e^{-it dGamma(A)} psi, reported through max_top_mass.
double bogoliubov_residual(const QuadraticGenerator& gen, const OneParticleVector& xi0, double t,
                           const std::vector<VectorXc>& test_states, double* max_top_mass = nullptr);

struct RegularityDiagnostic {
  int k = 0;
  double weighted_norm = 0.0;  // |(N+1)^{k/2} U2(t,0) psi|
  double shape = 0.0;          // |(N+1)^{k/2} psi| e^{sqrt2 k lambda^k int |V2|}
};

std::vector<RegularityDiagnostic> regularity_diagnostics(const QuadraticGenerator& gen, const VectorXc& psi,
                                                         const VectorXc& u2_psi, double t, double lambda = 2.0,
                                                         const std::vector<int>& ks = {1, 2, 4});

}  // namespace sclab

#pragma once

#include <functional>

#include <Eigen/SparseCore>

#include "sclab/core.hpp"

namespace sclab {

using SparseMatrixXc = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

// y = H x for a Hermitian H.
using HermitianApply = std::function<void(const VectorXc& x, VectorXc& y)>;

struct KrylovOptions {
  int max_dim = 40;
  double tol = 1e-10;  // error budget over the whole interval, relative to |psi|
};

struct KrylovStats {
  int steps = 0;
  int matvecs = 0;
  int rejected = 0;
  double error_estimate = 0.0;  // sum of accepted local estimates
};

/// exp(-i tau H) psi by restarted Lanczos with full reorthogonalization.
///
/// The step size adapts so that the a-posteriori Lanczos estimate stays
/// within tol * h / |tau| per substep; the Krylov basis is reused when a
/// step is shortened. Happy breakdown finishes the remaining interval
/// exactly.
VectorXc expm_multiply(const HermitianApply& h, const VectorXc& psi, double tau,
                       const KrylovOptions& opts = {}, KrylovStats* stats = nullptr);

VectorXc expm_multiply(const SparseMatrixXc& h, const VectorXc& psi, double tau,
                       const KrylovOptions& opts = {}, KrylovStats* stats = nullptr);

// Upper bound on the spectral radius via Gershgorin discs.
double gershgorin_radius(const SparseMatrixXc& h);

// Lower bound on the spectrum of a Hermitian matrix via Gershgorin discs.
double gershgorin_floor(const SparseMatrixXc& h);

}  // namespace sclab

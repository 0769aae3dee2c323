#pragma once

#include <iosfwd>
#include <memory>

#include "sclab/fock_basis.hpp"
#include "sclab/hilbert.hpp"
#include "sclab/krylov.hpp"

namespace sclab {

struct FockParams {
  int d = 1;
  int nmax = 1;
  double epsilon = 1.0;
};

// Largest dimension for which Weyl operators are materialized densely.
inline constexpr Index kDenseWeylLimit = 2000;

// Default mass allowed above the cutoff when building coherent states.
inline constexpr double kDefaultTailThreshold = 1e-6;

// Truncated Fock space: the occupation basis plus the semiclassical parameter.
class FockSpace {
 public:
  explicit FockSpace(const FockParams& params, std::size_t budget = kDefaultBasisBudget);

  const FockParams& params() const noexcept { return params_; }
  const FockBasis& basis() const noexcept { return *basis_; }
  std::shared_ptr<const FockBasis> shared_basis() const noexcept { return basis_; }
  int modes() const noexcept { return params_.d; }
  int nmax() const noexcept { return params_.nmax; }
  double epsilon() const noexcept { return params_.epsilon; }
  Index dim() const noexcept { return basis_->dim(); }

  VectorXc vacuum() const;
  VectorXc basis_state(const Occupation& m) const;

 private:
  FockParams params_;
  std::shared_ptr<const FockBasis> basis_;
};

struct SparseOperator {
  SparseMatrixXc matrix;
  bool hermitian = false;

  Index dim() const noexcept { return matrix.rows(); }
  VectorXc operator*(const VectorXc& x) const { return matrix * x; }
};

// max |M - M^*| entrywise
double hermiticity_defect(const SparseMatrixXc& m);

// Sets the Hermitian flag after checking the defect against kHermitianTolerance.
SparseOperator make_operator(SparseMatrixXc m, bool claim_hermitian);

enum class Ladder { create, annihilate };

// Mode j is zero-based.
SparseOperator ladder(const FockSpace& space, int j, Ladder kind);

// a*(f) = sum_j f_j a*_j and a(f) = sum_j conj(f_j) a_j
SparseOperator creation(const FockSpace& space, const OneParticleVector& f);
SparseOperator annihilation(const FockSpace& space, const OneParticleVector& f);

SparseOperator dgamma(const FockSpace& space, const MatrixXc& a);
SparseOperator number_operator(const FockSpace& space);

// (a*(f) + a(f)) / sqrt(2)
SparseOperator segal_field(const FockSpace& space, const OneParticleVector& f);

// Dense W(f) = exp(i Phi_s(f)); CapacityError above kDenseWeylLimit.
MatrixXc weyl(const FockSpace& space, const OneParticleVector& f);

// W(f) psi by Krylov exponentiation of the field operator.
VectorXc apply_weyl(const FockSpace& space, const OneParticleVector& f, const VectorXc& psi,
                    double tol = 1e-13);

// The argument that turns the vacuum into the coherent state at z: -i sqrt(2)/eps z.
OneParticleVector coherent_weyl_argument(const OneParticleVector& z, double epsilon);

/// Poisson tail sum_{n > nmax} e^{-lambda} lambda^n / n! with lambda = |z|^2/eps.
double coherent_tail(const OneParticleVector& z, const FockParams& params);
double poisson_tail(double lambda, int nmax);

// Smallest cutoff whose Poisson tail at lambda is <= threshold.
int required_nmax(double lambda, double threshold);

/// Coherent state W(-i sqrt(2)/eps z) Omega written out in the occupation basis.
VectorXc coherent(const FockSpace& space, const OneParticleVector& z,
                  double tail_threshold = kDefaultTailThreshold);

// Diagonal operator c^n on sector n.
SparseOperator gamma_scalar(const FockSpace& space, double c);

// Multiply psi by c^n on sector n without forming the operator.
VectorXc apply_gamma_scalar(const FockSpace& space, double c, const VectorXc& psi);

// |P_n psi|^2 for n = 0..nmax
Eigen::VectorXd sector_weights(const FockBasis& basis, const VectorXc& psi);

// Mass in the `count` highest sectors.
double top_sector_mass(const FockBasis& basis, const VectorXc& psi, int count = 2);

// Copy psi into a larger (or smaller) truncation; the bases share their common prefix.
VectorXc embed(const VectorXc& psi, const FockBasis& to);

// Little-endian: uint64 dim, then interleaved re/im doubles.
void write_fock_vector(std::ostream& os, const VectorXc& v);
VectorXc read_fock_vector(std::istream& is);

}  // namespace sclab

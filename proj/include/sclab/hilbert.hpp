#pragma once

#include <optional>
#include <string>

#include "sclab/core.hpp"

namespace sclab {

// Coordinates of a vector in the one-particle space Z = C^d. The
// computational basis is fixed by the conjugation: c(e_j) = e_j, so the
// conjugation acts entrywise and the real subspace Z_0 is the set of
// vectors with real coordinates.
using OneParticleVector = VectorXc;

/// Scalar product, antilinear in the left slot.
template <typename DerivedF, typename DerivedG>
Complex inner(const Eigen::MatrixBase<DerivedF>& f, const Eigen::MatrixBase<DerivedG>& g) {
  if (f.size() != g.size()) {
    throw DimensionError("inner: dimension mismatch (" + std::to_string(f.size()) + " vs " +
                         std::to_string(g.size()) + ")");
  }
  return f.dot(g);  // Eigen's dot conjugates the left argument
}

template <typename Derived>
OneParticleVector conjugate(const Eigen::MatrixBase<Derived>& f) {
  return f.conjugate();
}

template <typename Derived>
bool is_real_vector(const Eigen::MatrixBase<Derived>& f, double tol = 0.0) {
  return f.imag().cwiseAbs().maxCoeff() <= tol;
}

// Symplectic form Im<f, g>.
template <typename DerivedF, typename DerivedG>
double symplectic_form(const Eigen::MatrixBase<DerivedF>& f, const Eigen::MatrixBase<DerivedG>& g) {
  return inner(f, g).imag();
}

inline constexpr double kHermitianTolerance = 1e-12;

// Finite-dimensional one-particle space with its free operator A.
// Immutable once built; the spectral decomposition of A is computed at
// construction and reused for every e^{-itA}.
class OneParticleSpace {
 public:
  explicit OneParticleSpace(MatrixXc a);

  int modes() const noexcept { return static_cast<int>(a_.rows()); }
  const MatrixXc& a() const noexcept { return a_; }

  // Eigen-decomposition of the Hermitian part of A.
  const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }
  const MatrixXc& eigenvectors() const noexcept { return eigenvectors_; }

  // e^{-itA} as a dense d x d unitary.
  MatrixXc propagator(double t) const;
  OneParticleVector evolve_free(const OneParticleVector& f, double t) const;

  OneParticleVector apply(const OneParticleVector& f) const;

 private:
  MatrixXc a_;
  Eigen::VectorXd eigenvalues_;
  MatrixXc eigenvectors_;
};

struct H1Report {
  bool ok = false;
  double m = 0.0;         // smallest eigenvalue of A
  std::string violation;  // empty when ok
};

/// Checks Hermiticity, reality (cA = Ac) and strict positivity of A.
H1Report validate_h1(const OneParticleSpace& space);

// Throws ValidationError with the report text when the hypothesis fails.
double require_h1(const OneParticleSpace& space);

}  // namespace sclab

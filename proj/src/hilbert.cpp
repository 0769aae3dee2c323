#include "sclab/hilbert.hpp"

#include <sstream>

namespace sclab {

OneParticleSpace::OneParticleSpace(MatrixXc a) : a_(std::move(a)) {
  if (a_.rows() == 0 || a_.rows() != a_.cols()) {
    throw DimensionError("OneParticleSpace: A must be a non-empty square matrix");
  }
  const MatrixXc hermitian_part = 0.5 * (a_ + a_.adjoint());
  Eigen::SelfAdjointEigenSolver<MatrixXc> solver(hermitian_part);
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
}

MatrixXc OneParticleSpace::propagator(double t) const {
  const VectorXc phases = (-kI * t * eigenvalues_.cast<Complex>()).array().exp();
  return eigenvectors_ * phases.asDiagonal() * eigenvectors_.adjoint();
}

OneParticleVector OneParticleSpace::evolve_free(const OneParticleVector& f, double t) const {
  if (f.size() != a_.rows()) {
    throw DimensionError("evolve_free: dimension mismatch");
  }
  const VectorXc phases = (-kI * t * eigenvalues_.cast<Complex>()).array().exp();
  return eigenvectors_ * (phases.asDiagonal() * (eigenvectors_.adjoint() * f));
}

OneParticleVector OneParticleSpace::apply(const OneParticleVector& f) const {
  if (f.size() != a_.rows()) {
    throw DimensionError("OneParticleSpace::apply: dimension mismatch");
  }
  return a_ * f;
}

H1Report validate_h1(const OneParticleSpace& space) {
  H1Report report;
  const MatrixXc& a = space.a();
  const double asym = (a - a.adjoint()).cwiseAbs().maxCoeff();
  if (asym > kHermitianTolerance) {
    std::ostringstream os;
    os << "A not Hermitian (max |A - A^*| = " << asym << ")";
    report.violation = os.str();
    return report;
  }
  const double imag = a.imag().cwiseAbs().maxCoeff();
  if (imag > kHermitianTolerance) {
    std::ostringstream os;
    os << "cA != Ac: A has non-real entries (max |Im A| = " << imag << ")";
    report.violation = os.str();
    return report;
  }
  report.m = space.eigenvalues().minCoeff();
  if (!(report.m > 0.0)) {
    std::ostringstream os;
    os << "spectrum not >= m>0 (smallest eigenvalue " << report.m << ")";
    report.violation = os.str();
    return report;
  }
  report.ok = true;
  return report;
}

double require_h1(const OneParticleSpace& space) {
  const H1Report report = validate_h1(space);
  if (!report.ok) {
    throw ValidationError("hypothesis on A violated: " + report.violation);
  }
  return report.m;
}

}  // namespace sclab

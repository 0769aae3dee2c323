#include "sclab/quantum.hpp"

#include <cmath>

#include "sclab/quadratic.hpp"
#include "sclab/wick.hpp"

namespace sclab {

QuantumSystem::QuantumSystem(const FockParams& params, const OneParticleSpace& space, const Symbol& v)
    : fock_(params), space_(space) {
  if (v.modes() != space.modes() || params.d != space.modes()) {
    throw DimensionError("QuantumSystem: modes of A, V and the Fock space differ");
  }
  h_ = dgamma(fock_, space.a()).matrix + wick_matrix(v, fock_).matrix;
  const double defect = hermiticity_defect(h_);
  if (defect > kHermitianTolerance) {
    throw ValidationError("QuantumSystem: Hamiltonian not Hermitian (defect " + std::to_string(defect) + ")");
  }
  floor_ = gershgorin_floor(h_);
}

double QuantumSystem::energy(const VectorXc& psi) const { return psi.dot(h_ * psi).real(); }

QuantumResult evolve_quantum(const QuantumSystem& sys, const VectorXc& psi0, double t, double tol) {
  if (psi0.size() != sys.fock().dim()) throw DimensionError("evolve_quantum: state does not match the truncation");
  QuantumResult res;
  res.psi = t == 0.0 ? psi0 : expm_multiply(sys.hamiltonian(), psi0, t / sys.epsilon(), {40, tol}, &res.stats);
  res.norm_drift = std::abs(res.psi.norm() - psi0.norm());
  res.top_mass = top_sector_mass(sys.fock().basis(), res.psi);
  res.truncated = res.top_mass > kTruncationMassThreshold;
  return res;
}

Complex hepp_expectation(const QuantumSystem& sys, const OneParticleVector& phi0, const OneParticleVector& xi,
                         double t, const VectorXc& psi, bool* truncated, double tol) {
  const FockSpace& fock = sys.fock();
  const VectorXc start = apply_weyl(fock, coherent_weyl_argument(phi0, sys.epsilon()), psi);
  const QuantumResult fwd = evolve_quantum(sys, start, t, tol);
  const VectorXc kicked = apply_weyl(fock, xi, fwd.psi);
  const QuantumResult back = evolve_quantum(sys, kicked, -t, tol);
  if (truncated) {
    *truncated = top_sector_mass(fock.basis(), start) > kTruncationMassThreshold || fwd.truncated ||
                 top_sector_mass(fock.basis(), kicked) > kTruncationMassThreshold || back.truncated;
  }
  return start.dot(back.psi);
}

}  // namespace sclab

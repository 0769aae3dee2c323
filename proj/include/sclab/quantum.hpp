#pragma once

#include <vector>

#include "sclab/fock.hpp"
#include "sclab/krylov.hpp"
#include "sclab/symbol.hpp"

namespace sclab {

// H = dGamma(A) + F_V^Wick on a truncated Fock space.
class QuantumSystem {
 public:
  // ValidationError if H is not Hermitian to kHermitianTolerance (non-real V).
  QuantumSystem(const FockParams& params, const OneParticleSpace& space, const Symbol& v);

  const FockSpace& fock() const noexcept { return fock_; }
  const OneParticleSpace& one_particle() const noexcept { return space_; }
  const SparseMatrixXc& hamiltonian() const noexcept { return h_; }
  double epsilon() const noexcept { return fock_.epsilon(); }
  double spectral_floor() const noexcept { return floor_; }

  double energy(const VectorXc& psi) const;

 private:
  FockSpace fock_;
  OneParticleSpace space_;
  SparseMatrixXc h_;
  double floor_ = 0.0;
};

struct QuantumResult {
  VectorXc psi;
  double norm_drift = 0.0;
  double top_mass = 0.0;
  bool truncated = false;
  KrylovStats stats;
};

/// e^{-itH/eps} psi0 by adaptive Lanczos stepping.
QuantumResult evolve_quantum(const QuantumSystem& sys, const VectorXc& psi0, double t, double tol = 1e-10);

/// <Psi, W(a)^* e^{itH/eps} W(xi) e^{-itH/eps} W(a) Psi> with a = -i sqrt2/eps phi0.
/// Sets *truncated when any intermediate state has top-sector mass above threshold.
Complex hepp_expectation(const QuantumSystem& sys, const OneParticleVector& phi0, const OneParticleVector& xi,
                         double t, const VectorXc& psi, bool* truncated = nullptr, double tol = 1e-10);

}  // namespace sclab

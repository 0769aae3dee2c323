#pragma once

#include <iosfwd>
#include <vector>

#include "sclab/hilbert.hpp"
#include "sclab/symbol.hpp"

namespace sclab {

inline constexpr int kDefaultClassicalSteps = 2000;

// Sampled mild solution of i d/dt phi = A phi + dF_V/dzbar(phi).
struct ClassicalTrajectory {
  std::vector<double> times;
  std::vector<OneParticleVector> phi;        // Schroedinger picture
  std::vector<OneParticleVector> phi_tilde;  // e^{itA} phi_t
  std::vector<double> omega;                 // accumulated phase
  std::vector<double> energy;                // h(phi_t)

  std::size_t size() const noexcept { return times.size(); }
  double step() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
};

/// h(phi) = <phi, A phi> + F_V(phi)
double energy(const OneParticleSpace& space, const Symbol& v, const OneParticleVector& phi);

/// Classical RK4 in the interaction picture:
///   i d/dt phi~ = e^{itA} dF_V/dzbar(e^{-itA} phi~),   d/dt omega = omega_integrand(phi_t).
/// Uniform grid of `steps` intervals on [0, T]. Throws IntegrationError if the
/// state doubles in norm within one step or becomes non-finite.
ClassicalTrajectory evolve_classical(const OneParticleSpace& space, const Symbol& v, const OneParticleVector& phi0,
                                     double t_final, int steps = kDefaultClassicalSteps);

struct PicardResult {
  OneParticleVector endpoint;
  std::vector<OneParticleVector> path;  // on the quadrature grid
  std::vector<double> distances;        // sup-distance between successive iterates
  int iterations = 0;
};

/// Fixed-point iteration of the Duhamel form
///   phi_t = e^{-itA} phi0 - i int_0^t e^{-i(t-s)A} dF_V/dzbar(phi_s) ds
/// with trapezoidal quadrature on quad_points intervals. Throws
/// IntegrationError("horizon too long") when successive iterates stop contracting.
PicardResult picard_oracle(const OneParticleSpace& space, const Symbol& v, const OneParticleVector& phi0,
                           double t_final, int max_iter, int quad_points, double tol = 1e-14);

// Growth function of the Lipschitz estimate: sqrt(1 + sum_{n>=2} 4^{n-2} n(n-1)/(n-2)! r^{2(n-2)}).
double lipschitz_growth(double r);

// Largest excess of |phi_t| over |phi0| + int_0^t 2|V| g(|phi_s|) ds along the
// trajectory (trapezoidal); nonpositive when the a-priori bound holds.
double norm_bound_excess(const ClassicalTrajectory& traj, const Symbol& v);

// Header `t,re_phi_1,im_phi_1,...,omega,energy`.
void write_trajectory_csv(std::ostream& os, const ClassicalTrajectory& traj);

}  // namespace sclab

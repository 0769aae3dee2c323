#include "sclab/classical.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "sclab/wick.hpp"

namespace sclab {

double energy(const OneParticleSpace& space, const Symbol& v, const OneParticleVector& phi) {
  return inner(phi, space.apply(phi)).real() + eval_symbol(v, phi).real();
}

namespace {

struct Augmented {
  OneParticleVector tilde;
  double omega;
};

Augmented rhs(const OneParticleSpace& space, const Symbol& v, double t, const OneParticleVector& tilde) {
  const OneParticleVector phi = space.evolve_free(tilde, t);
  const OneParticleVector g = grad_zbar(v, phi);
  return {-kI * space.evolve_free(g, -t), omega_integrand(v, phi)};
}

bool finite(const OneParticleVector& x) { return x.allFinite(); }

}  // namespace

ClassicalTrajectory evolve_classical(const OneParticleSpace& space, const Symbol& v, const OneParticleVector& phi0,
                                     double t_final, int steps) {
  if (phi0.size() != space.modes() || v.modes() != space.modes()) {
    throw DimensionError("evolve_classical: dimensions of A, V and phi0 differ");
  }
  if (steps < 1) throw ValidationError("evolve_classical: need at least one step");
  if (!v.is_real()) throw ValidationError("evolve_classical: symbol must be real");
  const double dt = t_final / steps;
  ClassicalTrajectory traj;
  traj.times.reserve(steps + 1);
  OneParticleVector tilde = phi0;
  double omega = 0.0;
  for (int k = 0;; ++k) {
    const double t = k * dt;
    const OneParticleVector phi = space.evolve_free(tilde, t);
    traj.times.push_back(t);
    traj.phi_tilde.push_back(tilde);
    traj.phi.push_back(phi);
    traj.omega.push_back(omega);
    traj.energy.push_back(energy(space, v, phi));
    if (k == steps) break;
    const Augmented k1 = rhs(space, v, t, tilde);
    const Augmented k2 = rhs(space, v, t + dt / 2, tilde + dt / 2 * k1.tilde);
    const Augmented k3 = rhs(space, v, t + dt / 2, tilde + dt / 2 * k2.tilde);
    const Augmented k4 = rhs(space, v, t + dt, tilde + dt * k3.tilde);
    const OneParticleVector next = tilde + dt / 6 * (k1.tilde + 2.0 * k2.tilde + 2.0 * k3.tilde + k4.tilde);
    omega += dt / 6 * (k1.omega + 2.0 * k2.omega + 2.0 * k3.omega + k4.omega);
    if (!finite(next) || !std::isfinite(omega)) {
      throw IntegrationError("evolve_classical: non-finite state at t = " + std::to_string(t + dt));
    }
    if (next.norm() > 2.0 * std::max(tilde.norm(), 1e-300) && next.norm() > 1e-12) {
      throw IntegrationError("evolve_classical: norm doubled within one step at t = " + std::to_string(t) +
                             " (blow-up guard)");
    }
    tilde = next;
  }
  return traj;
}

PicardResult picard_oracle(const OneParticleSpace& space, const Symbol& v, const OneParticleVector& phi0,
                           double t_final, int max_iter, int quad_points, double tol) {
  if (quad_points < 1) throw ValidationError("picard_oracle: need at least one quadrature interval");
  const double h = t_final / quad_points;
  const int n = quad_points + 1;
  std::vector<MatrixXc> forward(n);   // e^{-i t_i A}
  std::vector<MatrixXc> backward(n);  // e^{+i s_j A}
  for (int i = 0; i < n; ++i) {
    forward[i] = space.propagator(i * h);
    backward[i] = space.propagator(-i * h);
  }
  PicardResult res;
  res.path.resize(n);
  for (int i = 0; i < n; ++i) res.path[i] = forward[i] * phi0;  // zeroth iterate: free flow
  std::vector<OneParticleVector> integrand(n);
  for (int it = 0; it < max_iter; ++it) {
    for (int j = 0; j < n; ++j) integrand[j] = backward[j] * grad_zbar(v, res.path[j]);
    std::vector<OneParticleVector> next(n);
    OneParticleVector acc = OneParticleVector::Zero(phi0.size());
    double dist = 0.0;
    for (int i = 0; i < n; ++i) {
      if (i > 0) acc += 0.5 * h * (integrand[i - 1] + integrand[i]);
      next[i] = forward[i] * (phi0 - kI * acc);
      if (!finite(next[i])) throw IntegrationError("picard_oracle: non-finite iterate");
      dist = std::max(dist, (next[i] - res.path[i]).norm());
    }
    res.path = std::move(next);
    res.distances.push_back(dist);
    res.iterations = it + 1;
    const std::size_t m = res.distances.size();
    if (dist <= tol) break;
    // after the first correction the iterates must contract
    if (m >= 3 && res.distances[m - 1] > res.distances[m - 2]) {
      throw IntegrationError("picard_oracle: iterates stopped contracting; horizon too long");
    }
  }
  res.endpoint = res.path.back();
  return res;
}

double lipschitz_growth(double r) {
  // terms 4^k (k+2)(k+1)/k! r^{2k}, k = n-2
  const double x = 4.0 * r * r;
  double sum = 1.0;
  double power = 1.0;  // x^k / k!
  for (int k = 0; k < 100000; ++k) {
    if (k > 0) power *= x / k;
    const double term = power * (k + 2.0) * (k + 1.0);
    sum += term;
    if (k > x && term < 1e-17 * sum) break;
  }
  return std::sqrt(sum);
}

double norm_bound_excess(const ClassicalTrajectory& traj, const Symbol& v) {
  if (traj.size() == 0) return 0.0;
  const double c = 2.0 * v.norm();
  const double n0 = traj.phi[0].norm();
  double integral = 0.0;
  double worst = traj.phi[0].norm() - n0;
  for (std::size_t k = 1; k < traj.size(); ++k) {
    const double h = traj.times[k] - traj.times[k - 1];
    integral += 0.5 * h * c * (lipschitz_growth(traj.phi[k - 1].norm()) + lipschitz_growth(traj.phi[k].norm()));
    worst = std::max(worst, traj.phi[k].norm() - (n0 + integral));
  }
  return worst;
}

void write_trajectory_csv(std::ostream& os, const ClassicalTrajectory& traj) {
  const Index d = traj.phi.empty() ? 0 : traj.phi[0].size();
  os << "t";
  for (Index j = 1; j <= d; ++j) os << ",re_phi_" << j << ",im_phi_" << j;
  os << ",omega,energy\n";
  os << std::setprecision(17);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    os << traj.times[k];
    for (Index j = 0; j < d; ++j) os << ',' << traj.phi[k][j].real() << ',' << traj.phi[k][j].imag();
    os << ',' << traj.omega[k] << ',' << traj.energy[k] << '\n';
  }
}

}  // namespace sclab

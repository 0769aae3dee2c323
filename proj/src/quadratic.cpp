#include "sclab/quadratic.hpp"

#include <cmath>
#include <string>

#include "sclab/wick.hpp"

namespace sclab {

QuadraticGenerator::QuadraticGenerator(const OneParticleSpace& space, const Symbol& v, ClassicalTrajectory traj,
                                       int nmax)
    : space_(space), traj_(std::move(traj)), fock_(FockParams{space.modes(), nmax, 1.0}) {
  if (v.modes() != space.modes()) throw DimensionError("QuadraticGenerator: symbol and space differ in modes");
  if (traj_.size() < 3 || (traj_.size() - 1) % 2 != 0) {
    throw ValidationError("QuadraticGenerator: trajectory needs an even, positive number of intervals");
  }
  v2_.reserve(traj_.size());
  for (const auto& phi : traj_.phi) {
    Symbol q = quadratic_part(v, phi);
    if (!q.is_real(1e-12)) throw ValidationError("QuadraticGenerator: V2(t) is not real");
    v2_.push_back(std::move(q));
  }
  dgamma_ = dgamma(fock_, space_.a()).matrix;
  for (const Occupation& m : occupations_of_grade(space.modes(), 2)) {
    Symbol unit(space.modes(), 2);
    unit.set(m, 1.0);
    unit_.push_back(wick_matrix(unit, fock_).matrix);
  }
}

std::size_t QuadraticGenerator::grid_index(double t, std::size_t multiple) const {
  const double h = traj_.step();
  const long long k = std::llround(t / h);
  if (k < 0 || static_cast<std::size_t>(k) >= traj_.size() || std::abs(k * h - t) > 1e-9 * std::max(1.0, std::abs(t)) ||
      k % static_cast<long long>(multiple) != 0) {
    throw ValidationError("QuadraticGenerator: t = " + std::to_string(t) + " is not a usable grid point");
  }
  return static_cast<std::size_t>(k);
}

SparseMatrixXc QuadraticGenerator::h2(std::size_t fine_index) const {
  const Symbol& q = v2_.at(fine_index);
  const auto occs = occupations_of_grade(space_.modes(), 2);
  SparseMatrixXc h = dgamma_;
  for (std::size_t i = 0; i < occs.size(); ++i) {
    const double c = q.coefficient(occs[i]).real();
    if (c != 0.0) h += c * unit_[i];
  }
  return h;
}

SparseMatrixXc QuadraticGenerator::h2_scaled(std::size_t fine_index, double epsilon) const {
  const FockSpace scaled(FockParams{space_.modes(), fock_.nmax(), epsilon});
  SparseMatrixXc h = dgamma(scaled, space_.a()).matrix + wick_matrix(v2_.at(fine_index), scaled).matrix;
  return h / Complex(epsilon);
}

double QuadraticGenerator::v2_norm_integral(double t) const {
  const std::size_t end = grid_index(t);
  const double h = traj_.step();
  double acc = 0.0;
  for (std::size_t k = 1; k <= end; ++k) acc += 0.5 * h * (v2_[k - 1].norm() + v2_[k].norm());
  return acc;
}

namespace {

VectorXc step_u2(const QuadraticGenerator& gen, VectorXc psi, std::size_t end, int stride, bool adjoint,
                 const KrylovOptions& opts, int* steps) {
  const std::size_t span = 2 * static_cast<std::size_t>(stride);
  const double tau = span * gen.trajectory().step();
  int count = 0;
  if (!adjoint) {
    for (std::size_t k = 0; k < end; k += span, ++count) psi = expm_multiply(gen.h2(k + stride), psi, tau, opts);
  } else {
    for (std::size_t k = end; k > 0; k -= span, ++count) psi = expm_multiply(gen.h2(k - stride), psi, -tau, opts);
  }
  if (steps) *steps = count;
  return psi;
}

}  // namespace

U2Result propagate_u2(const QuadraticGenerator& gen, const VectorXc& psi, double t, int stride,
                      const KrylovOptions& opts) {
  if (psi.size() != gen.fock().dim()) throw DimensionError("propagate_u2: state does not match the truncation");
  if (stride < 1) throw ValidationError("propagate_u2: stride must be positive");
  const std::size_t end = gen.grid_index(t, 2 * static_cast<std::size_t>(stride));
  gen.count_propagation();
  U2Result res;
  res.psi = step_u2(gen, psi, end, stride, false, opts, &res.steps);
  res.norm_drift = std::abs(res.psi.norm() - psi.norm());
  res.top_mass = top_sector_mass(gen.fock().basis(), res.psi);
  res.truncated = res.top_mass > kTruncationMassThreshold;
  return res;
}

VectorXc propagate_u2_adjoint(const QuadraticGenerator& gen, const VectorXc& psi, double t) {
  if (psi.size() != gen.fock().dim()) throw DimensionError("propagate_u2_adjoint: state does not match the truncation");
  return step_u2(gen, psi, gen.grid_index(t, 2), 1, true, {40, 1e-12}, nullptr);
}

double u2_richardson_estimate(const QuadraticGenerator& gen, const VectorXc& psi, double t) {
  const VectorXc fine = propagate_u2(gen, psi, t, 1).psi;
  const VectorXc coarse = propagate_u2(gen, psi, t, 2).psi;
  return (fine - coarse).norm() / 3.0;
}

OneParticleVector SymplecticMap::apply(const OneParticleVector& xi) const {
  const int d = modes();
  Eigen::VectorXd x(2 * d);
  x << xi.real(), xi.imag();
  const Eigen::VectorXd y = m * x;
  OneParticleVector out(d);
  for (int j = 0; j < d; ++j) out[j] = Complex(y[j], y[j + d]);
  return out;
}

SymplecticMap SymplecticMap::identity(int d) { return {Eigen::MatrixXd::Identity(2 * d, 2 * d)}; }

double symplectic_defect(const SymplecticMap& beta) {
  const int d = beta.modes();
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * d, 2 * d);
  j.topRightCorner(d, d).setIdentity();
  j.bottomLeftCorner(d, d) = -Eigen::MatrixXd::Identity(d, d);
  return (beta.m.transpose() * j * beta.m - j).cwiseAbs().maxCoeff();
}

Eigen::MatrixXd linearized_generator(const QuadraticGenerator& gen, std::size_t fine_index) {
  const int d = gen.one_particle().modes();
  const double t = gen.trajectory().times.at(fine_index);
  const Symbol& q = gen.v2(fine_index);
  Eigen::MatrixXd m(2 * d, 2 * d);
  for (int c = 0; c < 2 * d; ++c) {
    OneParticleVector x = OneParticleVector::Zero(d);
    x[c % d] = c < d ? Complex(1.0) : kI;
    const OneParticleVector g = grad_zbar(q, gen.one_particle().evolve_free(x, t));
    const OneParticleVector col = -kI * gen.one_particle().evolve_free(g, -t);
    m.col(c) << col.real(), col.imag();
  }
  return m;
}

SymplecticMap symplectic_beta(const QuadraticGenerator& gen, double t, double s) {
  const std::size_t end = gen.grid_index(t, 2);
  const std::size_t begin = gen.grid_index(s, 2);
  if (end < begin) throw ValidationError("symplectic_beta: need t >= s");
  const int d = gen.one_particle().modes();
  const double h = 2.0 * gen.trajectory().step();
  Eigen::MatrixXd b = Eigen::MatrixXd::Identity(2 * d, 2 * d);
  for (std::size_t k = begin; k < end; k += 2) {
    const Eigen::MatrixXd m0 = linearized_generator(gen, k);
    const Eigen::MatrixXd m1 = linearized_generator(gen, k + 1);
    const Eigen::MatrixXd m2 = linearized_generator(gen, k + 2);
    const Eigen::MatrixXd k1 = m0 * b;
    const Eigen::MatrixXd k2 = m1 * (b + h / 2 * k1);
    const Eigen::MatrixXd k3 = m1 * (b + h / 2 * k2);
    const Eigen::MatrixXd k4 = m2 * (b + h * k3);
    b += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return {b};
}

double bogoliubov_residual(const QuadraticGenerator& gen, const OneParticleVector& xi0, double t,
                           const std::vector<VectorXc>& test_states, double* max_top_mass) {
  const std::size_t end = gen.grid_index(t, 2);
  const OneParticleVector xi_t = symplectic_beta(gen, t).apply(xi0);
  const KrylovOptions opts{40, 1e-12};
  double worst = 0.0;
  double mass = 0.0;
  for (const VectorXc& psi : test_states) {
    VectorXc u = expm_multiply(gen.free_part(), psi, t, opts);
    u = step_u2(gen, u, end, 1, true, opts, nullptr);
    mass = std::max(mass, top_sector_mass(gen.fock().basis(), u));
    u = apply_weyl(gen.fock(), kI * xi0, u);
    u = step_u2(gen, u, end, 1, false, opts, nullptr);
    u = expm_multiply(gen.free_part(), u, -t, opts);
    const VectorXc ref = apply_weyl(gen.fock(), kI * xi_t, psi);
    worst = std::max(worst, (u - ref).norm());
  }
  if (max_top_mass) *max_top_mass = mass;
  return worst;
}

std::vector<RegularityDiagnostic> regularity_diagnostics(const QuadraticGenerator& gen, const VectorXc& psi,
                                                         const VectorXc& u2_psi, double t, double lambda,
                                                         const std::vector<int>& ks) {
  const Eigen::VectorXd w0 = sector_weights(gen.fock().basis(), psi);
  const Eigen::VectorXd w1 = sector_weights(gen.fock().basis(), u2_psi);
  const double integral = gen.v2_norm_integral(t);
  std::vector<RegularityDiagnostic> out;
  for (int k : ks) {
    double a = 0.0, b = 0.0;
    for (Index n = 0; n < w0.size(); ++n) {
      const double f = std::pow(n + 1.0, k);
      a += f * w1[n];
      b += f * w0[n];
    }
    out.push_back({k, std::sqrt(a), std::sqrt(b) * std::exp(std::sqrt(2.0) * k * std::pow(lambda, k) * integral)});
  }
  return out;
}

}  // namespace sclab

#include <cmath>
#include <random>

#include <doctest.h>

#include "oracles.hpp"
#include "sclab/builders.hpp"
#include "sclab/quantum.hpp"
#include "sclab/wick.hpp"

using namespace sclab;

namespace {

MatrixXc random_hermitian(std::mt19937_64& rng, int d, double shift) {
  MatrixXc m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = oracle::random_vector(rng, 1, 0.3)[0];
  return 0.5 * (m + m.adjoint()) + shift * MatrixXc::Identity(d, d);
}

Symbol single_mode_quartic(double g) {
  PPhi2Grid grid;
  grid.k = {0.0};
  grid.k_weights = {1.0};
  grid.x = {0.0};
  grid.x_weights = {1.0};
  grid.g = {1.0};
  return build_pphi2({0.0, 0.0, 0.0, 0.0, g}, 1.0, grid);
}

}  // namespace

TEST_CASE("Hamiltonian assembly") {
  std::mt19937_64 rng(1);
  OneParticleSpace space(random_hermitian(rng, 2, 1.0));
  const Symbol v = oracle::random_symbol(rng, 2, 4, true, 0.3);
  const QuantumSystem sys({2, 6, 0.2}, space, v);
  const MatrixXc ref = MatrixXc(dgamma(sys.fock(), space.a()).matrix) + MatrixXc(wick_matrix(v, sys.fock()).matrix);
  CHECK((MatrixXc(sys.hamiltonian()) - ref).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(hermiticity_defect(sys.hamiltonian()) < 1e-12);
  const Eigen::VectorXd spec = Eigen::SelfAdjointEigenSolver<MatrixXc>(ref).eigenvalues();
  CHECK(sys.spectral_floor() <= spec.minCoeff() + 1e-12);

  Symbol broken = v;
  broken.set({2, 1}, Complex(0.3, 0.4));
  CHECK_THROWS_AS(QuantumSystem({2, 6, 0.2}, space, broken), ValidationError);
}

TEST_CASE("quantum evolution against dense exponential") {
  std::mt19937_64 rng(2);
  OneParticleSpace space(random_hermitian(rng, 2, 1.0));
  const Symbol v = oracle::random_symbol(rng, 2, 4, true, 0.3);
  const QuantumSystem sys({2, 8, 0.25}, space, v);
  REQUIRE(sys.fock().dim() <= 500);
  VectorXc psi = oracle::random_vector(rng, sys.fock().dim());
  psi.normalize();
  CHECK(evolve_quantum(sys, psi, 0.0).psi == psi);
  const double t = 1.3;
  const QuantumResult r = evolve_quantum(sys, psi, t);
  const VectorXc ref = oracle::dense_expm(MatrixXc(-kI * (t / 0.25) * MatrixXc(sys.hamiltonian()))) * psi;
  CHECK((r.psi - ref).norm() < 1e-9);
  CHECK(r.norm_drift < 1e-9 * t);
  CHECK(std::abs(sys.energy(r.psi) - sys.energy(psi)) < 1e-8 * (1.0 + std::abs(sys.energy(psi))));
}

TEST_CASE("free coherent states stay coherent") {
  std::mt19937_64 rng(3);
  OneParticleSpace space(random_hermitian(rng, 2, 1.0));
  VectorXc z(2);
  z << Complex(0.3, 0.2), Complex(-0.1, 0.25);
  const double eps = 0.1;
  const int nmax = required_nmax(z.squaredNorm() / eps, 1e-16);
  const QuantumSystem sys({2, nmax, eps}, space, Symbol(2, 4));
  const VectorXc psi = coherent(sys.fock(), z);
  const double t = 2.0;
  const QuantumResult r = evolve_quantum(sys, psi, t);
  const VectorXc target = coherent(sys.fock(), space.evolve_free(z, t));
  CHECK(std::abs(std::abs(target.dot(r.psi)) - 1.0) < 1e-7);
}

TEST_CASE("energy conservation of the quartic model") {
  OneParticleSpace one(MatrixXc::Identity(1, 1));
  const Symbol v = single_mode_quartic(0.1);
  VectorXc phi0(1);
  phi0 << 1.0;
  const double eps = 0.1;
  const int nmax = required_nmax(1.0 / eps, 1e-12) + 10;
  const QuantumSystem sys({1, nmax, eps}, one, v);
  const VectorXc psi = coherent(sys.fock(), phi0);
  const QuantumResult r = evolve_quantum(sys, psi, 1.0);
  const double e0 = sys.energy(psi);
  CHECK(std::abs(sys.energy(r.psi) - e0) < 1e-8 * std::abs(e0));
  CHECK(r.norm_drift < 1e-9);
}

TEST_CASE("Hepp expectation oracles") {
  std::mt19937_64 rng(4);
  OneParticleSpace space(random_hermitian(rng, 2, 1.0));
  VectorXc phi0(2);
  phi0 << Complex(0.4, 0.1), Complex(-0.2, 0.3);
  VectorXc xi(2);
  xi << Complex(0.3, -0.1), Complex(0.1, 0.2);
  const double eps = 0.2;
  const int nmax = required_nmax(phi0.squaredNorm() / eps, 1e-16) + 14;
  // bounded below: a random quadratic part plus a positive quartic
  PPhi2Grid grid;
  grid.k = {-1.0, 1.0};
  grid.k_weights = {0.5, 0.5};
  grid.x = {-0.5, 0.5};
  grid.x_weights = {0.5, 0.5};
  grid.g = {1.0, 1.0};
  const Symbol v = build_pphi2({0.0, 0.0, 0.0, 0.0, 0.1}, 1.0, grid) +
                   oracle::random_symbol(rng, 2, 2, true, 0.1).resized(4);
  const QuantumSystem sys({2, nmax, eps}, space, v);
  const VectorXc vac = sys.fock().vacuum();

  bool truncated = true;
  CHECK(std::abs(hepp_expectation(sys, phi0, VectorXc::Zero(2), 0.7, vac, &truncated) - 1.0) < 1e-9);
  CHECK(!truncated);

  // t = 0: W(a)^* W(xi) W(a) = e^{i sqrt2 Re<xi, phi0>} W(xi)
  const Complex phase0 = std::exp(kI * std::sqrt(2.0) * inner(xi, phi0).real());
  const Complex direct0 = phase0 * vac.dot(apply_weyl(sys.fock(), xi, vac));
  CHECK(std::abs(hepp_expectation(sys, phi0, xi, 0.0, vac) - direct0) < 1e-9);

  // V = 0: free conjugation
  const QuantumSystem free_sys({2, nmax, eps}, space, Symbol(2, 4));
  const double t = 1.1;
  const Complex phase = std::exp(kI * std::sqrt(2.0) * inner(xi, space.evolve_free(phi0, t)).real());
  const Complex direct = phase * vac.dot(apply_weyl(free_sys.fock(), space.evolve_free(xi, -t), vac));
  CHECK(std::abs(hepp_expectation(free_sys, phi0, xi, t, vac) - direct) < 1e-8);
}

#include <cmath>
#include <random>

#include <doctest.h>

#include "oracles.hpp"
#include "sclab/builders.hpp"
#include "sclab/quadratic.hpp"
#include "sclab/wick.hpp"

using namespace sclab;

namespace {

PPhi2Grid single_point() {
  PPhi2Grid g;
  g.k = {0.0};
  g.k_weights = {1.0};
  g.x = {0.0};
  g.x_weights = {1.0};
  g.g = {1.0};
  return g;
}

PPhi2Grid two_mode_grid() {
  PPhi2Grid g;
  g.k = {-1.0, 1.0};
  g.k_weights = {0.5, 0.5};
  g.x = {-0.5, 0.5};
  g.x_weights = {0.5, 0.5};
  g.g = {1.0, 1.0};
  return g;
}

MatrixXc random_hermitian(std::mt19937_64& rng, int d, double shift) {
  MatrixXc m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = oracle::random_vector(rng, 1, 0.3)[0];
  return 0.5 * (m + m.adjoint()) + shift * MatrixXc::Identity(d, d);
}

QuadraticGenerator make_generator(const OneParticleSpace& space, const Symbol& v, const VectorXc& phi0, double t,
                                  int intervals, int nmax) {
  return QuadraticGenerator(space, v, evolve_classical(space, v, phi0, t, intervals), nmax);
}

Eigen::MatrixXd real_form(const MatrixXc& c) {
  // complex-linear map on (Re, Im)
  const Index d = c.rows();
  Eigen::MatrixXd r(2 * d, 2 * d);
  r << c.real(), -c.imag(), c.imag(), c.real();
  return r;
}

}  // namespace

TEST_CASE("free quadratic propagator") {
  std::mt19937_64 rng(1);
  OneParticleSpace space(random_hermitian(rng, 2, 1.0));
  const VectorXc phi0 = oracle::random_vector(rng, 2, 0.5);
  const QuadraticGenerator gen = make_generator(space, Symbol(2, 4), phi0, 2.0, 200, 5);
  VectorXc psi = oracle::random_vector(rng, gen.fock().dim());
  psi.normalize();
  const U2Result r = propagate_u2(gen, psi, 2.0);
  const VectorXc ref = oracle::dense_expm(MatrixXc(-kI * 2.0 * MatrixXc(gen.free_part()))) * psi;
  CHECK((r.psi - ref).norm() < 1e-10);
  CHECK(r.norm_drift < 2e-9);
  CHECK(r.steps == 100);
  CHECK(gen.propagations() == 1);
  const SymplecticMap beta = symplectic_beta(gen, 2.0);
  CHECK((beta.m - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("quadratic symbol against one-shot exponentials") {
  std::mt19937_64 rng(2);
  OneParticleSpace space(random_hermitian(rng, 2, 1.5));
  const Symbol v = oracle::random_symbol(rng, 2, 2, true, 0.2);
  const VectorXc phi0 = oracle::random_vector(rng, 2, 0.5);
  const double t = 1.5;
  const QuadraticGenerator gen = make_generator(space, v, phi0, t, 600, 6);
  const SparseMatrixXc h = gen.h2(0);
  CHECK((MatrixXc(h) - MatrixXc(gen.h2(377))).cwiseAbs().maxCoeff() < 1e-12);

  VectorXc psi = VectorXc::Zero(gen.fock().dim());
  psi[0] = 0.8;
  psi[1] = Complex(0.0, 0.6);
  const VectorXc ref = oracle::dense_expm(MatrixXc(-kI * t * MatrixXc(h))) * psi;
  CHECK((propagate_u2(gen, psi, t).psi - ref).norm() < 1e-8);

  // Schroedinger-picture linear flow xi -> -i(A xi + grad V2(xi)) is autonomous
  const Symbol q = v.degrees(2, 2);
  Eigen::MatrixXd g(4, 4);
  for (int c = 0; c < 4; ++c) {
    VectorXc x = VectorXc::Zero(2);
    x[c % 2] = c < 2 ? Complex(1.0) : kI;
    const VectorXc col = -kI * (space.apply(x) + grad_zbar(q, x));
    g.col(c) << col.real(), col.imag();
  }
  const Eigen::MatrixXd flow = oracle::dense_expm(MatrixXc(t * g.cast<Complex>())).real();
  const Eigen::MatrixXd twist = real_form(space.propagator(-t));
  CHECK((symplectic_beta(gen, t).m - twist * flow).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("eps-independence of the quadratic generator") {
  const PPhi2Grid grid = two_mode_grid();
  OneParticleSpace space(pphi2_free_operator(grid, 1.0));
  const Symbol v = build_pphi2({0.0, 0.0, 0.0, 0.0, 0.1}, 1.0, grid);
  VectorXc phi0(2);
  phi0 << Complex(0.7, 0.2), Complex(-0.4, 0.3);
  const QuadraticGenerator gen = make_generator(space, v, phi0, 1.0, 100, 6);
  for (std::size_t k : {std::size_t{0}, std::size_t{37}, std::size_t{100}}) {
    const MatrixXc a = gen.h2_scaled(k, 0.1);
    const MatrixXc b = gen.h2_scaled(k, 0.01);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((a - MatrixXc(gen.h2(k))).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(hermiticity_defect(gen.h2(k)) < 1e-12);
  }
}

TEST_CASE("cocycles, unitarity and symplecticity on a quartic trajectory") {
  const PPhi2Grid grid = two_mode_grid();
  OneParticleSpace space(pphi2_free_operator(grid, 1.0));
  const Symbol v = build_pphi2({0.0, 0.0, 0.0, 0.0, 0.1}, 1.0, grid);
  VectorXc phi0(2);
  phi0 << Complex(0.7, 0.2), Complex(-0.4, 0.3);
  const QuadraticGenerator gen = make_generator(space, v, phi0, 2.0, 400, 22);

  const VectorXc vac = gen.fock().vacuum();
  const U2Result r = propagate_u2(gen, vac, 2.0);
  CHECK(r.norm_drift < 2e-9);
  CHECK(!r.truncated);
  CHECK((propagate_u2_adjoint(gen, r.psi, 2.0) - vac).norm() < 1e-8);
  CHECK(u2_richardson_estimate(gen, vac, 2.0) < 1e-4);

  const SymplecticMap b20 = symplectic_beta(gen, 2.0);
  const SymplecticMap b21 = symplectic_beta(gen, 2.0, 1.0);
  const SymplecticMap b10 = symplectic_beta(gen, 1.0);
  CHECK((b21.m * b10.m - b20.m).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(symplectic_defect(b20) < 1e-9);
  std::mt19937_64 rng(9);
  for (int i = 0; i < 10; ++i) {
    const VectorXc x = oracle::random_vector(rng, 2);
    const VectorXc y = oracle::random_vector(rng, 2);
    CHECK(std::abs(inner(b20.apply(x), b20.apply(y)).imag() - inner(x, y).imag()) < 1e-9);
  }
  CHECK_THROWS_AS(symplectic_beta(gen, 1.005), ValidationError);

  const auto diag = regularity_diagnostics(gen, vac, r.psi, 2.0);
  REQUIRE(diag.size() == 3);
  for (const auto& dg : diag) {
    CHECK(std::isfinite(dg.weighted_norm));
    CHECK(dg.weighted_norm <= dg.shape);
  }
}

TEST_CASE("Bogoliubov consistency") {
  std::mt19937_64 rng(4);
  OneParticleSpace space(random_hermitian(rng, 2, 1.0));
  const QuadraticGenerator free_gen = make_generator(space, Symbol(2, 4), VectorXc::Zero(2), 1.0, 100, 12);
  std::vector<VectorXc> states = {free_gen.fock().vacuum(), free_gen.fock().basis_state({1, 0}),
                                  free_gen.fock().basis_state({0, 1})};
  CHECK(bogoliubov_residual(free_gen, VectorXc::Zero(2), 1.0, states) < 1e-12);
  VectorXc e1 = VectorXc::Zero(2);
  e1[0] = 1.0;
  CHECK(bogoliubov_residual(free_gen, e1, 1.0, states) < 1e-7);

  OneParticleSpace one(MatrixXc::Identity(1, 1));
  const Symbol v = build_pphi2({0.0, 0.0, 0.0, 0.0, 0.1}, 1.0, single_point());
  VectorXc phi0(1);
  phi0 << 1.0;
  VectorXc xi0(1);
  xi0 << Complex(0.3, 0.1);
  double previous = 1.0;
  for (int nmax : {40, 70, 100}) {
    const QuadraticGenerator gen = make_generator(one, v, phi0, 1.0, 1000, nmax);
    double mass = 0.0;
    const double res =
        bogoliubov_residual(gen, xi0, 1.0, {gen.fock().vacuum(), gen.fock().basis_state({1})}, &mass);
    // truncation-limited: residual tracks sqrt of the intermediate top-sector mass
    CHECK(res < 3.0 * std::sqrt(mass) + 1e-9);
    CHECK(res < previous);
    previous = res;
    if (nmax == 100) {
      CHECK(mass < 1e-10);
      CHECK(res < 1e-5);
    }
  }
  const QuadraticGenerator gen = make_generator(one, v, phi0, 1.0, 1000, 20);
  CHECK(symplectic_defect(symplectic_beta(gen, 1.0)) < 1e-9);
}

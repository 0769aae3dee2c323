#include <random>

#include <doctest.h>

#include "oracles.hpp"
#include "sclab/wick.hpp"

using namespace sclab;

namespace {

MatrixXc dense(const SparseOperator& op) { return MatrixXc(op.matrix); }

// Fock vector Gamma(sqrt eps) V placed in the given space.
VectorXc scaled_symbol_vector(const Symbol& v, const FockSpace& space) {
  VectorXc out = embed(v.coeffs(), space.basis());
  return apply_gamma_scalar(space, std::sqrt(space.epsilon()), out);
}

double low_sector_norm(const FockBasis& b, const VectorXc& x, int top) {
  return x.head(b.sector_end(top)).norm();
}

// Coefficient of s^2 in the quartic polynomial s -> F_V(phi + s z), by interpolation on five nodes.
Complex second_order_coefficient(const Symbol& v, const VectorXc& phi, const VectorXc& z) {
  const double s[5] = {-2, -1, 0, 1, 2};
  Eigen::Matrix<Complex, 5, 5> vander;
  Eigen::Matrix<Complex, 5, 1> rhs;
  for (int i = 0; i < 5; ++i) {
    for (int k = 0; k < 5; ++k) vander(i, k) = std::pow(s[i], k);
    rhs[i] = eval_symbol(v, VectorXc(phi + s[i] * z));
  }
  return vander.fullPivLu().solve(rhs)[2];
}

}  // namespace

TEST_CASE("symbol evaluation") {
  Symbol c(2, 0);
  c.set({0, 0}, 1.7);
  VectorXc z(2);
  z << Complex(0.3, 1.0), -0.4;
  CHECK(eval_symbol(c, z) == Complex(1.7));

  Symbol lin(1, 1);
  lin.set({1}, 1.0);
  VectorXc x(1);
  x << 0.8;
  CHECK(std::abs(eval_symbol(lin, x) - 1.6) < 1e-15);

  std::mt19937_64 rng(21);
  for (int k = 0; k < 20; ++k) {
    const Symbol v = oracle::random_symbol(rng, 3, 3, k % 2 == 0);
    const VectorXc w = oracle::random_vector(rng, 3);
    const Complex ref = oracle::eval_full(v, w);
    CHECK(std::abs(eval_symbol(v, w) - ref) < 1e-12 * (1.0 + std::abs(ref)));
  }
}

TEST_CASE("gradient in zbar") {
  std::mt19937_64 rng(22);
  const Symbol v = oracle::random_symbol(rng, 2, 4, true);
  const VectorXc phi = oracle::random_vector(rng, 2, 0.7);
  const VectorXc g = grad_zbar(v, phi);
  const double h = 1e-5;
  for (int j = 0; j < 2; ++j) {
    VectorXc dx = VectorXc::Zero(2), dy = VectorXc::Zero(2);
    dx[j] = h;
    dy[j] = Complex(0, h);
    const Complex ddx = (eval_symbol(v, VectorXc(phi + dx)) - eval_symbol(v, VectorXc(phi - dx))) / (2 * h);
    const Complex ddy = (eval_symbol(v, VectorXc(phi + dy)) - eval_symbol(v, VectorXc(phi - dy))) / (2 * h);
    CHECK(std::abs(g[j] - 0.5 * (ddx + kI * ddy)) < 1e-6);
  }
  Symbol c(2, 0);
  c.set({0, 0}, 3.0);
  CHECK(grad_zbar(c, phi).norm() == 0.0);
  CHECK((grad_zbar(Complex(2.5) * v, phi) - 2.5 * g).norm() < 1e-13);

  // quadratic symbol: gradient is linear in phi
  const Symbol q = oracle::random_symbol(rng, 2, 2, true).degrees(2, 2);
  const VectorXc a = oracle::random_real_vector(rng, 2);
  const VectorXc b = oracle::random_real_vector(rng, 2);
  CHECK((grad_zbar(q, VectorXc(a + 2.0 * b)) - grad_zbar(q, a) - 2.0 * grad_zbar(q, b)).norm() < 1e-13);
}

TEST_CASE("translation of symbols") {
  std::mt19937_64 rng(23);
  const Symbol v = oracle::random_symbol(rng, 2, 3, false);
  const VectorXc zero = VectorXc::Zero(2);
  CHECK((translate_symbol(v, zero).coeffs() - v.coeffs()).norm() < 1e-15);
  for (int trial = 0; trial < 10; ++trial) {
    const Symbol w = oracle::random_symbol(rng, 2, 3, trial % 2 == 0);
    const VectorXc phi = oracle::random_vector(rng, 2, 0.8);
    const Symbol t = translate_symbol(w, phi);
    CHECK(std::abs(t.coefficient({0, 0}) - eval_symbol(w, phi)) < 1e-12);
    for (int k = 0; k < 20; ++k) {
      const VectorXc z = oracle::random_vector(rng, 2);
      const Complex ref = eval_symbol(w, VectorXc(z + phi));
      CHECK(std::abs(eval_symbol(t, z) - ref) < 1e-10 * (1.0 + std::abs(ref)));
    }
  }
}

TEST_CASE("second-order part of the translated symbol") {
  std::mt19937_64 rng(24);
  const Symbol pure = oracle::random_symbol(rng, 2, 2, true).degrees(2, 2);
  const VectorXc phi = oracle::random_vector(rng, 2);
  CHECK((quadratic_part(pure, phi).coeffs() - pure.coeffs()).norm() < 1e-14);

  const Symbol low = oracle::random_symbol(rng, 2, 1, true);
  CHECK(quadratic_part(low, phi).norm() == 0.0);

  for (int k = 0; k < 10; ++k) {
    const Symbol v = oracle::random_symbol(rng, 2, 4, true);
    const VectorXc p = oracle::random_vector(rng, 2, 0.6);
    const VectorXc z = oracle::random_vector(rng, 2);
    const Symbol v2 = quadratic_part(v, p);
    const Complex c2 = second_order_coefficient(v, p, z);
    CHECK(std::abs(eval_symbol(v2, z) - c2) < 1e-10 * (1.0 + std::abs(c2)));
  }

  // the full tensor is symmetric and reproduces the symbol
  const Symbol v = oracle::random_symbol(rng, 3, 2, true).degrees(2, 2);
  const MatrixXc t = quadratic_tensor(v);
  CHECK((t - t.transpose()).norm() == 0.0);
  const VectorXc z = oracle::random_vector(rng, 3);
  const VectorXc w = 2.0 * z.real().cast<Complex>();
  CHECK(std::abs(eval_symbol(v, z) - (w.transpose() * t * w)(0, 0) / std::sqrt(2.0)) < 1e-12);
}

TEST_CASE("remainder and the second-order expansion") {
  std::mt19937_64 rng(25);
  const VectorXc phi = oracle::random_vector(rng, 2);
  CHECK(remainder_symbol(oracle::random_symbol(rng, 2, 2, true), phi).norm() == 0.0);

  const Symbol quartic = oracle::random_symbol(rng, 2, 4, true);
  CHECK((remainder_symbol(quartic, VectorXc::Zero(2)).coeffs() - quartic.degrees(3, 4).coeffs()).norm() < 1e-15);

  for (int k = 0; k < 20; ++k) {
    const Symbol v = oracle::random_symbol(rng, 2, 4, true);
    const VectorXc p = oracle::random_vector(rng, 2, 0.7);
    const VectorXc z = oracle::random_vector(rng, 2);
    const Complex lhs = eval_symbol(v, VectorXc(z + p));
    const Complex rhs = eval_symbol(remainder_symbol(v, p), z) + eval_symbol(v, p) +
                        2.0 * inner(z, grad_zbar(v, p)).real() + eval_symbol(quadratic_part(v, p), z);
    CHECK(std::abs(lhs - rhs) < 1e-10 * (1.0 + std::abs(lhs)));
  }

  const double r_small = remainder_symbol(quartic, VectorXc(0.1 * phi)).norm();
  const double r_big = remainder_symbol(quartic, VectorXc(3.0 * phi)).norm();
  CHECK(r_big > r_small);
}

TEST_CASE("phase integrand") {
  std::mt19937_64 rng(26);
  const VectorXc phi = oracle::random_real_vector(rng, 2);
  CHECK(std::abs(omega_integrand(oracle::random_symbol(rng, 2, 2, true).degrees(2, 2), phi)) < 1e-14);
  Symbol c(2, 0);
  c.set({0, 0}, 1.3);
  CHECK(omega_integrand(c, phi) == doctest::Approx(-1.3));
  for (int k = 0; k < 20; ++k) {
    const Symbol v = oracle::random_symbol(rng, 2, 4, true);
    const VectorXc p = oracle::random_vector(rng, 2);
    const OmegaTerms o = omega_terms(v, p);
    CHECK(std::abs(o.homogeneity - o.legendre) < 1e-12 * (1.0 + std::abs(o.homogeneity)));
  }
  CHECK_THROWS_AS(omega_integrand(oracle::random_symbol(rng, 2, 2, false), phi), ValidationError);
}

TEST_CASE("Wick quantization of linear symbols gives the field") {
  const FockSpace space({2, 5, 0.3});
  VectorXc f(2);
  f << 0.7, -1.2;
  Symbol v(2, 1);
  v.set({1, 0}, f[0]);
  v.set({0, 1}, f[1]);
  const MatrixXc ref = dense(creation(space, f)) + dense(annihilation(space, f));
  CHECK((dense(wick_matrix(v, space)) - ref).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("Wick assembly agrees with the symmetrization construction") {
  std::mt19937_64 rng(27);
  int cases = 0;
  for (int d = 1; d <= 2; ++d) {
    for (int n = 0; n <= 3; ++n) {
      for (int rep = 0; rep < 15; ++rep) {
        const double eps = 0.1 + 0.2 * rep / 15.0;
        const FockSpace space({d, 4, eps});
        const Symbol v = oracle::random_symbol(rng, d, n, rep % 3 == 0);
        const MatrixXc a = dense(wick_matrix(v, space));
        const MatrixXc b = oracle::sympol_matrix(v, space);
        CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12);
        ++cases;
      }
    }
  }
  CHECK(cases >= 100);
}

TEST_CASE("algebraic properties of Wick quantization") {
  std::mt19937_64 rng(28);
  const FockSpace space({2, 6, 0.2});
  const Symbol v = oracle::random_symbol(rng, 2, 3, false);
  const Symbol w = oracle::random_symbol(rng, 2, 4, false);
  const Complex a(0.3, -1.1), b(2.0, 0.5);
  const MatrixXc lhs = dense(wick_matrix(a * v + b * w, space));
  const MatrixXc rhs = a * dense(wick_matrix(v, space)) + b * dense(wick_matrix(w, space));
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);

  CHECK(std::abs(space.vacuum().dot(wick_matrix(w, space) * space.vacuum()) - w.coefficient({0, 0})) < 1e-14);
  CHECK((dense(wick_matrix(w, space)).adjoint() - dense(wick_matrix(w.conjugate(), space))).cwiseAbs().maxCoeff() <
        1e-13);
  CHECK_FALSE(wick_matrix(w, space).hermitian);
  const Symbol r = oracle::random_symbol(rng, 2, 4, true);
  CHECK(wick_matrix(r, space).hermitian);
}

TEST_CASE("Wick operator on coherent vectors") {
  // F_V^Wick W(phi) Omega = W(phi) Gamma(sqrt eps) V for real phi
  std::mt19937_64 rng(29);
  const double eps = 0.2;
  const FockSpace space({1, 60, eps});
  const Symbol v = oracle::random_symbol(rng, 1, 4, true, 0.3);
  VectorXc phi(1);
  phi << 0.9;
  const MatrixXc w = weyl(space, phi);
  const VectorXc lhs = wick_matrix(v, space) * (w * space.vacuum());
  const VectorXc rhs = w * scaled_symbol_vector(v, space);
  CHECK(low_sector_norm(space.basis(), VectorXc(lhs - rhs), 40) < 1e-7);
}

TEST_CASE("translation covariance and commutation with real Weyl operators") {
  std::mt19937_64 rng(30);
  const double eps = 0.5;
  const FockSpace space({2, 26, eps});
  const Symbol v = oracle::random_symbol(rng, 2, 3, true, 0.5);
  VectorXc phi(2);
  phi << Complex(0.4, 0.2), -0.3;
  const MatrixXc w = weyl(space, coherent_weyl_argument(phi, eps));
  const SparseOperator fv = wick_matrix(v, space);
  const SparseOperator shifted = wick_matrix(translate_symbol(v, phi), space);
  VectorXc psi = VectorXc::Zero(space.dim());
  psi.head(space.basis().sector_end(2)) = oracle::random_vector(rng, space.basis().sector_end(2));
  psi.normalize();
  const VectorXc lhs = w.adjoint() * (fv * (w * psi));
  CHECK(low_sector_norm(space.basis(), VectorXc(lhs - shifted * psi), 8) < 1e-6);

  VectorXc real_phi(2);
  real_phi << 0.5, -0.8;
  const MatrixXc wr = weyl(space, real_phi);
  const VectorXc comm = wr * (fv * psi) - fv * (wr * psi);
  CHECK(low_sector_norm(space.basis(), comm, 10) < 1e-6);
}

TEST_CASE("number estimate") {
  std::mt19937_64 rng(31);
  const double eps = 0.3;
  const FockSpace space({2, 14, eps});
  // b(z) = <z, f>: one antilinear slot
  Monomial b;
  b.d = 2;
  b.q = 1;
  b.p = 0;
  VectorXc f(2);
  f << 0.6, Complex(0.0, -0.8);
  b.btilde = MatrixXc(2, 1);
  b.btilde(space.basis().rank(Occupation{1, 0}) - 1, 0) = f[0];
  b.btilde(space.basis().rank(Occupation{0, 1}) - 1, 0) = f[1];
  VectorXc z1(2), z2(2);
  z1 << 0.3, 0.1;
  z2 << Complex(0.2, 0.2), -0.1;
  CHECK(check_number_estimate(b, space, coherent(space, z1), coherent(space, z2)).margin >= 0.0);
  // matches the creation operator a*(f)
  CHECK((dense(monomial_wick_matrix(b, space)) - dense(creation(space, f))).cwiseAbs().maxCoeff() <
        1e-14);

  const Symbol v = oracle::random_symbol(rng, 2, 3, false);
  const Monomial ann = monomial_from_symbol(v, 3, 1);
  const NumberEstimate vac = check_number_estimate(ann, space, oracle::random_vector(rng, space.dim()), space.vacuum());
  CHECK(vac.lhs == 0.0);
  CHECK(vac.margin >= 0.0);

  // the (p, q) pieces add up to the Wick operator of the homogeneous component
  MatrixXc total = MatrixXc::Zero(space.dim(), space.dim());
  for (int q = 0; q <= 3; ++q) total += dense(monomial_wick_matrix(monomial_from_symbol(v, 3, q), space));
  CHECK((total - dense(wick_matrix(v.degrees(3, 3), space))).cwiseAbs().maxCoeff() < 1e-12);

  int violations = 0;
  for (int k = 0; k < 100; ++k) {
    const int n = 1 + static_cast<int>(rng() % 4);
    const int q = static_cast<int>(rng() % (n + 1));
    const Monomial m = monomial_from_symbol(oracle::random_symbol(rng, 2, n, k % 2 == 0), n, q);
    const VectorXc psi = oracle::random_vector(rng, space.dim()).normalized();
    const VectorXc phi = oracle::random_vector(rng, space.dim()).normalized();
    if (check_number_estimate(m, space, psi, phi).margin < -1e-10) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("Wick operators bounded by Gamma(sqrt 3)") {
  std::mt19937_64 rng(32);
  const FockSpace space({2, 10, 0.1});
  CHECK(check_estana_bound(Symbol(2, 3), space, space.vacuum()).margin == 0.0);
  const Symbol v = oracle::random_symbol(rng, 2, 4, true);
  const EstanaBound vac = check_estana_bound(v, space, space.vacuum());
  CHECK(std::abs(vac.margin - (v.norm() - scaled_symbol_vector(v, space).norm())) < 1e-12);
  CHECK(vac.margin >= 0.0);
  int violations = 0;
  for (int k = 0; k < 100; ++k) {
    const Symbol w = oracle::random_symbol(rng, 2, 1 + static_cast<int>(rng() % 4), true);
    const VectorXc psi = oracle::random_vector(rng, space.dim()).normalized();
    if (check_estana_bound(w, space, psi).margin < -1e-10) ++violations;
  }
  CHECK(violations == 0);
  CHECK_THROWS_AS(check_estana_bound(v, FockSpace({2, 4, 0.5}), FockSpace({2, 4, 0.5}).vacuum()), ValidationError);
}

TEST_CASE("symbol JSON round trip") {
  std::mt19937_64 rng(33);
  const Symbol v = oracle::random_symbol(rng, 2, 3, false);
  const Symbol back = symbol_from_json(symbol_to_json(v, {{"name", "random"}}));
  CHECK(back.n_top() == 3);
  CHECK((back.coeffs() - v.coeffs()).norm() == 0.0);
  nlohmann::json bad = {{"d", 2}, {"tensors", {{{"n", 2}, {"entries", {{{"m", {1, 0}}, {"re", 1.0}}}}}}}};
  CHECK_THROWS_AS(symbol_from_json(bad), ConfigError);
}

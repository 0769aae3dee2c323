#include "sclab/wick.hpp"

#include <cmath>
#include <functional>

#include <Eigen/SVD>

namespace sclab {

namespace {

using Triplet = Eigen::Triplet<Complex>;

// table[j][k] = u_j^k / sqrt(k!) for the real vector u = z + conj(z)
std::vector<std::vector<double>> monomial_table(const OneParticleVector& z, int top) {
  std::vector<std::vector<double>> table(z.size(), std::vector<double>(top + 1));
  for (Index j = 0; j < z.size(); ++j) {
    const double u = 2.0 * z[j].real();
    table[j][0] = 1.0;
    for (int k = 1; k <= top; ++k) table[j][k] = table[j][k - 1] * u / std::sqrt(static_cast<double>(k));
  }
  return table;
}

double monomial(const std::vector<std::vector<double>>& table, std::span<const int> m) {
  double r = 1.0;
  for (std::size_t j = 0; j < m.size(); ++j) r *= table[j][m[j]];
  return r;
}

void require_modes(const Symbol& v, Index n, const char* what) {
  if (n != v.modes()) {
    throw DimensionError(std::string(what) + ": vector has " + std::to_string(n) + " entries, symbol has " +
                         std::to_string(v.modes()) + " modes");
  }
}

// Calls fn(p) for every occupation p <= m componentwise.
void for_each_sub(std::span<const int> m, const std::function<void(const Occupation&)>& fn) {
  Occupation p(m.size(), 0);
  for (;;) {
    fn(p);
    std::size_t j = 0;
    while (j < m.size() && p[j] == m[j]) p[j++] = 0;
    if (j == m.size()) return;
    ++p[j];
  }
}

double factorial(int n) { return std::tgamma(n + 1.0); }

double binomial_real(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

}  // namespace

Complex eval_symbol(const Symbol& v, const OneParticleVector& z) {
  require_modes(v, z.size(), "eval_symbol");
  const auto table = monomial_table(z, v.n_top());
  const FockBasis& b = v.basis();
  Complex sum = 0.0;
  for (Index r = 0; r < b.dim(); ++r) {
    if (v.coeffs()[r] != Complex(0.0)) sum += v.coeffs()[r] * monomial(table, b.occupation(r));
  }
  return sum;
}

Complex eval_component(const Symbol& v, int n, const OneParticleVector& z) {
  require_modes(v, z.size(), "eval_component");
  if (n < 0 || n > v.n_top()) return 0.0;
  const auto table = monomial_table(z, v.n_top());
  const FockBasis& b = v.basis();
  Complex sum = 0.0;
  for (Index r = b.sector_begin(n); r < b.sector_end(n); ++r) sum += v.coeffs()[r] * monomial(table, b.occupation(r));
  return sum;
}

OneParticleVector grad_zbar(const Symbol& v, const OneParticleVector& phi) {
  require_modes(v, phi.size(), "grad_zbar");
  const auto table = monomial_table(phi, v.n_top());
  const FockBasis& b = v.basis();
  OneParticleVector g = OneParticleVector::Zero(v.modes());
  Occupation lower(v.modes());
  for (Index r = 0; r < b.dim(); ++r) {
    const Complex c = v.coeffs()[r];
    if (c == Complex(0.0)) continue;
    auto m = b.occupation(r);
    for (int j = 0; j < v.modes(); ++j) {
      if (m[j] == 0) continue;
      lower.assign(m.begin(), m.end());
      --lower[j];
      g[j] += c * std::sqrt(static_cast<double>(m[j])) * monomial(table, lower);
    }
  }
  return g;
}

Symbol translate_symbol(const Symbol& v, const OneParticleVector& phi) {
  require_modes(v, phi.size(), "translate_symbol");
  Symbol out(v.modes(), v.n_top());
  const FockBasis& b = v.basis();
  std::vector<double> u(v.modes());
  for (int j = 0; j < v.modes(); ++j) u[j] = 2.0 * phi[j].real();
  for (Index r = 0; r < b.dim(); ++r) {
    const Complex c = v.coeffs()[r];
    if (c == Complex(0.0)) continue;
    auto m = b.occupation(r);
    for_each_sub(m, [&](const Occupation& p) {
      // sqrt(m!/p!) / (m-p)! * u^{m-p}, multi-index
      double w = 1.0;
      for (int j = 0; j < v.modes(); ++j) {
        const int k = m[j] - p[j];
        w *= std::sqrt(factorial(m[j]) / factorial(p[j])) / factorial(k) * std::pow(u[j], k);
      }
      out.coeffs()[b.rank(p)] += c * w;
    });
  }
  return out;
}

Symbol quadratic_part(const Symbol& v, const OneParticleVector& phi) {
  if (v.n_top() < 2) return Symbol(v.modes(), 2);
  return translate_symbol(v, phi).degrees(2, 2).resized(2);
}

Symbol remainder_symbol(const Symbol& v, const OneParticleVector& phi) {
  return translate_symbol(v, phi).degrees(3, v.n_top());
}

MatrixXc quadratic_tensor(const Symbol& v) {
  const int d = v.modes();
  MatrixXc t = MatrixXc::Zero(d, d);
  if (v.n_top() < 2) return t;
  Occupation m(d, 0);
  for (int j = 0; j < d; ++j) {
    for (int k = j; k < d; ++k) {
      std::fill(m.begin(), m.end(), 0);
      ++m[j];
      ++m[k];
      const Complex c = v.coefficient(m);
      // full tensor entry = V_m sqrt(m!/2!)
      t(j, k) = t(k, j) = j == k ? c : c / std::sqrt(2.0);
    }
  }
  return t;
}

OmegaTerms omega_terms(const Symbol& v, const OneParticleVector& phi) {
  OmegaTerms o{0.0, 0.0};
  for (int k = 0; k <= v.n_top(); ++k) o.homogeneity += 0.5 * (k - 2) * eval_component(v, k, phi).real();
  o.legendre = inner(phi, grad_zbar(v, phi)).real() - eval_symbol(v, phi).real();
  return o;
}

double omega_integrand(const Symbol& v, const OneParticleVector& phi) {
  if (!v.is_real()) throw ValidationError("omega_integrand: symbol is not real");
  const OmegaTerms o = omega_terms(v, phi);
  double scale = 1.0;
  for (int k = 0; k <= v.n_top(); ++k) scale += k * std::abs(eval_component(v, k, phi));
  if (std::abs(o.homogeneity - o.legendre) > kOmegaConsistencyTolerance * scale) {
    throw ConsistencyError("omega_integrand: closed forms disagree (" + std::to_string(o.homogeneity) + " vs " +
                           std::to_string(o.legendre) + ")");
  }
  return o.homogeneity;
}

std::vector<WickTerm> wick_terms(const Symbol& v) {
  std::vector<WickTerm> terms;
  const FockBasis& b = v.basis();
  for (Index r = 0; r < b.dim(); ++r) {
    const Complex c = v.coeffs()[r];
    if (c == Complex(0.0)) continue;
    auto m = b.occupation(r);
    const double norm = std::sqrt(occupation_factorial(m));
    for_each_sub(m, [&](const Occupation& beta) {
      Occupation alpha(m.begin(), m.end());
      double mult = 1.0;
      for (std::size_t j = 0; j < alpha.size(); ++j) {
        mult *= binomial_real(m[j], beta[j]);
        alpha[j] -= beta[j];
      }
      terms.push_back({std::move(alpha), beta, c * mult / norm});
    });
  }
  return terms;
}

SparseOperator wick_matrix(const std::vector<WickTerm>& terms, const FockSpace& space, bool hermitian) {
  const FockBasis& b = space.basis();
  const int d = space.modes();
  const double eps = space.epsilon();
  std::vector<Triplet> trip;
  Occupation target(d);
  for (const WickTerm& term : terms) {
    if (static_cast<int>(term.creators.size()) != d || static_cast<int>(term.annihilators.size()) != d) {
      throw DimensionError("wick_matrix: term has the wrong number of modes");
    }
    int na = 0;
    int nb = 0;
    for (int j = 0; j < d; ++j) {
      na += term.creators[j];
      nb += term.annihilators[j];
    }
    const double scale = std::pow(eps, 0.5 * (na + nb));
    for (Index r = b.sector_begin(nb); r < b.dim(); ++r) {
      auto n = b.occupation(r);
      if (b.grade(r) - nb + na > b.nmax()) break;  // sectors are contiguous, later ones only grow
      double amp = 1.0;
      bool ok = true;
      for (int j = 0; j < d && ok; ++j) {
        const int k = n[j] - term.annihilators[j];
        if (k < 0) {
          ok = false;
          break;
        }
        double prod = 1.0;
        for (int i = k + 1; i <= n[j]; ++i) prod *= i;
        for (int i = k + 1; i <= k + term.creators[j]; ++i) prod *= i;
        amp *= std::sqrt(prod);
        target[j] = k + term.creators[j];
      }
      if (!ok) continue;
      trip.emplace_back(b.rank(target), r, term.coeff * scale * amp);
    }
  }
  SparseMatrixXc m(b.dim(), b.dim());
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  return make_operator(std::move(m), hermitian);
}

SparseOperator wick_matrix(const Symbol& v, const FockSpace& space) {
  if (v.modes() != space.modes()) throw DimensionError("wick_matrix: symbol and Fock space mode counts differ");
  return wick_matrix(wick_terms(v), space, v.is_real());
}

Monomial monomial_from_symbol(const Symbol& v, int n, int q) {
  if (n < 0 || q < 0 || q > n) throw DimensionError("monomial_from_symbol: need 0 <= q <= n");
  Monomial b;
  b.d = v.modes();
  b.q = q;
  b.p = n - q;
  const auto rows = occupations_of_grade(b.d, b.q);
  const auto cols = occupations_of_grade(b.d, b.p);
  b.btilde = MatrixXc::Zero(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  const double norm = std::sqrt(factorial(b.p) * factorial(b.q));
  Occupation sum(b.d);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < cols.size(); ++k) {
      double ratio = 1.0;
      for (int j = 0; j < b.d; ++j) {
        sum[j] = rows[i][j] + cols[k][j];
        ratio *= binomial_real(sum[j], rows[i][j]);
      }
      b.btilde(static_cast<Index>(i), static_cast<Index>(k)) = v.coefficient(sum) * std::sqrt(ratio) / norm;
    }
  }
  return b;
}

SparseOperator monomial_wick_matrix(const Monomial& b, const FockSpace& space) {
  if (b.d != space.modes()) throw DimensionError("monomial_wick_matrix: mode counts differ");
  const auto rows = occupations_of_grade(b.d, b.q);
  const auto cols = occupations_of_grade(b.d, b.p);
  if (b.btilde.rows() != static_cast<Index>(rows.size()) || b.btilde.cols() != static_cast<Index>(cols.size())) {
    throw DimensionError("monomial_wick_matrix: btilde has the wrong shape");
  }
  const double pq = factorial(b.p) * factorial(b.q);
  std::vector<WickTerm> terms;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const Complex c = b.btilde(static_cast<Index>(i), static_cast<Index>(k));
      if (c == Complex(0.0)) continue;
      const double w = std::sqrt(pq / (occupation_factorial(rows[i]) * occupation_factorial(cols[k])));
      terms.push_back({rows[i], cols[k], c * w});
    }
  }
  return wick_matrix(terms, space, false);
}

namespace {

VectorXc apply_number_weight(const FockSpace& space, const VectorXc& psi, double power) {
  // <N>^power with <N> = (1 + N^2)^{1/2} and N = eps * n on sector n
  VectorXc out = psi;
  const FockBasis& b = space.basis();
  for (int n = 0; n <= b.nmax(); ++n) {
    const double nn = space.epsilon() * n;
    out.segment(b.sector_begin(n), b.sector_size(n)) *= std::pow(1.0 + nn * nn, 0.5 * power);
  }
  return out;
}

}  // namespace

NumberEstimate check_number_estimate(const Monomial& b, const FockSpace& space, const VectorXc& psi,
                                     const VectorXc& phi) {
  if (psi.size() != space.dim() || phi.size() != space.dim()) {
    throw DimensionError("check_number_estimate: state dimension mismatch");
  }
  const SparseOperator op = monomial_wick_matrix(b, space);
  NumberEstimate e{};
  e.lhs = std::abs(psi.dot(op.matrix * phi));
  const double bnorm = b.btilde.size() == 0 ? 0.0 : Eigen::JacobiSVD<MatrixXc>(b.btilde).singularValues()[0];
  e.rhs = bnorm * apply_number_weight(space, psi, 0.5 * b.q).norm() * apply_number_weight(space, phi, 0.5 * b.p).norm();
  e.margin = e.rhs - e.lhs;
  return e;
}

EstanaBound check_estana_bound(const Symbol& v, const FockSpace& space, const VectorXc& psi) {
  if (space.epsilon() > 1.0 / 3.0) {
    throw ValidationError("check_estana_bound: precondition eps <= 1/3 violated");
  }
  if (psi.size() != space.dim()) throw DimensionError("check_estana_bound: state dimension mismatch");
  EstanaBound e{};
  e.lhs = (wick_matrix(v, space).matrix * psi).norm();
  e.rhs = v.norm() * apply_gamma_scalar(space, std::sqrt(3.0), psi).norm();
  e.margin = e.rhs - e.lhs;
  return e;
}

}  // namespace sclab

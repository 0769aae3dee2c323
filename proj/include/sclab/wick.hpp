#pragma once

#include <vector>

#include "sclab/fock.hpp"
#include "sclab/symbol.hpp"

namespace sclab {

// F_V(z) = sum_m V_m prod_j w_j^{m_j} / sqrt(m_j!), w = z + conj(z).
Complex eval_symbol(const Symbol& v, const OneParticleVector& z);

// Value of the degree-n part of F_V at z.
Complex eval_component(const Symbol& v, int n, const OneParticleVector& z);

/// d F_V / d zbar at phi, one coordinate per mode.
OneParticleVector grad_zbar(const Symbol& v, const OneParticleVector& phi);

/// Symbol of z -> F_V(z + phi); same top degree.
Symbol translate_symbol(const Symbol& v, const OneParticleVector& phi);

// Second-order part of F_V(. + phi) as a pure degree-2 symbol, so that
// F_{V_2}(z) = <(z + zbar)^{(x)2} / sqrt(2), V_2>.
Symbol quadratic_part(const Symbol& v, const OneParticleVector& phi);

// Degree >= 3 part of the translated symbol.
Symbol remainder_symbol(const Symbol& v, const OneParticleVector& phi);

// Full symmetric d x d tensor of the degree-2 component.
MatrixXc quadratic_tensor(const Symbol& v);

struct OmegaTerms {
  double homogeneity;  // sum_k (k-2)/2 <(phi+phibar)^k / sqrt(k!), V^(k)>
  double legendre;     // Re <phi, dF/dzbar(phi)> - F_V(phi)
};
OmegaTerms omega_terms(const Symbol& v, const OneParticleVector& phi);

inline constexpr double kOmegaConsistencyTolerance = 1e-10;

/// d omega / dt at phi; both closed forms are computed and must agree.
double omega_integrand(const Symbol& v, const OneParticleVector& phi);

// One normal-ordered product coeff * a*^alpha a^beta.
struct WickTerm {
  Occupation creators;
  Occupation annihilators;
  Complex coeff;
};

// Expansion of F_V^Wick into normal-ordered ladder monomials.
std::vector<WickTerm> wick_terms(const Symbol& v);

/// Sparse F_V^Wick on the truncated space with epsilon-scaled ladders.
SparseOperator wick_matrix(const Symbol& v, const FockSpace& space);
SparseOperator wick_matrix(const std::vector<WickTerm>& terms, const FockSpace& space, bool hermitian);

// Polynomial in P_{p,q}: b(z) = <z^{(x)q}, btilde z^{(x)p}> with btilde given
// between the occupation bases of the degree-p and degree-q sectors.
struct Monomial {
  int d = 1;
  int p = 0;
  int q = 0;
  MatrixXc btilde;  // rows: degree-q occupations, cols: degree-p occupations
};

// The (p, q) = (n - q, q) piece of the degree-n component of V.
Monomial monomial_from_symbol(const Symbol& v, int n, int q);

SparseOperator monomial_wick_matrix(const Monomial& b, const FockSpace& space);

struct NumberEstimate {
  double lhs;     // |<Psi, b^Wick Phi>|
  double rhs;     // |btilde| |<N>^{q/2} Psi| |<N>^{p/2} Phi|
  double margin;  // rhs - lhs
};

NumberEstimate check_number_estimate(const Monomial& b, const FockSpace& space, const VectorXc& psi,
                                     const VectorXc& phi);

struct EstanaBound {
  double lhs;  // |F_V^Wick Psi|
  double rhs;  // |V| |Gamma(sqrt 3) Psi|
  double margin;
};

// Requires epsilon <= 1/3.
EstanaBound check_estana_bound(const Symbol& v, const FockSpace& space, const VectorXc& psi);

}  // namespace sclab

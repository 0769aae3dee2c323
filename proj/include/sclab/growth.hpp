#pragma once

#include <string>

#include "sclab/fock.hpp"
#include "sclab/symbol.hpp"

namespace sclab {

// Domain parameters for e^{alpha Gamma(lambda)} and the auxiliary constants
// of the explicit error bound.
struct GrowthWeights {
  double alpha = 1.0;
  double lambda = 2.0;
  double alpha0 = 0.2;   // 0 < alpha0 lambda^2 < alpha
  double lambda0 = 1.5;  // 1 < lambda0 < lambda
  double lambda1 = 22.0; // > 8e, used by the entire-function estimate
};

// Throws ValidationError when the constants violate their constraints.
void validate(const GrowthWeights& w);

/// sqrt(sum_n e^{2 alpha lambda^n} |V^(n)|^2); DomainError when it overflows.
double weighted_norm(const Symbol& v, const GrowthWeights& w);

struct SeriesValue {
  double value = 0.0;
  int terms = 0;
};

// g_t(r) = sum_k e^{-alpha0 lambda^k} e^{2 sqrt2 lambda0^k I} (r+1)^k with
// I = int_0^t |V_2(s)| ds, and its r-derivative. Summation stops once a term
// is below 1e-16 of the running sum while the terms decrease; terms that
// overflow or keep growing raise DomainError.
SeriesValue g_series(double r, double v2_integral, const GrowthWeights& w);
SeriesValue g_series_derivative(double r, double v2_integral, const GrowthWeights& w);

// |sqrt(g(N/eps)) Psi| where N/eps acts as n on sector n.
double g_weighted_state_norm(const FockBasis& basis, const VectorXc& psi, double v2_integral,
                             const GrowthWeights& w);

// Terms of the entire-function estimate: the right-hand side with C = 1 and
// the empirical constant C needed to make it hold for this (V, Psi).
struct EntireEstimate {
  double lhs = 0.0;        // |F_V^Wick Psi|
  double leading = 0.0;    // 2 |Gamma(sqrt eps) V| |Psi|
  double weight = 0.0;     // (sum_n (lambda1 eps)^n / a_{n+2} |V^(n)|^2)^{1/2}, a_k = e^{-alpha0 lambda^k}
  double state = 0.0;      // |sqrt(S(N/eps)) Psi|
  double empirical_c = 0.0;
};
EntireEstimate entire_estimate(const Symbol& v, const FockSpace& space, const VectorXc& psi,
                               const GrowthWeights& w);

}  // namespace sclab

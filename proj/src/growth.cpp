#include "sclab/growth.hpp"

#include <cmath>
#include <limits>

#include "sclab/wick.hpp"

namespace sclab {

namespace {

constexpr double kLogMax = 700.0;
constexpr int kMaxTerms = 10000;

// Sum of exp(log_term(k)) over k >= 0 with the truncation rule described in the header.
template <typename LogTerm>
SeriesValue sum_log_series(LogTerm log_term, const char* what) {
  SeriesValue s;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 0; k < kMaxTerms; ++k) {
    const double lt = log_term(k);
    if (lt > kLogMax) {
      throw DomainError(std::string(what) + ": term " + std::to_string(k) + " overflows (log " +
                        std::to_string(lt) + "); bound not evaluable");
    }
    const double term = std::exp(lt);
    s.value += term;
    s.terms = k + 1;
    if (term <= 1e-16 * s.value && term <= prev && k > 0) return s;
    prev = term;
  }
  throw DomainError(std::string(what) + ": series did not settle within " + std::to_string(kMaxTerms) + " terms");
}

}  // namespace

void validate(const GrowthWeights& w) {
  if (!(w.alpha > 0.0)) throw ValidationError("growth weights: alpha must be > 0");
  if (!(w.lambda > 1.0)) throw ValidationError("growth weights: lambda must be > 1");
  if (!(w.lambda0 > 1.0 && w.lambda0 < w.lambda)) throw ValidationError("growth weights: need 1 < lambda0 < lambda");
  if (!(w.alpha0 > 0.0 && w.alpha0 * w.lambda * w.lambda < w.alpha)) {
    throw ValidationError("growth weights: need 0 < alpha0 lambda^2 < alpha");
  }
  if (!(w.lambda1 > 8.0 * std::exp(1.0))) throw ValidationError("growth weights: lambda1 must exceed 8e");
}

double weighted_norm(const Symbol& v, const GrowthWeights& w) {
  if (!(w.alpha > 0.0) || !(w.lambda > 1.0)) throw ValidationError("weighted_norm: need alpha > 0, lambda > 1");
  double sum = 0.0;
  for (int n = 0; n <= v.n_top(); ++n) {
    const double c = v.component_norm(n);
    if (c == 0.0) continue;
    const double log_term = 2.0 * w.alpha * std::pow(w.lambda, n) + 2.0 * std::log(c);
    if (log_term > kLogMax) {
      throw DomainError("weighted_norm: degree " + std::to_string(n) + " term overflows");
    }
    sum += std::exp(log_term);
  }
  return std::sqrt(sum);
}

SeriesValue g_series(double r, double v2_integral, const GrowthWeights& w) {
  const double lr = std::log(r + 1.0);
  return sum_log_series(
      [&](int k) {
        return -w.alpha0 * std::pow(w.lambda, k) + 2.0 * std::sqrt(2.0) * std::pow(w.lambda0, k) * v2_integral + k * lr;
      },
      "g_t");
}

SeriesValue g_series_derivative(double r, double v2_integral, const GrowthWeights& w) {
  const double lr = std::log(r + 1.0);
  SeriesValue s = sum_log_series(
      [&](int j) {
        const int k = j + 1;
        return -w.alpha0 * std::pow(w.lambda, k) + 2.0 * std::sqrt(2.0) * std::pow(w.lambda0, k) * v2_integral +
               std::log(static_cast<double>(k)) + (k - 1) * lr;
      },
      "g'_t");
  return s;
}

double g_weighted_state_norm(const FockBasis& basis, const VectorXc& psi, double v2_integral, const GrowthWeights& w) {
  const Eigen::VectorXd sectors = sector_weights(basis, psi);
  double sum = 0.0;
  for (int n = 0; n < sectors.size(); ++n) {
    if (sectors[n] == 0.0) continue;
    sum += g_series(static_cast<double>(n), v2_integral, w).value * sectors[n];
  }
  return std::sqrt(sum);
}

EntireEstimate entire_estimate(const Symbol& v, const FockSpace& space, const VectorXc& psi, const GrowthWeights& w) {
  EntireEstimate e;
  const double eps = space.epsilon();
  e.lhs = (wick_matrix(v, space).matrix * psi).norm();
  VectorXc scaled = VectorXc::Zero(v.coeffs().size());
  for (int n = 0; n <= v.n_top(); ++n) {
    const Index b = v.basis().sector_begin(n);
    scaled.segment(b, v.basis().sector_size(n)) = std::pow(std::sqrt(eps), n) * v.component(n);
  }
  e.leading = 2.0 * scaled.norm() * psi.norm();
  double weight = 0.0;
  for (int n = 0; n <= v.n_top(); ++n) {
    const double c = v.component_norm(n);
    if (c == 0.0) continue;
    weight += std::exp(n * std::log(w.lambda1 * eps) + w.alpha0 * std::pow(w.lambda, n + 2) + 2.0 * std::log(c));
  }
  e.weight = std::sqrt(weight);
  // S(x) = sum_k e^{-alpha0 lambda^k} x^k with x = n on sector n
  const Eigen::VectorXd sectors = sector_weights(space.basis(), psi);
  double state = 0.0;
  for (int n = 0; n < sectors.size(); ++n) {
    if (sectors[n] == 0.0) continue;
    const double x = static_cast<double>(n);
    const SeriesValue s = sum_log_series(
        [&](int k) { return -w.alpha0 * std::pow(w.lambda, k) + (x > 0.0 ? k * std::log(x) : (k == 0 ? 0.0 : -1e300)); },
        "S(N/eps)");
    state += s.value * sectors[n];
  }
  e.state = std::sqrt(state);
  const double excess = e.lhs - e.leading;
  e.empirical_c = excess <= 0.0 || e.weight * e.state == 0.0 ? 0.0 : excess / (e.weight * e.state);
  return e;
}

}  // namespace sclab

#pragma once

#include <vector>

#include "sclab/growth.hpp"
#include "sclab/symbol.hpp"

namespace sclab {

// Discretization of a one-dimensional P(phi)_2 interaction.
//
// The momentum grid must be symmetric (k and -k with equal weights); it
// defines a real basis in which the conjugation f(k) -> conj(f(-k)) acts
// entrywise: one mode for k = 0 and a cosine/sine pair for each k > 0.
struct PPhi2Grid {
  std::vector<double> k;
  std::vector<double> k_weights;
  std::vector<double> x;
  std::vector<double> x_weights;
  std::vector<double> g;  // cutoff samples g(x), even and nonnegative
};

// Number of modes the grid produces.
int pphi2_modes(const PPhi2Grid& grid);

// Real coordinates of e^{-ikx} / sqrt(omega(k)) (quadrature-weighted) in the mode basis.
OneParticleVector pphi2_vector(const PPhi2Grid& grid, double m0, double x);

// Free one-particle operator omega(k) = sqrt(m0^2 + k^2) in the mode basis.
MatrixXc pphi2_free_operator(const PPhi2Grid& grid, double m0);

/// V^(j) = sqrt(j!) alpha_j sum_x dx g(x) v_x^{(x)j} in occupation coordinates.
Symbol build_pphi2(const std::vector<double>& alphas, double m0, const PPhi2Grid& grid);

struct DomainReport {
  std::vector<double> terms;  // a_m^2 e^{2 alpha lambda^m} |phi|^{2m}, m = 0..2 n_cut
  double weighted_norm = 0.0;
};

struct EntireSymbol {
  Symbol symbol;
  DomainReport report;
};

/// V = (+)_n a_{2n} phi^{(x)2n} for n <= n_cut. DomainError when the weighted
/// terms are not decreasing at the cut.
EntireSymbol build_entire(const std::vector<double>& a, const OneParticleVector& phi, const GrowthWeights& w,
                          int n_cut);

}  // namespace sclab

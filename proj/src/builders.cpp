#include "sclab/builders.hpp"

#include <cmath>
#include <sstream>

namespace sclab {

namespace {

constexpr double kGridTolerance = 1e-12;

double factorial(int n) { return std::tgamma(n + 1.0); }

void validate_grid(const PPhi2Grid& grid) {
  if (grid.k.empty() || grid.k.size() != grid.k_weights.size()) {
    throw ValidationError("pphi2 grid: k points and weights must be non-empty and of equal length");
  }
  if (grid.x.empty() || grid.x.size() != grid.x_weights.size() || grid.x.size() != grid.g.size()) {
    throw ValidationError("pphi2 grid: x points, weights and cutoff samples must have equal length");
  }
  const auto find = [](const std::vector<double>& pts, double v) -> long {
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (std::abs(pts[i] - v) < kGridTolerance) return static_cast<long>(i);
    return -1;
  };
  for (std::size_t i = 0; i < grid.k.size(); ++i) {
    const long j = find(grid.k, -grid.k[i]);
    if (j < 0 || std::abs(grid.k_weights[i] - grid.k_weights[j]) > kGridTolerance) {
      throw ValidationError("pphi2 grid: momentum grid is not symmetric under k -> -k");
    }
  }
  for (std::size_t i = 0; i < grid.x.size(); ++i) {
    const long j = find(grid.x, -grid.x[i]);
    if (j < 0 || std::abs(grid.g[i] - grid.g[j]) > kGridTolerance ||
        std::abs(grid.x_weights[i] - grid.x_weights[j]) > kGridTolerance) {
      throw ValidationError("pphi2 grid: cutoff g is not even on a symmetric x grid");
    }
    if (grid.g[i] < 0.0) throw ValidationError("pphi2 grid: cutoff g must be nonnegative");
  }
}

// Nonnegative momenta in grid order, each listed once.
std::vector<std::size_t> representatives(const PPhi2Grid& grid) {
  std::vector<std::size_t> reps;
  for (std::size_t i = 0; i < grid.k.size(); ++i) {
    if (grid.k[i] >= -kGridTolerance) reps.push_back(i);
  }
  return reps;
}

}  // namespace

int pphi2_modes(const PPhi2Grid& grid) {
  int d = 0;
  for (std::size_t i : representatives(grid)) d += std::abs(grid.k[i]) < kGridTolerance ? 1 : 2;
  return d;
}

OneParticleVector pphi2_vector(const PPhi2Grid& grid, double m0, double x) {
  OneParticleVector v(pphi2_modes(grid));
  int j = 0;
  for (std::size_t i : representatives(grid)) {
    const double k = grid.k[i];
    const double scale = std::sqrt(grid.k_weights[i]) / std::sqrt(std::sqrt(m0 * m0 + k * k));
    if (std::abs(k) < kGridTolerance) {
      v[j++] = scale;
    } else {
      v[j++] = std::sqrt(2.0) * scale * std::cos(k * x);
      v[j++] = -std::sqrt(2.0) * scale * std::sin(k * x);
    }
  }
  return v;
}

MatrixXc pphi2_free_operator(const PPhi2Grid& grid, double m0) {
  const int d = pphi2_modes(grid);
  MatrixXc a = MatrixXc::Zero(d, d);
  int j = 0;
  for (std::size_t i : representatives(grid)) {
    const double w = std::sqrt(m0 * m0 + grid.k[i] * grid.k[i]);
    a(j, j) = w;
    ++j;
    if (std::abs(grid.k[i]) >= kGridTolerance) {
      a(j, j) = w;
      ++j;
    }
  }
  return a;
}

Symbol build_pphi2(const std::vector<double>& alphas, double m0, const PPhi2Grid& grid) {
  if (alphas.empty() || (alphas.size() - 1) % 2 != 0 || !(alphas.back() > 0.0)) {
    throw ValidationError("build_pphi2: need an even-degree polynomial with positive leading coefficient");
  }
  if (!(m0 > 0.0)) throw ValidationError("build_pphi2: mass must be positive");
  validate_grid(grid);
  const int d = pphi2_modes(grid);
  const int n_top = static_cast<int>(alphas.size()) - 1;
  Symbol v(d, n_top);
  const FockBasis& b = v.basis();
  for (std::size_t ix = 0; ix < grid.x.size(); ++ix) {
    const double weight = grid.x_weights[ix] * grid.g[ix];
    if (weight == 0.0) continue;
    const OneParticleVector vx = pphi2_vector(grid, m0, grid.x[ix]);
    for (Index r = 0; r < b.dim(); ++r) {
      const int j = b.grade(r);
      if (alphas[j] == 0.0) continue;
      auto m = b.occupation(r);
      // component of v^{(x)j} along |m> is sqrt(j!/m!) v^m
      double mono = 1.0;
      for (int q = 0; q < d; ++q) mono *= std::pow(vx[q].real(), m[q]);
      const double along = std::sqrt(factorial(j) / occupation_factorial(m)) * mono;
      v.coeffs()[r] += std::sqrt(factorial(j)) * alphas[j] * weight * along;
    }
  }
  return v;
}

EntireSymbol build_entire(const std::vector<double>& a, const OneParticleVector& phi, const GrowthWeights& w,
                          int n_cut) {
  if (n_cut < 0) throw ValidationError("build_entire: n_cut must be >= 0");
  for (double x : a) {
    if (x < 0.0) throw ValidationError("build_entire: coefficients must be nonnegative");
  }
  const int top = 2 * n_cut;
  const double norm = phi.norm();
  DomainReport report;
  for (int m = 0; m <= top; ++m) {
    const double am = m < static_cast<int>(a.size()) && m % 2 == 0 ? a[m] : 0.0;
    const double log_term = 2.0 * w.alpha * std::pow(w.lambda, m) + (am > 0.0 ? 2.0 * std::log(am) : -INFINITY) +
                            (norm > 0.0 ? 2.0 * m * std::log(norm) : (m == 0 ? 0.0 : -INFINITY));
    report.terms.push_back(std::exp(log_term));
  }
  // decreasing at the cut: compare the last two even-degree terms
  if (top >= 2 && report.terms[top] > 0.0 && report.terms[top] >= report.terms[top - 2]) {
    std::ostringstream os;
    os << "build_entire: weighted terms grow at the cut (degree " << top - 2 << ": " << report.terms[top - 2]
       << ", degree " << top << ": " << report.terms[top] << ")";
    throw DomainError(os.str());
  }
  const int d = static_cast<int>(phi.size());
  Symbol v(d, top);
  const FockBasis& b = v.basis();
  for (Index r = 0; r < b.dim(); ++r) {
    const int n = b.grade(r);
    if (n % 2 != 0 || n >= static_cast<int>(a.size()) || a[n] == 0.0) continue;
    auto m = b.occupation(r);
    Complex mono = 1.0;
    for (int q = 0; q < d; ++q)
      for (int e = 0; e < m[q]; ++e) mono *= phi[q];
    v.coeffs()[r] = a[n] * std::sqrt(factorial(n) / occupation_factorial(m)) * mono;
  }
  double sum = 0.0;
  for (double t : report.terms) sum += t;
  report.weighted_norm = std::sqrt(sum);
  return {std::move(v), std::move(report)};
}

}  // namespace sclab

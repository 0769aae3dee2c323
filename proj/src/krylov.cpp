#include "sclab/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Eigenvalues>

namespace sclab {

namespace {

struct LanczosBasis {
  std::vector<VectorXc> v;
  std::vector<double> alpha;
  std::vector<double> beta;  // beta[k] couples v[k] and v[k+1]
  double residual = 0.0;     // beta after the last vector
  bool breakdown = false;
};

LanczosBasis lanczos(const HermitianApply& h, const VectorXc& start, int max_dim, int& matvecs) {
  LanczosBasis b;
  const double norm0 = start.norm();
  b.v.push_back(start / norm0);
  VectorXc w(start.size());
  // a Krylov space cannot outgrow the ambient dimension
  const int cap = static_cast<int>(std::min<Index>(max_dim, start.size()));
  double scale = 0.0;
  for (int k = 0; k < cap; ++k) {
    h(b.v[k], w);
    ++matvecs;
    const double a = b.v[k].dot(w).real();
    b.alpha.push_back(a);
    // full reorthogonalization, twice for stability
    for (int pass = 0; pass < 2; ++pass) {
      for (const VectorXc& q : b.v) w -= q * q.dot(w);
    }
    const double beta = w.norm();
    scale = std::max({scale, std::abs(a), beta});
    if (beta <= 1e-12 * std::max(1.0, scale) || k + 1 == start.size()) {
      b.breakdown = true;
      b.residual = 0.0;
      return b;
    }
    if (k + 1 == cap) {
      b.residual = beta;
      b.v.push_back(w / beta);
      return b;
    }
    b.beta.push_back(beta);
    b.v.push_back(w / beta);
  }
  return b;
}

}  // namespace

VectorXc expm_multiply(const HermitianApply& h, const VectorXc& psi, double tau,
                       const KrylovOptions& opts, KrylovStats* stats) {
  KrylovStats local;
  KrylovStats& st = stats ? *stats : local;
  VectorXc y = psi;
  const double norm = psi.norm();
  if (norm == 0.0 || tau == 0.0) return y;
  const double total = std::abs(tau);
  const double sign = tau > 0 ? 1.0 : -1.0;
  double done = 0.0;
  double step = total;
  while (done < total) {
    const LanczosBasis b = lanczos(h, y, opts.max_dim, st.matvecs);
    const int m = static_cast<int>(b.alpha.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (int k = 0; k < m; ++k) t(k, k) = b.alpha[k];
    for (int k = 0; k + 1 < m; ++k) t(k, k + 1) = t(k + 1, k) = b.beta[k];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(t);
    const Eigen::VectorXd& lam = eig.eigenvalues();
    const Eigen::MatrixXd& q = eig.eigenvectors();
    const double remaining = total - done;
    double h_try = b.breakdown ? remaining : std::min(step, remaining);
    const double spread = lam[m - 1] - lam[0];
    if (!b.breakdown && spread > 0.0) h_try = std::min(h_try, m / spread);
    bool shortened = false;
    VectorXc coeffs;
    for (;;) {
      VectorXc phases(m);
      for (int k = 0; k < m; ++k) phases[k] = std::exp(Complex(0.0, -sign * h_try * lam[k])) * q(0, k);
      coeffs = q.cast<Complex>() * phases;
      const double err = b.breakdown ? 0.0 : b.residual * std::abs(coeffs[m - 1]) * norm;
      // the estimate bottoms out at roundoff in the last coefficient times the residual
      const double floor = 8.0 * m * std::numeric_limits<double>::epsilon() * (1.0 + b.residual) * norm;
      if (err <= opts.tol * h_try / total || err <= floor || h_try < 1e-14 * total) {
        st.error_estimate += err;
        break;
      }
      ++st.rejected;
      shortened = true;
      h_try *= 0.5;
    }
    const double cur = y.norm();
    y.setZero();
    for (int k = 0; k < m; ++k) y += coeffs[k] * b.v[k];
    y *= cur;
    done += h_try;
    ++st.steps;
    step = shortened ? h_try : 1.5 * h_try;
    if (st.steps > 1000000) throw IntegrationError("expm_multiply: step size collapsed");
  }
  return y;
}

VectorXc expm_multiply(const SparseMatrixXc& h, const VectorXc& psi, double tau,
                       const KrylovOptions& opts, KrylovStats* stats) {
  if (h.rows() != psi.size() || h.cols() != psi.size()) {
    throw DimensionError("expm_multiply: operator and vector dimensions differ");
  }
  const HermitianApply apply = [&h](const VectorXc& x, VectorXc& y) { y.noalias() = h * x; };
  return expm_multiply(apply, psi, tau, opts, stats);
}

double gershgorin_radius(const SparseMatrixXc& h) {
  double r = 0.0;
  for (Index i = 0; i < h.outerSize(); ++i) {
    double row = 0.0;
    for (SparseMatrixXc::InnerIterator it(h, i); it; ++it) row += std::abs(it.value());
    r = std::max(r, row);
  }
  return r;
}

double gershgorin_floor(const SparseMatrixXc& h) {
  double floor = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < h.outerSize(); ++i) {
    double diag = 0.0;
    double off = 0.0;
    for (SparseMatrixXc::InnerIterator it(h, i); it; ++it) {
      if (it.col() == i) {
        diag = it.value().real();
      } else {
        off += std::abs(it.value());
      }
    }
    floor = std::min(floor, diag - off);
  }
  return h.rows() == 0 ? 0.0 : floor;
}

}  // namespace sclab

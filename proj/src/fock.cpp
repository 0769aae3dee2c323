#include "sclab/fock.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <vector>

#include <Eigen/Eigenvalues>

namespace sclab {

namespace {

using Triplet = Eigen::Triplet<Complex>;

SparseMatrixXc from_triplets(Index dim, const std::vector<Triplet>& t) {
  SparseMatrixXc m(dim, dim);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

void require_modes(const FockSpace& space, Index n, const char* what) {
  if (n != space.modes()) {
    throw DimensionError(std::string(what) + ": one-particle vector has " + std::to_string(n) +
                         " entries, space has " + std::to_string(space.modes()) + " modes");
  }
}

}  // namespace

FockSpace::FockSpace(const FockParams& params, std::size_t budget) : params_(params) {
  if (params.d < 1) throw DimensionError("FockParams: d must be >= 1");
  if (params.nmax < 0) throw DimensionError("FockParams: nmax must be >= 0");
  if (!(params.epsilon > 0.0)) throw ValidationError("FockParams: epsilon must be > 0");
  basis_ = std::make_shared<const FockBasis>(params.d, params.nmax, budget);
}

VectorXc FockSpace::vacuum() const {
  VectorXc v = VectorXc::Zero(dim());
  v[0] = 1.0;
  return v;
}

VectorXc FockSpace::basis_state(const Occupation& m) const {
  const Index r = basis_->rank(m);
  if (r < 0) throw DimensionError("basis_state: occupation outside the truncation");
  VectorXc v = VectorXc::Zero(dim());
  v[r] = 1.0;
  return v;
}

double hermiticity_defect(const SparseMatrixXc& m) {
  const SparseMatrixXc diff = m - SparseMatrixXc(m.adjoint());
  double worst = 0.0;
  for (Index i = 0; i < diff.outerSize(); ++i) {
    for (SparseMatrixXc::InnerIterator it(diff, i); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  return worst;
}

SparseOperator make_operator(SparseMatrixXc m, bool claim_hermitian) {
  SparseOperator op{std::move(m), false};
  if (claim_hermitian) op.hermitian = hermiticity_defect(op.matrix) < kHermitianTolerance;
  return op;
}

SparseOperator ladder(const FockSpace& space, int j, Ladder kind) {
  if (j < 0 || j >= space.modes()) throw DimensionError("ladder: mode index out of range");
  const FockBasis& b = space.basis();
  const double eps = space.epsilon();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(b.dim()));
  for (Index r = 0; r < b.dim(); ++r) {
    const int mj = b.occupation(r)[j];
    if (kind == Ladder::create) {
      const Index to = b.shifted(r, j, +1);
      if (to >= 0) t.emplace_back(to, r, std::sqrt(eps * (mj + 1)));
    } else if (mj > 0) {
      t.emplace_back(b.shifted(r, j, -1), r, std::sqrt(eps * mj));
    }
  }
  return {from_triplets(b.dim(), t), false};
}

SparseOperator creation(const FockSpace& space, const OneParticleVector& f) {
  require_modes(space, f.size(), "creation");
  SparseMatrixXc m(space.dim(), space.dim());
  for (int j = 0; j < space.modes(); ++j) {
    if (f[j] != Complex(0.0)) m += f[j] * ladder(space, j, Ladder::create).matrix;
  }
  m.makeCompressed();
  return {std::move(m), false};
}

SparseOperator annihilation(const FockSpace& space, const OneParticleVector& f) {
  require_modes(space, f.size(), "annihilation");
  SparseMatrixXc m(space.dim(), space.dim());
  for (int j = 0; j < space.modes(); ++j) {
    if (f[j] != Complex(0.0)) m += std::conj(f[j]) * ladder(space, j, Ladder::annihilate).matrix;
  }
  m.makeCompressed();
  return {std::move(m), false};
}

SparseOperator dgamma(const FockSpace& space, const MatrixXc& a) {
  const int d = space.modes();
  if (a.rows() != d || a.cols() != d) throw DimensionError("dgamma: A has the wrong shape");
  const FockBasis& b = space.basis();
  const double eps = space.epsilon();
  std::vector<Triplet> t;
  for (Index r = 0; r < b.dim(); ++r) {
    auto m = b.occupation(r);
    Complex diag = 0.0;
    for (int j = 0; j < d; ++j) diag += a(j, j) * static_cast<double>(m[j]);
    if (diag != Complex(0.0)) t.emplace_back(r, r, eps * diag);
    for (int k = 0; k < d; ++k) {
      if (m[k] == 0) continue;
      const Index mid = b.shifted(r, k, -1);
      for (int j = 0; j < d; ++j) {
        if (j == k || a(j, k) == Complex(0.0)) continue;
        const Index to = b.shifted(mid, j, +1);
        t.emplace_back(to, r, eps * a(j, k) * std::sqrt(static_cast<double>(m[k]) * (m[j] + 1)));
      }
    }
  }
  return make_operator(from_triplets(b.dim(), t), true);
}

SparseOperator number_operator(const FockSpace& space) {
  return dgamma(space, MatrixXc::Identity(space.modes(), space.modes()));
}

SparseOperator segal_field(const FockSpace& space, const OneParticleVector& f) {
  SparseMatrixXc m = (creation(space, f).matrix + annihilation(space, f).matrix) * (1.0 / std::sqrt(2.0));
  m.makeCompressed();
  return {std::move(m), true};
}

MatrixXc weyl(const FockSpace& space, const OneParticleVector& f) {
  if (space.dim() > kDenseWeylLimit) {
    throw CapacityError("weyl: dense Weyl operator requested for dim " + std::to_string(space.dim()) +
                        "; use apply_weyl");
  }
  const MatrixXc phi = MatrixXc(segal_field(space, f).matrix);
  Eigen::SelfAdjointEigenSolver<MatrixXc> eig(phi);
  const VectorXc phases = (kI * eig.eigenvalues().cast<Complex>()).array().exp();
  return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

VectorXc apply_weyl(const FockSpace& space, const OneParticleVector& f, const VectorXc& psi, double tol) {
  if (psi.size() != space.dim()) throw DimensionError("apply_weyl: state dimension mismatch");
  if (f.isZero(0.0)) return psi;
  const SparseOperator phi = segal_field(space, f);
  KrylovOptions opts;
  opts.tol = tol;
  return expm_multiply(phi.matrix, psi, -1.0, opts);
}

OneParticleVector coherent_weyl_argument(const OneParticleVector& z, double epsilon) {
  return Complex(0.0, -std::sqrt(2.0) / epsilon) * z;
}

double poisson_tail(double lambda, int nmax) {
  if (lambda < 0.0) throw ValidationError("poisson_tail: negative mean");
  if (lambda == 0.0) return 0.0;
  double sum = 0.0;
  for (int n = nmax + 1;; ++n) {
    const double term = std::exp(-lambda + n * std::log(lambda) - std::lgamma(n + 1.0));
    sum += term;
    if (n > lambda && term <= 1e-18 * sum) break;
    if (n > nmax + 100000) break;
  }
  return std::min(sum, 1.0);
}

double coherent_tail(const OneParticleVector& z, const FockParams& params) {
  return poisson_tail(z.squaredNorm() / params.epsilon, params.nmax);
}

int required_nmax(double lambda, double threshold) {
  int n = static_cast<int>(std::floor(lambda));
  while (poisson_tail(lambda, n) > threshold) ++n;
  // walk back down in case lambda already sits above the answer
  while (n > 0 && poisson_tail(lambda, n - 1) <= threshold) --n;
  return std::max(n, 1);
}

VectorXc coherent(const FockSpace& space, const OneParticleVector& z, double tail_threshold) {
  require_modes(space, z.size(), "coherent");
  const double eps = space.epsilon();
  const double tail = coherent_tail(z, space.params());
  if (tail > tail_threshold) {
    const int need = required_nmax(z.squaredNorm() / eps, tail_threshold);
    throw TruncationError("coherent: tail mass " + std::to_string(tail) + " above threshold; nmax " +
                              std::to_string(need) + " required",
                          need);
  }
  const FockBasis& b = space.basis();
  const int d = space.modes();
  const int nmax = space.nmax();
  // powers[j][k] = (z_j / sqrt(eps))^k / sqrt(k!)
  std::vector<std::vector<Complex>> powers(d, std::vector<Complex>(nmax + 1));
  for (int j = 0; j < d; ++j) {
    const Complex w = z[j] / std::sqrt(eps);
    powers[j][0] = 1.0;
    for (int k = 1; k <= nmax; ++k) powers[j][k] = powers[j][k - 1] * w / std::sqrt(static_cast<double>(k));
  }
  const double prefactor = std::exp(-z.squaredNorm() / (2.0 * eps));
  VectorXc psi(b.dim());
  for (Index r = 0; r < b.dim(); ++r) {
    auto m = b.occupation(r);
    Complex c = prefactor;
    for (int j = 0; j < d; ++j) c *= powers[j][m[j]];
    psi[r] = c;
  }
  return psi;
}

SparseOperator gamma_scalar(const FockSpace& space, double c) {
  if (!(c > 0.0)) throw ValidationError("gamma_scalar: c must be positive");
  const double top = space.nmax() * std::log(c);
  if (std::abs(top) > 700.0) {
    throw RangeError("gamma_scalar: c^nmax out of double range");
  }
  const FockBasis& b = space.basis();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(b.dim()));
  for (Index r = 0; r < b.dim(); ++r) t.emplace_back(r, r, std::pow(c, b.grade(r)));
  return {from_triplets(b.dim(), t), true};
}

VectorXc apply_gamma_scalar(const FockSpace& space, double c, const VectorXc& psi) {
  if (psi.size() != space.dim()) throw DimensionError("apply_gamma_scalar: state dimension mismatch");
  if (std::abs(space.nmax() * std::log(c)) > 700.0) throw RangeError("apply_gamma_scalar: c^nmax out of range");
  VectorXc out = psi;
  const FockBasis& b = space.basis();
  for (int n = 0; n <= b.nmax(); ++n) {
    out.segment(b.sector_begin(n), b.sector_size(n)) *= std::pow(c, n);
  }
  return out;
}

Eigen::VectorXd sector_weights(const FockBasis& basis, const VectorXc& psi) {
  if (psi.size() != basis.dim()) throw DimensionError("sector_weights: state dimension mismatch");
  Eigen::VectorXd w(basis.nmax() + 1);
  for (int n = 0; n <= basis.nmax(); ++n) {
    w[n] = psi.segment(basis.sector_begin(n), basis.sector_size(n)).squaredNorm();
  }
  return w;
}

double top_sector_mass(const FockBasis& basis, const VectorXc& psi, int count) {
  if (psi.size() != basis.dim()) throw DimensionError("top_sector_mass: state dimension mismatch");
  const int first = std::max(0, basis.nmax() - count + 1);
  const Index begin = basis.sector_begin(first);
  return psi.segment(begin, basis.dim() - begin).squaredNorm();
}

VectorXc embed(const VectorXc& psi, const FockBasis& to) {
  VectorXc out = VectorXc::Zero(to.dim());
  const Index common = std::min(psi.size(), to.dim());
  out.head(common) = psi.head(common);
  return out;
}

namespace {

template <typename T>
void put_le(std::ostream& os, T value) {
  static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
  unsigned char bytes[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw DimensionError("read_fock_vector: truncated input");
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void write_fock_vector(std::ostream& os, const VectorXc& v) {
  put_le<std::uint64_t>(os, static_cast<std::uint64_t>(v.size()));
  for (Index i = 0; i < v.size(); ++i) {
    put_le<double>(os, v[i].real());
    put_le<double>(os, v[i].imag());
  }
}

VectorXc read_fock_vector(std::istream& is) {
  const auto dim = get_le<std::uint64_t>(is);
  VectorXc v(static_cast<Index>(dim));
  for (Index i = 0; i < v.size(); ++i) {
    const double re = get_le<double>(is);
    const double im = get_le<double>(is);
    v[i] = Complex(re, im);
  }
  return v;
}

}  // namespace sclab

#include "sclab/fock_basis.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace sclab {

std::uint64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    if (r > std::numeric_limits<std::uint64_t>::max()) {
      throw CapacityError("binomial coefficient overflows 64 bits");
    }
  }
  return static_cast<std::uint64_t>(r);
}

std::uint64_t fock_dimension(int d, int nmax) {
  if (d < 1) throw DimensionError("fock_dimension: d must be >= 1");
  if (nmax < 0) throw DimensionError("fock_dimension: nmax must be >= 0");
  return binomial(nmax + d, d);
}

namespace {

// Recursively fill occupations of grade n in ascending lex order.
void fill_grade(int d, int n, int pos, Occupation& cur, std::vector<int>& out) {
  if (pos == d - 1) {
    cur[pos] = n;
    out.insert(out.end(), cur.begin(), cur.end());
    return;
  }
  for (int v = 0; v <= n; ++v) {
    cur[pos] = v;
    fill_grade(d, n - v, pos + 1, cur, out);
  }
}

}  // namespace

FockBasis::FockBasis(int d, int nmax, std::size_t budget) : d_(d), nmax_(nmax) {
  const std::uint64_t dim = fock_dimension(d, nmax);
  if (dim > budget) {
    throw CapacityError("Fock space with d=" + std::to_string(d) + ", nmax=" + std::to_string(nmax) +
                        " has " + std::to_string(dim) + " states, budget is " + std::to_string(budget));
  }
  dim_ = static_cast<Index>(dim);
  occ_.reserve(static_cast<std::size_t>(dim) * d);
  grade_.reserve(static_cast<std::size_t>(dim));
  Occupation cur(d, 0);
  for (int n = 0; n <= nmax; ++n) {
    const std::size_t before = occ_.size() / d;
    fill_grade(d, n, 0, cur, occ_);
    grade_.insert(grade_.end(), occ_.size() / d - before, n);
  }
  tail_count_.assign(d + 1, std::vector<std::uint64_t>(nmax + 1, 0));
  for (int k = 0; k <= d; ++k) {
    for (int r = 0; r <= nmax; ++r) {
      tail_count_[k][r] = k == 0 ? (r == 0 ? 1 : 0) : binomial(r + k - 1, k - 1);
    }
  }
}

Index FockBasis::sector_begin(int n) const {
  if (n <= 0) return 0;
  if (n > nmax_) return dim_;
  return static_cast<Index>(binomial(n - 1 + d_, d_));
}

Index FockBasis::rank(std::span<const int> m) const {
  if (static_cast<int>(m.size()) != d_) {
    throw DimensionError("FockBasis::rank: occupation has " + std::to_string(m.size()) +
                         " modes, expected " + std::to_string(d_));
  }
  int n = 0;
  for (int v : m) {
    if (v < 0) throw DimensionError("FockBasis::rank: negative occupation");
    n += v;
  }
  if (n > nmax_) return -1;
  std::uint64_t r = 0;
  int rem = n;
  for (int j = 0; j < d_ - 1; ++j) {
    const int parts = d_ - j - 1;
    for (int v = 0; v < m[j]; ++v) r += tail_count_[parts][rem - v];
    rem -= m[j];
  }
  return sector_begin(n) + static_cast<Index>(r);
}

Index FockBasis::shifted(Index from, int j, int sign) const {
  auto m = occupation(from);
  const int target = m[j] + sign;
  if (target < 0) return -1;
  const int n = grade(from) + sign;
  if (n > nmax_) return -1;
  Occupation tmp(m.begin(), m.end());
  tmp[j] = target;
  return rank(tmp);
}

std::vector<Occupation> FockBasis::enumerate() const {
  std::vector<Occupation> out;
  out.reserve(static_cast<std::size_t>(dim_));
  for (Index r = 0; r < dim_; ++r) {
    auto m = occupation(r);
    out.emplace_back(m.begin(), m.end());
  }
  return out;
}

std::vector<Occupation> occupations_of_grade(int d, int n) {
  if (d < 1 || n < 0) throw DimensionError("occupations_of_grade: invalid arguments");
  std::vector<int> flat;
  Occupation cur(d, 0);
  fill_grade(d, n, 0, cur, flat);
  std::vector<Occupation> out;
  for (std::size_t i = 0; i < flat.size(); i += d) {
    out.emplace_back(flat.begin() + static_cast<std::ptrdiff_t>(i),
                     flat.begin() + static_cast<std::ptrdiff_t>(i + d));
  }
  return out;
}

double occupation_factorial(std::span<const int> m) {
  double f = 1.0;
  for (int v : m) f *= std::tgamma(v + 1.0);
  return f;
}

}  // namespace sclab

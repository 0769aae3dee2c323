#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sclab/core.hpp"

namespace sclab {

using Occupation = std::vector<int>;

// Default ceiling on the number of basis states a single Fock space may hold.
inline constexpr std::size_t kDefaultBasisBudget = 20'000'000;

// binomial(n, k) in 64-bit; throws CapacityError on overflow.
std::uint64_t binomial(int n, int k);

// Number of occupations over d modes with total particle number <= nmax.
std::uint64_t fock_dimension(int d, int nmax);

// Occupation-number basis of the truncated symmetric Fock space.
//
// States are ordered by total particle number (grade); within a grade they
// are in ascending lexicographic order with the first mode most
// significant. Each sector is therefore a contiguous slice and the basis
// for nmax is a prefix of the basis for any larger cutoff.
class FockBasis {
 public:
  FockBasis(int d, int nmax, std::size_t budget = kDefaultBasisBudget);

  int modes() const noexcept { return d_; }
  int nmax() const noexcept { return nmax_; }
  Index dim() const noexcept { return dim_; }

  // Occupation of the state with the given rank.
  std::span<const int> occupation(Index rank) const {
    return {occ_.data() + static_cast<std::size_t>(rank) * d_, static_cast<std::size_t>(d_)};
  }
  int grade(Index rank) const noexcept { return grade_[static_cast<std::size_t>(rank)]; }

  // First rank of sector n; sector n occupies [sector_begin(n), sector_begin(n+1)).
  Index sector_begin(int n) const;
  Index sector_end(int n) const { return sector_begin(n + 1); }
  Index sector_size(int n) const { return sector_end(n) - sector_begin(n); }

  // Rank of an occupation, or -1 if it lies outside the truncation.
  Index rank(std::span<const int> m) const;
  Index rank(const Occupation& m) const { return rank(std::span<const int>(m)); }

  // Rank of m + delta_j (or m - delta_j with sign -1) for the state at `from`, -1 when outside.
  Index shifted(Index from, int j, int sign) const;

  std::vector<Occupation> enumerate() const;

 private:
  int d_;
  int nmax_;
  Index dim_;
  std::vector<int> occ_;
  std::vector<int> grade_;
  // tail_count_[k][r]: compositions of r into k nonnegative parts, k = 0..d
  std::vector<std::vector<std::uint64_t>> tail_count_;
};

// Occupations over d modes with exact total n, in the basis order.
std::vector<Occupation> occupations_of_grade(int d, int n);

// Multi-index factorial prod_j m_j!.
double occupation_factorial(std::span<const int> m);

}  // namespace sclab

#pragma once

#include <iosfwd>
#include <memory>
#include <string>

#include <json.hpp>

#include "sclab/fock_basis.hpp"

namespace sclab {

inline constexpr double kRealSymbolTolerance = 1e-14;

// V = (+)_n V^(n) with finitely many components, stored as one coefficient
// vector over the occupation basis of degree <= n_top. The coefficient at
// occupation m is the component of V^(|m|) along the normalized symmetric
// basis vector labelled by m.
class Symbol {
 public:
  Symbol(int d, int n_top);
  Symbol(int d, int n_top, VectorXc coeffs);

  int modes() const noexcept { return basis_->modes(); }
  int n_top() const noexcept { return basis_->nmax(); }
  const FockBasis& basis() const noexcept { return *basis_; }
  const VectorXc& coeffs() const noexcept { return coeffs_; }
  VectorXc& coeffs() noexcept { return coeffs_; }

  Complex coefficient(const Occupation& m) const;
  void set(const Occupation& m, Complex value);
  void add(const Occupation& m, Complex value);

  // Coefficients of V^(n) in basis order; empty past n_top.
  VectorXc component(int n) const;
  double component_norm(int n) const;
  double norm() const { return coeffs_.norm(); }

  // Gamma(c) V = V is the realness condition in the real basis: all coefficients real.
  bool is_real(double tol = kRealSymbolTolerance) const;

  // Keep only degrees in [lo, hi].
  Symbol degrees(int lo, int hi) const;

  // Same coefficients with a larger (or smaller) top degree.
  Symbol resized(int n_top) const;

  Symbol conjugate() const;

  Symbol& operator+=(const Symbol& other);
  Symbol& operator*=(Complex c);

 private:
  std::shared_ptr<const FockBasis> basis_;
  VectorXc coeffs_;
};

Symbol operator+(Symbol a, const Symbol& b);
Symbol operator*(Complex c, Symbol a);

// JSON form: { "d", "tensors": [ { "n", "entries": [ { "m", "re", "im" } ] } ], "meta" }
nlohmann::json symbol_to_json(const Symbol& v, const nlohmann::json& meta = nlohmann::json::object());
Symbol symbol_from_json(const nlohmann::json& j);

}  // namespace sclab

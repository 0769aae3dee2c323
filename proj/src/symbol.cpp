#include "sclab/symbol.hpp"

#include <algorithm>

namespace sclab {

Symbol::Symbol(int d, int n_top)
    : basis_(std::make_shared<const FockBasis>(d, n_top)), coeffs_(VectorXc::Zero(basis_->dim())) {}

Symbol::Symbol(int d, int n_top, VectorXc coeffs)
    : basis_(std::make_shared<const FockBasis>(d, n_top)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != basis_->dim()) {
    throw DimensionError("Symbol: coefficient vector has " + std::to_string(coeffs_.size()) +
                         " entries, expected " + std::to_string(basis_->dim()));
  }
}

Complex Symbol::coefficient(const Occupation& m) const {
  const Index r = basis_->rank(m);
  return r < 0 ? Complex(0.0) : coeffs_[r];
}

void Symbol::set(const Occupation& m, Complex value) {
  const Index r = basis_->rank(m);
  if (r < 0) throw DimensionError("Symbol::set: degree exceeds n_top");
  coeffs_[r] = value;
}

void Symbol::add(const Occupation& m, Complex value) {
  const Index r = basis_->rank(m);
  if (r < 0) throw DimensionError("Symbol::add: degree exceeds n_top");
  coeffs_[r] += value;
}

VectorXc Symbol::component(int n) const {
  if (n < 0 || n > n_top()) return VectorXc();
  return coeffs_.segment(basis_->sector_begin(n), basis_->sector_size(n));
}

double Symbol::component_norm(int n) const {
  if (n < 0 || n > n_top()) return 0.0;
  return coeffs_.segment(basis_->sector_begin(n), basis_->sector_size(n)).norm();
}

bool Symbol::is_real(double tol) const {
  return coeffs_.size() == 0 || coeffs_.imag().cwiseAbs().maxCoeff() < tol;
}

Symbol Symbol::degrees(int lo, int hi) const {
  Symbol out = *this;
  for (int n = 0; n <= n_top(); ++n) {
    if (n < lo || n > hi) out.coeffs_.segment(basis_->sector_begin(n), basis_->sector_size(n)).setZero();
  }
  return out;
}

Symbol Symbol::resized(int n_top) const {
  Symbol out(modes(), n_top);
  const Index common = std::min(out.coeffs_.size(), coeffs_.size());
  out.coeffs_.head(common) = coeffs_.head(common);
  return out;
}

Symbol Symbol::conjugate() const {
  Symbol out = *this;
  out.coeffs_ = coeffs_.conjugate();
  return out;
}

Symbol& Symbol::operator+=(const Symbol& other) {
  if (other.modes() != modes()) throw DimensionError("Symbol: adding symbols over different mode counts");
  if (other.n_top() > n_top()) *this = resized(other.n_top());
  coeffs_.head(other.coeffs_.size()) += other.coeffs_;
  return *this;
}

Symbol& Symbol::operator*=(Complex c) {
  coeffs_ *= c;
  return *this;
}

Symbol operator+(Symbol a, const Symbol& b) { return a += b; }

Symbol operator*(Complex c, Symbol a) { return a *= c; }

nlohmann::json symbol_to_json(const Symbol& v, const nlohmann::json& meta) {
  nlohmann::json tensors = nlohmann::json::array();
  const FockBasis& b = v.basis();
  for (int n = 0; n <= v.n_top(); ++n) {
    nlohmann::json entries = nlohmann::json::array();
    for (Index r = b.sector_begin(n); r < b.sector_end(n); ++r) {
      const Complex c = v.coeffs()[r];
      if (c == Complex(0.0)) continue;
      auto m = b.occupation(r);
      entries.push_back({{"m", std::vector<int>(m.begin(), m.end())}, {"re", c.real()}, {"im", c.imag()}});
    }
    if (!entries.empty()) tensors.push_back({{"n", n}, {"entries", entries}});
  }
  return {{"d", v.modes()}, {"tensors", tensors}, {"meta", meta}};
}

Symbol symbol_from_json(const nlohmann::json& j) {
  try {
    const int d = j.at("d").get<int>();
    int n_top = 0;
    for (const auto& t : j.at("tensors")) n_top = std::max(n_top, t.at("n").get<int>());
    Symbol v(d, n_top);
    for (const auto& t : j.at("tensors")) {
      const int n = t.at("n").get<int>();
      for (const auto& e : t.at("entries")) {
        const auto m = e.at("m").get<Occupation>();
        if (static_cast<int>(m.size()) != d) throw ConfigError("symbol entry has wrong number of modes");
        int total = 0;
        for (int x : m) total += x;
        if (total != n) throw ConfigError("symbol entry occupation does not sum to its degree");
        v.add(m, Complex(e.value("re", 0.0), e.value("im", 0.0)));
      }
    }
    return v;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed symbol: ") + e.what());
  }
}

}  // namespace sclab

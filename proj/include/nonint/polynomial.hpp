#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nonint/field_tower.hpp"

namespace nonint {

/// Dense univariate polynomial over a field F, coefficients lowest degree first.
///
/// F needs the field operators, construction from int and an `is_zero(const F&)`
/// overload visible from this namespace.
template <class F>
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(F constant) : coeffs_{std::move(constant)} { trim(); }
  explicit Polynomial(std::vector<F> coeffs) : coeffs_(std::move(coeffs)) { trim(); }
  Polynomial(std::initializer_list<F> coeffs) : coeffs_(coeffs) { trim(); }

  static Polynomial variable() { return Polynomial(std::vector<F>{F(0), F(1)}); }

  static Polynomial monomial(F c, std::size_t k) {
    std::vector<F> v(k + 1, F(0));
    v[k] = std::move(c);
    return Polynomial(std::move(v));
  }

  /// z - root
  static Polynomial linear_factor(const F& root) { return Polynomial(std::vector<F>{-root, F(1)}); }

  bool is_zero() const { return coeffs_.empty(); }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<F>& coefficients() const { return coeffs_; }

  F coefficient(std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : F(0); }
  F leading() const { return coeffs_.empty() ? F(0) : coeffs_.back(); }

  F operator()(const F& x) const {
    F acc(0);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  Polynomial derivative() const {
    if (coeffs_.size() <= 1) return {};
    std::vector<F> out(coeffs_.size() - 1);
    for (std::size_t k = 1; k < coeffs_.size(); ++k) out[k - 1] = F(static_cast<long>(k)) * coeffs_[k];
    return Polynomial(std::move(out));
  }

  Polynomial monic() const {
    if (is_zero()) return {};
    return *this * (F(1) / leading());
  }

  Polynomial pow(unsigned k) const {
    Polynomial result(F(1));
    Polynomial base = *this;
    while (k > 0) {
      if (k & 1U) result = result * base;
      k >>= 1U;
      if (k > 0) base = base * base;
    }
    return result;
  }

  /// Coefficients of p(point + t) up to t^(count-1).
  std::vector<F> taylor_coefficients(const F& point, std::size_t count) const {
    std::vector<F> out;
    out.reserve(count);
    std::vector<F> work = coeffs_;
    for (std::size_t j = 0; j < count; ++j) {
      if (work.empty()) {
        out.emplace_back(0);
        continue;
      }
      // One synthetic division by (z - point): remainder is the next Taylor coefficient.
      F carry(0);
      std::vector<F> quotient(work.size() > 1 ? work.size() - 1 : 0);
      for (std::size_t k = work.size(); k-- > 0;) {
        const F value = work[k] + carry * point;
        if (k == 0) {
          out.push_back(value);
        } else {
          quotient[k - 1] = value;
          carry = value;
        }
      }
      work = std::move(quotient);
    }
    return out;
  }

  template <class Fn>
  auto map(Fn&& fn) const {
    using G = decltype(fn(std::declval<const F&>()));
    std::vector<G> out;
    out.reserve(coeffs_.size());
    for (const auto& c : coeffs_) out.push_back(fn(c));
    return Polynomial<G>(std::move(out));
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<F> out(std::max(a.coeffs_.size(), b.coeffs_.size()), F(0));
    for (std::size_t k = 0; k < a.coeffs_.size(); ++k) out[k] = a.coeffs_[k];
    for (std::size_t k = 0; k < b.coeffs_.size(); ++k) out[k] = out[k] + b.coeffs_[k];
    return Polynomial(std::move(out));
  }

  friend Polynomial operator-(const Polynomial& a) {
    std::vector<F> out;
    out.reserve(a.coeffs_.size());
    for (const auto& c : a.coeffs_) out.push_back(F(0) - c);
    return Polynomial(std::move(out));
  }

  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<F> out(a.coeffs_.size() + b.coeffs_.size() - 1, F(0));
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
      if (nonint::is_zero(a.coeffs_[i])) continue;
      for (std::size_t j = 0; j < b.coeffs_.size(); ++j) out[i + j] = out[i + j] + a.coeffs_[i] * b.coeffs_[j];
    }
    return Polynomial(std::move(out));
  }

  friend Polynomial operator*(const Polynomial& a, const F& c) {
    if (nonint::is_zero(c)) return {};
    std::vector<F> out;
    out.reserve(a.coeffs_.size());
    for (const auto& x : a.coeffs_) out.push_back(x * c);
    return Polynomial(std::move(out));
  }

  friend Polynomial operator*(const F& c, const Polynomial& a) { return a * c; }

  Polynomial& operator+=(const Polynomial& b) { return *this = *this + b; }
  Polynomial& operator-=(const Polynomial& b) { return *this = *this - b; }
  Polynomial& operator*=(const Polynomial& b) { return *this = *this * b; }

  /// Euclidean division; throws on a zero divisor.
  friend std::pair<Polynomial, Polynomial> divmod(const Polynomial& a, const Polynomial& b) {
    if (b.is_zero()) throw DivisionByZero();
    if (a.degree() < b.degree()) return {Polynomial(), a};
    std::vector<F> rem = a.coeffs_;
    std::vector<F> quot(a.coeffs_.size() - b.coeffs_.size() + 1, F(0));
    const F inv_lead = F(1) / b.leading();
    const std::size_t db = b.coeffs_.size() - 1;
    for (std::size_t k = quot.size(); k-- > 0;) {
      const F c = rem[k + db] * inv_lead;
      quot[k] = c;
      if (nonint::is_zero(c)) continue;
      for (std::size_t j = 0; j <= db; ++j) rem[k + j] = rem[k + j] - c * b.coeffs_[j];
    }
    rem.resize(db);
    return {Polynomial(std::move(quot)), Polynomial(std::move(rem))};
  }

  friend Polynomial operator/(const Polynomial& a, const Polynomial& b) { return divmod(a, b).first; }
  friend Polynomial operator%(const Polynomial& a, const Polynomial& b) { return divmod(a, b).second; }

  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.coeffs_ == b.coeffs_; }
  friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

  std::string to_string(const std::string& var = "z") const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (std::size_t k = coeffs_.size(); k-- > 0;) {
      if (nonint::is_zero(coeffs_[k])) continue;
      if (!first) os << " + ";
      first = false;
      os << "(" << coeffs_[k] << ")";
      if (k >= 1) os << "*" << var;
      if (k >= 2) os << "^" << k;
    }
    return os.str();
  }

  friend std::ostream& operator<<(std::ostream& os, const Polynomial& p) { return os << p.to_string(); }

 private:
  void trim() {
    while (!coeffs_.empty() && nonint::is_zero(coeffs_.back())) coeffs_.pop_back();
  }

  std::vector<F> coeffs_;
};

/// Monic greatest common divisor; gcd(0, 0) = 0.
template <class F>
Polynomial<F> gcd(Polynomial<F> a, Polynomial<F> b) {
  while (!b.is_zero()) {
    Polynomial<F> r = (a % b).monic();
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

/// Yun's square-free decomposition: p = c * prod_k parts[k]^(k+1), parts monic and pairwise coprime.
template <class F>
std::vector<Polynomial<F>> squarefree_decomposition(const Polynomial<F>& p) {
  std::vector<Polynomial<F>> parts;
  if (p.degree() <= 0) return parts;
  const Polynomial<F> dp = p.derivative();
  Polynomial<F> a = gcd(p, dp);
  Polynomial<F> b = p / a;
  Polynomial<F> c = dp / a;
  Polynomial<F> d = c - b.derivative();
  while (b.degree() > 0) {
    Polynomial<F> g = gcd(b, d);
    parts.push_back(g);
    b = b / g;
    c = d / g;
    d = c - b.derivative();
  }
  while (!parts.empty() && parts.back().degree() <= 0) parts.pop_back();
  return parts;
}

/// Largest m with (z - root)^m dividing p (p nonzero).
template <class F>
int root_multiplicity(const Polynomial<F>& p, const F& root) {
  if (p.is_zero()) throw std::invalid_argument("root_multiplicity of the zero polynomial");
  int m = 0;
  Polynomial<F> work = p;
  const Polynomial<F> lin = Polynomial<F>::linear_factor(root);
  while (work.degree() >= 1) {
    auto [q, r] = divmod(work, lin);
    if (!r.is_zero()) break;
    work = std::move(q);
    ++m;
  }
  return m;
}

}  // namespace nonint

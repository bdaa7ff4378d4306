#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nonint/field_tower.hpp"
#include "nonint/polynomial.hpp"

namespace nonint {

class PoleOrderError : public std::domain_error {
 public:
  explicit PoleOrderError(const std::string& what) : std::domain_error(what) {}
};

class UnsupportedFactor : public std::domain_error {
 public:
  explicit UnsupportedFactor(const std::string& what) : std::domain_error(what) {}
};

/// numerator/denominator in lowest terms with a monic denominator.
template <class F>
class RationalFunction {
 public:
  using Poly = Polynomial<F>;

  RationalFunction() : num_(), den_(F(1)) {}
  RationalFunction(F constant) : num_(std::move(constant)), den_(F(1)) {}
  RationalFunction(Poly p) : num_(std::move(p)), den_(F(1)) {}
  RationalFunction(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) { reduce(); }

  static RationalFunction variable() { return RationalFunction(Poly::variable()); }

  const Poly& numerator() const { return num_; }
  const Poly& denominator() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.degree() == 0; }

  F operator()(const F& x) const {
    const F d = den_(x);
    if (nonint::is_zero(d)) throw DivisionByZero();
    return num_(x) / d;
  }

  RationalFunction derivative() const {
    return RationalFunction(num_.derivative() * den_ - num_ * den_.derivative(), den_ * den_);
  }

  /// f'/f; throws for the zero function.
  RationalFunction log_derivative() const {
    if (is_zero()) throw DivisionByZero();
    return derivative() / *this;
  }

  RationalFunction inverse() const {
    if (is_zero()) throw DivisionByZero();
    return RationalFunction(den_, num_);
  }

  friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
    if (a.den_ == b.den_) return RationalFunction(a.num_ + b.num_, a.den_);
    const Poly g = gcd(a.den_, b.den_);
    const Poly ca = b.den_ / g;
    const Poly cb = a.den_ / g;
    return RationalFunction(a.num_ * ca + b.num_ * cb, a.den_ * ca);
  }
  friend RationalFunction operator-(const RationalFunction& a) { return RationalFunction(-a.num_, a.den_, Reduced{}); }
  friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) { return a + (-b); }
  friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
    if (a.is_zero() || b.is_zero()) return {};
    // Cross-cancel first so the products stay small.
    const Poly g1 = gcd(a.num_, b.den_);
    const Poly g2 = gcd(b.num_, a.den_);
    return RationalFunction((a.num_ / g1) * (b.num_ / g2), (a.den_ / g2) * (b.den_ / g1));
  }
  friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) { return a * b.inverse(); }

  RationalFunction& operator+=(const RationalFunction& b) { return *this = *this + b; }
  RationalFunction& operator-=(const RationalFunction& b) { return *this = *this - b; }
  RationalFunction& operator*=(const RationalFunction& b) { return *this = *this * b; }

  RationalFunction pow(int k) const {
    if (k < 0) return inverse().pow(-k);
    return RationalFunction(num_.pow(static_cast<unsigned>(k)), den_.pow(static_cast<unsigned>(k)), Reduced{});
  }

  friend bool operator==(const RationalFunction& a, const RationalFunction& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const RationalFunction& a, const RationalFunction& b) { return !(a == b); }

  std::string to_string() const { return "(" + num_.to_string() + ") / (" + den_.to_string() + ")"; }
  friend std::ostream& operator<<(std::ostream& os, const RationalFunction& r) { return os << r.to_string(); }

 private:
  struct Reduced {};
  RationalFunction(Poly num, Poly den, Reduced) : num_(std::move(num)), den_(std::move(den)) {}

  void reduce() {
    if (den_.is_zero()) throw DivisionByZero();
    if (num_.is_zero()) {
      den_ = Poly(F(1));
      return;
    }
    const Poly g = gcd(num_, den_);
    if (g.degree() > 0) {
      num_ = num_ / g;
      den_ = den_ / g;
    }
    const F lead = den_.leading();
    if (lead != F(1)) {
      const F inv = F(1) / lead;
      num_ = num_ * inv;
      den_ = den_ * inv;
    }
  }

  Poly num_;
  Poly den_;
};

inline constexpr int kInfiniteOrder = std::numeric_limits<int>::max();

template <class F>
struct InfinityBehavior {
  int order;        // deg(den) - deg(num); kInfiniteOrder for the zero function
  F leading_coeff;  // coefficient of z^(-order)
};

template <class F>
InfinityBehavior<F> behavior_at_infinity(const RationalFunction<F>& r) {
  if (r.is_zero()) return {kInfiniteOrder, F(0)};
  return {r.denominator().degree() - r.numerator().degree(),
          r.numerator().leading() / r.denominator().leading()};
}

/// Coefficient of (z - pole)^k in the Laurent expansion of r at a pole.
/// Throws PoleOrderError when `pole` is not a pole of r.
template <class F>
F laurent_coefficient(const RationalFunction<F>& r, const F& pole, int k) {
  const int m = root_multiplicity(r.denominator(), pole);
  if (m == 0) throw PoleOrderError("laurent_coefficient: " + std::string("point is not a pole"));
  const int target = k + m;
  if (target < 0) return F(0);
  const Polynomial<F> removed = Polynomial<F>::linear_factor(pole).pow(static_cast<unsigned>(m));
  const Polynomial<F> rest = r.denominator() / removed;
  const auto count = static_cast<std::size_t>(target) + 1;
  const std::vector<F> n = r.numerator().taylor_coefficients(pole, count);
  const std::vector<F> e = rest.taylor_coefficients(pole, count);
  std::vector<F> c(count, F(0));
  const F inv_e0 = F(1) / e[0];
  for (std::size_t j = 0; j < count; ++j) {
    F acc = n[j];
    for (std::size_t i = 1; i <= j; ++i) acc = acc - e[i] * c[j - i];
    c[j] = acc * inv_e0;
  }
  return c[static_cast<std::size_t>(target)];
}

using Poly = Polynomial<FieldElement>;
using RatFunc = RationalFunction<FieldElement>;

struct PoleTerm {
  FieldElement location;
  int order = 0;
  FieldElement order2coeff;  // coefficient of (z - location)^-2
  FieldElement order1coeff;  // coefficient of (z - location)^-1
  std::size_t factor = 0;    // index of the basis factor this root belongs to
  std::size_t root = 0;      // position among that factor's roots
};

struct PartialFractionForm {
  std::vector<PoleTerm> poles;
  Poly polynomial_part;

  /// sum_j (a_j/(z - z_j)^2 + b_j/(z - z_j)) + polynomial part.
  /// Terms are summed one basis factor at a time so conjugate roots recombine
  /// inside their own extension before meeting the others.
  RatFunc recombine() const {
    RatFunc acc(polynomial_part);
    std::size_t i = 0;
    while (i < poles.size()) {
      RatFunc group;
      const std::size_t factor = poles[i].factor;
      for (; i < poles.size() && poles[i].factor == factor; ++i) {
        const auto& t = poles[i];
        const RatFunc shifted = RatFunc(Poly::linear_factor(t.location));
        if (!t.order2coeff.is_zero()) group += RatFunc(t.order2coeff) / (shifted * shifted);
        if (!t.order1coeff.is_zero()) group += RatFunc(t.order1coeff) / shifted;
      }
      acc += group;
    }
    return acc;
  }
};

/// Roots of a monic factor of degree 1 or 2 over Q(i), principal root first.
/// `flip` swaps the order (and hence which root counts as "+").
inline std::vector<FieldElement> factor_roots(const Poly& factor, bool flip = false) {
  std::vector<FieldElement> roots;
  const Poly f = factor.monic();
  if (f.degree() == 1) {
    roots.push_back(-f.coefficient(0));
  } else if (f.degree() == 2) {
    const FieldElement b = f.coefficient(1);
    const FieldElement c = f.coefficient(0);
    if (b.level() == FieldElement::Level::QiSqrt || c.level() == FieldElement::Level::QiSqrt) {
      throw TowerDepthExceeded("quadratic factor with coefficients outside Q(i)");
    }
    if (b.is_zero()) {
      // z^2 - w: keep w itself as the radicand so roots match adjoin_sqrt(w).
      const FieldElement s = adjoin_sqrt(-c);
      roots.push_back(s);
      roots.push_back(-s);
    } else {
      const FieldElement s = adjoin_sqrt(b * b - FieldElement(4) * c);
      const FieldElement half(BigRational(1, 2));
      roots.push_back((-b + s) * half);
      roots.push_back((-b - s) * half);
    }
    if (flip) std::swap(roots[0], roots[1]);
  } else {
    throw UnsupportedFactor("irreducible factor of degree " + std::to_string(f.degree()) + " >= 3");
  }
  return roots;
}

/// Splits square-free monic factors into pieces of degree <= 2 over Q(i) where possible:
/// biquadratics z^4 + b z^2 + c split as (z^2 - w1)(z^2 - w2) when the discriminant is a square in Q(i).
inline std::vector<Poly> split_low_degree(const Poly& factor) {
  const Poly f = factor.monic();
  if (f.degree() <= 2) return {f};
  if (f.degree() == 4 && f.coefficient(1).is_zero() && f.coefficient(3).is_zero()) {
    const FieldElement b = f.coefficient(2);
    const FieldElement c = f.coefficient(0);
    if (b.level() != FieldElement::Level::QiSqrt && c.level() != FieldElement::Level::QiSqrt) {
      const FieldElement disc = b * b - FieldElement(4) * c;
      if (auto s = gaussian_sqrt(disc.as_gaussian())) {
        const FieldElement root(*s);
        const FieldElement half(BigRational(1, 2));
        const FieldElement w1 = (-b + root) * half;
        const FieldElement w2 = (-b - root) * half;
        return {Poly{-w1, FieldElement(0), FieldElement(1)}, Poly{-w2, FieldElement(0), FieldElement(1)}};
      }
    }
  }
  throw UnsupportedFactor("cannot split factor of degree " + std::to_string(f.degree()) + " over Q(i)");
}

/// Square-free decomposition of p, each part split into low-degree factors.
inline std::vector<Poly> default_factor_basis(const Poly& p) {
  std::vector<Poly> basis;
  for (const auto& part : squarefree_decomposition(p)) {
    if (part.degree() <= 0) continue;
    for (auto& f : split_low_degree(part)) basis.push_back(std::move(f));
  }
  return basis;
}

/// Partial fractions over a basis of pairwise coprime monic factors of degree <= 2.
/// `flips[j]` reverses the root order of basis factor j.  A quadratic factor may contribute
/// a pole at only one of its roots (an accidental cancellation, possible only when its roots lie in Q(i)).
inline PartialFractionForm partial_fractions(const RatFunc& r, const std::vector<Poly>& basis,
                                             const std::vector<bool>& flips = {}) {
  PartialFractionForm out;
  Poly rest = r.denominator();
  for (std::size_t j = 0; j < basis.size(); ++j) {
    if (basis[j].degree() <= 0) continue;
    const bool flip = j < flips.size() && flips[j];
    const auto roots = factor_roots(basis[j], flip);
    for (std::size_t k = 0; k < roots.size(); ++k) {
      const FieldElement& root = roots[k];
      const int order = root_multiplicity(rest, root);
      if (order == 0) continue;
      if (order > 2) throw PoleOrderError("pole of order " + std::to_string(order) + " >= 3");
      const Poly lin = Poly::linear_factor(root).pow(static_cast<unsigned>(order));
      rest = rest / lin;
      PoleTerm t;
      t.location = root;
      t.factor = j;
      t.root = k;
      t.order = order;
      t.order2coeff = laurent_coefficient(r, root, -2);
      t.order1coeff = laurent_coefficient(r, root, -1);
      out.poles.push_back(std::move(t));
    }
  }
  if (rest.degree() > 0) {
    throw UnsupportedFactor("denominator factor " + rest.to_string() + " is not covered by the factor basis");
  }
  out.polynomial_part = divmod(r.numerator(), r.denominator()).first;
  return out;
}

inline PartialFractionForm partial_fractions(const RatFunc& r) {
  return partial_fractions(r, default_factor_basis(r.denominator()));
}

}  // namespace nonint

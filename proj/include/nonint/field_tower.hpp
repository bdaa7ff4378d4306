#pragma once

// Exact arithmetic in Q, Q(i) and a single quadratic extension Q(i)(sqrt d).
//
// Every square root symbol denotes the principal branch: the root whose
// argument lies in (-pi/2, pi/2].  Sign decisions that involve nested
// radicals are made exactly by squaring with sign bookkeeping; equality is
// always structural after normalization.

#include <gmpxx.h>

#include <complex>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

namespace nonint {

using BigRational = mpq_class;

class DivisionByZero : public std::domain_error {
 public:
  DivisionByZero() : std::domain_error("division by zero") {}
};

/// Raised when two operands live in different quadratic extensions.
class IncompatibleRadicands : public std::domain_error {
 public:
  explicit IncompatibleRadicands(const std::string& what)
      : std::domain_error("incompatible radicands: " + what) {}
};

/// Raised when an operation would need more than one quadratic extension over Q(i).
class TowerDepthExceeded : public std::domain_error {
 public:
  explicit TowerDepthExceeded(const std::string& what)
      : std::domain_error("field tower depth exceeded: " + what) {}
};

inline bool is_zero(const BigRational& x) { return sgn(x) == 0; }

inline int sign(const BigRational& x) {
  const int s = sgn(x);
  return (s > 0) - (s < 0);
}

inline std::string to_fraction_string(const BigRational& x) {
  return x.get_num().get_str() + "/" + x.get_den().get_str();
}

inline BigRational parse_big_rational(const std::string& text) {
  BigRational out;
  if (out.set_str(text, 10) != 0) {
    throw std::invalid_argument("not a rational number: '" + text + "'");
  }
  if (sgn(out.get_den()) == 0) throw DivisionByZero();
  out.canonicalize();
  return out;
}

/// Exact square root of a non-negative rational, if it is a perfect square.
inline std::optional<BigRational> rational_sqrt(const BigRational& x) {
  if (sgn(x) < 0) return std::nullopt;
  if (sgn(x) == 0) return BigRational(0);
  if (mpz_perfect_square_p(x.get_num_mpz_t()) == 0 ||
      mpz_perfect_square_p(x.get_den_mpz_t()) == 0) {
    return std::nullopt;
  }
  mpz_class n, d;
  mpz_sqrt(n.get_mpz_t(), x.get_num_mpz_t());
  mpz_sqrt(d.get_mpz_t(), x.get_den_mpz_t());
  BigRational out(n, d);
  out.canonicalize();
  return out;
}

/// Exact sign of p + q*sqrt(s) for rationals p, q and s >= 0.
inline int sign_with_sqrt(const BigRational& p, const BigRational& q, const BigRational& s) {
  if (sgn(s) < 0) throw std::domain_error("sign_with_sqrt: negative radicand");
  const int sp = sign(p);
  const int sq = (sgn(s) == 0) ? 0 : sign(q);
  if (sq == 0) return sp;
  if (sp == 0 || sp == sq) return sq;
  const int c = cmp(BigRational(p * p), BigRational(q * q * s));
  if (c > 0) return sp;
  if (c < 0) return sq;
  return 0;
}

/// Element re + im*i of Q(i).
struct GaussianRational {
  BigRational re;
  BigRational im;

  GaussianRational() = default;
  GaussianRational(BigRational r, BigRational i = 0) : re(std::move(r)), im(std::move(i)) {}

  static GaussianRational i_unit() { return {0, 1}; }

  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
  bool is_real() const { return sgn(im) == 0; }
  BigRational norm() const { return re * re + im * im; }
  GaussianRational conj() const { return {re, -im}; }

  GaussianRational inverse() const {
    const BigRational n = norm();
    if (sgn(n) == 0) throw DivisionByZero();
    return {re / n, -im / n};
  }

  friend GaussianRational operator+(const GaussianRational& a, const GaussianRational& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend GaussianRational operator-(const GaussianRational& a, const GaussianRational& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend GaussianRational operator-(const GaussianRational& a) { return {-a.re, -a.im}; }
  friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend GaussianRational operator/(const GaussianRational& a, const GaussianRational& b) {
    return a * b.inverse();
  }
  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }
};

namespace detail {

// Sign of the imaginary part of the principal sqrt(d).
inline int principal_root_im_sign(const GaussianRational& d) {
  if (sgn(d.im) != 0) return sign(d.im);
  return sgn(d.re) < 0 ? 1 : 0;
}

// True iff w lies in the principal half plane Re w > 0 or (Re w == 0, Im w > 0).
inline bool in_principal_half(const GaussianRational& w) {
  return sgn(w.re) > 0 || (sgn(w.re) == 0 && sgn(w.im) > 0);
}

}  // namespace detail

/// Principal square root of d inside Q(i), when d is a perfect square there.
inline std::optional<GaussianRational> gaussian_sqrt(const GaussianRational& d) {
  if (sgn(d.im) == 0) {
    if (sgn(d.re) >= 0) {
      if (auto r = rational_sqrt(d.re)) return GaussianRational(*r, 0);
      return std::nullopt;
    }
    if (auto r = rational_sqrt(-d.re)) return GaussianRational(0, *r);
    return std::nullopt;
  }
  const auto m = rational_sqrt(d.norm());
  if (!m) return std::nullopt;
  const auto x = rational_sqrt((*m + d.re) / 2);
  const auto y = rational_sqrt((*m - d.re) / 2);
  if (!x || !y) return std::nullopt;
  return GaussianRational(*x, sgn(d.im) > 0 ? *y : BigRational(-*y));
}

/// sigma in {+1,-1} with sqrt(d1)*sqrt(d2) = sigma*sqrt(d1*d2), principal branches throughout.
inline int sqrt_product_sign(const GaussianRational& d1, const GaussianRational& d2) {
  const int s1 = detail::principal_root_im_sign(d1);
  const int s2 = detail::principal_root_im_sign(d2);
  if (s1 * s2 <= 0) return 1;
  // Re(sqrt d1 sqrt d2) has the sign of re1*|d2| + re2*|d1|.
  const BigRational& a1 = d1.re;
  const BigRational& a2 = d2.re;
  int re_sign;
  const int g1 = sign(a1);
  const int g2 = sign(a2);
  if (g1 == 0 || g2 == 0 || g1 == g2) {
    re_sign = g1 != 0 ? g1 : g2;
  } else {
    const int c = cmp(BigRational(a1 * a1 * d2.norm()), BigRational(a2 * a2 * d1.norm()));
    re_sign = c > 0 ? g1 : (c < 0 ? g2 : 0);
  }
  if (re_sign != 0) return re_sign;
  return s1 > 0 ? 1 : -1;
}

/// Value a + b*sqrt(radicand); radicand is not a square in Q(i) and b != 0 once normalized.
struct QuadExtElement {
  GaussianRational a;
  GaussianRational b;
  GaussianRational radicand;
};

class FieldElement {
 public:
  enum class Level { Q = 0, Qi = 1, QiSqrt = 2 };

  FieldElement() : value_(BigRational(0)) {}
  FieldElement(int x) : value_(BigRational(x)) {}
  FieldElement(long x) : value_(BigRational(x)) {}
  FieldElement(BigRational x) : value_(std::move(x)) {}
  FieldElement(GaussianRational x) : value_(std::move(x)) { normalize(); }
  FieldElement(QuadExtElement x) : value_(std::move(x)) { normalize(true); }

  static FieldElement i_unit() { return FieldElement(GaussianRational(0, 1)); }

  static FieldElement from_string(const std::string& text) { return FieldElement(parse_big_rational(text)); }

  Level level() const { return static_cast<Level>(value_.index()); }
  bool is_rational() const { return level() == Level::Q; }

  const BigRational& rational() const { return std::get<BigRational>(value_); }
  const GaussianRational& gaussian() const { return std::get<GaussianRational>(value_); }
  const QuadExtElement& quad() const { return std::get<QuadExtElement>(value_); }

  /// Value viewed in Q(i); throws if the element needs the quadratic extension.
  GaussianRational as_gaussian() const {
    switch (level()) {
      case Level::Q: return GaussianRational(rational(), 0);
      case Level::Qi: return gaussian();
      default: throw TowerDepthExceeded("element is not in Q(i)");
    }
  }

  bool is_zero() const {
    return level() == Level::Q && sgn(rational()) == 0;
  }

  std::optional<GaussianRational> radicand() const {
    if (level() == Level::QiSqrt) return quad().radicand;
    return std::nullopt;
  }

  FieldElement conj() const;

  std::complex<long double> to_complex() const;
  std::string to_string() const;

  friend FieldElement operator+(const FieldElement& x, const FieldElement& y) { return combine(x, y, Op::Add); }
  friend FieldElement operator-(const FieldElement& x, const FieldElement& y) { return combine(x, y, Op::Sub); }
  friend FieldElement operator*(const FieldElement& x, const FieldElement& y) { return combine(x, y, Op::Mul); }
  friend FieldElement operator/(const FieldElement& x, const FieldElement& y) { return x * y.inverse(); }
  friend FieldElement operator-(const FieldElement& x) { return FieldElement(0) - x; }

  FieldElement& operator+=(const FieldElement& y) { return *this = *this + y; }
  FieldElement& operator-=(const FieldElement& y) { return *this = *this - y; }
  FieldElement& operator*=(const FieldElement& y) { return *this = *this * y; }
  FieldElement& operator/=(const FieldElement& y) { return *this = *this / y; }

  FieldElement inverse() const;

  friend bool operator==(const FieldElement& x, const FieldElement& y);
  friend bool operator!=(const FieldElement& x, const FieldElement& y) { return !(x == y); }

  friend std::ostream& operator<<(std::ostream& os, const FieldElement& x) { return os << x.to_string(); }

 private:
  enum class Op { Add, Sub, Mul };

  struct Trusted {};
  FieldElement(QuadExtElement x, Trusted) : value_(std::move(x)) { normalize(false); }

  static FieldElement make_quad(GaussianRational a, GaussianRational b, GaussianRational d) {
    return FieldElement(QuadExtElement{std::move(a), std::move(b), std::move(d)}, Trusted{});
  }

  void normalize(bool check_radicand = true);

  // Rewrites y over the radicand of x when the radicands differ by a square factor.
  static std::optional<QuadExtElement> align(const QuadExtElement& target, const QuadExtElement& y);

  static FieldElement combine(const FieldElement& x, const FieldElement& y, Op op);

  std::variant<BigRational, GaussianRational, QuadExtElement> value_;
};

inline void FieldElement::normalize(bool check_radicand) {
  if (auto* q = std::get_if<QuadExtElement>(&value_)) {
    if (check_radicand) {
      if (auto root = gaussian_sqrt(q->radicand)) {
        GaussianRational v = q->a + q->b * *root;
        value_ = std::move(v);
        normalize();
        return;
      }
    }
    if (q->b.is_zero()) {
      GaussianRational v = q->a;
      value_ = std::move(v);
    } else {
      return;
    }
  }
  if (auto* g = std::get_if<GaussianRational>(&value_)) {
    if (sgn(g->im) == 0) {
      BigRational v = g->re;
      value_ = std::move(v);
    }
  }
}

inline std::optional<QuadExtElement> FieldElement::align(const QuadExtElement& target,
                                                          const QuadExtElement& y) {
  // y.radicand = k^2 * target.radicand  =>  sqrt(y.radicand) = tau * k * sqrt(target.radicand)
  const auto k = gaussian_sqrt(y.radicand / target.radicand);
  if (!k) return std::nullopt;
  const int principal_k = detail::in_principal_half(*k) ? 1 : -1;
  const int tau = principal_k * sqrt_product_sign(*k * *k, target.radicand);
  GaussianRational scale = *k;
  if (tau < 0) scale = -scale;
  return QuadExtElement{y.a, y.b * scale, target.radicand};
}

inline FieldElement FieldElement::combine(const FieldElement& x, const FieldElement& y, Op op) {
  const Level lx = x.level();
  const Level ly = y.level();
  if (lx == Level::Q && ly == Level::Q) {
    switch (op) {
      case Op::Add: return FieldElement(BigRational(x.rational() + y.rational()));
      case Op::Sub: return FieldElement(BigRational(x.rational() - y.rational()));
      case Op::Mul: return FieldElement(BigRational(x.rational() * y.rational()));
    }
  }
  if (lx != Level::QiSqrt && ly != Level::QiSqrt) {
    const GaussianRational a = x.as_gaussian();
    const GaussianRational b = y.as_gaussian();
    switch (op) {
      case Op::Add: return FieldElement(a + b);
      case Op::Sub: return FieldElement(a - b);
      case Op::Mul: return FieldElement(a * b);
    }
  }
  QuadExtElement qx = lx == Level::QiSqrt ? x.quad() : QuadExtElement{x.as_gaussian(), {}, y.quad().radicand};
  QuadExtElement qy = ly == Level::QiSqrt ? y.quad() : QuadExtElement{y.as_gaussian(), {}, qx.radicand};
  if (qx.radicand != qy.radicand) {
    if (auto aligned = align(qx, qy)) {
      qy = *aligned;
    } else if (op == Op::Mul && qx.a.is_zero() && qy.a.is_zero()) {
      // (b1 sqrt d1)(b2 sqrt d2) = sigma b1 b2 sqrt(d1 d2)
      GaussianRational coeff = qx.b * qy.b;
      if (sqrt_product_sign(qx.radicand, qy.radicand) < 0) coeff = -coeff;
      return FieldElement(QuadExtElement{{}, coeff, qx.radicand * qy.radicand});
    } else {
      throw IncompatibleRadicands("sqrt(" + FieldElement(qx.radicand).to_string() + ") vs sqrt(" +
                                  FieldElement(qy.radicand).to_string() + ")");
    }
  }
  const GaussianRational& d = qx.radicand;
  switch (op) {
    case Op::Add: return make_quad(qx.a + qy.a, qx.b + qy.b, d);
    case Op::Sub: return make_quad(qx.a - qy.a, qx.b - qy.b, d);
    case Op::Mul:
      return make_quad(qx.a * qy.a + qx.b * qy.b * d, qx.a * qy.b + qx.b * qy.a, d);
  }
  throw std::logic_error("unreachable");
}

inline FieldElement FieldElement::inverse() const {
  switch (level()) {
    case Level::Q:
      if (sgn(rational()) == 0) throw DivisionByZero();
      return FieldElement(BigRational(1 / rational()));
    case Level::Qi:
      return FieldElement(gaussian().inverse());
    case Level::QiSqrt: {
      const auto& q = quad();
      // 1/(a + b r) = (a - b r)/(a^2 - b^2 d); the denominator is nonzero since r is not in Q(i).
      const GaussianRational den = q.a * q.a - q.b * q.b * q.radicand;
      const GaussianRational inv = den.inverse();
      return make_quad(q.a * inv, -(q.b * inv), q.radicand);
    }
  }
  throw std::logic_error("unreachable");
}

inline bool operator==(const FieldElement& x, const FieldElement& y) {
  if (x.level() != y.level()) return false;
  switch (x.level()) {
    case FieldElement::Level::Q: return x.rational() == y.rational();
    case FieldElement::Level::Qi: return x.gaussian() == y.gaussian();
    case FieldElement::Level::QiSqrt: {
      const auto& a = x.quad();
      if (a.radicand == y.quad().radicand) return a.a == y.quad().a && a.b == y.quad().b;
      const auto aligned = FieldElement::align(a, y.quad());
      return aligned && a.a == aligned->a && a.b == aligned->b;
    }
  }
  return false;
}

inline FieldElement FieldElement::conj() const {
  switch (level()) {
    case Level::Q: return *this;
    case Level::Qi: return FieldElement(gaussian().conj());
    case Level::QiSqrt: {
      const auto& q = quad();
      const GaussianRational& d = q.radicand;
      if (d.is_real()) {
        // sqrt(d) is real for d > 0 and purely imaginary for d < 0.
        const GaussianRational root_conj = sgn(d.re) > 0 ? GaussianRational(1) : GaussianRational(-1);
        return make_quad(q.a.conj(), q.b.conj() * root_conj, d);
      }
      // conj(sqrt d) = sqrt(conj d) = |d|/sqrt(d); expressible over sqrt(d) iff |d| is rational.
      if (auto modulus = rational_sqrt(d.norm())) {
        const GaussianRational factor = GaussianRational(*modulus) / d;
        return make_quad(q.a.conj(), q.b.conj() * factor, d);
      }
      return make_quad(q.a.conj(), q.b.conj(), d.conj());
    }
  }
  throw std::logic_error("unreachable");
}

inline std::complex<long double> to_long_double_complex(const GaussianRational& g);

namespace detail {

inline long double to_long_double(const BigRational& x) {
  // mpz -> decimal -> long double keeps the full 64-bit mantissa.
  const long double n = std::strtold(x.get_num().get_str().c_str(), nullptr);
  const long double d = std::strtold(x.get_den().get_str().c_str(), nullptr);
  return n / d;
}

}  // namespace detail

inline std::complex<long double> to_long_double_complex(const GaussianRational& g) {
  return {detail::to_long_double(g.re), detail::to_long_double(g.im)};
}

inline std::complex<long double> FieldElement::to_complex() const {
  switch (level()) {
    case Level::Q: return {detail::to_long_double(rational()), 0.0L};
    case Level::Qi: return to_long_double_complex(gaussian());
    case Level::QiSqrt: {
      const auto& q = quad();
      std::complex<long double> d = to_long_double_complex(q.radicand);
      if (d.imag() == 0.0L) d.imag(0.0L);  // +0 keeps std::sqrt on the principal branch
      return to_long_double_complex(q.a) + to_long_double_complex(q.b) * std::sqrt(d);
    }
  }
  return {};
}

namespace detail {

inline std::string gaussian_string(const GaussianRational& g) {
  if (sgn(g.im) == 0) return g.re.get_str();
  std::string im = g.im == 1 ? "i" : (g.im == -1 ? "-i" : g.im.get_str() + "*i");
  if (sgn(g.re) == 0) return im;
  if (im[0] != '-') im = "+" + im;
  return "(" + g.re.get_str() + im + ")";
}

}  // namespace detail

inline std::string FieldElement::to_string() const {
  switch (level()) {
    case Level::Q: return rational().get_str();
    case Level::Qi: return detail::gaussian_string(gaussian());
    case Level::QiSqrt: {
      const auto& q = quad();
      std::ostringstream os;
      if (!q.a.is_zero()) os << detail::gaussian_string(q.a) << " + ";
      os << detail::gaussian_string(q.b) << "*sqrt(" << detail::gaussian_string(q.radicand) << ")";
      return os.str();
    }
  }
  return {};
}

inline bool is_zero(const FieldElement& x) { return x.is_zero(); }

/// True iff x equals its complex conjugate under the principal-branch embedding.
inline bool is_real(const FieldElement& x) {
  switch (x.level()) {
    case FieldElement::Level::Q: return true;
    case FieldElement::Level::Qi: return false;  // normalized, so im != 0
    case FieldElement::Level::QiSqrt: break;
  }
  const auto& q = x.quad();
  const GaussianRational& d = q.radicand;
  // Im(x) = Im(a) + Re(b) * Im(sqrt d) + Im(b) * Re(sqrt d)
  if (d.is_real()) {
    // sqrt(d) is an irrational real or an irrational multiple of i.
    if (sgn(d.re) > 0) return sgn(q.a.im) == 0 && sgn(q.b.im) == 0;
    return sgn(q.a.im) == 0 && sgn(q.b.re) == 0;
  }
  const auto modulus = rational_sqrt(d.norm());
  if (!modulus) {
    // |d| irrational: Im(b sqrt d) is either zero (b == 0) or not in Q.
    return false;
  }
  // With s = Re sqrt d (irrational), Im sqrt d = Im(d)/(2 s):
  // Im(x) = 0  <=>  Im(a) == 0 and Im(b) * s^2 + Re(b) * Im(d)/2 == 0.
  const BigRational s2 = (*modulus + d.re) / 2;
  return sgn(q.a.im) == 0 && sgn(BigRational(q.b.im * s2 + q.b.re * d.im / 2)) == 0;
}

/// True iff x lies in the Q level of the tower.
inline bool is_rational_number(const FieldElement& x) { return x.is_rational(); }

/// An element s with s^2 == x; principal branch.  x must lie in Q(i).
inline FieldElement adjoin_sqrt(const FieldElement& x) {
  if (x.level() == FieldElement::Level::QiSqrt) {
    throw TowerDepthExceeded("sqrt of " + x.to_string() + " needs a second extension");
  }
  const GaussianRational g = x.as_gaussian();
  if (auto root = gaussian_sqrt(g)) return FieldElement(*root);
  return FieldElement(QuadExtElement{{}, GaussianRational(1), g});
}

/// Exact rational square root when x is the square of a rational number.
inline std::optional<BigRational> rational_square_root(const FieldElement& x) {
  if (!x.is_rational()) return std::nullopt;
  return rational_sqrt(x.rational());
}

}  // namespace nonint

#pragma once

// Scalar layer shared by every algorithm in the library.  All numeric code is
// templated over a real scalar R which is either `double` (fast path) or
// `Rat` (exact rational path).  `Cx<R>` is a minimal complex type over R;
// std::complex is only specified for floating point, so we roll our own.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

namespace urnlab {

using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline double approx(double x) { return x; }
inline double approx(const Rat& x) { return static_cast<double>(x); }

// Doubles are dyadic rationals, so this conversion is lossless.
inline Rat rat_from_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("rat_from_double: non-finite value");
  if (x == 0.0) return Rat(0);
  int exp = 0;
  double mant = std::frexp(x, &exp);  // x = mant * 2^exp, 0.5 <= |mant| < 1
  // 53 bits suffice to make the mantissa integral.
  auto scaled = static_cast<std::int64_t>(std::ldexp(mant, 53));
  exp -= 53;
  Rat r(scaled);
  if (exp >= 0) {
    r *= Rat(BigInt(1) << exp);
  } else {
    r /= Rat(BigInt(1) << -exp);
  }
  return r;
}

inline BigInt rat_num(const Rat& x) { return boost::multiprecision::numerator(x); }
inline BigInt rat_den(const Rat& x) { return boost::multiprecision::denominator(x); }

inline bool is_integer(const Rat& x) { return rat_den(x) == 1; }

inline std::string to_string(const Rat& x) { return x.str(); }
inline std::string to_string(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

// Traits describing how a real scalar behaves under approximate tests.  The
// exact path ignores tolerances entirely; the float path applies them.
template <class R>
struct real_traits;

template <>
struct real_traits<double> {
  static constexpr bool exact = false;
  static double from_double(double x) { return x; }
  static double from_int(long v) { return static_cast<double>(v); }
  static bool is_zero(double x, double tol) { return std::abs(x) <= tol; }
};

template <>
struct real_traits<Rat> {
  static constexpr bool exact = true;
  static Rat from_double(double x) { return rat_from_double(x); }
  static Rat from_int(long v) { return Rat(v); }
  static bool is_zero(const Rat& x, double) { return x == 0; }
};

template <class R>
struct Cx {
  R re{};
  R im{};

  Cx() = default;
  Cx(R r) : re(std::move(r)) {}  // NOLINT: implicit real -> complex is intended
  Cx(R r, R i) : re(std::move(r)), im(std::move(i)) {}

  friend Cx operator+(const Cx& a, const Cx& b) { return {a.re + b.re, a.im + b.im}; }
  friend Cx operator-(const Cx& a, const Cx& b) { return {a.re - b.re, a.im - b.im}; }
  friend Cx operator-(const Cx& a) { return {-a.re, -a.im}; }
  friend Cx operator*(const Cx& a, const Cx& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend Cx operator/(const Cx& a, const Cx& b) {
    R d = b.re * b.re + b.im * b.im;
    if (d == R(0)) throw std::domain_error("complex division by zero");
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
  }
  Cx& operator+=(const Cx& b) { re += b.re; im += b.im; return *this; }
  Cx& operator-=(const Cx& b) { re -= b.re; im -= b.im; return *this; }
  Cx& operator*=(const Cx& b) { *this = *this * b; return *this; }
  Cx& operator/=(const Cx& b) { *this = *this / b; return *this; }
  friend bool operator==(const Cx& a, const Cx& b) { return a.re == b.re && a.im == b.im; }
  friend bool operator!=(const Cx& a, const Cx& b) { return !(a == b); }
};

template <class R>
Cx<R> conj(const Cx<R>& z) {
  return {z.re, -z.im};
}

// 1-norm magnitude proxy, cheap and adequate for pivot selection and
// tolerance tests on both scalar kinds.
template <class R>
double mag(const Cx<R>& z) {
  return std::abs(approx(z.re)) + std::abs(approx(z.im));
}
inline double mag(double x) { return std::abs(x); }
inline double mag(const Rat& x) { return std::abs(approx(x)); }

template <class R>
bool is_zero(const Cx<R>& z, double tol) {
  return real_traits<R>::is_zero(z.re, tol) && real_traits<R>::is_zero(z.im, tol);
}
inline bool is_zero(double x, double tol) { return std::abs(x) <= tol; }
inline bool is_zero(const Rat& x, double) { return x == 0; }

template <class R>
std::string to_string(const Cx<R>& z) {
  std::string s = "(" + to_string(z.re);
  if (!(z.im == R(0))) s += ", " + to_string(z.im);
  return s + ")";
}

template <class R>
Cx<R> cx_pow(Cx<R> base, int e) {
  Cx<R> out{R(1), R(0)};
  while (e > 0) {
    if (e & 1) out *= base;
    base *= base;
    e >>= 1;
  }
  return out;
}

// Integer power with exponentiation by squaring, also used for plain reals.
template <class R>
R real_pow(R base, int e) {
  R out = R(1);
  while (e > 0) {
    if (e & 1) out = out * base;
    base = base * base;
    e >>= 1;
  }
  return out;
}

using CxD = Cx<double>;
using CxQ = Cx<Rat>;

}  // namespace urnlab

#pragma once

#include <cmath>

namespace hpvpinn {

/// Second-order forward-mode number along a single direction: value, first and second
/// directional derivatives. Used to differentiate closed-form exact solutions.
struct Dual2 {
  double v = 0.0;
  double d = 0.0;
  double dd = 0.0;

  constexpr Dual2() = default;
  constexpr Dual2(double value) : v(value) {}  // NOLINT(google-explicit-constructor)
  constexpr Dual2(double value, double first, double second) : v(value), d(first), dd(second) {}

  static constexpr Dual2 variable(double value) { return {value, 1.0, 0.0}; }
};

namespace detail {

// f(a) given f, f', f'' at a.v
constexpr Dual2 chain(const Dual2& a, double f, double df, double ddf) {
  return {f, df * a.d, ddf * a.d * a.d + df * a.dd};
}

}  // namespace detail

constexpr Dual2 operator+(const Dual2& a, const Dual2& b) { return {a.v + b.v, a.d + b.d, a.dd + b.dd}; }
constexpr Dual2 operator-(const Dual2& a, const Dual2& b) { return {a.v - b.v, a.d - b.d, a.dd - b.dd}; }
constexpr Dual2 operator-(const Dual2& a) { return {-a.v, -a.d, -a.dd}; }
constexpr Dual2 operator*(const Dual2& a, const Dual2& b) {
  return {a.v * b.v, a.d * b.v + a.v * b.d, a.dd * b.v + 2.0 * a.d * b.d + a.v * b.dd};
}
constexpr Dual2 operator/(const Dual2& a, const Dual2& b) {
  const double q = a.v / b.v;
  const double dq = (a.d - q * b.d) / b.v;
  const double ddq = (a.dd - 2.0 * dq * b.d - q * b.dd) / b.v;
  return {q, dq, ddq};
}
constexpr Dual2 operator+(const Dual2& a, double b) { return {a.v + b, a.d, a.dd}; }
constexpr Dual2 operator+(double a, const Dual2& b) { return b + a; }
constexpr Dual2 operator-(const Dual2& a, double b) { return {a.v - b, a.d, a.dd}; }
constexpr Dual2 operator-(double a, const Dual2& b) { return {a - b.v, -b.d, -b.dd}; }
constexpr Dual2 operator*(const Dual2& a, double b) { return {a.v * b, a.d * b, a.dd * b}; }
constexpr Dual2 operator*(double a, const Dual2& b) { return b * a; }
constexpr Dual2 operator/(const Dual2& a, double b) { return {a.v / b, a.d / b, a.dd / b}; }
constexpr Dual2 operator/(double a, const Dual2& b) { return Dual2(a) / b; }

inline Dual2 sin(const Dual2& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return detail::chain(a, s, c, -s);
}
inline Dual2 cos(const Dual2& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return detail::chain(a, c, -s, -c);
}
inline Dual2 tanh(const Dual2& a) {
  const double t = std::tanh(a.v);
  const double dt = 1.0 - t * t;
  return detail::chain(a, t, dt, -2.0 * t * dt);
}
inline Dual2 exp(const Dual2& a) {
  const double e = std::exp(a.v);
  return detail::chain(a, e, e, e);
}
inline Dual2 log(const Dual2& a) { return detail::chain(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v)); }
inline Dual2 sqrt(const Dual2& a) {
  const double s = std::sqrt(a.v);
  return detail::chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}
inline Dual2 pow(const Dual2& a, double p) {
  const double f = std::pow(a.v, p);
  return detail::chain(a, f, p * std::pow(a.v, p - 1.0), p * (p - 1.0) * std::pow(a.v, p - 2.0));
}
inline Dual2 atan2(const Dual2& y, const Dual2& x) {
  const double r2 = x.v * x.v + y.v * y.v;
  const double num = x.v * y.d - y.v * x.d;
  const double dnum = x.v * y.dd - y.v * x.dd;
  const double dr2 = 2.0 * (x.v * x.d + y.v * y.d);
  return {std::atan2(y.v, x.v), num / r2, (dnum * r2 - num * dr2) / (r2 * r2)};
}

// Bring the double overloads into scope so generic code can call sin(x) for either type.
using std::atan2;
using std::cos;
using std::exp;
using std::log;
using std::pow;
using std::sin;
using std::sqrt;
using std::tanh;

}  // namespace hpvpinn

#pragma once

// Forward-mode automatic differentiation with a fixed-width chunk of
// directional derivatives carried alongside each value.

#include <algorithm>
#include <array>
#include <cmath>
#include <type_traits>

namespace onevision::optim {

template <int N>
struct DualNumber {
  double v = 0.0;
  std::array<double, N> d{};

  constexpr DualNumber() = default;
  constexpr DualNumber(double value) : v(value) {}  // NOLINT: constants promote implicitly

  static constexpr int width = N;

  DualNumber& operator+=(const DualNumber& o) {
    v += o.v;
    for (int k = 0; k < N; ++k) d[k] += o.d[k];
    return *this;
  }
  DualNumber& operator-=(const DualNumber& o) {
    v -= o.v;
    for (int k = 0; k < N; ++k) d[k] -= o.d[k];
    return *this;
  }
  DualNumber& operator*=(const DualNumber& o) {
    for (int k = 0; k < N; ++k) d[k] = d[k] * o.v + v * o.d[k];
    v *= o.v;
    return *this;
  }
  DualNumber& operator/=(const DualNumber& o) {
    const double inv = 1.0 / o.v;
    const double q = v * inv;
    for (int k = 0; k < N; ++k) d[k] = (d[k] - q * o.d[k]) * inv;
    v = q;
    return *this;
  }
  DualNumber& operator+=(double c) { v += c; return *this; }
  DualNumber& operator-=(double c) { v -= c; return *this; }
  DualNumber& operator*=(double c) {
    v *= c;
    for (auto& x : d) x *= c;
    return *this;
  }
  DualNumber& operator/=(double c) { return *this *= (1.0 / c); }
};

template <int N> DualNumber<N> operator-(DualNumber<N> a) {
  a.v = -a.v;
  for (auto& x : a.d) x = -x;
  return a;
}
template <int N> DualNumber<N> operator+(DualNumber<N> a, const DualNumber<N>& b) { return a += b; }
template <int N> DualNumber<N> operator-(DualNumber<N> a, const DualNumber<N>& b) { return a -= b; }
template <int N> DualNumber<N> operator*(DualNumber<N> a, const DualNumber<N>& b) { return a *= b; }
template <int N> DualNumber<N> operator/(DualNumber<N> a, const DualNumber<N>& b) { return a /= b; }
template <int N> DualNumber<N> operator+(DualNumber<N> a, double b) { return a += b; }
template <int N> DualNumber<N> operator-(DualNumber<N> a, double b) { return a -= b; }
template <int N> DualNumber<N> operator*(DualNumber<N> a, double b) { return a *= b; }
template <int N> DualNumber<N> operator/(DualNumber<N> a, double b) { return a /= b; }
template <int N> DualNumber<N> operator+(double a, DualNumber<N> b) { return b += a; }
template <int N> DualNumber<N> operator-(double a, const DualNumber<N>& b) { return -b + a; }
template <int N> DualNumber<N> operator*(double a, DualNumber<N> b) { return b *= a; }
template <int N> DualNumber<N> operator/(double a, const DualNumber<N>& b) { return DualNumber<N>(a) / b; }

template <int N> bool operator<(const DualNumber<N>& a, const DualNumber<N>& b) { return a.v < b.v; }
template <int N> bool operator>(const DualNumber<N>& a, const DualNumber<N>& b) { return a.v > b.v; }
template <int N> bool operator<=(const DualNumber<N>& a, const DualNumber<N>& b) { return a.v <= b.v; }
template <int N> bool operator>=(const DualNumber<N>& a, const DualNumber<N>& b) { return a.v >= b.v; }
template <int N> bool operator<(const DualNumber<N>& a, double b) { return a.v < b; }
template <int N> bool operator>(const DualNumber<N>& a, double b) { return a.v > b; }

namespace detail {
// Applies the chain rule for a unary primitive with value fx and slope dfx.
template <int N>
DualNumber<N> chain(const DualNumber<N>& a, double fx, double dfx) {
  DualNumber<N> r(fx);
  for (int k = 0; k < N; ++k) r.d[k] = dfx * a.d[k];
  return r;
}
}  // namespace detail

template <int N> DualNumber<N> sin(const DualNumber<N>& a) { return detail::chain(a, std::sin(a.v), std::cos(a.v)); }
template <int N> DualNumber<N> cos(const DualNumber<N>& a) { return detail::chain(a, std::cos(a.v), -std::sin(a.v)); }
template <int N> DualNumber<N> tan(const DualNumber<N>& a) {
  const double t = std::tan(a.v);
  return detail::chain(a, t, 1.0 + t * t);
}
template <int N> DualNumber<N> exp(const DualNumber<N>& a) {
  const double e = std::exp(a.v);
  return detail::chain(a, e, e);
}
template <int N> DualNumber<N> log(const DualNumber<N>& a) { return detail::chain(a, std::log(a.v), 1.0 / a.v); }
template <int N> DualNumber<N> sqrt(const DualNumber<N>& a) {
  const double s = std::sqrt(a.v);
  return detail::chain(a, s, 0.5 / s);
}
template <int N> DualNumber<N> tanh(const DualNumber<N>& a) {
  const double t = std::tanh(a.v);
  return detail::chain(a, t, 1.0 - t * t);
}
template <int N> DualNumber<N> atan(const DualNumber<N>& a) { return detail::chain(a, std::atan(a.v), 1.0 / (1.0 + a.v * a.v)); }
template <int N> DualNumber<N> atan2(const DualNumber<N>& y, const DualNumber<N>& x) {
  const double den = x.v * x.v + y.v * y.v;
  DualNumber<N> r(std::atan2(y.v, x.v));
  for (int k = 0; k < N; ++k) r.d[k] = (x.v * y.d[k] - y.v * x.d[k]) / den;
  return r;
}
template <int N> DualNumber<N> abs(const DualNumber<N>& a) { return a.v < 0 ? -a : a; }

/// Scalar type traits shared by code templated on double and dual numbers.
template <class S> struct ScalarTraits;
template <> struct ScalarTraits<double> {
  static double value(double s) { return s; }
};
template <int N> struct ScalarTraits<DualNumber<N>> {
  static double value(const DualNumber<N>& s) { return s.v; }
};

template <class S> double value_of(const S& s) { return ScalarTraits<S>::value(s); }

/// Hard clamp on the value; the derivative is taken from a tanh gate of the
/// given width so that gradients fade smoothly at the bounds instead of
/// vanishing abruptly.
inline double saturate(double u, double lo, double hi, double /*width*/) { return std::clamp(u, lo, hi); }

template <int N>
DualNumber<N> saturate(const DualNumber<N>& u, double lo, double hi, double width) {
  const double slope = 0.5 * (std::tanh((u.v - lo) / width) - std::tanh((u.v - hi) / width));
  return detail::chain(u, std::clamp(u.v, lo, hi), slope);
}

/// Wraps an angle to (-pi, pi]. The derivative passes through unchanged.
inline double wrap_angle(double a) {
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  double r = std::remainder(a, kTwoPi);
  if (r <= -3.14159265358979323846) r += kTwoPi;
  return r;
}

template <int N>
DualNumber<N> wrap_angle(DualNumber<N> a) {
  a.v = wrap_angle(a.v);
  return a;
}

/// Chunk width used throughout the planner. Gradients of longer decision
/// vectors are assembled from several passes.
inline constexpr int kChunk = 12;
using Dual = DualNumber<kChunk>;

}  // namespace onevision::optim

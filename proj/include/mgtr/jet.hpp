#pragma once

// Truncated Taylor arithmetic: a value together with its first three
// derivatives with respect to one independent variable.

#include <cmath>

namespace mgtr {

template <typename T>
struct Jet3 {
  T v{}, d1{}, d2{}, d3{};

  constexpr Jet3() = default;
  constexpr Jet3(T value) : v(value) {}  // NOLINT: constants promote implicitly
  constexpr Jet3(T value, T a, T b, T c) : v(value), d1(a), d2(b), d3(c) {}

  static constexpr Jet3 variable(T x) { return {x, T(1), T(0), T(0)}; }
};

template <typename T>
constexpr Jet3<T> operator+(const Jet3<T>& a, const Jet3<T>& b) {
  return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2, a.d3 + b.d3};
}
template <typename T>
constexpr Jet3<T> operator-(const Jet3<T>& a, const Jet3<T>& b) {
  return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2, a.d3 - b.d3};
}
template <typename T>
constexpr Jet3<T> operator-(const Jet3<T>& a) {
  return {-a.v, -a.d1, -a.d2, -a.d3};
}
template <typename T>
constexpr Jet3<T> operator*(const Jet3<T>& a, const Jet3<T>& b) {
  return {a.v * b.v, a.d1 * b.v + a.v * b.d1,
          a.d2 * b.v + T(2) * a.d1 * b.d1 + a.v * b.d2,
          a.d3 * b.v + T(3) * a.d2 * b.d1 + T(3) * a.d1 * b.d2 + a.v * b.d3};
}
template <typename T>
constexpr Jet3<T> operator*(T s, const Jet3<T>& a) {
  return {s * a.v, s * a.d1, s * a.d2, s * a.d3};
}
template <typename T>
constexpr Jet3<T> operator*(const Jet3<T>& a, T s) {
  return s * a;
}
template <typename T>
constexpr Jet3<T> operator/(const Jet3<T>& a, T s) {
  return {a.v / s, a.d1 / s, a.d2 / s, a.d3 / s};
}
template <typename T>
constexpr Jet3<T> operator+(const Jet3<T>& a, T s) {
  return {a.v + s, a.d1, a.d2, a.d3};
}
template <typename T>
constexpr Jet3<T> operator-(const Jet3<T>& a, T s) {
  return {a.v - s, a.d1, a.d2, a.d3};
}

// Composition h = g(f) given g and its derivatives at f.v (Faa di Bruno).
template <typename T>
constexpr Jet3<T> compose(const Jet3<T>& f, T g0, T g1, T g2, T g3) {
  return {g0, g1 * f.d1, g2 * f.d1 * f.d1 + g1 * f.d2,
          g3 * f.d1 * f.d1 * f.d1 + T(3) * g2 * f.d1 * f.d2 + g1 * f.d3};
}

template <typename T>
Jet3<T> reciprocal(const Jet3<T>& f) {
  const T r = T(1) / f.v;
  return compose(f, r, -r * r, T(2) * r * r * r, T(-6) * r * r * r * r);
}
template <typename T>
Jet3<T> operator/(const Jet3<T>& a, const Jet3<T>& b) {
  return a * reciprocal(b);
}
template <typename T>
Jet3<T> operator/(T s, const Jet3<T>& b) {
  return s * reciprocal(b);
}

template <typename T>
Jet3<T> tanh(const Jet3<T>& f) {
  using std::tanh;
  const T t = tanh(f.v);
  const T s = T(1) - t * t;
  return compose(f, t, s, T(-2) * t * s, s * (T(6) * t * t - T(2)));
}

/// Numerically stable log(1 + e^z).
template <typename T>
T softplus(T z) {
  using std::exp;
  using std::log1p;
  return z > T(0) ? z + log1p(exp(-z)) : log1p(exp(z));
}

template <typename T>
T logistic(T z) {
  using std::exp;
  if (z >= T(0)) return T(1) / (T(1) + exp(-z));
  const T e = exp(z);
  return e / (T(1) + e);
}

template <typename T>
Jet3<T> softplus(const Jet3<T>& f) {
  const T s = logistic(f.v);
  const T sc = logistic(-f.v);
  const T ds = s * sc;
  return compose(f, softplus(f.v), s, ds, ds * (sc - s));
}

}  // namespace mgtr

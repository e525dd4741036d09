#pragma once

#include <array>
#include <cmath>

namespace zermelo {

/// Truncated second-order Taylor expansion in N independent variables.
///
/// Carries a value, its gradient and its (symmetric) Hessian through
/// arithmetic, so any closed-form expression written against a generic
/// scalar yields exact first and second partials in one evaluation.
template <int N>
struct Jet {
  double v = 0.0;
  std::array<double, N> g{};
  std::array<std::array<double, N>, N> h{};

  Jet() = default;
  Jet(double value) : v(value) {}  // NOLINT: implicit promotion of constants

  static Jet variable(double value, int index) {
    Jet r(value);
    r.g[index] = 1.0;
    return r;
  }

  Jet &operator+=(const Jet &o) {
    v += o.v;
    for (int i = 0; i < N; ++i) {
      g[i] += o.g[i];
      for (int j = 0; j < N; ++j) h[i][j] += o.h[i][j];
    }
    return *this;
  }
  Jet &operator-=(const Jet &o) {
    v -= o.v;
    for (int i = 0; i < N; ++i) {
      g[i] -= o.g[i];
      for (int j = 0; j < N; ++j) h[i][j] -= o.h[i][j];
    }
    return *this;
  }
  Jet &operator*=(const Jet &o) { return *this = *this * o; }
  Jet &operator/=(const Jet &o) { return *this = *this / o; }

  friend Jet operator+(Jet a, const Jet &b) { return a += b; }
  friend Jet operator-(Jet a, const Jet &b) { return a -= b; }
  friend Jet operator-(const Jet &a) {
    Jet r;
    r -= a;
    return r;
  }

  friend Jet operator*(const Jet &a, const Jet &b) {
    Jet r(a.v * b.v);
    for (int i = 0; i < N; ++i) {
      r.g[i] = a.g[i] * b.v + a.v * b.g[i];
      for (int j = 0; j < N; ++j)
        r.h[i][j] = a.h[i][j] * b.v + a.v * b.h[i][j] + a.g[i] * b.g[j] + a.g[j] * b.g[i];
    }
    return r;
  }

  friend Jet operator/(const Jet &a, const Jet &b) { return a * reciprocal(b); }

  friend bool operator<(const Jet &a, const Jet &b) { return a.v < b.v; }
  friend bool operator>(const Jet &a, const Jet &b) { return a.v > b.v; }

  // phi(a) given phi, phi', phi'' at a.v
  static Jet chain(const Jet &a, double f0, double f1, double f2) {
    Jet r(f0);
    for (int i = 0; i < N; ++i) {
      r.g[i] = f1 * a.g[i];
      for (int j = 0; j < N; ++j) r.h[i][j] = f1 * a.h[i][j] + f2 * a.g[i] * a.g[j];
    }
    return r;
  }

  friend Jet reciprocal(const Jet &a) {
    const double inv = 1.0 / a.v;
    return chain(a, inv, -inv * inv, 2.0 * inv * inv * inv);
  }
  friend Jet sqrt(const Jet &a) {
    const double s = std::sqrt(a.v);
    return chain(a, s, 0.5 / s, -0.25 / (s * a.v));
  }
  friend Jet exp(const Jet &a) {
    const double e = std::exp(a.v);
    return chain(a, e, e, e);
  }
};

inline double value_of(double x) { return x; }
template <int N>
double value_of(const Jet<N> &x) {
  return x.v;
}

}  // namespace zermelo

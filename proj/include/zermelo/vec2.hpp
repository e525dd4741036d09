#pragma once

#include <cmath>

namespace zermelo {

// Planar vector over a generic scalar so the metric formulas can be
// evaluated on both doubles and jets.
template <class T>
struct Vec2T {
  T x{};
  T y{};

  Vec2T &operator+=(const Vec2T &o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  Vec2T &operator-=(const Vec2T &o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  Vec2T &operator*=(const T &s) {
    x *= s;
    y *= s;
    return *this;
  }
};

template <class T>
Vec2T<T> operator+(Vec2T<T> a, const Vec2T<T> &b) {
  return a += b;
}
template <class T>
Vec2T<T> operator-(Vec2T<T> a, const Vec2T<T> &b) {
  return a -= b;
}
template <class T>
Vec2T<T> operator-(const Vec2T<T> &a) {
  return {-a.x, -a.y};
}
template <class T, class S>
Vec2T<T> operator*(const S &s, const Vec2T<T> &a) {
  return {s * a.x, s * a.y};
}
template <class T, class S>
Vec2T<T> operator*(const Vec2T<T> &a, const S &s) {
  return {a.x * s, a.y * s};
}
template <class T, class S>
Vec2T<T> operator/(const Vec2T<T> &a, const S &s) {
  return {a.x / s, a.y / s};
}

template <class T>
T dot(const Vec2T<T> &a, const Vec2T<T> &b) {
  return a.x * b.x + a.y * b.y;
}

// z-component of the planar cross product.
template <class T>
T cross(const Vec2T<T> &a, const Vec2T<T> &b) {
  return a.x * b.y - a.y * b.x;
}

using Vec2 = Vec2T<double>;
using Point = Vec2;

inline double norm(const Vec2 &a) { return std::hypot(a.x, a.y); }
inline double distance(const Point &a, const Point &b) { return norm(a - b); }
inline Vec2 unit(double angle) { return {std::cos(angle), std::sin(angle)}; }
inline Vec2 normalized(const Vec2 &a) { return a / norm(a); }
inline Vec2 rotated(const Vec2 &a, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * a.x - s * a.y, s * a.x + c * a.y};
}
inline bool operator==(const Vec2 &a, const Vec2 &b) { return a.x == b.x && a.y == b.y; }

// Row-major 2x2 matrix. For a wind jacobian, m[i][k] = dW^i/dx^k.
template <class T>
struct Mat2T {
  T m[2][2]{};

  T &operator()(int i, int j) { return m[i][j]; }
  const T &operator()(int i, int j) const { return m[i][j]; }

  T det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
  Vec2T<T> col(int k) const { return {m[0][k], m[1][k]}; }
};

using Mat2 = Mat2T<double>;

inline Mat2 identity2() {
  Mat2 r;
  r(0, 0) = 1.0;
  r(1, 1) = 1.0;
  return r;
}

}  // namespace zermelo

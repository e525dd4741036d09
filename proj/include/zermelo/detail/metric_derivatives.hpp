#pragma once

// Closed-form position/velocity partials of the Randers metric built from
// Euclidean navigation data (delta_ij, W), written against a generic scalar.
//
// With lambda = 1 - |W|^2, s = <W, p>, S = sqrt(lambda |p|^2 + s^2):
//   alpha = S / lambda,   beta = -s / lambda,   F = alpha + beta.
// Position derivatives use only W and its jacobian (chain rule through the
// wind), so on a jet scalar the result carries exact higher derivatives too.

#include "zermelo/vec2.hpp"

namespace zermelo::detail {

using std::sqrt;

template <class T>
struct MetricDerivatives {
  T value{};
  Vec2T<T> dv;   // dM/dp^l
  Mat2T<T> dvv;  // d2M/dp^i dp^j
  Vec2T<T> dx;   // dM/dx^k
  Mat2T<T> dxv;  // (k, l): d2M/dx^k dp^l
};

template <class T>
struct NavigationTerms {
  Vec2T<T> w;
  Vec2T<T> p;
  T lambda, s, n2, S;
  Vec2T<T> A;  // lambda p + s W = S dS/dp
  // per position coordinate k
  Vec2T<T> w_k[2];
  T s_k[2], lambda_k[2], S_k[2];
  Vec2T<T> A_k[2];
};

template <class T>
NavigationTerms<T> navigation_terms(const Vec2T<T> &w, const Mat2T<T> &jac, const Vec2T<T> &p) {
  NavigationTerms<T> t;
  t.w = w;
  t.p = p;
  t.lambda = 1.0 - dot(w, w);
  t.s = dot(w, p);
  t.n2 = dot(p, p);
  t.S = sqrt(t.lambda * t.n2 + t.s * t.s);
  t.A = t.lambda * p + t.s * w;
  for (int k = 0; k < 2; ++k) {
    t.w_k[k] = jac.col(k);
    t.s_k[k] = dot(t.w_k[k], p);
    t.lambda_k[k] = -2.0 * dot(w, t.w_k[k]);
    t.S_k[k] = (t.lambda_k[k] * t.n2 + 2.0 * t.s * t.s_k[k]) / (2.0 * t.S);
    t.A_k[k] = t.lambda_k[k] * p + t.s_k[k] * w + t.s * t.w_k[k];
  }
  return t;
}

template <class T>
MetricDerivatives<T> alpha_derivatives(const NavigationTerms<T> &t) {
  MetricDerivatives<T> d;
  const T &lam = t.lambda;
  const T &S = t.S;
  d.value = S / lam;
  d.dv = t.A / (lam * S);
  const T c1 = 1.0 / (lam * S);
  const T c3 = 1.0 / (lam * S * S * S);
  for (int i = 0; i < 2; ++i) {
    const T Ai = i == 0 ? t.A.x : t.A.y;
    const T wi = i == 0 ? t.w.x : t.w.y;
    for (int j = 0; j < 2; ++j) {
      const T Aj = j == 0 ? t.A.x : t.A.y;
      const T wj = j == 0 ? t.w.x : t.w.y;
      T aij = wi * wj;
      if (i == j) aij += lam;
      d.dvv(i, j) = aij * c1 - Ai * Aj * c3;
    }
  }
  for (int k = 0; k < 2; ++k) {
    const T dk = t.S_k[k] / lam - d.value * t.lambda_k[k] / lam;
    (k == 0 ? d.dx.x : d.dx.y) = dk;
    const Vec2T<T> row =
        (t.A_k[k] / S - t.A * (t.S_k[k] / (S * S))) / lam - d.dv * (t.lambda_k[k] / lam);
    d.dxv(k, 0) = row.x;
    d.dxv(k, 1) = row.y;
  }
  return d;
}

template <class T>
MetricDerivatives<T> beta_derivatives(const NavigationTerms<T> &t) {
  MetricDerivatives<T> d;
  const T &lam = t.lambda;
  d.value = -t.s / lam;
  d.dv = -t.w / lam;
  for (int k = 0; k < 2; ++k) {
    const T dk = -t.s_k[k] / lam + t.s * t.lambda_k[k] / (lam * lam);
    (k == 0 ? d.dx.x : d.dx.y) = dk;
    const Vec2T<T> row = -t.w_k[k] / lam + t.w * (t.lambda_k[k] / (lam * lam));
    d.dxv(k, 0) = row.x;
    d.dxv(k, 1) = row.y;
  }
  return d;
}

template <class T>
MetricDerivatives<T> operator+(const MetricDerivatives<T> &a, const MetricDerivatives<T> &b) {
  MetricDerivatives<T> r;
  r.value = a.value + b.value;
  r.dv = a.dv + b.dv;
  r.dx = a.dx + b.dx;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      r.dvv(i, j) = a.dvv(i, j) + b.dvv(i, j);
      r.dxv(i, j) = a.dxv(i, j) + b.dxv(i, j);
    }
  return r;
}

template <class T>
MetricDerivatives<T> randers_derivatives(const NavigationTerms<T> &t) {
  return alpha_derivatives(t) + beta_derivatives(t);
}

/// Partials of L = M^2 / 2.
template <class T>
struct EnergyDerivatives {
  T L{};
  Vec2T<T> dv;
  Mat2T<T> dvv;  // = fundamental tensor g_ij
  Vec2T<T> dx;
  Mat2T<T> dxv;
};

template <class T>
EnergyDerivatives<T> energy_derivatives(const MetricDerivatives<T> &m) {
  EnergyDerivatives<T> e;
  const T &M = m.value;
  e.L = 0.5 * M * M;
  e.dv = M * m.dv;
  e.dx = M * m.dx;
  const T mv[2] = {m.dv.x, m.dv.y};
  const T mx[2] = {m.dx.x, m.dx.y};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      e.dvv(i, j) = mv[i] * mv[j] + M * m.dvv(i, j);
      e.dxv(i, j) = mx[i] * mv[j] + M * m.dxv(i, j);
    }
  return e;
}

template <class T>
struct SprayTerms {
  T G{}, H{}, L{}, det{};
};

/// G^i = 1/2 g^{il} (L_{x^k p^l} p^k - L_{x^l}) with the 2x2 inverse written out.
template <class T>
SprayTerms<T> spray_terms(const EnergyDerivatives<T> &e, const Vec2T<T> &p) {
  const T r0 = e.dxv(0, 0) * p.x + e.dxv(1, 0) * p.y - e.dx.x;
  const T r1 = e.dxv(0, 1) * p.x + e.dxv(1, 1) * p.y - e.dx.y;
  SprayTerms<T> s;
  s.det = e.dvv(0, 0) * e.dvv(1, 1) - e.dvv(0, 1) * e.dvv(1, 0);
  const T inv2d = 1.0 / (2.0 * s.det);
  s.G = (e.dvv(1, 1) * r0 - e.dvv(0, 1) * r1) * inv2d;
  s.H = (-e.dvv(1, 0) * r0 + e.dvv(0, 0) * r1) * inv2d;
  s.L = e.L;
  return s;
}

}  // namespace zermelo::detail

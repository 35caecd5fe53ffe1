// Second-order forward-mode automatic differentiation scalar.
//
// Dual2 carries a value together with two first-order sensitivities and the
// mixed second-order sensitivity, i.e. it is a truncated Taylor expansion
//   f + d1*e1 + d2*e2 + d12*e1*e2          with e1^2 = e2^2 = 0.
// Seeding e1 along direction A and e2 along direction B makes an expression
// evaluated on Dual2 return f, df/dA, df/dB and d2f/dAdB in one pass.  Seeding
// both along the same variable yields the plain second derivative in d12.
#pragma once

#include <cmath>

namespace gvf {

struct Dual2 {
  double value = 0.0;
  double d1 = 0.0;   // sensitivity along the first seeded direction
  double d2 = 0.0;   // sensitivity along the second seeded direction
  double d12 = 0.0;  // mixed second-order sensitivity

  static Dual2 constant(double v) { return {v, 0.0, 0.0, 0.0}; }
  // A variable seeded with weight a along direction 1 and b along direction 2.
  static Dual2 variable(double v, double a, double b) { return {v, a, b, 0.0}; }
};

inline Dual2 operator+(Dual2 a, Dual2 b) {
  return {a.value + b.value, a.d1 + b.d1, a.d2 + b.d2, a.d12 + b.d12};
}

inline Dual2 operator-(Dual2 a, Dual2 b) {
  return {a.value - b.value, a.d1 - b.d1, a.d2 - b.d2, a.d12 - b.d12};
}

inline Dual2 operator-(Dual2 a) { return {-a.value, -a.d1, -a.d2, -a.d12}; }

inline Dual2 operator*(Dual2 a, Dual2 b) {
  return {a.value * b.value,
          a.value * b.d1 + a.d1 * b.value,
          a.value * b.d2 + a.d2 * b.value,
          a.value * b.d12 + a.d1 * b.d2 + a.d2 * b.d1 + a.d12 * b.value};
}

// Lift a scalar function through the expansion: given f(v), f'(v), f''(v),
//   f(u) = f + f'*(u - v) + f''/2*(u - v)^2  truncated at second order.
inline Dual2 chain(Dual2 u, double f, double df, double ddf) {
  return {f, df * u.d1, df * u.d2, df * u.d12 + ddf * u.d1 * u.d2};
}

inline Dual2 operator/(Dual2 a, Dual2 b) {
  const double v = b.value;
  return a * chain(b, 1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v));
}

inline Dual2 sin(Dual2 u) {
  const double s = std::sin(u.value), c = std::cos(u.value);
  return chain(u, s, c, -s);
}

inline Dual2 cos(Dual2 u) {
  const double s = std::sin(u.value), c = std::cos(u.value);
  return chain(u, c, -s, -c);
}

inline Dual2 tan(Dual2 u) {
  const double t = std::tan(u.value);
  const double sec2 = 1.0 + t * t;
  return chain(u, t, sec2, 2.0 * t * sec2);
}

inline Dual2 exp(Dual2 u) {
  const double e = std::exp(u.value);
  return chain(u, e, e, e);
}

inline Dual2 log(Dual2 u) {
  const double v = u.value;
  return chain(u, std::log(v), 1.0 / v, -1.0 / (v * v));
}

inline Dual2 sqrt(Dual2 u) {
  const double r = std::sqrt(u.value);
  return chain(u, r, 0.5 / r, -0.25 / (r * u.value));
}

// Nonnegative integer power by exact repeated multiplication of the value,
// with the usual power-rule sensitivities.
inline Dual2 pow_int(Dual2 u, int n) {
  if (n == 0) return Dual2::constant(1.0);
  if (n == 1) return u;
  auto ipow = [](double v, int k) {
    double acc = 1.0;
    for (int i = 0; i < k; ++i) acc *= v;
    return acc;
  };
  const double v = u.value;
  const double f = ipow(v, n);
  const double df = n * ipow(v, n - 1);
  const double ddf = static_cast<double>(n) * (n - 1) * ipow(v, n - 2);
  return chain(u, f, df, ddf);
}

}  // namespace gvf

#pragma once

#include <array>
#include <cmath>

namespace qlab {

// Truncated Taylor series c[0] + c[1] h + ... + c[ord] h^ord about a base
// point. Used to differentiate radial profiles exactly.
struct Jet {
  static constexpr int kMax = 10;
  std::array<double, kMax + 1> c{};
  int ord = 0;

  Jet() = default;
  Jet(double v, int order) : ord(order) { c[0] = v; }

  static Jet variable(double x0, int order) {
    Jet j(x0, order);
    if (order >= 1) j.c[1] = 1.0;
    return j;
  }
  double value() const { return c[0]; }
};

inline Jet operator+(Jet a, const Jet& b) {
  for (int i = 0; i <= a.ord; ++i) a.c[i] += b.c[i];
  return a;
}
inline Jet operator-(Jet a, const Jet& b) {
  for (int i = 0; i <= a.ord; ++i) a.c[i] -= b.c[i];
  return a;
}
inline Jet operator-(Jet a) {
  for (int i = 0; i <= a.ord; ++i) a.c[i] = -a.c[i];
  return a;
}
inline Jet operator+(Jet a, double s) {
  a.c[0] += s;
  return a;
}
inline Jet operator+(double s, Jet a) { return a + s; }
inline Jet operator-(Jet a, double s) {
  a.c[0] -= s;
  return a;
}
inline Jet operator-(double s, const Jet& a) { return (-a) + s; }
inline Jet operator*(Jet a, double s) {
  for (int i = 0; i <= a.ord; ++i) a.c[i] *= s;
  return a;
}
inline Jet operator*(double s, Jet a) { return a * s; }
inline Jet operator/(Jet a, double s) { return a * (1.0 / s); }

inline Jet operator*(const Jet& a, const Jet& b) {
  Jet r(0.0, a.ord);
  for (int m = 0; m <= a.ord; ++m) {
    double s = 0.0;
    for (int j = 0; j <= m; ++j) s += a.c[j] * b.c[m - j];
    r.c[m] = s;
  }
  return r;
}

inline Jet operator/(const Jet& a, const Jet& b) {
  Jet r(0.0, a.ord);
  for (int m = 0; m <= a.ord; ++m) {
    double s = a.c[m];
    for (int j = 1; j <= m; ++j) s -= b.c[j] * r.c[m - j];
    r.c[m] = s / b.c[0];
  }
  return r;
}
inline Jet operator/(double s, const Jet& b) { return Jet(s, b.ord) / b; }

inline Jet exp(const Jet& a) {
  Jet r(std::exp(a.c[0]), a.ord);
  for (int m = 1; m <= a.ord; ++m) {
    double s = 0.0;
    for (int j = 1; j <= m; ++j) s += j * a.c[j] * r.c[m - j];
    r.c[m] = s / m;
  }
  return r;
}

inline Jet log(const Jet& a) {
  Jet r(std::log(a.c[0]), a.ord);
  for (int m = 1; m <= a.ord; ++m) {
    double s = a.c[m];
    for (int j = 1; j < m; ++j) s -= (double(j) / m) * r.c[j] * a.c[m - j];
    r.c[m] = s / a.c[0];
  }
  return r;
}

inline Jet pow(const Jet& a, double alpha) {
  Jet r(std::pow(a.c[0], alpha), a.ord);
  for (int m = 1; m <= a.ord; ++m) {
    double s = 0.0;
    for (int j = 1; j <= m; ++j) s += ((alpha + 1.0) * j - m) * a.c[j] * r.c[m - j];
    r.c[m] = s / (m * a.c[0]);
  }
  return r;
}

inline Jet sqrt(const Jet& a) { return pow(a, 0.5); }

inline Jet log1p(const Jet& a) {
  Jet r = log(a + 1.0);
  r.c[0] = std::log1p(a.c[0]);
  return r;
}

inline Jet expm1(const Jet& a) {
  Jet r = exp(a);
  r.c[0] = std::expm1(a.c[0]);
  return r;
}

inline double value_of(double x) { return x; }
inline double value_of(const Jet& a) { return a.value(); }

// Derivative of the underlying function, as a jet of one lower order.
inline Jet derivative(const Jet& a) {
  Jet r(0.0, a.ord > 0 ? a.ord - 1 : 0);
  for (int m = 0; m < a.ord; ++m) r.c[m] = (m + 1) * a.c[m + 1];
  return r;
}

inline Jet truncate(const Jet& a, int ord) {
  Jet r = a;
  for (int m = ord + 1; m <= r.ord; ++m) r.c[m] = 0.0;
  r.ord = ord;
  return r;
}

// Radial flat Laplacian -(f'' + (n-1)/r f') of a radial profile given as a
// jet in r about r0 > 0; the order drops by two.
inline Jet radial_laplacian(const Jet& f, double r0, int n) {
  Jet d1 = derivative(f);
  Jet d2 = derivative(d1);
  const int o = d2.ord;
  Jet inv(0.0, o);
  double p = 1.0 / r0;
  for (int m = 0; m <= o; ++m) {
    inv.c[m] = (m % 2 ? -p : p);
    p /= r0;
  }
  Jet t = truncate(d1, o) * inv;
  return -(d2 + t * double(n - 1));
}

}  // namespace qlab

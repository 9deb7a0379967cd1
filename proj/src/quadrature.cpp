#include "femtet/quadrature.hpp"

#include <cmath>
#include <string>

#include "femtet/error.hpp"

namespace femtet {
namespace {

long double factorial(int n) {
  long double f = 1.0L;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

void add_point(QuadratureRule& rule, std::array<double, 4> lambda, double w) {
  rule.points.push_back(lambda);
  rule.weights.push_back(w);
}

// Orbit of (a, a, a, 1-3a) under permutations of the four coordinates.
void add_tet_orbit_4(QuadratureRule& rule, double a, double w) {
  const double b = 1.0 - 3.0 * a;
  add_point(rule, {b, a, a, a}, w);
  add_point(rule, {a, b, a, a}, w);
  add_point(rule, {a, a, b, a}, w);
  add_point(rule, {a, a, a, b}, w);
}

// Orbit of (a, a, b, b), b = 1/2 - a.
void add_tet_orbit_6(QuadratureRule& rule, double a, double w) {
  const double b = 0.5 - a;
  add_point(rule, {a, a, b, b}, w);
  add_point(rule, {a, b, a, b}, w);
  add_point(rule, {a, b, b, a}, w);
  add_point(rule, {b, a, a, b}, w);
  add_point(rule, {b, a, b, a}, w);
  add_point(rule, {b, b, a, a}, w);
}

// Orbit of (a, a, 1-2a) on the triangle.
void add_tri_orbit_3(QuadratureRule& rule, double a, double w) {
  const double b = 1.0 - 2.0 * a;
  add_point(rule, {b, a, a, 0.0}, w);
  add_point(rule, {a, b, a, 0.0}, w);
  add_point(rule, {a, a, b, 0.0}, w);
}

QuadratureRule tet_rule_low(int degree) {
  QuadratureRule rule;
  rule.kind = CellKind::Tetrahedron;
  if (degree <= 1) {
    add_point(rule, {0.25, 0.25, 0.25, 0.25}, 1.0);
    rule.exactness = 1;
  } else if (degree == 2) {
    add_tet_orbit_4(rule, 0.1381966011250105, 0.25);
    rule.exactness = 2;
  } else {
    // 14-point positive rule of degree 5.
    add_tet_orbit_4(rule, 0.3108859192633006, 0.1126879257180159);
    add_tet_orbit_4(rule, 0.0927352503108912, 0.0734930431163619);
    add_tet_orbit_6(rule, 0.0455037041256496, 0.0425460207770815);
    rule.exactness = 5;
  }
  return rule;
}

QuadratureRule tri_rule_low(int degree) {
  QuadratureRule rule;
  rule.kind = CellKind::Triangle;
  if (degree <= 1) {
    add_point(rule, {1.0 / 3, 1.0 / 3, 1.0 / 3, 0.0}, 1.0);
    rule.exactness = 1;
  } else if (degree == 2) {
    add_tri_orbit_3(rule, 1.0 / 6, 1.0 / 3);
    rule.exactness = 2;
  } else if (degree <= 4) {
    add_tri_orbit_3(rule, 0.445948490915965, 0.223381589678011);
    add_tri_orbit_3(rule, 0.091576213509771, 0.109951743655322);
    rule.exactness = 4;
  } else {
    add_point(rule, {1.0 / 3, 1.0 / 3, 1.0 / 3, 0.0}, 0.225);
    add_tri_orbit_3(rule, 0.470142064105115, 0.132394152788506);
    add_tri_orbit_3(rule, 0.101286507323456, 0.125939180544827);
    rule.exactness = 5;
  }
  return rule;
}

}  // namespace

QuadratureRule grundmann_moller_rule(CellKind kind, int s) {
  const int n = kind == CellKind::Tetrahedron ? 3 : 2;
  const int d = 2 * s + 1;
  QuadratureRule rule;
  rule.kind = kind;
  rule.exactness = d;
  // Closed-form weights integrate to 1/n!; rescale to unit total weight.
  const long double scale = factorial(n);
  for (int i = 0; i <= s; ++i) {
    long double wl = std::pow(2.0L, -2 * s) *
                     std::pow(static_cast<long double>(d + n - 2 * i), d) /
                     factorial(i) / factorial(d + n - i) * scale;
    if (i % 2 == 1) wl = -wl;
    const auto w = static_cast<double>(wl);
    const int k = s - i;
    const double denom = static_cast<double>(d + n - 2 * i);
    // All β with β_0 + ... + β_{n-1} ≤ k.
    std::array<int, 3> beta{0, 0, 0};
    while (true) {
      std::array<double, 4> lam{0.0, 0.0, 0.0, 0.0};
      double sum = 0.0;
      for (int j = 0; j < n; ++j) {
        lam[j + 1] = (2 * beta[j] + 1) / denom;
        sum += lam[j + 1];
      }
      lam[0] = 1.0 - sum;
      add_point(rule, lam, w);

      int j = 0;
      for (; j < n; ++j) {
        ++beta[j];
        int total = 0;
        for (int c = 0; c < n; ++c) total += beta[c];
        if (total <= k) break;
        beta[j] = 0;
      }
      if (j == n) break;
    }
  }
  return rule;
}

QuadratureRule simplex_rule(CellKind kind, int required_degree) {
  if (required_degree < 0) required_degree = 0;
  if (required_degree > kMaxQuadratureDegree) {
    throw Error(ErrorKind::DegreeTooHigh,
                "quadrature of degree " + std::to_string(required_degree) +
                    " (maximum " + std::to_string(kMaxQuadratureDegree) + ")");
  }
  if (kind == CellKind::Tetrahedron && required_degree <= 5) {
    return tet_rule_low(required_degree);
  }
  if (kind == CellKind::Triangle && required_degree <= 5) {
    return tri_rule_low(required_degree);
  }
  const int s = required_degree / 2;  // 2s + 1 ≥ required_degree
  return grundmann_moller_rule(kind, s);
}

double monomial_integral(std::span<const int> exponents, CellKind kind) {
  const int n = kind == CellKind::Tetrahedron ? 3 : 2;
  long double num = 1.0L;
  int total = 0;
  for (int k = 0; k < n; ++k) {
    const int e = k < static_cast<int>(exponents.size()) ? exponents[k] : 0;
    num *= factorial(e);
    total += e;
  }
  return static_cast<double>(num / factorial(total + n));
}

}  // namespace femtet

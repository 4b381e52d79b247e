#pragma once

// Gauss-Legendre nodes and weights by Newton iteration on the Legendre
// recurrence. Degrees here stay below a few hundred, where this construction
// is accurate to ~2 ulp; tests compare against tabulated reference rules.

#include <cmath>
#include <vector>

#include "core.hpp"

namespace scalelab::detail {

struct GaussRule {
  std::vector<double> x;  // nodes on (-1, 1), ascending
  std::vector<double> w;  // weights, sum to 2
};

inline const GaussRule& gauss_legendre(int n) {
  if (n < 1 || n > 4096)
    throw ValidationError("gauss_legendre: order out of range");
  static thread_local std::vector<GaussRule> cache;  // indexed by n
  if (static_cast<int>(cache.size()) <= n) cache.resize(n + 1);
  GaussRule& r = cache[n];
  if (!r.x.empty()) return r;

  r.x.assign(n, 0.0);
  r.w.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev-like initial guess for the i-th root of P_n
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    r.x[i] = -z;
    r.x[n - 1 - i] = z;
    r.w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    r.w[n - 1 - i] = r.w[i];
  }
  return r;
}

// Appends the order-n rule mapped to [a, b] onto (nodes, weights).
inline void append_panel(int n, double a, double b, std::vector<double>& nodes,
                         std::vector<double>& weights) {
  const GaussRule& g = gauss_legendre(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    nodes.push_back(mid + half * g.x[i]);
    weights.push_back(half * g.w[i]);
  }
}

}  // namespace scalelab::detail

#include "trimquad/gauss.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace trimquad {

namespace {

// Legendre P_n(x) and P_{n-1}(x) by the three-term recurrence.
void legendre(int n, double x, double& pn, double& pn1) {
  double p0 = 1.0;
  double p1 = x;
  if (n == 0) {
    pn = 1.0;
    pn1 = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  pn = p1;
  pn1 = p0;
}

}  // namespace

GaussRule GaussRule::mapped(double a, double b) const {
  GaussRule r;
  r.points.resize(points.size());
  r.weights.resize(weights.size());
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (std::size_t k = 0; k < points.size(); ++k) {
    r.points[k] = mid + half * points[k];
    r.weights[k] = half * weights[k];
  }
  return r;
}

GaussRule gaussLegendre(int n) {
  if (n < 1) throw std::invalid_argument("gaussLegendre: need at least one point");
  GaussRule r;
  r.points.resize(static_cast<std::size_t>(n));
  r.weights.resize(static_cast<std::size_t>(n));
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double pn, pn1;
      legendre(n, x, pn, pn1);
      dp = n * (x * pn - pn1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double pn, pn1;
    legendre(n, x, pn, pn1);
    dp = n * (x * pn - pn1) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.points[static_cast<std::size_t>(i)] = -x;
    r.points[static_cast<std::size_t>(n - 1 - i)] = x;
    r.weights[static_cast<std::size_t>(i)] = w;
    r.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) r.points[static_cast<std::size_t>(n / 2)] = 0.0;
  return r;
}

GaussRule gaussLobatto(int n) {
  if (n < 2) throw std::invalid_argument("gaussLobatto: need at least two points");
  const int N = n - 1;
  GaussRule r;
  r.points.resize(static_cast<std::size_t>(n));
  r.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    // Chebyshev-Gauss-Lobatto initial guess, Newton on (1-x^2) P_N'(x).
    double x = -std::cos(std::numbers::pi * i / N);
    if (i > 0 && i < N) {
      for (int it = 0; it < 100; ++it) {
        double pn, pn1;
        legendre(N, x, pn, pn1);
        const double dx = (x * pn - pn1) / (n * pn);
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
    }
    double pn, pn1;
    legendre(N, x, pn, pn1);
    r.points[static_cast<std::size_t>(i)] = x;
    r.weights[static_cast<std::size_t>(i)] = 2.0 / (N * n * pn * pn);
  }
  // Enforce exact symmetry.
  for (int i = 0; i < n / 2; ++i) {
    const auto a = static_cast<std::size_t>(i);
    const auto b = static_cast<std::size_t>(n - 1 - i);
    const double x = 0.5 * (r.points[b] - r.points[a]);
    r.points[a] = -x;
    r.points[b] = x;
    const double w = 0.5 * (r.weights[a] + r.weights[b]);
    r.weights[a] = w;
    r.weights[b] = w;
  }
  if (n % 2 == 1) r.points[static_cast<std::size_t>(n / 2)] = 0.0;
  return r;
}

}  // namespace trimquad

#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "hartree/params.hpp"

namespace hartree::quad {

/// Nodes and weights on the reference interval [-1, 1].
struct Rule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
  int size() const { return static_cast<int>(nodes.size()); }
};

/// Gauss-Jacobi rule for the weight (1-x)^a (1+x)^b, a, b > -1.
/// Golub-Welsch on the Jacobi matrix followed by Newton polishing of the nodes.
/// Results are cached; the returned reference stays valid for the process lifetime.
const Rule& gauss_jacobi(int order, double a, double b);

inline const Rule& gauss_legendre(int order) { return gauss_jacobi(order, 0.0, 0.0); }

/// Jacobi polynomial P_k^{(a,b)}(x) and its derivative, by three-term recurrence.
std::pair<double, double> jacobi_polynomial(int k, double a, double b, double x);

/// Integral over [lo, hi] of f with a Gauss-Legendre rule.
template <class F>
double integrate(F&& f, double lo, double hi, const Rule& rule) {
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  double acc = 0.0;
  for (int i = 0; i < rule.size(); ++i) acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * acc;
}

/// Integral over [0, w] of sigma^e f(sigma), the power carried by a Gauss-Jacobi rule.
template <class F>
double integrate_left_power(F&& f, double w, double e, int order) {
  const Rule& r = gauss_jacobi(order, 0.0, e);
  double acc = 0.0;
  for (int i = 0; i < r.size(); ++i) acc += r.weights[i] * f(0.5 * w * (1.0 + r.nodes[i]));
  return std::pow(0.5 * w, e + 1.0) * acc;
}

/// Composite rule on [0, 1] graded geometrically toward 0: Gauss-Legendre panels
/// [2^{-k-1}, 2^{-k}] for k < levels plus [0, 2^{-levels}]. Weights sum to 1.
Rule graded_unit_rule(int levels, int order = 10);

/// Result of a graded angular integral with an a-posteriori error estimate.
struct Estimate {
  double value = 0;
  double error = 0;
};

/// Integral over sigma in [0, 2] of sigma^a (2-sigma)^a g(sigma), where g behaves like
/// (delta + sigma)^{-gamma} times a smooth factor. The interval [0, 1] is split into
/// panels [2^{-k-1}, 2^{-k}] refined until the innermost width drops below delta; the
/// innermost panel carries sigma^a (or sigma^{a-gamma} when delta == 0, in which case
/// g(sigma) sigma^gamma must be smooth) in a Gauss-Jacobi weight.
/// Returns +inf when delta == 0 and a - gamma <= -1.
template <class G>
double graded_sigma_integral(double a, double gamma, double delta, G&& g, int order) {
  const Rule& leg = gauss_legendre(order);
  double total = 0.0;

  // [1, 2]: weight (2 - sigma)^a carried by a Jacobi rule in s = 2 - sigma.
  total += integrate_left_power([&](double s) { return std::pow(2.0 - s, a) * g(2.0 - s); }, 1.0, a, order);

  if (delta == 0.0) {
    const double e = a - gamma;
    if (e <= -1.0) return std::numeric_limits<double>::infinity();
    total += integrate_left_power(
        [&](double s) { return std::pow(2.0 - s, a) * g(s) * std::pow(s, gamma); }, 1.0, e, order);
    return total;
  }

  double w = 1.0;
  for (int level = 0; level < 1070 && w > delta; ++level) {
    const double lo = 0.5 * w;
    total += integrate(
        [&](double s) { return std::pow(s, a) * std::pow(2.0 - s, a) * g(s); }, lo, w, leg);
    w = lo;
  }
  total += integrate_left_power([&](double s) { return std::pow(2.0 - s, a) * g(s); }, w, a, order);
  return total;
}

/// graded_sigma_integral at two orders; the difference serves as error estimate.
template <class G>
Estimate graded_sigma_estimate(double a, double gamma, double delta, G&& g, int order) {
  Estimate e;
  e.value = graded_sigma_integral(a, gamma, delta, g, order);
  const double coarse = graded_sigma_integral(a, gamma, delta, g, order - 4);
  e.error = std::abs(e.value - coarse);
  return e;
}

/// Product Gauss rule on the unit sphere S^{n-1} of R^n, n in {3, 4, 5}, normalized to
/// unit total weight and exact for polynomials of degree <= `degree`.
struct SphereRule {
  Eigen::MatrixXd points;   // n x m, unit vectors
  Eigen::VectorXd weights;  // sums to 1
};

SphereRule sphere_rule(int n, int degree);

/// Same rule with every node rotated by `rotation` (orthogonal n x n).
SphereRule rotated(const SphereRule& rule, const Eigen::MatrixXd& rotation);

}  // namespace hartree::quad

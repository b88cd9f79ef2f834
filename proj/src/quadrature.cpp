#include "hartree/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <tuple>

#include <Eigen/Eigenvalues>

namespace hartree::quad {

std::pair<double, double> jacobi_polynomial(int k, double a, double b, double x) {
  if (k == 0) return {1.0, 0.0};
  double p_prev = 1.0;
  double p = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * x;
  for (int j = 2; j <= k; ++j) {
    const double s = 2.0 * j + a + b;
    const double c1 = 2.0 * j * (j + a + b) * (s - 2.0);
    const double c2 = (s - 1.0) * ((s * (s - 2.0)) * x + a * a - b * b);
    const double c3 = 2.0 * (j + a - 1.0) * (j + b - 1.0) * s;
    const double next = (c2 * p - c3 * p_prev) / c1;
    p_prev = p;
    p = next;
  }
  // (2k+a+b)(1-x^2) P_k' = k[(a-b) - (2k+a+b)x] P_k + 2(k+a)(k+b) P_{k-1}
  const double s = 2.0 * k + a + b;
  const double dp = (k * ((a - b) - s * x) * p + 2.0 * (k + a) * (k + b) * p_prev) / (s * (1.0 - x * x));
  return {p, dp};
}

namespace {

Rule build_gauss_jacobi(int n, double a, double b) {
  if (n < 1) throw ParameterError("quadrature order must be positive");
  if (!(a > -1.0 && b > -1.0)) throw ParameterError("Gauss-Jacobi exponents must exceed -1");

  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(std::max(n - 1, 1));
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    diag[k] = (k == 0) ? (b - a) / (a + b + 2.0) : (b * b - a * a) / (s * (s + 2.0));
  }
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    double beta2;
    if (k == 1)
      beta2 = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b) * (2.0 + a + b) * (3.0 + a + b));
    else
      beta2 = 4.0 * k * (k + a) * (k + b) * (k + a + b) / (s * s * (s + 1.0) * (s - 1.0));
    sub[k - 1] = std::sqrt(beta2);
  }

  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  if (n == 1) {
    rule.nodes[0] = diag[0];
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
    rule.nodes = solver.eigenvalues();
  }

  const double log_mu0 = (a + b + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                         std::lgamma(a + b + 2.0);
  // w_i = 2^{a+b+1} G(n+a+1) G(n+b+1) / (G(n+1) G(n+a+b+1)) / ((1-x^2) P_n'(x)^2)
  const double log_c = (a + b + 1.0) * std::log(2.0) + std::lgamma(n + a + 1.0) + std::lgamma(n + b + 1.0) -
                       std::lgamma(n + 1.0) - std::lgamma(n + a + b + 1.0);
  for (int i = 0; i < n; ++i) {
    double x = rule.nodes[i];
    if (n > 1) {
      for (int it = 0; it < 3; ++it) {
        const auto [p, dp] = jacobi_polynomial(n, a, b, x);
        const double dx = p / dp;
        x -= dx;
        if (std::abs(dx) < 1e-17) break;
      }
    }
    rule.nodes[i] = x;
    if (n == 1) {
      rule.weights[i] = std::exp(log_mu0);
    } else {
      const double dp = jacobi_polynomial(n, a, b, x).second;
      rule.weights[i] = std::exp(log_c) / ((1.0 - x * x) * dp * dp);
    }
  }
  return rule;
}

}  // namespace

const Rule& gauss_jacobi(int order, double a, double b) {
  static std::mutex mutex;
  static std::map<std::tuple<int, double, double>, std::unique_ptr<Rule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto key = std::make_tuple(order, a, b);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::make_unique<Rule>(build_gauss_jacobi(order, a, b))).first;
  return *it->second;
}

Rule graded_unit_rule(int levels, int order) {
  const Rule& leg = gauss_legendre(order);
  Rule g;
  g.nodes.resize((levels + 1) * order);
  g.weights.resize((levels + 1) * order);
  double hi = 1.0;
  int idx = 0;
  for (int k = 0; k <= levels; ++k) {
    const double lo = (k == levels) ? 0.0 : 0.5 * hi;
    for (int q = 0; q < order; ++q, ++idx) {
      g.nodes[idx] = lo + 0.5 * (hi - lo) * (1.0 + leg.nodes[q]);
      g.weights[idx] = 0.5 * (hi - lo) * leg.weights[q];
    }
    hi = lo;
  }
  return g;
}

SphereRule sphere_rule(int n, int degree) {
  if (n < 3 || n > 5) throw ParameterError("sphere quadrature supports n = 3, 4, 5 only");
  if (degree < 0) throw ParameterError("sphere quadrature degree must be nonnegative");
  const int q = degree / 2 + 1;
  const int nphi = degree + 1;

  // Polar angles theta_1..theta_{n-2}; theta_k carries sin^{n-1-k}, i.e. the
  // weight (1 - tau^2)^{(n-2-k)/2} in tau = cos(theta_k).
  std::vector<const Rule*> polar;
  for (int k = 1; k <= n - 2; ++k) {
    const double e = 0.5 * (n - 2 - k);
    polar.push_back(&gauss_jacobi(q, e, e));
  }

  int m = nphi;
  for (int k = 0; k < n - 2; ++k) m *= q;
  SphereRule rule;
  rule.points.resize(n, m);
  rule.weights.resize(m);

  std::vector<int> idx(n - 2, 0);
  int col = 0;
  for (int flat = 0; flat < m / nphi; ++flat) {
    int rem = flat;
    for (int k = n - 3; k >= 0; --k) {
      idx[k] = rem % q;
      rem /= q;
    }
    for (int j = 0; j < nphi; ++j) {
      const double phi = 2.0 * std::numbers::pi * (j + 0.5) / nphi;
      double w = 1.0 / nphi;
      double prod = 1.0;
      for (int k = 0; k < n - 2; ++k) {
        const double tau = polar[k]->nodes[idx[k]];
        w *= polar[k]->weights[idx[k]];
        rule.points(k, col) = prod * tau;
        prod *= std::sqrt(std::max(0.0, 1.0 - tau * tau));
      }
      rule.points(n - 2, col) = prod * std::cos(phi);
      rule.points(n - 1, col) = prod * std::sin(phi);
      rule.weights[col] = w;
      ++col;
    }
  }
  rule.weights /= rule.weights.sum();
  return rule;
}

SphereRule rotated(const SphereRule& rule, const Eigen::MatrixXd& rotation) {
  SphereRule out = rule;
  out.points = rotation * rule.points;
  return out;
}

}  // namespace hartree::quad

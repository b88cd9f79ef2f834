#include "hartree/constants.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace hartree {

namespace {

double checked_gamma(double x, const char* name) {
  const double g = std::tgamma(x);
  if (!std::isfinite(g) || g == 0.0)
    throw RangeError(std::string("gamma overflow in ") + name + " (argument " + std::to_string(x) + ")");
  return g;
}

double checked(double v, const char* name) {
  if (!std::isfinite(v) || v <= 0.0)
    throw RangeError(std::string("non-finite or non-positive value in ") + name);
  return v;
}

}  // namespace

double sphere_measure(int k) {
  const double h = 0.5 * (k + 1);
  return 2.0 * std::pow(std::numbers::pi, h) / checked_gamma(h, "Gamma((k+1)/2)");
}

double ball_volume(int k) {
  const double h = 0.5 * k;
  return std::pow(std::numbers::pi, h) / checked_gamma(h + 1.0, "Gamma(k/2+1)");
}

double critical_exponent(const ProblemParams& params) {
  params.validate();
  return (params.n + params.alpha) / (params.n - 2);
}

double critical_exponent_minus_one(const ProblemParams& params) {
  params.validate();
  return (2.0 + params.alpha) / (params.n - 2);
}

double talenti_amplitude(int n) { return std::pow(double(n) * (n - 2), 0.25 * (n - 2)); }

double bubble_amplitude(int n, double alpha, double S_n, double K_n) {
  const double denom = n - alpha + 2.0;
  return std::pow(S_n, (n - alpha) * (2.0 - n) / (4.0 * denom)) *
         std::pow(K_n, (2.0 - n) / (2.0 * denom)) * talenti_amplitude(n);
}

double bubble_convolution_factor(const ProblemParams& params) {
  params.validate();
  const double n = params.n;
  const double a = params.alpha;
  return std::pow(std::numbers::pi, 0.5 * n) * checked_gamma(0.5 * a, "Gamma(alpha/2)") /
         checked_gamma(0.5 * (n + a), "Gamma((n+alpha)/2)");
}

SharpConstants sharp_constants(const ProblemParams& params) {
  params.validate();
  const int n = params.n;
  const double a = params.alpha;
  const double pi = std::numbers::pi;

  SharpConstants c;
  c.p = critical_exponent(params);
  c.p_minus_1 = critical_exponent_minus_one(params);

  const double g_half_alpha = checked_gamma(0.5 * a, "Gamma(alpha/2)");
  const double g_half_n_alpha = checked_gamma(0.5 * (n + a), "Gamma((n+alpha)/2)");
  const double g_n = checked_gamma(double(n), "Gamma(n)");
  const double g_half_n = checked_gamma(0.5 * n, "Gamma(n/2)");
  const double ratio = (n - a) / n;
  c.H_n = checked(std::pow(pi, 0.5 * (n - a)) * g_half_alpha / g_half_n_alpha *
                      std::pow(g_n, 1.0 - ratio) * std::pow(g_half_n, ratio - 1.0),
                  "H_n(alpha)");

  c.omega = checked(sphere_measure(n), "omega_n");
  c.omega_nm1 = checked(sphere_measure(n - 1), "omega_{n-1}");
  c.omega_nm2 = checked(sphere_measure(n - 2), "omega_{n-2}");

  c.S_n = checked(std::sqrt(4.0 / (double(n) * (n - 2) * std::pow(c.omega, 2.0 / n))), "S_n");
  c.K_n = checked(c.S_n * std::pow(c.H_n, (2.0 - n) / (n + a)), "K_n(alpha)");
  c.C_n = checked(bubble_amplitude(n, a, c.S_n, c.K_n), "C_n(alpha)");
  return c;
}

}  // namespace hartree

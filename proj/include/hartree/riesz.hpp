#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "hartree/params.hpp"
#include "hartree/quadrature.hpp"
#include "hartree/radial.hpp"

namespace hartree {

/// Riesz kernel |x|^{beta-n} in dimension params.n, with a relative quadrature tolerance.
struct AngularKernelSpec {
  ProblemParams params;
  double beta = 2.0;
  double tol = 1e-10;

  AngularKernelSpec() = default;
  AngularKernelSpec(ProblemParams p, double b, double t = 1e-10) : params(p), beta(b), tol(t) { validate(); }

  static AngularKernelSpec riesz_alpha(const ProblemParams& p, double t = 1e-10) { return {p, p.alpha, t}; }
  static AngularKernelSpec laplacian(const ProblemParams& p, double t = 1e-10) { return {p, 2.0, t}; }

  void validate() const;
  /// (n - beta)/2
  double gamma() const { return 0.5 * (params.n - beta); }
};

/// f(xi) = |xi|^{p-2} xi and F(xi) = c_F |xi|^p.
struct NonlinearitySpec {
  double p = 5.0;
  double c_F = 1.0;

  static NonlinearitySpec critical(const ProblemParams& params, double c_F = 1.0);

  double F(double xi) const { return xi == 0.0 ? 0.0 : c_F * std::pow(std::abs(xi), p); }
  double f(double xi) const { return xi == 0.0 ? 0.0 : std::pow(std::abs(xi), p - 2.0) * xi; }
  double dF(double xi) const { return xi == 0.0 ? 0.0 : c_F * p * std::pow(std::abs(xi), p - 2.0) * xi; }
  double df(double xi) const { return xi == 0.0 ? 0.0 : (p - 1.0) * std::pow(std::abs(xi), p - 2.0); }
};

/// Radial reduction of |x - y|^{beta - n} over the sphere |y| = s:
///   k(r, s) = omega_{n-2} int_{-1}^{1} (1 - tau^2)^{(n-3)/2} (r^2 + s^2 - 2 r s tau)^{(beta-n)/2} dtau.
/// Throws AccuracyError when the embedded error estimate exceeds spec.tol (relative).
double angular_kernel(const AngularKernelSpec& spec, double r, double s);
quad::Estimate angular_kernel_estimate(const AngularKernelSpec& spec, double r, double s);

/// Log-cylindrical form of the same kernel,
///   2^{-gamma} omega_{n-2} int (1 - tau^2)^{(n-3)/2} (cosh t - tau)^{-gamma} dtau,
/// so that (r s)^{gamma} k(r, s) = kernel_hat(ln(r/s)). Infinite at t = 0 when beta <= 1.
double kernel_hat(const AngularKernelSpec& spec, double t);
quad::Estimate kernel_hat_estimate(const AngularKernelSpec& spec, double t);

/// Depth of geometric grading toward a kernel singularity of order |t|^{min(beta,1)-1} on a
/// panel of the given width, so that the innermost panel holds less than tol of the mass.
int singular_grading_levels(double width, double beta, double tol);

/// Limit of kernel_hat(t) e^{gamma |t|} as |t| -> infinity, which is omega_{n-1}.
double kernel_hat_decay_constant(const ProblemParams& params);

/// out(r) = int_0^infinity g(s) s^{n-1} k(r, s) ds on the profile's own grid. The profile is
/// continued past both ends by its declared power laws before the remainder is integrated in
/// closed form. Throws IntegrabilityError when a declared tail makes the integral diverge.
RadialProfile riesz_convolve(const RadialProfile& g, const AngularKernelSpec& spec);

/// A radial function given pointwise on [s_min, s_max], smooth between breakpoints.
/// Beyond each end it continues as a power law with the given exponent, or vanishes when
/// the exponent is empty.
struct RadialFunction {
  std::function<double(double)> g;
  double s_min = 1e-8;
  double s_max = 1e8;
  std::vector<double> breakpoints;
  std::optional<double> inner_exponent;
  std::optional<double> outer_exponent;
  double max_log_step = 0.02;
};

/// Same integral evaluated at arbitrary radii.
Eigen::VectorXd riesz_convolve(const RadialFunction& g, const Eigen::VectorXd& radii, const AngularKernelSpec& spec);

struct HartreeRhs {
  RadialProfile rhs;  // (R_alpha * F(u)) f(u)
  RadialProfile v;    // R_alpha * F(u)
};

HartreeRhs hartree_rhs(const RadialProfile& u, const NonlinearitySpec& nl, const AngularKernelSpec& spec_alpha);

/// -Delta u = -e^{-n x}(e^{(n-2)x} u_x)_x, x = ln r, by centered flux differences in x
/// (four-point one-sided at the ends), with one Richardson step on uniform log grids.
/// Needs at least 5 nodes.
RadialProfile radial_laplacian(const RadialProfile& u, int n);

enum class ResidualForm { Differential, Integral };

struct ResidualOptions {
  double window_lo = 0.05;
  double window_hi = 20.0;
  double tol = 1e-10;
  /// Constant in front of R_2 in the integral form; 1/((n-2) omega_{n-1}) when empty.
  std::optional<double> c_2;
};

struct ResidualReport {
  ResidualForm form = ResidualForm::Differential;
  RadialProfile residual;
  Eigen::VectorXd relative;  // pointwise residual over the local scale, 0 outside the window
  double relative_norm = 0;  // RMS of `relative` over ln r in the window
  double max_relative = 0;
  double c_F = 1;
  double c_2 = 0;
  double window_lo = 0;
  double window_hi = 0;
};

ResidualReport residual(const RadialProfile& u, const NonlinearitySpec& nl, const ProblemParams& params,
                        ResidualForm form, const ResidualOptions& options = {});

/// 1/((n-2) omega_{n-1}): -Delta of this times |x|^{2-n} is the unit point mass.
double newton_constant(int n);

/// c_F minimizing the relative differential residual of u over the window.
double calibrate_c_F(const RadialProfile& u, const ProblemParams& params, const ResidualOptions& options = {});

/// Closed-form c_F for the Hartree bubble of unit scale: n(n-2) / (C_n^{2p-2} I).
double bubble_c_F(const ProblemParams& params);

/// Least-squares c_2 for which u ~ c_2 R_2 * (-Delta u) holds in relative terms on the window.
double pin_c_2(const RadialProfile& u, int n, const ResidualOptions& options = {});

/// int |grad u|^2 / (int |u|^{2n/(n-2)})^{(n-2)/n} for radial u.
double sobolev_quotient(const RadialProfile& u, int n);

/// int_{R^n} (R_beta * f) g for radial f and g.
double riesz_bilinear(const RadialProfile& f, const RadialProfile& g, const AngularKernelSpec& spec);

struct HlsCheck {
  double double_integral = 0;
  double norm_sq = 0;  // ||f_*||^2 in L^{2n/(n+alpha)}
  double H_n = 0;
  double ratio = 0;
};

/// Evaluates the HLS double integral at f_*(x) = (1 + |x|^2)^{-(n+alpha)/2}.
HlsCheck hls_extremal_check(const ProblemParams& params, const RadialGrid& grid, double tol = 1e-10);

/// Geometric grid 1e-4..1e4 at 100 nodes per decade.
RadialGrid default_grid();

}  // namespace hartree

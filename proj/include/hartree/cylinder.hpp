#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hartree/params.hpp"
#include "hartree/radial.hpp"
#include "hartree/riesz.hpp"

namespace hartree {

enum class CylinderBoundary { Decaying, Periodic };

/// U(t) on the uniform grid t_k = t0 + k dt. A periodic profile holds one period,
/// t_k = k L / N for k < N, so that t0 = 0 and N dt = L.
class CylinderProfile {
 public:
  CylinderProfile() = default;
  CylinderProfile(double t0, double dt, Eigen::VectorXd values, CylinderBoundary boundary);
  static CylinderProfile periodic(double period, Eigen::VectorXd values);

  double t0() const { return t0_; }
  double dt() const { return dt_; }
  int size() const { return static_cast<int>(values_.size()); }
  double t(int k) const { return t0_ + k * dt_; }
  Eigen::VectorXd t_nodes() const;
  const Eigen::VectorXd& values() const { return values_; }
  CylinderBoundary boundary() const { return boundary_; }
  double period() const { return boundary_ == CylinderBoundary::Periodic ? size() * dt_ : 0.0; }

  /// |U| <= tol at both ends.
  bool decays(double tol = 1e-8) const;

 private:
  double t0_ = 0;
  double dt_ = 1;
  Eigen::VectorXd values_;
  CylinderBoundary boundary_ = CylinderBoundary::Decaying;
};

/// U(t) = r^{(n-2)/2} u(r), t = -ln r, on a uniform t-grid of spacing dt covering the
/// profile's range. Defaults to the profile's own log step when its grid is log-uniform.
CylinderProfile to_cylinder(const RadialProfile& u, const ProblemParams& params, std::optional<double> dt = {});
/// Same map sampled exactly from a field along the first axis, on [t_min, t_max].
CylinderProfile to_cylinder(const Field& u, double t_min, double t_max, double dt);

/// u(r) = r^{-(n-2)/2} U(-ln r) on the radii e^{-t_k}, exponents fitted from the ends.
RadialProfile from_cylinder(const CylinderProfile& U, const ProblemParams& params);

/// C (2 cosh t)^{-(n-2)/2}: the unit-scale Hartree bubble in cylinder variables.
double cylinder_bubble(const ProblemParams& params, double t);

/// The log-cylindrical Riesz kernel of order alpha.
double kernel_hat(const ProblemParams& params, double t, double tol = 1e-10);

/// sum_k kernel_hat(t + k L), truncated once a term drops below tol times the partial sum.
double periodized_kernel(const ProblemParams& params, double t, double L, double tol = 1e-10);

struct KernelTable {
  ProblemParams params;
  double tol = 1e-10;
  Eigen::VectorXd t;
  Eigen::VectorXd values;
  double decay_constant = 0;  // omega_{n-1}
};

/// Tabulates kernel_hat on t = -t_max .. t_max with the given spacing (t = 0 skipped when
/// the kernel is infinite there).
KernelTable make_kernel_table(const ProblemParams& params, double t_max = 10.0, double dt = 0.1, double tol = 1e-10);

/// Fourier transform of kernel_hat, Khat~(w) = 2 int_0^inf kernel_hat(t) cos(w t) dt, by a
/// fixed product rule in t plus the closed-form integral of the exponential far field.
class KernelSpectrum {
 public:
  KernelSpectrum(const ProblemParams& params, double tol = 1e-10);

  double operator()(double w) const;
  double derivative(double w) const;
  /// Khat~(0), the L^1 norm of kernel_hat.
  double l1() const { return l1_; }
  const ProblemParams& params() const { return params_; }

 private:
  ProblemParams params_;
  double gamma_ = 0;
  double omega_ = 0;
  double T_ = 0;
  Eigen::VectorXd t_;
  Eigen::VectorXd wk_;  // weight * kernel_hat(t)
  double l1_ = 0;
};

/// Cached per (n, alpha, tol); construction tabulates a few thousand kernel values.
std::shared_ptr<const KernelSpectrum> kernel_spectrum(const ProblemParams& params, double tol = 1e-10);

struct OdeResidual {
  CylinderProfile residual;
  double relative_norm = 0;  // ||res|| / ||-U'' + (n-2)^2/4 U||
};

/// -U'' + (n-2)^2/4 U - (Khat * F(U)) f(U). Decaying profiles use fourth-order differences and
/// hat-function product integration of the convolution (the two end pairs of nodes are
/// excluded); periodic profiles are treated spectrally.
OdeResidual ode_residual(const CylinderProfile& U, const NonlinearitySpec& nl, const KernelTable& kt);

/// Constant solution of the cylinder ODE: (n-2)^2/4 U = c_F Khat~(0) U^{2p-1}.
double constant_solution(const ProblemParams& params, const NonlinearitySpec& nl, double tol = 1e-10);

/// D(w) = w^2 + (n-2)^2/4 - A [p Khat~(w) + (p-1) Khat~(0)], A = (n-2)^2 / (4 Khat~(0)): the symbol
/// of the linearization at the constant solution. It does not depend on c_F.
double dispersion_function(const ProblemParams& params, double w, double tol = 1e-10);

struct DispersionRoot {
  double U_c = 0;
  bool found = false;  // false: no local bifurcation below w_max
  double omega0 = 0;
  double L0 = 0;
  std::string diagnostic;
};

DispersionRoot dispersion_root(const ProblemParams& params, const NonlinearitySpec& nl, const KernelTable& kt,
                               double w_max = 50.0, double w_step = 0.01);

}  // namespace hartree

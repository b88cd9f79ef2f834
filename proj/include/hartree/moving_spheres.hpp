#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hartree/params.hpp"
#include "hartree/radial.hpp"
#include "hartree/riesz.hpp"

namespace hartree {

/// Inversion about the sphere |z - center| = mu.
struct SphereInversion {
  Point center;
  double mu = 1.0;

  SphereInversion() = default;
  SphereInversion(Point c, double m) : center(std::move(c)), mu(m) { validate(); }
  void validate() const {
    if (!(mu > 0.0)) throw ParameterError("inversion radius mu must be positive");
  }
};

/// x + mu^2 (z - x) / |z - x|^2. Throws RangeError at z = x.
Point invert_point(const SphereInversion& inv, const Point& z);

/// y -> (mu / |y - x|)^exponent field(invert_point(inv, y)). Exponent n-2 for u, n-alpha for v.
Field kelvin_transform(const Field& field, const SphereInversion& inv, double exponent);

/// |y - z|^{-e} - (mu/|y - x|)^e |y* - z|^{-e} with y* the inverted y; e = n-2 for the
/// Laplacian kernel and n-alpha for the Riesz kernel.
double comparison_kernel(const SphereInversion& inv, const Point& z, const Point& y, double e);

/// Concentric shells around the inversion center, from |y - x| = mu outward, plus a ray
/// toward the origin and one away from it.
struct TestSetSpec {
  int shells = 24;
  int per_shell = 128;
  int ray_points = 512;
  double extent = 10.0;  // outermost shell at extent * max(mu, |x|)
  std::uint64_t seed = 1;
};

/// Points with |y - x| >= mu and y != 0.
std::vector<Point> make_test_set(int n, const SphereInversion& inv, const TestSetSpec& spec);

struct KernelSpotCheck {
  int samples = 0;
  int positive_2 = 0;      // pairs with K_2 > 0
  int positive_alpha = 0;  // pairs with K_alpha > 0
  double min_2 = 0;
  double min_alpha = 0;
  double boundary_max = 0;  // max |K| with y on the sphere, which should vanish
  bool passed() const { return positive_2 == samples && positive_alpha == samples; }
};

/// K_2 and K_alpha on random admissible pairs |z - x| > mu, |y - x| > mu.
KernelSpotCheck kernel_spot_check(const ProblemParams& params, const SphereInversion& inv, int samples,
                                  std::uint64_t seed);

struct ComparisonReport {
  SphereInversion inversion;
  std::vector<Point> test_points;
  Eigen::VectorXd deficits;  // u(y) - u_{x,mu}(y)
  Eigen::VectorXd scales;    // max(|u(y)|, |u_{x,mu}(y)|)
  double min_deficit = 0;
  double min_relative = 0;  // min of deficit / scale
  std::vector<int> violations;  // indices with deficit < -tol * scale
  double tol = 1e-8;
  std::optional<double> critical_radius;
  std::optional<KernelSpotCheck> kernels;
  bool nonnegative() const { return violations.empty(); }
};

/// Deficits by direct evaluation. Throws ParameterError naming the first inadmissible point.
ComparisonReport comparison_deficit(const Field& u, const SphereInversion& inv, const std::vector<Point>& test_set,
                                    double tol = 1e-8, int kernel_samples = 0, std::uint64_t seed = 1);

struct CriticalRadiusOptions {
  double mu_min = 1e-3;  // relative to max(|x|, 1)
  double mu_max = 0;     // absolute probe ceiling; 2 max(|x|, 1) when 0
  double tol = 1e-5;     // bisection width, absolute
  double deficit_tol = 1e-8;
  TestSetSpec test_set;
};

struct CriticalRadius {
  double mu_bar = 0;
  bool unbounded = false;  // predicate held at the probe ceiling
  double ceiling = 0;
  double distance_to_abs_x = 0;  // |mu_bar - |x||
  int evaluations = 0;
  std::string diagnostic;
};

/// Largest mu for which the deficit is nonnegative on the test set, by bisection.
CriticalRadius critical_radius(const Field& u, const Point& x, const CriticalRadiusOptions& options = {});

struct EqualityFit {
  Point x0;
  double mu_bar = 0;
  double amplitude = 0;  // a in a (mu / (1 + mu^2 |y - x0|^2))^{(n-2)/2}
  double fit_error = 0;  // relative RMS over the samples
  bool constant = false;
  bool bubble = false;  // fit_error <= bubble_tol
  int iterations = 0;
  std::string diagnostic;
};

/// Points on spheres |y| = r for radii geometric in [r_min, r_max].
std::vector<Point> sphere_samples(int n, double r_min, double r_max, int shells, int per_shell, std::uint64_t seed);

/// Levenberg-Marquardt fit of the bubble ansatz. Throws ConvergenceError with the last iterate.
EqualityFit equality_fit(const Field& u, const std::vector<Point>& samples, double bubble_tol = 1e-4);

/// Fourth-order central-difference Laplacian of a field at y with step h on every axis.
double fd_laplacian(const Field& u, const Point& y, double h);

struct KelvinResidual {
  EqualityFit image;  // locates the center the transformed field is radial about
  int points = 0;
  double max_relative = 0;
  double rms_relative = 0;
};

/// Pointwise residual of -Delta w = (R_alpha * F(w)) f(w) for a field w that is radial about
/// an unknown center. The center comes from equality_fit, the right-hand side from a radial
/// ray of w about that center, and -Delta w from fd_laplacian at each point. Points within
/// `exclude` of any entry of `avoid` are skipped.
KelvinResidual kelvin_residual(const Field& w, const NonlinearitySpec& nl, const std::vector<Point>& points,
                               const std::vector<Point>& avoid, double exclude, double tol = 1e-10);

}  // namespace hartree

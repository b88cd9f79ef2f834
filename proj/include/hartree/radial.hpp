#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hartree/constants.hpp"
#include "hartree/params.hpp"

namespace hartree {

/// Strictly increasing radii, graded geometrically, optionally refined on bands.
class RadialGrid {
 public:
  struct Band {
    double lo;
    double hi;
    int per_decade;
  };

  RadialGrid() = default;
  /// Takes ownership of explicit nodes; checks ordering, positivity and density.
  explicit RadialGrid(Eigen::VectorXd nodes);

  /// Geometric grid with `per_decade` nodes per decade (>= 16), plus refinement bands.
  static RadialGrid geometric(double r_min, double r_max, int per_decade, const std::vector<Band>& bands = {});

  const Eigen::VectorXd& nodes() const { return nodes_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  double operator[](int i) const { return nodes_[i]; }
  double r_min() const { return nodes_[0]; }
  double r_max() const { return nodes_[nodes_.size() - 1]; }
  const Eigen::VectorXd& log_nodes() const { return log_nodes_; }

  /// True when the log-spacing is constant to round-off.
  bool log_uniform() const { return log_uniform_; }
  double log_step(int i) const { return log_nodes_[i + 1] - log_nodes_[i]; }

  /// Index j with nodes[j] <= r < nodes[j+1], clamped to [0, size-2].
  int interval(double r) const;

 private:
  Eigen::VectorXd nodes_;
  Eigen::VectorXd log_nodes_;
  bool log_uniform_ = false;
};

enum class Extrapolation { Forbid, PowerLaw };

/// A radial function sampled on a RadialGrid with declared end exponents:
/// u(r) ~ r^{inner_exponent} as r -> 0 and u(r) ~ r^{outer_exponent} as r -> infinity.
///
/// Between nodes the profile is a monotone (Hyman-filtered) cubic Hermite interpolant in
/// (log r, log u) when every value is positive, and piecewise linear in (log r, u)
/// otherwise. Outside [r_min, r_max] values come from the declared power laws, and only
/// when the caller asks for it.
class RadialProfile {
 public:
  RadialProfile() = default;
  RadialProfile(RadialGrid grid, Eigen::VectorXd values, std::optional<double> inner_exponent,
                std::optional<double> outer_exponent);

  const RadialGrid& grid() const { return grid_; }
  const Eigen::VectorXd& values() const { return values_; }
  int size() const { return grid_.size(); }
  std::optional<double> inner_exponent() const { return inner_; }
  std::optional<double> outer_exponent() const { return outer_; }
  bool positive() const { return positive_; }

  double operator()(double r, Extrapolation ex = Extrapolation::Forbid) const;
  /// du/dr, same extrapolation contract.
  double derivative(double r, Extrapolation ex = Extrapolation::Forbid) const;

  /// Interpolant on interval j = [r_j, r_{j+1}] at log-fraction xi in [0, 1].
  double interval_value(int j, double xi) const;

  /// Log-log slopes fitted on the first and last decade (nullopt when undefined).
  std::pair<std::optional<double>, std::optional<double>> fitted_end_slopes() const;

  /// Declared exponents agree with the fitted end slopes to within `rel` (default 10%),
  /// measured as |declared - fitted| <= rel * max(|fitted|, 1).
  bool exponents_consistent(double rel = 0.1) const;

  /// Copy with new values on the same grid; exponents must be supplied.
  RadialProfile with_values(Eigen::VectorXd values, std::optional<double> inner,
                            std::optional<double> outer) const;

 private:
  void build_slopes();
  double tail(double r, bool inner_side) const;

  RadialGrid grid_;
  Eigen::VectorXd values_;
  Eigen::VectorXd logv_;
  Eigen::VectorXd slopes_;  // d log u / d log r at nodes (positive profiles only)
  std::optional<double> inner_;
  std::optional<double> outer_;
  bool positive_ = false;
};

/// Least-squares slope of log|values| against log r over nodes in [lo, hi]; nullopt if
/// fewer than two nodes qualify or a value is not strictly positive.
std::optional<double> log_log_slope(const RadialGrid& grid, const Eigen::VectorXd& values, double lo, double hi);

/// Profile on `grid` with both end exponents taken from log_log_slope over the end decades.
RadialProfile fitted_profile(const RadialGrid& grid, Eigen::VectorXd values);

/// Pointwise map R^n \ {0} -> R.
class Field {
 public:
  using Evaluator = std::function<double(const Point&)>;

  Field() = default;
  Field(ProblemParams params, Evaluator eval, bool radial, bool positive = true)
      : params_(params), eval_(std::move(eval)), radial_(radial), positive_(positive) {}

  double operator()(const Point& x) const { return eval_(x); }
  /// Value at distance r from the origin along the first coordinate axis.
  double along_axis(double r) const;

  const ProblemParams& params() const { return params_; }
  int dim() const { return params_.n; }
  bool is_radial() const { return radial_; }
  bool is_positive() const { return positive_; }

 private:
  ProblemParams params_;
  Evaluator eval_;
  bool radial_ = false;
  bool positive_ = true;
};

enum class BubbleNormalization { Hartree, Talenti };

/// A (1 + mu^2 d2)^{-(n-2)/2}, d2 = |x - x0|^2. Templated so it serves autodiff or
/// extended-precision scalars as well as double.
template <typename Scalar>
Scalar bubble_value(Scalar amplitude, Scalar mu, Scalar dist2, int n) {
  using std::pow;
  return amplitude * pow(Scalar(1) + mu * mu * dist2, Scalar(-0.5 * (n - 2)));
}

double bubble_amplitude(const ProblemParams& params, BubbleNormalization normalization);

/// A mu^{(n-2)/2} (1 + mu^2 |x - x0|^2)^{-(n-2)/2}, a solution for every mu > 0 and center.
Field make_bubble(const ProblemParams& params, const Point& center, double mu, BubbleNormalization normalization);

/// |x|^{-e} restricted to R^n \ {0}, times a constant.
Field make_power(const ProblemParams& params, double exponent, double scale = 1.0);

Field make_constant(const ProblemParams& params, double value);

/// Samples `field` at radius nodes[i] along `direction` (default e_1).
RadialProfile sample_radial(const Field& field, const RadialGrid& grid, const Point* direction = nullptr);

/// Mean of `field` over the sphere |x| = r, by a product Gauss rule exact for polynomials
/// of degree `order`. Optional orthogonal `rotation` reorients the rule.
double spherical_average(const Field& field, double r, int order = 20, const Eigen::MatrixXd* rotation = nullptr);

/// Integral over r in (0, infinity) of profile(r) r^{power}, with Gauss points per grid
/// interval and the declared tails integrated in closed form.
double radial_moment(const RadialProfile& profile, double power);

}  // namespace hartree

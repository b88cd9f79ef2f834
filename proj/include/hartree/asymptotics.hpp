#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hartree/cylinder.hpp"
#include "hartree/params.hpp"
#include "hartree/radial.hpp"

namespace hartree {

/// Geometric radii r_max, r_max 2^{-1/4}, ... spanning `decades` (at most 4) decades.
Eigen::VectorXd radii_ladder(double r_max, double decades);

struct UpperBoundScan {
  Eigen::VectorXd radii;    // decreasing
  Eigen::VectorXd s;        // r^{(n-2)/2} times the spherical average
  Eigen::VectorXd running_sup;
  double sup = 0;
  double small_slope = 0;   // d log s / d log r over the smallest decade
  double growth = 0;        // s(r_min) / s(r_max)
  bool divergent = false;
};

/// Divergence is flagged when s grows like r^{-1/4} or faster over the smallest decade, or
/// by more than 10x across the whole scan.
UpperBoundScan upper_bound_scan(const Field& u, const Eigen::VectorXd& radii, int order = 20);

struct SymmetryScan {
  Eigen::VectorXd radii;
  Eigen::VectorXd ratio;  // max / min - 1 over the sphere |x| = r
  std::optional<double> slope;  // log-log slope over the smallest decade
  bool radial = false;          // every ratio below round-off
  bool certified = false;       // radial, or slope >= 1 - slope_tol
};

SymmetryScan symmetry_ratio(const Field& u, const Eigen::VectorXd& radii, int order = 20, double slope_tol = 0.2);

struct BlowupFrame {
  Point x_bar;
  double scale = 0;  // u(x_bar)^{2/(2-n)}
  double value = 0;  // u(x_bar)
  Field w;           // w(y) = u(x_bar + scale y) / u(x_bar)
};

/// Throws ParameterError when u(x_bar) <= 0.
BlowupFrame blowup_rescale(const Field& u, const Point& x_bar);

/// A candidate blow-up limit in cylinder variables, u_inf(r) = r^{-(n-2)/2} U(-ln r + tau).
class LimitCandidate {
 public:
  enum class Kind { CylinderBubble, Periodic, Tabulated };

  static LimitCandidate cylinder_bubble(const ProblemParams& params);
  /// Periodic profile, evaluated by trigonometric interpolation.
  static LimitCandidate periodic(const ProblemParams& params, const CylinderProfile& U, std::string name = "delaunay");
  /// Decaying profile on a finite t-range, evaluated by cubic interpolation inside it.
  static LimitCandidate tabulated(const ProblemParams& params, const CylinderProfile& U, std::string name = "tabulated");

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  double period() const { return period_; }
  /// Range of t where U is defined; infinite for the bubble and periodic candidates.
  std::pair<double, double> t_range() const;
  double U(double t) const;
  double value(double r, double tau) const;

 private:
  Kind kind_ = Kind::CylinderBubble;
  ProblemParams params_;
  std::string name_;
  double period_ = 0;
  CylinderProfile table_;
  Eigen::VectorXd cos_, sin_;  // real Fourier coefficients of the periodic candidate
};

struct ProfileFit {
  std::string candidate;
  double tau = 0;
  Eigen::VectorXd radii;
  Eigen::VectorXd error;   // |u / u_inf - 1| at the optimized translation
  double objective = 0;    // RMS of log(u/u_inf) - b r over the smallest decade
  bool decreasing = false; // error decreases toward r_min over the smallest decade
  bool accepted = false;   // decreasing and error(r_min) <= accept_tol
  std::vector<std::pair<double, double>> local_minima;  // (tau, objective) from the multi-start
  double multistart_spread = 0;  // spread of the objective over the best local minima
};

/// Fits the single translation tau on the smallest decade of `radii`, allowing a correction
/// log(u/u_inf) ~ b r that vanishes at the origin. A scan of `starts` points is followed by
/// golden-section refinement of every local minimum. Throws CoverageError
/// when a tabulated candidate cannot cover the radii.
ProfileFit profile_fit(const Field& u, const LimitCandidate& candidate, const Eigen::VectorXd& radii,
                       int starts = 64, double accept_tol = 1e-2);

struct AsymptoticsReport {
  UpperBoundScan upper;
  SymmetryScan symmetry;
  std::vector<ProfileFit> fits;
};

AsymptoticsReport asymptotics_suite(const Field& u, const Eigen::VectorXd& radii,
                                    const std::vector<LimitCandidate>& candidates, int order = 20);

}  // namespace hartree

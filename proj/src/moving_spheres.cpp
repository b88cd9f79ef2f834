#include "hartree/moving_spheres.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <unsupported/Eigen/NonLinearOptimization>

#include "hartree/rng.hpp"

namespace hartree {

namespace {

void check_dim(const Point& p, int n, const char* what) {
  if (p.size() != n) throw ParameterError(std::string(what) + " has the wrong dimension");
}

std::string format_point(const Point& p) {
  std::ostringstream os;
  os.precision(17);
  os << "(";
  for (Eigen::Index k = 0; k < p.size(); ++k) os << (k ? ", " : "") << p[k];
  os << ")";
  return os.str();
}

}  // namespace

Point invert_point(const SphereInversion& inv, const Point& z) {
  check_dim(z, static_cast<int>(inv.center.size()), "point");
  const Point d = z - inv.center;
  const double d2 = d.squaredNorm();
  if (d2 == 0.0) throw RangeError("inversion is undefined at the center " + format_point(inv.center));
  return inv.center + (inv.mu * inv.mu / d2) * d;
}

Field kelvin_transform(const Field& field, const SphereInversion& inv, double exponent) {
  inv.validate();
  if (!(exponent > 0.0)) throw ParameterError("Kelvin exponent must be positive");
  check_dim(inv.center, field.dim(), "inversion center");
  const bool radial = field.is_radial() && inv.center.norm() == 0.0;
  return Field(
      field.params(),
      [field, inv, exponent](const Point& y) {
        const double dist = (y - inv.center).norm();
        return std::pow(inv.mu / dist, exponent) * field(invert_point(inv, y));
      },
      radial, field.is_positive());
}

double comparison_kernel(const SphereInversion& inv, const Point& z, const Point& y, double e) {
  const Point ys = invert_point(inv, y);
  const double dy = (y - inv.center).norm();
  return std::pow((y - z).norm(), -e) - std::pow(inv.mu / dy, e) * std::pow((ys - z).norm(), -e);
}

std::vector<Point> make_test_set(int n, const SphereInversion& inv, const TestSetSpec& spec) {
  inv.validate();
  check_dim(inv.center, n, "inversion center");
  if (spec.shells < 2 || spec.per_shell < 1 || spec.ray_points < 2 || !(spec.extent > 1.0))
    throw ParameterError("test set needs >= 2 shells, >= 1 point per shell, >= 2 ray points and extent > 1");
  const Point& x = inv.center;
  const double mu = inv.mu;
  const double ax = x.norm();
  const double far = spec.extent * std::max(mu, ax);
  const double guard = 1e-12 * std::max(1.0, ax);
  const CounterRng rng(spec.seed, 0x7e57);

  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(spec.shells) * spec.per_shell + 2 * spec.ray_points);
  auto push = [&](Point y) {
    if (y.norm() > guard && (y - x).norm() >= mu * (1.0 - 1e-12)) pts.push_back(std::move(y));
  };
  for (int k = 0; k < spec.shells; ++k) {
    const double d = k == 0 ? mu : mu * std::pow(far / mu, static_cast<double>(k) / (spec.shells - 1));
    for (int j = 0; j < spec.per_shell; ++j)
      push(x + d * rng.direction(n, static_cast<std::uint64_t>(k) * spec.per_shell + j));
  }

  Point toward = Point::Zero(n);
  if (ax > 0.0)
    toward = -x / ax;
  else
    toward[0] = 1.0;
  const double lo = 1e-6 * mu;
  const double hi = far - mu;
  for (int j = 0; j < spec.ray_points; ++j) {
    const double off = lo * std::pow(hi / lo, static_cast<double>(j) / (spec.ray_points - 1));
    push(x + (mu + off) * toward);
    push(x - (mu + off) * toward);
  }
  return pts;
}

KernelSpotCheck kernel_spot_check(const ProblemParams& params, const SphereInversion& inv, int samples,
                                  std::uint64_t seed) {
  params.validate();
  inv.validate();
  const int n = params.n;
  const CounterRng rz(seed, 0x2a), ry(seed, 0x2b), rr(seed, 0x2c);
  KernelSpotCheck out;
  out.samples = samples;
  out.min_2 = std::numeric_limits<double>::infinity();
  out.min_alpha = std::numeric_limits<double>::infinity();
  const double e2 = n - 2.0;
  const double ea = n - params.alpha;
  for (int i = 0; i < samples; ++i) {
    const std::uint64_t k = static_cast<std::uint64_t>(i);
    // Radii mu / (1 - U) cover (mu, infinity) with a heavy tail.
    const double dz = inv.mu / (1.0 - 0.999 * rr.uniform(2 * k) - 1e-9);
    const double dy = inv.mu / (1.0 - 0.999 * rr.uniform(2 * k + 1) - 1e-9);
    const Point z = inv.center + dz * rz.direction(n, k);
    const Point y = inv.center + dy * ry.direction(n, k);
    if ((y - z).norm() == 0.0) continue;
    const double k2 = comparison_kernel(inv, z, y, e2);
    const double ka = comparison_kernel(inv, z, y, ea);
    out.positive_2 += k2 > 0.0;
    out.positive_alpha += ka > 0.0;
    out.min_2 = std::min(out.min_2, k2);
    out.min_alpha = std::min(out.min_alpha, ka);

    const Point yb = inv.center + inv.mu * ry.direction(n, k);
    const double ref = std::pow((yb - z).norm(), -e2);
    out.boundary_max = std::max(out.boundary_max, std::abs(comparison_kernel(inv, z, yb, e2)) / ref);
  }
  return out;
}

ComparisonReport comparison_deficit(const Field& u, const SphereInversion& inv, const std::vector<Point>& test_set,
                                    double tol, int kernel_samples, std::uint64_t seed) {
  inv.validate();
  const int n = u.dim();
  check_dim(inv.center, n, "inversion center");
  const double mu = inv.mu;
  for (const Point& y : test_set) {
    check_dim(y, n, "test point");
    if (y.norm() == 0.0) throw ParameterError("test point is the origin");
    // Shell points sit on |y - x| = mu up to rounding; allow that much.
    if ((y - inv.center).norm() < mu * (1.0 - 1e-12))
      throw ParameterError("test point " + format_point(y) + " lies inside the inversion sphere");
  }
  const Field uk = kelvin_transform(u, inv, n - 2.0);

  ComparisonReport rep;
  rep.inversion = inv;
  rep.test_points = test_set;
  rep.tol = tol;
  const auto m = static_cast<Eigen::Index>(test_set.size());
  rep.deficits.resize(m);
  rep.scales.resize(m);
  rep.min_deficit = std::numeric_limits<double>::infinity();
  rep.min_relative = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < m; ++i) {
    const Point& y = test_set[static_cast<std::size_t>(i)];
    const double a = u(y);
    const double b = uk(y);
    if (!std::isfinite(a) || !std::isfinite(b))
      throw SamplingError("field is not finite at test point " + format_point(y));
    const double d = a - b;
    const double s = std::max({std::abs(a), std::abs(b), std::numeric_limits<double>::min()});
    rep.deficits[i] = d;
    rep.scales[i] = s;
    rep.min_deficit = std::min(rep.min_deficit, d);
    rep.min_relative = std::min(rep.min_relative, d / s);
    if (d < -tol * s) rep.violations.push_back(static_cast<int>(i));
  }
  if (kernel_samples > 0) rep.kernels = kernel_spot_check(u.params(), inv, kernel_samples, seed);
  return rep;
}

CriticalRadius critical_radius(const Field& u, const Point& x, const CriticalRadiusOptions& options) {
  check_dim(x, u.dim(), "center");
  const double ax = x.norm();
  const double base = std::max(ax, 1.0);
  CriticalRadius out;
  out.ceiling = options.mu_max > 0.0 ? options.mu_max : 2.0 * base;
  double lo = options.mu_min * base;
  double hi = out.ceiling;
  if (!(lo > 0.0 && lo < hi)) throw ParameterError("critical radius needs 0 < mu_min < mu_max");

  auto holds = [&](double mu) {
    ++out.evaluations;
    const SphereInversion inv(x, mu);
    return comparison_deficit(u, inv, make_test_set(u.dim(), inv, options.test_set), options.deficit_tol)
        .nonnegative();
  };

  if (!holds(lo)) {
    out.mu_bar = 0.0;
    out.distance_to_abs_x = ax;
    out.diagnostic = "deficit is negative already at the smallest probed radius";
    return out;
  }
  if (holds(hi)) {
    out.mu_bar = hi;
    out.unbounded = true;
    out.distance_to_abs_x = std::abs(hi - ax);
    out.diagnostic = "deficit is nonnegative at the probe ceiling";
    return out;
  }
  while (hi - lo > options.tol) {
    const double mid = 0.5 * (lo + hi);
    (holds(mid) ? lo : hi) = mid;
  }
  out.mu_bar = lo;
  out.distance_to_abs_x = std::abs(lo - ax);
  return out;
}

std::vector<Point> sphere_samples(int n, double r_min, double r_max, int shells, int per_shell, std::uint64_t seed) {
  if (!(r_min > 0.0 && r_max > r_min) || shells < 2 || per_shell < 1)
    throw ParameterError("sphere samples need 0 < r_min < r_max, >= 2 shells and >= 1 point per shell");
  const CounterRng rng(seed, 0x5a);
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(shells) * per_shell);
  for (int k = 0; k < shells; ++k) {
    const double r = r_min * std::pow(r_max / r_min, static_cast<double>(k) / (shells - 1));
    for (int j = 0; j < per_shell; ++j) pts.push_back(r * rng.direction(n, static_cast<std::uint64_t>(k) * per_shell + j));
  }
  return pts;
}

namespace {

// Parameters z = (log a, log mu, x0); residuals model / u - 1.
struct BubbleFitFunctor {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  const Eigen::MatrixXd& Y;  // n x m
  const Eigen::VectorXd& u;
  int n;
  double nu;

  int inputs() const { return n + 2; }
  int values() const { return static_cast<int>(u.size()); }

  int operator()(const Eigen::VectorXd& z, Eigen::VectorXd& f) const {
    const double mu = std::exp(z[1]);
    const Eigen::VectorXd d2 = (Y.colwise() - z.tail(n)).colwise().squaredNorm().transpose();
    const Eigen::ArrayXd m = std::exp(z[0] + nu * z[1]) * (1.0 + mu * mu * d2.array()).pow(-nu);
    f = (m / u.array() - 1.0).matrix();
    return 0;
  }

  int df(const Eigen::VectorXd& z, Eigen::MatrixXd& J) const {
    const double mu = std::exp(z[1]);
    const double mu2 = mu * mu;
    const Eigen::MatrixXd diff = Y.colwise() - z.tail(n);
    const Eigen::ArrayXd d2 = diff.colwise().squaredNorm().transpose().array();
    const Eigen::ArrayXd q = 1.0 + mu2 * d2;
    const Eigen::ArrayXd ratio = std::exp(z[0] + nu * z[1]) * q.pow(-nu) / u.array();
    J.resize(values(), inputs());
    J.col(0) = ratio.matrix();
    J.col(1) = (ratio * nu * (1.0 - mu2 * d2) / q).matrix();
    const Eigen::ArrayXd g = ratio * 2.0 * nu * mu2 / q;
    for (int k = 0; k < n; ++k) J.col(2 + k) = (g * diff.row(k).transpose().array()).matrix();
    return 0;
  }
};

}  // namespace

EqualityFit equality_fit(const Field& u, const std::vector<Point>& samples, double bubble_tol) {
  const int n = u.dim();
  const double nu = 0.5 * (n - 2);
  const auto m = static_cast<Eigen::Index>(samples.size());
  if (m < n + 3) throw ParameterError("equality fit needs at least n + 3 samples");
  Eigen::MatrixXd Y(n, m);
  Eigen::VectorXd vals(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    check_dim(samples[static_cast<std::size_t>(i)], n, "sample");
    Y.col(i) = samples[static_cast<std::size_t>(i)];
    vals[i] = u(Y.col(i));
    if (!std::isfinite(vals[i]) || !(vals[i] > 0.0))
      throw ParameterError("equality fit needs a positive bounded field; sample " + format_point(Y.col(i)) +
                           " gives " + std::to_string(vals[i]));
  }

  EqualityFit out;
  Eigen::Index imax = 0;
  const double umax = vals.maxCoeff(&imax);
  const double umin = vals.minCoeff();
  if (umax - umin <= 1e-12 * umax) {
    out.constant = true;
    out.amplitude = umax;
    out.x0 = Point::Zero(n);
    out.diagnostic = "constant field";
    return out;
  }

  // Start at the largest sample, scanning mu on a log grid with the amplitude matched there.
  const Point x_start = Y.col(imax);
  double best_mu = 1.0;
  double best_err = std::numeric_limits<double>::infinity();
  for (int k = -60; k <= 60; ++k) {
    const double mu = std::pow(10.0, 0.05 * k);
    const Eigen::ArrayXd d2 = (Y.colwise() - x_start).colwise().squaredNorm().transpose().array();
    const Eigen::ArrayXd model = umax * (1.0 + mu * mu * d2).pow(-nu);
    const double err = (model / vals.array() - 1.0).square().sum();
    if (err < best_err) {
      best_err = err;
      best_mu = mu;
    }
  }
  Eigen::VectorXd z(n + 2);
  z[0] = std::log(umax) - nu * std::log(best_mu);
  z[1] = std::log(best_mu);
  z.tail(n) = x_start;

  BubbleFitFunctor fn{Y, vals, n, nu};
  Eigen::LevenbergMarquardt<BubbleFitFunctor> lm(fn);
  lm.parameters.maxfev = 4000;
  lm.parameters.xtol = 1e-15;
  lm.parameters.ftol = 1e-15;
  const auto status = lm.minimize(z);
  out.iterations = static_cast<int>(lm.iter);
  out.amplitude = std::exp(z[0]);
  out.mu_bar = std::exp(z[1]);
  out.x0 = z.tail(n);
  if (status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters ||
      status == Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation || !z.allFinite()) {
    std::ostringstream os;
    os.precision(10);
    os << "bubble fit did not converge (status " << static_cast<int>(status) << "); last iterate a=" << out.amplitude
       << " mu=" << out.mu_bar << " x0=" << format_point(out.x0);
    throw ConvergenceError(os.str());
  }
  Eigen::VectorXd f(m);
  fn(z, f);
  out.fit_error = std::sqrt(f.squaredNorm() / static_cast<double>(m));
  out.bubble = out.fit_error <= bubble_tol;
  out.diagnostic = out.bubble ? "bubble" : "not a bubble: fit error above tolerance";
  return out;
}

double fd_laplacian(const Field& u, const Point& y, double h) {
  if (!(h > 0.0)) throw ParameterError("finite-difference step must be positive");
  const double u0 = u(y);
  double acc = 0;
  Point z = y;
  for (Eigen::Index k = 0; k < y.size(); ++k) {
    const double yk = y[k];
    z[k] = yk + h;
    const double p1 = u(z);
    z[k] = yk + 2 * h;
    const double p2 = u(z);
    z[k] = yk - h;
    const double m1 = u(z);
    z[k] = yk - 2 * h;
    const double m2 = u(z);
    z[k] = yk;
    acc += (-p2 + 16 * p1 - 30 * u0 + 16 * m1 - m2) / (12 * h * h);
  }
  return acc;
}

KelvinResidual kelvin_residual(const Field& w, const NonlinearitySpec& nl, const std::vector<Point>& points,
                               const std::vector<Point>& avoid, double exclude, double tol) {
  const ProblemParams& params = w.params();
  const int n = params.n;
  KelvinResidual out;

  std::vector<Point> kept;
  for (const Point& y : points) {
    bool ok = true;
    for (const Point& a : avoid) ok = ok && (y - a).norm() > exclude;
    if (ok) kept.push_back(y);
  }
  if (kept.size() < static_cast<std::size_t>(n + 3)) throw ParameterError("too few points left after exclusion");
  out.image = equality_fit(w, kept);
  if (out.image.constant) throw ParameterError("transformed field is constant");
  const Point x0 = out.image.x0;
  const double ell = 1.0 / out.image.mu_bar;

  // Radial ray of w about x0, away from the excluded points.
  Point dir = Point::Zero(n);
  dir[0] = 1.0;
  for (int k = 0; k < n; ++k) {
    Point e = Point::Zero(n);
    e[k] = (k % 2) ? -1.0 : 1.0;
    bool clear = true;
    for (const Point& a : avoid) {
      const Point d = a - x0;
      const double along = d.dot(e);
      if (along > 0 && (d - along * e).norm() < 2 * exclude) clear = false;
    }
    if (clear) {
      dir = e;
      break;
    }
  }
  const Field shifted(
      params, [w, x0](const Point& y) { return w(x0 + y); }, true);
  const RadialGrid grid = RadialGrid::geometric(1e-4 * ell, 1e4 * ell, 100);
  const RadialProfile u = sample_radial(shifted, grid, &dir);
  const HartreeRhs rhs = hartree_rhs(u, nl, AngularKernelSpec::riesz_alpha(params, tol));

  double acc = 0;
  for (const Point& y : kept) {
    const double rho = (y - x0).norm();
    const double h = 1e-3 * std::max(rho, ell);
    const double lhs = -fd_laplacian(w, y, h);
    const double r = rhs.rhs(rho);
    const double rel = std::abs(lhs - r) / std::max(std::abs(lhs), std::abs(r));
    out.max_relative = std::max(out.max_relative, rel);
    acc += rel * rel;
    ++out.points;
  }
  out.rms_relative = std::sqrt(acc / out.points);
  return out;
}

}  // namespace hartree

#include "hartree/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hartree/constants.hpp"
#include "hartree/quadrature.hpp"

namespace hartree {

namespace {

void check_radii(const Eigen::VectorXd& radii) {
  if (radii.size() < 2) throw ParameterError("need at least two radii");
  for (Eigen::Index i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw ParameterError("radii must be positive");
    if (i > 0 && !(radii[i] < radii[i - 1])) throw ParameterError("radii must decrease toward r_min");
  }
}

/// Indices of radii in [r_min, 10 r_min].
std::vector<Eigen::Index> smallest_decade(const Eigen::VectorXd& radii) {
  const double r_min = radii[radii.size() - 1];
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < radii.size(); ++i)
    if (radii[i] <= 10.0 * r_min * (1.0 + 1e-12)) idx.push_back(i);
  return idx;
}

std::optional<double> slope_on(const Eigen::VectorXd& radii, const Eigen::VectorXd& vals,
                               const std::vector<Eigen::Index>& idx) {
  if (idx.size() < 2) return std::nullopt;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (Eigen::Index i : idx) {
    if (!(vals[i] > 0.0)) return std::nullopt;
    const double x = std::log(radii[i]);
    const double y = std::log(vals[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(idx.size());
  const double den = m * sxx - sx * sx;
  if (den <= 0.0) return std::nullopt;
  return (m * sxy - sx * sy) / den;
}

}  // namespace

Eigen::VectorXd radii_ladder(double r_max, double decades) {
  if (!(r_max > 0.0)) throw ParameterError("ladder needs r_max > 0");
  if (!(decades > 0.0 && decades <= 4.0)) throw ParameterError("ladder spans (0, 4] decades");
  const int steps = static_cast<int>(std::floor(decades * std::log2(10.0) * 4.0 + 1e-9));
  Eigen::VectorXd r(steps + 1);
  for (int k = 0; k <= steps; ++k) r[k] = r_max * std::exp2(-0.25 * k);
  return r;
}

UpperBoundScan upper_bound_scan(const Field& u, const Eigen::VectorXd& radii, int order) {
  check_radii(radii);
  const double nu = u.params().nu();
  UpperBoundScan out;
  out.radii = radii;
  out.s.resize(radii.size());
  out.running_sup.resize(radii.size());
  double sup = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < radii.size(); ++i) {
    out.s[i] = std::pow(radii[i], nu) * spherical_average(u, radii[i], order);
    sup = std::max(sup, out.s[i]);
    out.running_sup[i] = sup;
  }
  out.sup = sup;
  out.small_slope = slope_on(radii, out.s, smallest_decade(radii)).value_or(0.0);
  out.growth = out.s[radii.size() - 1] / out.s[0];
  out.divergent = out.small_slope <= -0.25 || out.growth > 10.0 || !std::isfinite(sup);
  return out;
}

SymmetryScan symmetry_ratio(const Field& u, const Eigen::VectorXd& radii, int order, double slope_tol) {
  check_radii(radii);
  const quad::SphereRule rule = quad::sphere_rule(u.dim(), order);
  SymmetryScan out;
  out.radii = radii;
  out.ratio.resize(radii.size());
  for (Eigen::Index i = 0; i < radii.size(); ++i) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (Eigen::Index k = 0; k < rule.points.cols(); ++k) {
      const double v = u(radii[i] * rule.points.col(k));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    out.ratio[i] = hi / lo - 1.0;
  }
  out.radial = out.ratio.cwiseAbs().maxCoeff() <= 1e-13;
  out.slope = slope_on(radii, out.ratio, smallest_decade(radii));
  out.certified = out.radial || (out.slope && *out.slope >= 1.0 - slope_tol);
  return out;
}

BlowupFrame blowup_rescale(const Field& u, const Point& x_bar) {
  if (x_bar.size() != u.dim()) throw ParameterError("base point has the wrong dimension");
  const double value = u(x_bar);
  if (!(value > 0.0)) throw ParameterError("blow-up rescaling needs u(x_bar) > 0");
  const int n = u.dim();
  BlowupFrame f;
  f.x_bar = x_bar;
  f.value = value;
  f.scale = std::pow(value, 2.0 / (2.0 - n));
  const double scale = f.scale;
  f.w = Field(
      u.params(), [u, x_bar, scale, value](const Point& y) { return u(x_bar + scale * y) / value; }, false,
      u.is_positive());
  return f;
}

LimitCandidate LimitCandidate::cylinder_bubble(const ProblemParams& params) {
  params.validate();
  LimitCandidate c;
  c.kind_ = Kind::CylinderBubble;
  c.params_ = params;
  c.name_ = "cylinder_bubble";
  return c;
}

LimitCandidate LimitCandidate::periodic(const ProblemParams& params, const CylinderProfile& U, std::string name) {
  if (U.boundary() != CylinderBoundary::Periodic) throw ParameterError("periodic candidate needs a periodic profile");
  const int N = U.size();
  if (N < 4 || N % 2) throw ParameterError("periodic candidate needs an even number of samples, at least 4");
  LimitCandidate c;
  c.kind_ = Kind::Periodic;
  c.params_ = params;
  c.name_ = std::move(name);
  c.period_ = U.period();
  c.table_ = U;
  const int half = N / 2;
  c.cos_ = Eigen::VectorXd::Zero(half + 1);
  c.sin_ = Eigen::VectorXd::Zero(half + 1);
  const Eigen::VectorXd& v = U.values();
  for (int k = 0; k <= half; ++k) {
    double a = 0, b = 0;
    for (int j = 0; j < N; ++j) {
      const double th = 2.0 * std::numbers::pi * k * j / N;
      a += v[j] * std::cos(th);
      b += v[j] * std::sin(th);
    }
    const double w = (k == 0 || k == half) ? 1.0 / N : 2.0 / N;
    c.cos_[k] = w * a;
    c.sin_[k] = (k == 0 || k == half) ? 0.0 : w * b;
  }
  return c;
}

LimitCandidate LimitCandidate::tabulated(const ProblemParams& params, const CylinderProfile& U, std::string name) {
  if (U.size() < 4) throw ParameterError("tabulated candidate needs at least 4 samples");
  LimitCandidate c;
  c.kind_ = Kind::Tabulated;
  c.params_ = params;
  c.name_ = std::move(name);
  c.table_ = U;
  return c;
}

std::pair<double, double> LimitCandidate::t_range() const {
  if (kind_ != Kind::Tabulated) {
    const double inf = std::numeric_limits<double>::infinity();
    return {-inf, inf};
  }
  return {table_.t0(), table_.t(table_.size() - 1)};
}

double LimitCandidate::U(double t) const {
  switch (kind_) {
    case Kind::CylinderBubble:
      return hartree::cylinder_bubble(params_, t);
    case Kind::Periodic: {
      const double kappa = 2.0 * std::numbers::pi / period_;
      double acc = cos_[0];
      for (Eigen::Index k = 1; k < cos_.size(); ++k)
        acc += cos_[k] * std::cos(kappa * k * t) + sin_[k] * std::sin(kappa * k * t);
      return acc;
    }
    case Kind::Tabulated: {
      const auto [lo, hi] = t_range();
      if (t < lo || t > hi) throw CoverageError("tabulated candidate does not cover t = " + std::to_string(t));
      const int N = table_.size();
      const double x = (t - table_.t0()) / table_.dt();
      const int j = std::clamp(static_cast<int>(std::floor(x)) - 1, 0, N - 4);
      const double s = x - j;
      const Eigen::VectorXd& v = table_.values();
      // Four-point Lagrange on nodes j..j+3 at offset s.
      return -v[j] * (s - 1) * (s - 2) * (s - 3) / 6.0 + v[j + 1] * s * (s - 2) * (s - 3) / 2.0 -
             v[j + 2] * s * (s - 1) * (s - 3) / 2.0 + v[j + 3] * s * (s - 1) * (s - 2) / 6.0;
    }
  }
  return 0.0;
}

double LimitCandidate::value(double r, double tau) const { return std::pow(r, -params_.nu()) * U(-std::log(r) + tau); }

ProfileFit profile_fit(const Field& u, const LimitCandidate& candidate, const Eigen::VectorXd& radii, int starts,
                       double accept_tol) {
  check_radii(radii);
  if (starts < 4) throw ParameterError("profile fit needs at least 4 starts");
  const Eigen::Index m = radii.size();
  const double r_min = radii[m - 1];
  const double r_max = radii[0];

  double lo = 0, hi = 0;
  switch (candidate.kind()) {
    case LimitCandidate::Kind::CylinderBubble:
      lo = std::log(r_min) - 10.0;
      hi = std::log(r_max) + 10.0;
      break;
    case LimitCandidate::Kind::Periodic:
      // Two periods, so the global minimum is found twice by independent starts.
      lo = 0.0;
      hi = 2.0 * candidate.period();
      break;
    case LimitCandidate::Kind::Tabulated: {
      const auto [t_lo, t_hi] = candidate.t_range();
      lo = t_lo + std::log(r_max);
      hi = t_hi + std::log(r_min);
      if (!(hi > lo))
        throw CoverageError("candidate '" + candidate.name() + "' spans too short a t-range for radii [" +
                            std::to_string(r_min) + ", " + std::to_string(r_max) + "]");
      break;
    }
  }

  Eigen::VectorXd uv(m);
  for (Eigen::Index i = 0; i < m; ++i) uv[i] = spherical_average(u, radii[i]);
  const std::vector<Eigen::Index> decade = smallest_decade(radii);

  // log(u / u_inf) = b r + remainder on the smallest decade; b is projected out in closed
  // form so the correction vanishes at r = 0 and only the remainder is minimized.
  auto objective = [&](double tau) {
    double lr = 0, rr = 0;
    std::vector<double> ell;
    ell.reserve(decade.size());
    for (Eigen::Index i : decade) {
      const double q = uv[i] / candidate.value(radii[i], tau);
      if (!(q > 0.0) || !std::isfinite(q)) return std::numeric_limits<double>::infinity();
      ell.push_back(std::log(q));
      lr += ell.back() * radii[i];
      rr += radii[i] * radii[i];
    }
    const double b = lr / rr;
    double acc = 0;
    for (std::size_t k = 0; k < decade.size(); ++k) {
      const double e = ell[k] - b * radii[decade[k]];
      acc += e * e;
    }
    return std::sqrt(acc / static_cast<double>(decade.size()));
  };

  const double step = (hi - lo) / (starts - 1);
  Eigen::VectorXd scan(starts);
  for (int k = 0; k < starts; ++k) scan[k] = objective(lo + k * step);

  ProfileFit out;
  out.candidate = candidate.name();
  constexpr double g = 0.6180339887498949;
  for (int k = 0; k < starts; ++k) {
    const double left = k > 0 ? scan[k - 1] : std::numeric_limits<double>::infinity();
    const double right = k + 1 < starts ? scan[k + 1] : std::numeric_limits<double>::infinity();
    if (!(scan[k] <= left && scan[k] < right) || !std::isfinite(scan[k])) continue;
    double a = lo + std::max(k - 1, 0) * step;
    double b = lo + std::min(k + 1, starts - 1) * step;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = objective(c), fd = objective(d);
    for (int it = 0; it < 100 && b - a > 1e-13 * std::max(1.0, std::abs(a)); ++it) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - g * (b - a);
        fc = objective(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + g * (b - a);
        fd = objective(d);
      }
    }
    const double tau = 0.5 * (a + b);
    out.local_minima.emplace_back(tau, objective(tau));
  }
  if (out.local_minima.empty()) throw ConvergenceError("profile fit found no finite local minimum");

  auto best = std::min_element(out.local_minima.begin(), out.local_minima.end(),
                               [](const auto& x, const auto& y) { return x.second < y.second; });
  out.tau = best->first;
  out.objective = best->second;
  if (candidate.kind() == LimitCandidate::Kind::Periodic) {
    // Minima congruent to the best one modulo the period should agree.
    const double L = candidate.period();
    for (const auto& [tau, val] : out.local_minima) {
      const double shift = std::remainder(tau - out.tau, L);
      if (std::abs(shift) < 1e-3 * L) out.multistart_spread = std::max(out.multistart_spread, std::abs(val - out.objective));
    }
  }

  out.radii = radii;
  out.error.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) out.error[i] = std::abs(uv[i] / candidate.value(radii[i], out.tau) - 1.0);
  out.decreasing = true;
  for (std::size_t k = 1; k < decade.size(); ++k)
    if (out.error[decade[k]] > out.error[decade[k - 1]] + 1e-10) out.decreasing = false;
  out.accepted = out.decreasing && out.error[m - 1] <= accept_tol;
  return out;
}

AsymptoticsReport asymptotics_suite(const Field& u, const Eigen::VectorXd& radii,
                                    const std::vector<LimitCandidate>& candidates, int order) {
  AsymptoticsReport rep;
  rep.upper = upper_bound_scan(u, radii, order);
  rep.symmetry = symmetry_ratio(u, radii, order);
  for (const LimitCandidate& c : candidates) rep.fits.push_back(profile_fit(u, c, radii));
  return rep;
}

}  // namespace hartree

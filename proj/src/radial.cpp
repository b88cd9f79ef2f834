#include "hartree/radial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hartree/quadrature.hpp"

namespace hartree {

RadialGrid::RadialGrid(Eigen::VectorXd nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 2) throw GridError("radial grid needs at least two nodes");
  if (!(nodes_[0] > 0.0)) throw GridError("radial grid must have r_min > 0");
  for (Eigen::Index i = 1; i < nodes_.size(); ++i)
    if (!(nodes_[i] > nodes_[i - 1])) throw GridError("radial grid nodes must be strictly increasing");
  log_nodes_ = nodes_.array().log();

  // density: every full decade inside [r_min, r_max] holds at least 16 nodes
  const double decades = std::log10(r_max() / r_min());
  if (decades >= 1.0) {
    for (Eigen::Index i = 0; i < nodes_.size(); ++i) {
      const double hi = nodes_[i] * 10.0;
      if (hi > r_max() * (1 + 1e-12)) break;
      Eigen::Index count = 0;
      for (Eigen::Index j = i; j < nodes_.size() && nodes_[j] <= hi * (1 + 1e-12); ++j) ++count;
      if (count < 16) throw GridError("radial grid must carry at least 16 nodes per decade");
    }
  }

  const double h0 = log_nodes_[1] - log_nodes_[0];
  log_uniform_ = true;
  for (Eigen::Index i = 1; i + 1 < log_nodes_.size(); ++i)
    if (std::abs((log_nodes_[i + 1] - log_nodes_[i]) - h0) > 1e-9 * h0) {
      log_uniform_ = false;
      break;
    }
}

RadialGrid RadialGrid::geometric(double r_min, double r_max, int per_decade, const std::vector<Band>& bands) {
  if (!(r_min > 0.0 && r_max > r_min)) throw GridError("geometric grid needs 0 < r_min < r_max");
  if (per_decade < 16) throw GridError("geometric grid needs at least 16 nodes per decade");
  const double l0 = std::log10(r_min);
  const double l1 = std::log10(r_max);
  const int count = static_cast<int>(std::ceil((l1 - l0) * per_decade - 1e-9));
  std::vector<double> r;
  r.reserve(count + 1);
  for (int k = 0; k <= count; ++k) r.push_back(std::pow(10.0, l0 + double(k) / per_decade));
  r.back() = std::min(r.back(), r_max);
  // the last step may be short when the span is not a whole number of steps
  if (r.size() >= 2 && r.back() <= r[r.size() - 2]) r.pop_back();
  for (const Band& b : bands) {
    if (b.per_decade <= per_decade) continue;
    const double bl0 = std::log10(std::max(b.lo, r_min));
    const double bl1 = std::log10(std::min(b.hi, r_max));
    const int m = static_cast<int>(std::ceil((bl1 - bl0) * b.per_decade));
    for (int k = 0; k <= m; ++k) r.push_back(std::pow(10.0, bl0 + (bl1 - bl0) * k / std::max(m, 1)));
  }
  std::sort(r.begin(), r.end());
  std::vector<double> unique;
  for (double v : r)
    if (unique.empty() || v > unique.back() * (1 + 1e-12)) unique.push_back(v);
  return RadialGrid(Eigen::Map<Eigen::VectorXd>(unique.data(), unique.size()));
}

int RadialGrid::interval(double r) const {
  const auto* begin = nodes_.data();
  const auto* end = begin + nodes_.size();
  const auto* it = std::upper_bound(begin, end, r);
  int j = static_cast<int>(it - begin) - 1;
  return std::clamp(j, 0, size() - 2);
}

std::optional<double> log_log_slope(const RadialGrid& grid, const Eigen::VectorXd& values, double lo, double hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (int i = 0; i < grid.size(); ++i) {
    const double r = grid[i];
    if (r < lo * (1 - 1e-12) || r > hi * (1 + 1e-12)) continue;
    if (!(values[i] > 0.0)) return std::nullopt;
    const double x = std::log(r);
    const double y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) return std::nullopt;
  const double den = m * sxx - sx * sx;
  if (den <= 0) return std::nullopt;
  return (m * sxy - sx * sy) / den;
}

RadialProfile::RadialProfile(RadialGrid grid, Eigen::VectorXd values, std::optional<double> inner_exponent,
                             std::optional<double> outer_exponent)
    : grid_(std::move(grid)), values_(std::move(values)), inner_(inner_exponent), outer_(outer_exponent) {
  if (values_.size() != grid_.size()) throw GridError("profile values do not match grid size");
  for (int i = 0; i < values_.size(); ++i)
    if (!std::isfinite(values_[i])) {
      std::ostringstream os;
      os << "profile value at node " << i << " (r = " << grid_[i] << ") is not finite";
      throw SamplingError(os.str());
    }
  positive_ = (values_.array() > 0.0).all();
  build_slopes();
}

void RadialProfile::build_slopes() {
  const int n = size();
  if (!positive_) return;
  logv_ = values_.array().log();
  const Eigen::VectorXd& x = grid_.log_nodes();
  Eigen::VectorXd delta(n - 1);
  for (int i = 0; i + 1 < n; ++i) delta[i] = (logv_[i + 1] - logv_[i]) / (x[i + 1] - x[i]);
  slopes_.resize(n);
  if (n == 2) {
    slopes_.setConstant(delta[0]);
    return;
  }
  for (int i = 1; i + 1 < n; ++i) {
    const double h0 = x[i] - x[i - 1];
    const double h1 = x[i + 1] - x[i];
    slopes_[i] = (h1 * delta[i - 1] + h0 * delta[i]) / (h0 + h1);
  }
  {
    const double h0 = x[1] - x[0], h1 = x[2] - x[1];
    slopes_[0] = ((2 * h0 + h1) * delta[0] - h0 * delta[1]) / (h0 + h1);
    const double g0 = x[n - 1] - x[n - 2], g1 = x[n - 2] - x[n - 3];
    slopes_[n - 1] = ((2 * g0 + g1) * delta[n - 2] - g0 * delta[n - 3]) / (g0 + g1);
  }
  // Hyman filter: keep the interpolant monotone where the data are.
  for (int i = 0; i < n; ++i) {
    const double dl = (i > 0) ? delta[i - 1] : delta[0];
    const double dr = (i + 1 < n) ? delta[i] : delta[n - 2];
    if (dl * dr > 0.0) {
      const double bound = 3.0 * std::min(std::abs(dl), std::abs(dr));
      if (slopes_[i] * dl <= 0.0)
        slopes_[i] = 0.0;
      else if (std::abs(slopes_[i]) > bound)
        slopes_[i] = std::copysign(bound, dl);
    } else if (i > 0 && i + 1 < n) {
      slopes_[i] = 0.0;
    }
  }
}

double RadialProfile::interval_value(int j, double xi) const {
  if (!positive_) return (1.0 - xi) * values_[j] + xi * values_[j + 1];
  const double h = grid_.log_step(j);
  const double xi2 = xi * xi;
  const double xi3 = xi2 * xi;
  const double h00 = 2 * xi3 - 3 * xi2 + 1;
  const double h10 = xi3 - 2 * xi2 + xi;
  const double h01 = -2 * xi3 + 3 * xi2;
  const double h11 = xi3 - xi2;
  return std::exp(h00 * logv_[j] + h10 * h * slopes_[j] + h01 * logv_[j + 1] + h11 * h * slopes_[j + 1]);
}

double RadialProfile::tail(double r, bool inner_side) const {
  const int i = inner_side ? 0 : size() - 1;
  const auto& e = inner_side ? inner_ : outer_;
  if (values_[i] == 0.0) return 0.0;
  if (!e) throw GridError("extrapolation requested but the end exponent is undefined");
  return values_[i] * std::pow(r / grid_[i], *e);
}

double RadialProfile::operator()(double r, Extrapolation ex) const {
  if (r < grid_.r_min() * (1 - 1e-14) || r > grid_.r_max() * (1 + 1e-14)) {
    if (ex == Extrapolation::Forbid) {
      std::ostringstream os;
      os << "radius " << r << " outside profile range [" << grid_.r_min() << ", " << grid_.r_max() << "]";
      throw GridError(os.str());
    }
    return tail(r, r < grid_.r_min());
  }
  const int j = grid_.interval(r);
  const double xi = std::clamp((std::log(r) - grid_.log_nodes()[j]) / grid_.log_step(j), 0.0, 1.0);
  return interval_value(j, xi);
}

double RadialProfile::derivative(double r, Extrapolation ex) const {
  if (r < grid_.r_min() * (1 - 1e-14) || r > grid_.r_max() * (1 + 1e-14)) {
    const bool inner_side = r < grid_.r_min();
    const auto& e = inner_side ? inner_ : outer_;
    const double v = (*this)(r, ex);
    return v == 0.0 ? 0.0 : v * e.value() / r;
  }
  const int j = grid_.interval(r);
  const double h = grid_.log_step(j);
  const double xi = std::clamp((std::log(r) - grid_.log_nodes()[j]) / h, 0.0, 1.0);
  if (!positive_) return (values_[j + 1] - values_[j]) / h / r;
  const double xi2 = xi * xi;
  const double d00 = 6 * xi2 - 6 * xi;
  const double d10 = 3 * xi2 - 4 * xi + 1;
  const double d01 = -6 * xi2 + 6 * xi;
  const double d11 = 3 * xi2 - 2 * xi;
  const double dy = (d00 * logv_[j] + d01 * logv_[j + 1]) / h + d10 * slopes_[j] + d11 * slopes_[j + 1];
  return interval_value(j, xi) * dy / r;
}

std::pair<std::optional<double>, std::optional<double>> RadialProfile::fitted_end_slopes() const {
  const double lo = grid_.r_min();
  const double hi = grid_.r_max();
  const double span = std::min(10.0, hi / lo);
  return {log_log_slope(grid_, values_, lo, lo * span), log_log_slope(grid_, values_, hi / span, hi)};
}

bool RadialProfile::exponents_consistent(double rel) const {
  const auto [fi, fo] = fitted_end_slopes();
  auto ok = [rel](const std::optional<double>& declared, const std::optional<double>& fitted) {
    if (!declared || !fitted) return !declared && !fitted;
    return std::abs(*declared - *fitted) <= rel * std::max(std::abs(*fitted), 1.0);
  };
  return ok(inner_, fi) && ok(outer_, fo);
}

RadialProfile RadialProfile::with_values(Eigen::VectorXd values, std::optional<double> inner,
                                         std::optional<double> outer) const {
  return RadialProfile(grid_, std::move(values), inner, outer);
}

double Field::along_axis(double r) const {
  Point x = Point::Zero(dim());
  x[0] = r;
  return eval_(x);
}

double bubble_amplitude(const ProblemParams& params, BubbleNormalization normalization) {
  return normalization == BubbleNormalization::Hartree ? sharp_constants(params).C_n : talenti_amplitude(params.n);
}

Field make_bubble(const ProblemParams& params, const Point& center, double mu, BubbleNormalization normalization) {
  params.validate();
  if (!(mu > 0.0)) throw ParameterError("bubble scale mu must be positive");
  if (center.size() != params.n) throw ParameterError("bubble center has the wrong dimension");
  const double amp = bubble_amplitude(params, normalization) * std::pow(mu, params.nu());
  const int n = params.n;
  const bool radial = center.norm() == 0.0;
  return Field(
      params, [=](const Point& x) { return bubble_value(amp, mu, (x - center).squaredNorm(), n); }, radial);
}

Field make_power(const ProblemParams& params, double exponent, double scale) {
  params.validate();
  return Field(
      params, [=](const Point& x) { return scale * std::pow(x.norm(), -exponent); }, true, scale > 0);
}

Field make_constant(const ProblemParams& params, double value) {
  params.validate();
  return Field(
      params, [=](const Point&) { return value; }, true, value > 0);
}

RadialProfile sample_radial(const Field& field, const RadialGrid& grid, const Point* direction) {
  Point dir = Point::Zero(field.dim());
  if (direction) {
    if (direction->size() != field.dim()) throw ParameterError("sampling direction has the wrong dimension");
    dir = direction->normalized();
  } else {
    dir[0] = 1.0;
  }
  Eigen::VectorXd values(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    const double v = field(grid[i] * dir);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "field is not finite at node " << i << " (r = " << grid[i] << ")";
      throw SamplingError(os.str());
    }
    values[i] = v;
  }
  return fitted_profile(grid, std::move(values));
}

RadialProfile fitted_profile(const RadialGrid& grid, Eigen::VectorXd values) {
  const double span = std::min(10.0, grid.r_max() / grid.r_min());
  const auto inner = log_log_slope(grid, values, grid.r_min(), grid.r_min() * span);
  const auto outer = log_log_slope(grid, values, grid.r_max() / span, grid.r_max());
  return RadialProfile(grid, std::move(values), inner, outer);
}

double spherical_average(const Field& field, double r, int order, const Eigen::MatrixXd* rotation) {
  if (!(r > 0.0)) throw ParameterError("spherical average needs r > 0");
  const int n = field.dim();
  if (field.is_radial() && rotation == nullptr) return field.along_axis(r);
  quad::SphereRule rule = quad::sphere_rule(n, order);
  if (rotation) rule = quad::rotated(rule, *rotation);
  double acc = 0.0;
  for (Eigen::Index k = 0; k < rule.weights.size(); ++k) acc += rule.weights[k] * field(r * rule.points.col(k));
  return acc;
}

double radial_moment(const RadialProfile& profile, double power) {
  const RadialGrid& g = profile.grid();
  const quad::Rule& rule = quad::gauss_legendre(8);
  double acc = 0.0;
  for (int j = 0; j + 1 < g.size(); ++j) {
    const double h = g.log_step(j);
    const double x0 = g.log_nodes()[j];
    double part = 0.0;
    for (int q = 0; q < rule.size(); ++q) {
      const double xi = 0.5 * (1.0 + rule.nodes[q]);
      part += rule.weights[q] * profile.interval_value(j, xi) * std::exp((power + 1.0) * (x0 + xi * h));
    }
    acc += 0.5 * h * part;
  }
  const Eigen::VectorXd& v = profile.values();
  if (v[0] != 0.0) {
    const double e = profile.inner_exponent().value() + power + 1.0;
    if (!(e > 0.0)) throw IntegrabilityError("radial moment diverges at r = 0 for the declared inner exponent");
    acc += v[0] * std::pow(g.r_min(), power + 1.0) / e;
  }
  if (v[v.size() - 1] != 0.0) {
    const double e = profile.outer_exponent().value() + power + 1.0;
    if (!(e < 0.0)) throw IntegrabilityError("radial moment diverges at infinity for the declared outer exponent");
    acc += -v[v.size() - 1] * std::pow(g.r_max(), power + 1.0) / e;
  }
  return acc;
}

}  // namespace hartree

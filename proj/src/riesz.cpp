#include "hartree/riesz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hartree/constants.hpp"

namespace hartree {

namespace {

constexpr int kKernelOrder = 20;
constexpr double kTailSpan = 15.0;

double log_sinh(double y) { return y + std::log1p(-std::exp(-2.0 * y)) - std::numbers::ln2; }

void check_estimate(const quad::Estimate& e, double tol, const char* what) {
  if (!(e.error <= tol * std::abs(e.value))) {
    std::ostringstream os;
    os << what << ": quadrature error estimate " << e.error << " exceeds tolerance " << tol << " (value "
       << e.value << ")";
    throw AccuracyError(os.str(), e.error);
  }
}

// Offsets from the singular end, as fractions of the panel width.
struct GradedRule {
  std::vector<double> u;
  std::vector<double> w;
};

GradedRule graded_rule(int levels) {
  const quad::Rule r = quad::graded_unit_rule(levels);
  return {std::vector<double>(r.nodes.data(), r.nodes.data() + r.size()),
          std::vector<double>(r.weights.data(), r.weights.data() + r.size())};
}

int grading_levels(double width, const AngularKernelSpec& spec) {
  return singular_grading_levels(width, spec.beta, spec.tol);
}

// Power-law continuation g(s) = value (s / s_end)^q, written in x = ln s.
struct Tail {
  bool zero = true;
  double value = 0;
  double q = 0;
  double x_end = 0;
};

Tail make_tail(double value, std::optional<double> q, double x_end) {
  Tail t;
  if (value == 0.0 || !q) return t;
  t.zero = false;
  t.value = value;
  t.q = *q;
  t.x_end = x_end;
  return t;
}

void check_tails(const Tail& in, const Tail& out, const AngularKernelSpec& spec) {
  const int n = spec.params.n;
  if (!in.zero && !(in.q + n > 0.0)) {
    std::ostringstream os;
    os << "Riesz convolution diverges at the origin: inner exponent " << in.q << " needs to exceed " << -n;
    throw IntegrabilityError(os.str());
  }
  if (!out.zero && !(out.q + spec.beta < 0.0)) {
    std::ostringstream os;
    os << "Riesz convolution diverges at infinity: outer exponent " << out.q << " needs to be below "
       << -spec.beta;
    throw IntegrabilityError(os.str());
  }
}

// G(x) = g(e^x) e^{c x} on a tail.
double tail_G(const Tail& t, double x, double c) {
  if (t.zero) return 0.0;
  return t.value * std::exp(t.q * (x - t.x_end) + c * x);
}

// e^{-gamma x_r} times the integral of G(x) omega_{n-1} e^{-gamma |x_r - x|} beyond X0 (inner)
// or X1 (outer): the kernel's far-field form integrated in closed form.
double inner_remainder(const Tail& t, double X0, double x_r, const AngularKernelSpec& spec, double omega) {
  if (t.zero) return 0.0;
  const double c = 0.5 * (spec.params.n + spec.beta);
  const double g = spec.gamma();
  const double e = t.q * (X0 - t.x_end) + c * X0 + g * (X0 - x_r) - g * x_r;
  return t.value * omega * std::exp(e) / (t.q + spec.params.n);
}

double outer_remainder(const Tail& t, double X1, double x_r, const AngularKernelSpec& spec, double omega) {
  if (t.zero) return 0.0;
  const double c = 0.5 * (spec.params.n + spec.beta);
  const double g = spec.gamma();
  const double e = t.q * (X1 - t.x_end) + c * X1 - g * (X1 - x_r) - g * x_r;
  return t.value * omega * std::exp(e) / (-(t.q + spec.beta));
}

std::optional<double> convolved_inner(const Tail& t, double beta) {
  if (t.zero) return 0.0;
  return (t.q + beta > 0.0) ? 0.0 : t.q + beta;
}

std::optional<double> convolved_outer(const Tail& t, const AngularKernelSpec& spec) {
  if (t.zero) return spec.beta - spec.params.n;
  return (t.q + spec.params.n < 0.0) ? spec.beta - spec.params.n : t.q + spec.beta;
}

// Convolution on a uniform log grid: every kernel value depends on the lattice offset only.
RadialProfile convolve_uniform(const RadialProfile& prof, const AngularKernelSpec& spec, const Tail& in,
                               const Tail& out) {
  const RadialGrid& grid = prof.grid();
  const Eigen::VectorXd& x = grid.log_nodes();
  const int N = grid.size();
  const double h = (x[N - 1] - x[0]) / (N - 1);
  const int M = static_cast<int>(std::ceil(kTailSpan / h));
  const int P = N - 1 + 2 * M;  // panels p = -M .. N-2+M
  const double c = 0.5 * (spec.params.n + spec.beta);
  const double gam = spec.gamma();
  const double omega = kernel_hat_decay_constant(spec.params);

  const quad::Rule& far = quad::gauss_legendre(6);
  const quad::Rule& near = quad::gauss_legendre(10);
  const GradedRule grad = graded_rule(grading_levels(h, spec));
  const int nf = far.size(), nn = near.size(), ng = static_cast<int>(grad.u.size());

  auto left = [&](int p) {
    if (p < 0) return x[0] + p * h;
    if (p > N - 2) return x[N - 1] + (p - (N - 1)) * h;
    return x[p];
  };
  auto G = [&](int p, double xi) {
    const double xx = left(p) + xi * h;
    if (p < 0) return tail_G(in, xx, c);
    if (p > N - 2) return tail_G(out, xx, c);
    return prof.interval_value(p, xi) * std::exp(c * xx);
  };
  auto is_near = [](int m) { return (m >= -3 && m <= -1) || (m >= 2 && m <= 4); };

  Eigen::MatrixXd Gfar(nf, P), Gnear(nn, P);
  for (int pi = 0; pi < P; ++pi) {
    const int p = pi - M;
    for (int q = 0; q < nf; ++q) Gfar(q, pi) = G(p, 0.5 * (1.0 + far.nodes[q]));
    for (int q = 0; q < nn; ++q) Gnear(q, pi) = G(p, 0.5 * (1.0 + near.nodes[q]));
  }
  // graded panels are p = i (singular at the left end) and p = i - 1 (right end)
  Eigen::MatrixXd GL(ng, N + 1), GR(ng, N + 1);
  for (int p = -1; p <= N - 1; ++p)
    for (int k = 0; k < ng; ++k) {
      GL(k, p + 1) = G(p, grad.u[k]);
      GR(k, p + 1) = G(p, 1.0 - grad.u[k]);
    }

  const int m_min = -(N - 2 + M);
  const int m_max = N - 1 + M;
  Eigen::MatrixXd Kfar(nf, m_max - m_min + 1);
  for (int m = m_min; m <= m_max; ++m) {
    if (m == 0 || m == 1 || is_near(m)) continue;
    for (int q = 0; q < nf; ++q) Kfar(q, m - m_min) = kernel_hat(spec, (m - 0.5 * (1.0 + far.nodes[q])) * h);
  }
  Eigen::MatrixXd Knear(nn, 8);
  const int near_list[] = {-3, -2, -1, 2, 3, 4};
  for (int idx = 0; idx < 6; ++idx) {
    const int m = near_list[idx];
    for (int q = 0; q < nn; ++q) Knear(q, m + 3) = kernel_hat(spec, (m - 0.5 * (1.0 + near.nodes[q])) * h);
  }
  Eigen::VectorXd Kgrad(ng);
  for (int k = 0; k < ng; ++k) Kgrad[k] = kernel_hat(spec, grad.u[k] * h);

  Eigen::VectorXd wf = 0.5 * far.weights;
  Eigen::VectorXd wn = 0.5 * near.weights;
  Eigen::VectorXd wg = Eigen::Map<const Eigen::VectorXd>(grad.w.data(), ng);

  const double X0 = left(-M);
  const double X1 = left(N - 2 + M) + h;
  Eigen::VectorXd result(N);
  for (int i = 0; i < N; ++i) {
    double acc = 0.0;
    for (int pi = 0; pi < P; ++pi) {
      const int p = pi - M;
      const int m = i - p;
      double part;
      if (m == 0)
        part = (wg.array() * Kgrad.array() * GL.col(p + 1).array()).sum();
      else if (m == 1)
        part = (wg.array() * Kgrad.array() * GR.col(p + 1).array()).sum();
      else if (is_near(m))
        part = (wn.array() * Knear.col(m + 3).array() * Gnear.col(pi).array()).sum();
      else
        part = (wf.array() * Kfar.col(m - m_min).array() * Gfar.col(pi).array()).sum();
      acc += h * part;
    }
    result[i] = std::exp(-gam * x[i]) * acc + inner_remainder(in, X0, x[i], spec, omega) +
                outer_remainder(out, X1, x[i], spec, omega);
  }
  return RadialProfile(grid, std::move(result), convolved_inner(in, spec.beta), convolved_outer(out, spec));
}

// Panels [x_k, x_{k+1}] carrying G(k, x); evaluation at arbitrary x_r by direct kernel calls.
struct PanelSource {
  std::vector<double> x;
  std::function<double(int, double)> G;
  Tail in;
  Tail out;
};

double convolve_at(const PanelSource& src, double x_r, const AngularKernelSpec& spec) {
  const double c = 0.5 * (spec.params.n + spec.beta);
  const double gam = spec.gamma();
  const double omega = kernel_hat_decay_constant(spec.params);
  const quad::Rule& far = quad::gauss_legendre(6);
  const quad::Rule& near = quad::gauss_legendre(10);

  auto with_rule = [&](double a, double b, const quad::Rule& rule, auto&& Gx) {
    double acc = 0.0;
    for (int q = 0; q < rule.size(); ++q) {
      const double xx = a + 0.5 * (b - a) * (1.0 + rule.nodes[q]);
      acc += rule.weights[q] * Gx(xx) * kernel_hat(spec, x_r - xx);
    }
    return 0.5 * (b - a) * acc;
  };
  auto graded = [&](double a, double b, bool toward_a, auto&& Gx) {
    const GradedRule g = graded_rule(grading_levels(b - a, spec));
    double acc = 0.0;
    for (size_t k = 0; k < g.u.size(); ++k) {
      const double xx = toward_a ? a + g.u[k] * (b - a) : b - g.u[k] * (b - a);
      acc += g.w[k] * Gx(xx) * kernel_hat(spec, x_r - xx);
    }
    return (b - a) * acc;
  };
  auto panel = [&](double a, double b, auto&& Gx) {
    const double w = b - a;
    const double eps = 1e-12 * w;
    if (std::abs(x_r - a) <= eps) return graded(a, b, true, Gx);
    if (std::abs(x_r - b) <= eps) return graded(a, b, false, Gx);
    if (x_r > a && x_r < b) return graded(a, x_r, false, Gx) + graded(x_r, b, true, Gx);
    const double d = std::min(std::abs(x_r - a), std::abs(x_r - b));
    return with_rule(a, b, d < 3.0 * w ? near : far, Gx);
  };

  double acc = 0.0;
  const int K = static_cast<int>(src.x.size()) - 1;
  for (int k = 0; k < K; ++k) acc += panel(src.x[k], src.x[k + 1], [&](double xx) { return src.G(k, xx); });

  double X0 = src.x.front();
  if (!src.in.zero) {
    const double h = src.x[1] - src.x[0];
    const int M = static_cast<int>(std::ceil(kTailSpan / h));
    for (int j = 1; j <= M; ++j)
      acc += panel(X0 - j * h, X0 - (j - 1) * h, [&](double xx) { return tail_G(src.in, xx, c); });
    X0 -= M * h;
  }
  double X1 = src.x.back();
  if (!src.out.zero) {
    const double h = src.x[K] - src.x[K - 1];
    const int M = static_cast<int>(std::ceil(kTailSpan / h));
    for (int j = 1; j <= M; ++j)
      acc += panel(X1 + (j - 1) * h, X1 + j * h, [&](double xx) { return tail_G(src.out, xx, c); });
    X1 += M * h;
  }
  return std::exp(-gam * x_r) * acc + inner_remainder(src.in, X0, x_r, spec, omega) +
         outer_remainder(src.out, X1, x_r, spec, omega);
}

// Finite-difference weights for derivatives 0..2 at z from nodes xs (Fornberg).
Eigen::Matrix<double, 3, Eigen::Dynamic> fd_weights(double z, const double* xs, int m) {
  Eigen::Matrix<double, 3, Eigen::Dynamic> c = Eigen::Matrix<double, 3, Eigen::Dynamic>::Zero(3, m);
  double c1 = 1.0;
  double c4 = xs[0] - z;
  c(0, 0) = 1.0;
  for (int i = 1; i < m; ++i) {
    const int mn = std::min(i, 2);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c(k, i) = c1 * (k * c(k - 1, i - 1) - c5 * c(k, i - 1)) / c2;
        c(0, i) = -c1 * c5 * c(0, i - 1) / c2;
      }
      for (int k = mn; k >= 1; --k) c(k, j) = (c4 * c(k, j) - k * c(k - 1, j)) / c3;
      c(0, j) = c4 * c(0, j) / c3;
    }
    c1 = c2;
  }
  return c;
}

double window_weighted_rms(const RadialGrid& grid, const Eigen::VectorXd& rel, double lo, double hi,
                           double* max_abs) {
  const Eigen::VectorXd& x = grid.log_nodes();
  double num = 0.0, den = 0.0, mx = 0.0;
  for (int i = 0; i < grid.size(); ++i) {
    if (grid[i] < lo || grid[i] > hi) continue;
    const double wl = (i > 0 && grid[i - 1] >= lo) ? 0.5 * (x[i] - x[i - 1]) : 0.0;
    const double wr = (i + 1 < grid.size() && grid[i + 1] <= hi) ? 0.5 * (x[i + 1] - x[i]) : 0.0;
    num += (wl + wr) * rel[i] * rel[i];
    den += wl + wr;
    mx = std::max(mx, std::abs(rel[i]));
  }
  if (max_abs) *max_abs = mx;
  if (den == 0.0) throw GridError("residual window contains fewer than two grid nodes");
  return std::sqrt(num / den);
}

double relative_to(double res, double scale) { return scale == 0.0 ? 0.0 : res / scale; }

std::optional<double> scaled(std::optional<double> e, double k) {
  if (!e) return std::nullopt;
  return *e * k;
}

std::optional<double> summed(std::optional<double> a, std::optional<double> b) {
  if (!a || !b) return std::nullopt;
  return *a + *b;
}

}  // namespace

int singular_grading_levels(double width, double beta, double tol) {
  const double e = std::min(beta, 1.0);
  const double target = std::pow(0.1 * tol, 1.0 / e);
  const int levels = static_cast<int>(std::ceil(std::log2(width / target)));
  return std::clamp(levels, 4, 60);
}

void AngularKernelSpec::validate() const {
  params.validate();
  if (!(beta > 0.0 && beta < params.n))
    throw ParameterError("kernel order beta must lie in (0, n), got " + std::to_string(beta));
  if (!(tol > 0.0)) throw ParameterError("kernel tolerance must be positive");
}

NonlinearitySpec NonlinearitySpec::critical(const ProblemParams& params, double c_F) {
  if (!(c_F > 0.0)) throw ParameterError("c_F must be positive");
  NonlinearitySpec nl;
  nl.p = critical_exponent(params);
  nl.c_F = c_F;
  return nl;
}

quad::Estimate angular_kernel_estimate(const AngularKernelSpec& spec, double r, double s) {
  if (!(r > 0.0 && s > 0.0)) throw ParameterError("angular kernel needs r, s > 0");
  const int n = spec.params.n;
  const double a = 0.5 * (n - 3);
  const double g = spec.gamma();
  const double omega = sphere_measure(n - 2);
  const double d2 = (r - s) * (r - s);
  const double two_rs = 2.0 * r * s;
  const double delta = d2 / two_rs;
  auto G = [&](double sigma) { return std::pow(d2 + two_rs * sigma, -g); };
  quad::Estimate e = quad::graded_sigma_estimate(a, g, delta, G, kKernelOrder);
  e.value *= omega;
  e.error *= omega;
  return e;
}

double angular_kernel(const AngularKernelSpec& spec, double r, double s) {
  const quad::Estimate e = angular_kernel_estimate(spec, r, s);
  if (std::isinf(e.value)) return e.value;
  check_estimate(e, spec.tol, "angular_kernel");
  return e.value;
}

quad::Estimate kernel_hat_estimate(const AngularKernelSpec& spec, double t) {
  const int n = spec.params.n;
  const double a = 0.5 * (n - 3);
  const double g = spec.gamma();
  const double pref = std::pow(2.0, -g) * sphere_measure(n - 2);
  t = std::abs(t);
  quad::Estimate e;
  if (t == 0.0) {
    e = quad::graded_sigma_estimate(a, g, 0.0, [&](double s) { return std::pow(s, -g); }, kKernelOrder);
  } else {
    const double log_delta = std::numbers::ln2 + 2.0 * log_sinh(0.5 * t);
    const double delta = std::exp(log_delta);
    if (delta < 1.0) {
      e = quad::graded_sigma_estimate(a, g, delta, [&](double s) { return std::pow(delta + s, -g); },
                                      kKernelOrder);
    } else {
      e = quad::graded_sigma_estimate(a, g, delta, [&](double s) { return std::pow(1.0 + s / delta, -g); },
                                      kKernelOrder);
      const double f = std::exp(-g * log_delta);
      e.value *= f;
      e.error *= f;
    }
  }
  e.value *= pref;
  e.error *= pref;
  return e;
}

double kernel_hat(const AngularKernelSpec& spec, double t) {
  const quad::Estimate e = kernel_hat_estimate(spec, t);
  if (std::isinf(e.value)) return e.value;
  check_estimate(e, spec.tol, "kernel_hat");
  return e.value;
}

double kernel_hat_decay_constant(const ProblemParams& params) { return sphere_measure(params.n - 1); }

RadialProfile riesz_convolve(const RadialProfile& g, const AngularKernelSpec& spec) {
  spec.validate();
  const RadialGrid& grid = g.grid();
  const int N = grid.size();
  if (N < 2) throw GridError("convolution needs at least two nodes");
  const Eigen::VectorXd& x = grid.log_nodes();
  const Tail in = make_tail(g.values()[0], g.inner_exponent(), x[0]);
  const Tail out = make_tail(g.values()[N - 1], g.outer_exponent(), x[N - 1]);
  if ((g.values()[0] != 0.0 && !g.inner_exponent()) || (g.values()[N - 1] != 0.0 && !g.outer_exponent()))
    throw IntegrabilityError("convolution needs declared end exponents for a profile that does not vanish");
  check_tails(in, out, spec);

  if (g.values().isZero(0.0))
    return RadialProfile(grid, Eigen::VectorXd::Zero(N), std::nullopt, std::nullopt);

  if (grid.log_uniform()) return convolve_uniform(g, spec, in, out);

  PanelSource src;
  src.x.assign(x.data(), x.data() + N);
  const double c = 0.5 * (spec.params.n + spec.beta);
  src.G = [&](int k, double xx) { return g.interval_value(k, (xx - x[k]) / grid.log_step(k)) * std::exp(c * xx); };
  src.in = in;
  src.out = out;
  Eigen::VectorXd result(N);
  for (int i = 0; i < N; ++i) result[i] = convolve_at(src, x[i], spec);
  return RadialProfile(grid, std::move(result), convolved_inner(in, spec.beta), convolved_outer(out, spec));
}

Eigen::VectorXd riesz_convolve(const RadialFunction& fn, const Eigen::VectorXd& radii, const AngularKernelSpec& spec) {
  spec.validate();
  if (!(fn.s_min > 0.0 && fn.s_max > fn.s_min)) throw ParameterError("radial function needs 0 < s_min < s_max");
  std::vector<double> cuts{std::log(fn.s_min), std::log(fn.s_max)};
  for (double b : fn.breakpoints)
    if (b > fn.s_min && b < fn.s_max) cuts.push_back(std::log(b));
  std::sort(cuts.begin(), cuts.end());

  PanelSource src;
  for (size_t k = 0; k + 1 < cuts.size(); ++k) {
    const int m = std::max(1, static_cast<int>(std::ceil((cuts[k + 1] - cuts[k]) / fn.max_log_step)));
    for (int j = 0; j < m; ++j) src.x.push_back(cuts[k] + (cuts[k + 1] - cuts[k]) * j / m);
  }
  src.x.push_back(cuts.back());
  const double c = 0.5 * (spec.params.n + spec.beta);
  src.G = [&](int, double xx) { return fn.g(std::exp(xx)) * std::exp(c * xx); };
  src.in = make_tail(fn.g(fn.s_min), fn.inner_exponent, cuts.front());
  src.out = make_tail(fn.g(fn.s_max), fn.outer_exponent, cuts.back());
  check_tails(src.in, src.out, spec);

  Eigen::VectorXd result(radii.size());
  for (Eigen::Index i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw ParameterError("convolution radii must be positive");
    result[i] = convolve_at(src, std::log(radii[i]), spec);
  }
  return result;
}

HartreeRhs hartree_rhs(const RadialProfile& u, const NonlinearitySpec& nl, const AngularKernelSpec& spec_alpha) {
  const int N = u.size();
  Eigen::VectorXd Fu(N);
  for (int i = 0; i < N; ++i) Fu[i] = nl.F(u.values()[i]);
  const RadialProfile Fprof(u.grid(), std::move(Fu), scaled(u.inner_exponent(), nl.p),
                            scaled(u.outer_exponent(), nl.p));
  HartreeRhs out;
  out.v = riesz_convolve(Fprof, spec_alpha);
  Eigen::VectorXd r(N);
  for (int i = 0; i < N; ++i) r[i] = out.v.values()[i] * nl.f(u.values()[i]);
  out.rhs = RadialProfile(u.grid(), std::move(r), summed(out.v.inner_exponent(), scaled(u.inner_exponent(), nl.p - 1)),
                          summed(out.v.outer_exponent(), scaled(u.outer_exponent(), nl.p - 1)));
  return out;
}

RadialProfile radial_laplacian(const RadialProfile& u, int n) {
  const int N = u.size();
  if (N < 5) throw GridError("radial_laplacian needs at least 5 nodes");
  const Eigen::VectorXd& x = u.grid().log_nodes();
  const Eigen::VectorXd& v = u.values();
  // flux form -e^{-n x} (e^{(n-2)x} u_x)_x; exact on 1 and r^{2-n}
  Eigen::VectorXd flux(N - 1);
  for (int i = 0; i + 1 < N; ++i)
    flux[i] = std::exp((n - 2) * 0.5 * (x[i] + x[i + 1])) * (v[i + 1] - v[i]) / (x[i + 1] - x[i]);
  Eigen::VectorXd out(N);
  for (int i = 1; i + 1 < N; ++i)
    out[i] = -std::exp(-n * x[i]) * (flux[i] - flux[i - 1]) / (0.5 * (x[i + 1] - x[i - 1]));
  if (u.grid().log_uniform()) {
    // Richardson step against the same stencil at spacing 2h
    for (int i = 2; i + 2 < N; ++i) {
      const double fr = std::exp((n - 2) * 0.5 * (x[i] + x[i + 2])) * (v[i + 2] - v[i]) / (x[i + 2] - x[i]);
      const double fl = std::exp((n - 2) * 0.5 * (x[i - 2] + x[i])) * (v[i] - v[i - 2]) / (x[i] - x[i - 2]);
      const double coarse = -std::exp(-n * x[i]) * (fr - fl) / (0.5 * (x[i + 2] - x[i - 2]));
      out[i] = (4.0 * out[i] - coarse) / 3.0;
    }
  }
  for (int i : {0, N - 1}) {
    const int start = (i == 0) ? 0 : N - 4;
    const auto c = fd_weights(x[i], x.data() + start, 4);
    double ux = 0.0, uxx = 0.0;
    for (int k = 0; k < 4; ++k) {
      ux += c(1, k) * v[start + k];
      uxx += c(2, k) * v[start + k];
    }
    out[i] = -std::exp(-2.0 * x[i]) * (uxx + (n - 2) * ux);
  }
  return fitted_profile(u.grid(), std::move(out));
}

double newton_constant(int n) { return 1.0 / ((n - 2) * sphere_measure(n - 1)); }

ResidualReport residual(const RadialProfile& u, const NonlinearitySpec& nl, const ProblemParams& params,
                        ResidualForm form, const ResidualOptions& options) {
  params.validate();
  ResidualReport rep;
  rep.form = form;
  rep.c_F = nl.c_F;
  rep.c_2 = options.c_2.value_or(newton_constant(params.n));
  rep.window_lo = options.window_lo;
  rep.window_hi = options.window_hi;

  const int N = u.size();
  const RadialGrid& grid = u.grid();
  const HartreeRhs h = hartree_rhs(u, nl, AngularKernelSpec::riesz_alpha(params, options.tol));
  Eigen::VectorXd res(N);
  rep.relative = Eigen::VectorXd::Zero(N);
  if (form == ResidualForm::Differential) {
    const RadialProfile lap = radial_laplacian(u, params.n);
    for (int i = 0; i < N; ++i) {
      res[i] = lap.values()[i] - h.rhs.values()[i];
      if (grid[i] >= options.window_lo && grid[i] <= options.window_hi)
        rep.relative[i] = relative_to(res[i], std::max(std::abs(lap.values()[i]), std::abs(h.rhs.values()[i])));
    }
  } else {
    const RadialProfile w = riesz_convolve(h.rhs, AngularKernelSpec::laplacian(params, options.tol));
    for (int i = 0; i < N; ++i) {
      const double rhs = rep.c_2 * w.values()[i];
      res[i] = u.values()[i] - rhs;
      if (grid[i] >= options.window_lo && grid[i] <= options.window_hi)
        rep.relative[i] = relative_to(res[i], std::max(std::abs(u.values()[i]), std::abs(rhs)));
    }
  }
  rep.residual = fitted_profile(grid, std::move(res));
  rep.relative_norm = window_weighted_rms(grid, rep.relative, options.window_lo, options.window_hi, &rep.max_relative);
  return rep;
}

double calibrate_c_F(const RadialProfile& u, const ProblemParams& params, const ResidualOptions& options) {
  const RadialProfile lap = radial_laplacian(u, params.n);
  const HartreeRhs h = hartree_rhs(u, NonlinearitySpec::critical(params), AngularKernelSpec::riesz_alpha(params, options.tol));
  double num = 0.0, den = 0.0;
  for (int i = 0; i < u.size(); ++i) {
    const double r = u.grid()[i];
    if (r < options.window_lo || r > options.window_hi || lap.values()[i] == 0.0) continue;
    const double q = h.rhs.values()[i] / lap.values()[i];
    num += q;
    den += q * q;
  }
  if (den == 0.0) throw ConvergenceError("c_F calibration has no usable nodes in the window");
  return num / den;
}

double bubble_c_F(const ProblemParams& params) {
  const SharpConstants k = sharp_constants(params);
  const double n = params.n;
  return n * (n - 2) / (std::pow(k.C_n, 2.0 * k.p - 2.0) * bubble_convolution_factor(params));
}

double pin_c_2(const RadialProfile& u, int n, const ResidualOptions& options) {
  const ProblemParams params(n, 2.0);
  const RadialProfile lap = radial_laplacian(u, n);
  const RadialProfile w = riesz_convolve(lap, AngularKernelSpec::laplacian(params, options.tol));
  double num = 0.0, den = 0.0;
  for (int i = 0; i < u.size(); ++i) {
    const double r = u.grid()[i];
    if (r < options.window_lo || r > options.window_hi || u.values()[i] == 0.0) continue;
    const double q = w.values()[i] / u.values()[i];
    num += q;
    den += q * q;
  }
  if (den == 0.0) throw ConvergenceError("c_2 fit has no usable nodes in the window");
  return num / den;
}

double sobolev_quotient(const RadialProfile& u, int n) {
  const RadialGrid& grid = u.grid();
  Eigen::VectorXd du2(grid.size()), up(grid.size());
  const double q = 2.0 * n / (n - 2.0);
  for (int i = 0; i < grid.size(); ++i) {
    const double d = u.derivative(grid[i]);
    du2[i] = d * d;
    up[i] = std::pow(std::abs(u.values()[i]), q);
  }
  const double omega = sphere_measure(n - 1);
  const double dirichlet = omega * radial_moment(fitted_profile(grid, std::move(du2)), n - 1);
  const RadialProfile upp(grid, std::move(up), scaled(u.inner_exponent(), q), scaled(u.outer_exponent(), q));
  const double lq = omega * radial_moment(upp, n - 1);
  return dirichlet / std::pow(lq, 2.0 / q);
}

double riesz_bilinear(const RadialProfile& f, const RadialProfile& g, const AngularKernelSpec& spec) {
  const RadialProfile v = riesz_convolve(f, spec);
  Eigen::VectorXd prod = v.values().cwiseProduct(g.values());
  const RadialProfile p(f.grid(), std::move(prod), summed(v.inner_exponent(), g.inner_exponent()),
                        summed(v.outer_exponent(), g.outer_exponent()));
  return sphere_measure(spec.params.n - 1) * radial_moment(p, spec.params.n - 1);
}

HlsCheck hls_extremal_check(const ProblemParams& params, const RadialGrid& grid, double tol) {
  const int n = params.n;
  const double e = 0.5 * (n + params.alpha);
  Eigen::VectorXd f(grid.size()), fq(grid.size());
  const double q = 2.0 * n / (n + params.alpha);
  for (int i = 0; i < grid.size(); ++i) {
    f[i] = std::pow(1.0 + grid[i] * grid[i], -e);
    fq[i] = std::pow(f[i], q);
  }
  const RadialProfile fs(grid, std::move(f), 0.0, -2.0 * e);
  const RadialProfile fsq(grid, std::move(fq), 0.0, -2.0 * e * q);

  HlsCheck out;
  out.double_integral = riesz_bilinear(fs, fs, AngularKernelSpec::riesz_alpha(params, tol));
  out.norm_sq = std::pow(sphere_measure(n - 1) * radial_moment(fsq, n - 1), 2.0 / q);
  out.H_n = sharp_constants(params).H_n;
  out.ratio = out.double_integral / (out.H_n * out.norm_sq);
  return out;
}

RadialGrid default_grid() { return RadialGrid::geometric(1e-4, 1e4, 100); }

}  // namespace hartree

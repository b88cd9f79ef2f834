#include "hartree/cylinder.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include <unsupported/Eigen/FFT>

#include "hartree/constants.hpp"
#include "hartree/quadrature.hpp"

namespace hartree {

namespace {

constexpr double kFarField = 25.0;

double nu2(const ProblemParams& p) { return 0.25 * (p.n - 2) * (p.n - 2); }

// Signed frequency index of DFT bin j.
int signed_bin(int j, int N) { return (j <= N / 2) ? j : j - N; }

}  // namespace

CylinderProfile::CylinderProfile(double t0, double dt, Eigen::VectorXd values, CylinderBoundary boundary)
    : t0_(t0), dt_(dt), values_(std::move(values)), boundary_(boundary) {
  if (!(dt_ > 0.0)) throw GridError("cylinder grid spacing must be positive");
  if (values_.size() < 2) throw GridError("cylinder profile needs at least two samples");
  if (!values_.allFinite()) throw SamplingError("cylinder profile has non-finite samples");
}

CylinderProfile CylinderProfile::periodic(double period, Eigen::VectorXd values) {
  if (!(period > 0.0)) throw ParameterError("period must be positive");
  const double dt = period / values.size();
  return CylinderProfile(0.0, dt, std::move(values), CylinderBoundary::Periodic);
}

Eigen::VectorXd CylinderProfile::t_nodes() const {
  Eigen::VectorXd t(size());
  for (int k = 0; k < size(); ++k) t[k] = this->t(k);
  return t;
}

bool CylinderProfile::decays(double tol) const {
  return std::abs(values_[0]) <= tol && std::abs(values_[size() - 1]) <= tol;
}

CylinderProfile to_cylinder(const RadialProfile& u, const ProblemParams& params, std::optional<double> dt) {
  const RadialGrid& g = u.grid();
  const double step = dt.value_or((g.log_nodes()[g.size() - 1] - g.log_nodes()[0]) / (g.size() - 1));
  if (!(step > 0.0)) throw GridError("cylinder spacing must be positive");
  const double t_min = -g.log_nodes()[g.size() - 1];
  const double t_max = -g.log_nodes()[0];
  const int N = static_cast<int>(std::floor((t_max - t_min) / step + 1e-9)) + 1;
  const double nu = params.nu();
  Eigen::VectorXd U(N);
  for (int k = 0; k < N; ++k) {
    const double r = std::clamp(std::exp(-(t_min + k * step)), g.r_min(), g.r_max());
    U[k] = std::pow(r, nu) * u(r);
  }
  return CylinderProfile(t_min, step, std::move(U), CylinderBoundary::Decaying);
}

CylinderProfile to_cylinder(const Field& u, double t_min, double t_max, double dt) {
  if (!(t_max > t_min && dt > 0.0)) throw GridError("cylinder range needs t_min < t_max and dt > 0");
  const int N = static_cast<int>(std::floor((t_max - t_min) / dt + 1e-9)) + 1;
  const double nu = u.params().nu();
  Eigen::VectorXd U(N);
  for (int k = 0; k < N; ++k) {
    const double t = t_min + k * dt;
    U[k] = std::exp(-nu * t) * u.along_axis(std::exp(-t));
  }
  return CylinderProfile(t_min, dt, std::move(U), CylinderBoundary::Decaying);
}

RadialProfile from_cylinder(const CylinderProfile& U, const ProblemParams& params) {
  const int N = U.size();
  Eigen::VectorXd r(N), v(N);
  for (int i = 0; i < N; ++i) {
    const int k = N - 1 - i;
    const double t = U.t(k);
    r[i] = std::exp(-t);
    v[i] = std::exp(params.nu() * t) * U.values()[k];
  }
  return fitted_profile(RadialGrid(r), std::move(v));
}

double cylinder_bubble(const ProblemParams& params, double t) {
  return sharp_constants(params).C_n * std::pow(2.0 * std::cosh(t), -params.nu());
}

double kernel_hat(const ProblemParams& params, double t, double tol) {
  return kernel_hat(AngularKernelSpec::riesz_alpha(params, tol), t);
}

double periodized_kernel(const ProblemParams& params, double t, double L, double tol) {
  if (!(L > 0.0)) throw ParameterError("period must be positive");
  const AngularKernelSpec spec = AngularKernelSpec::riesz_alpha(params, tol);
  t = std::fmod(t, L);
  if (t < 0) t += L;
  double sum = kernel_hat(spec, t);
  for (int k = 1; k < 100000; ++k) {
    const double a = kernel_hat(spec, t + k * L);
    const double b = kernel_hat(spec, t - k * L);
    sum += a + b;
    if (a + b <= tol * sum) return sum;
  }
  throw AccuracyError("periodized kernel sum did not converge", 1.0);
}

KernelTable make_kernel_table(const ProblemParams& params, double t_max, double dt, double tol) {
  if (!(t_max > 0.0 && dt > 0.0)) throw ParameterError("kernel table needs t_max > 0 and dt > 0");
  const AngularKernelSpec spec = AngularKernelSpec::riesz_alpha(params, tol);
  const int half = static_cast<int>(std::floor(t_max / dt + 1e-9));
  const bool skip_zero = std::isinf(kernel_hat(spec, 0.0));
  KernelTable kt;
  kt.params = params;
  kt.tol = tol;
  kt.decay_constant = kernel_hat_decay_constant(params);
  std::vector<double> t, v;
  for (int k = -half; k <= half; ++k) {
    if (k == 0 && skip_zero) continue;
    t.push_back(k * dt);
    v.push_back(kernel_hat(spec, k * dt));
  }
  kt.t = Eigen::Map<Eigen::VectorXd>(t.data(), t.size());
  kt.values = Eigen::Map<Eigen::VectorXd>(v.data(), v.size());
  return kt;
}

KernelSpectrum::KernelSpectrum(const ProblemParams& params, double tol) : params_(params) {
  const AngularKernelSpec spec = AngularKernelSpec::riesz_alpha(params, tol);
  gamma_ = spec.gamma();
  omega_ = kernel_hat_decay_constant(params);
  T_ = kFarField;
  const double width = 0.01;
  const int panels = static_cast<int>(std::round(T_ / width));
  const quad::Rule& leg = quad::gauss_legendre(10);
  const quad::Rule first = quad::graded_unit_rule(singular_grading_levels(width, spec.beta, tol));
  std::vector<double> t, wk;
  for (int q = 0; q < first.size(); ++q) {
    t.push_back(width * first.nodes[q]);
    wk.push_back(width * first.weights[q]);
  }
  for (int p = 1; p < panels; ++p)
    for (int q = 0; q < leg.size(); ++q) {
      t.push_back(width * (p + 0.5 * (1.0 + leg.nodes[q])));
      wk.push_back(0.5 * width * leg.weights[q]);
    }
  t_.resize(t.size());
  wk_.resize(t.size());
  for (size_t i = 0; i < t.size(); ++i) {
    t_[i] = t[i];
    wk_[i] = wk[i] * kernel_hat(spec, t[i]);
  }
  l1_ = (*this)(0.0);
}

double KernelSpectrum::operator()(double w) const {
  w = std::abs(w);
  const double body = (wk_.array() * (w * t_.array()).cos()).sum();
  const std::complex<double> z(gamma_, -w);
  const double tail = omega_ * std::real(std::exp(-z * T_) / z);
  return 2.0 * (body + tail);
}

double KernelSpectrum::derivative(double w) const {
  const double s = (w < 0) ? -1.0 : 1.0;
  w = std::abs(w);
  const double body = -(wk_.array() * t_.array() * (w * t_.array()).sin()).sum();
  const std::complex<double> z(gamma_, -w);
  const std::complex<double> i(0.0, 1.0);
  const double tail = omega_ * std::real(std::exp(-z * T_) * (i * T_ / z + i / (z * z)));
  return s * 2.0 * (body + tail);
}

std::shared_ptr<const KernelSpectrum> kernel_spectrum(const ProblemParams& params, double tol) {
  static std::mutex mutex;
  static std::map<std::tuple<int, double, double>, std::shared_ptr<const KernelSpectrum>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  const auto key = std::make_tuple(params.n, params.alpha, tol);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_shared<const KernelSpectrum>(params, tol)).first;
  return it->second;
}

namespace {

// Hat-function moments w_m = int Khat(m h - s)(1 - |s|/h) ds over |s| < h.
Eigen::VectorXd hat_weights(const AngularKernelSpec& spec, double h, int count) {
  const quad::Rule& leg = quad::gauss_legendre(10);
  const quad::Rule graded = quad::graded_unit_rule(singular_grading_levels(h, spec.beta, spec.tol));
  const double gam = spec.gamma();
  const double omega = kernel_hat_decay_constant(spec.params);
  const double far_factor = 2.0 * (std::cosh(gam * h) - 1.0) / (gam * gam * h);
  Eigen::VectorXd w(count);
  for (int m = 0; m < count; ++m) {
    const double c = m * h;
    if (c - h >= kFarField) {
      w[m] = omega * far_factor * std::exp(-gam * c);
      continue;
    }
    auto hat = [&](double tau) { return 1.0 - std::abs(tau - c) / h; };
    auto piece = [&](double a, double b) {
      double acc = 0.0;
      if (a == 0.0 || b == 0.0) {
        const double z = (a == 0.0) ? a : b;
        const double dir = (a == 0.0) ? 1.0 : -1.0;
        for (int q = 0; q < graded.size(); ++q) {
          const double tau = z + dir * graded.nodes[q] * (b - a);
          acc += graded.weights[q] * hat(tau) * kernel_hat(spec, tau);
        }
        return acc * (b - a);
      }
      for (int q = 0; q < leg.size(); ++q) {
        const double tau = a + 0.5 * (b - a) * (1.0 + leg.nodes[q]);
        acc += leg.weights[q] * hat(tau) * kernel_hat(spec, tau);
      }
      return 0.5 * (b - a) * acc;
    };
    w[m] = piece(c - h, c) + piece(c, c + h);
  }
  return w;
}

OdeResidual residual_decaying(const CylinderProfile& U, const NonlinearitySpec& nl, const KernelTable& kt) {
  const int N = U.size();
  if (N < 5) throw GridError("ODE residual needs at least 5 samples");
  const double h = U.dt();
  const AngularKernelSpec spec = AngularKernelSpec::riesz_alpha(kt.params, kt.tol);
  const Eigen::VectorXd w = hat_weights(spec, h, N);
  const Eigen::VectorXd& u = U.values();
  Eigen::VectorXd F(N);
  for (int k = 0; k < N; ++k) F[k] = nl.F(u[k]);
  const double c0 = nu2(kt.params);
  Eigen::VectorXd res = Eigen::VectorXd::Zero(N);
  double num = 0.0, den = 0.0;
  for (int k = 2; k + 2 < N; ++k) {
    double conv = 0.0;
    for (int j = 0; j < N; ++j) conv += w[std::abs(k - j)] * F[j];
    const double upp = (-u[k - 2] + 16.0 * u[k - 1] - 30.0 * u[k] + 16.0 * u[k + 1] - u[k + 2]) / (12.0 * h * h);
    const double lhs = -upp + c0 * u[k];
    res[k] = lhs - conv * nl.f(u[k]);
    num += res[k] * res[k];
    den += lhs * lhs;
  }
  OdeResidual out;
  out.relative_norm = den > 0.0 ? std::sqrt(num / den) : 0.0;
  out.residual = CylinderProfile(U.t0(), h, std::move(res), CylinderBoundary::Decaying);
  return out;
}

OdeResidual residual_periodic(const CylinderProfile& U, const NonlinearitySpec& nl, const KernelTable& kt) {
  const int N = U.size();
  const double kappa = 2.0 * std::numbers::pi / U.period();
  const auto spectrum = kernel_spectrum(kt.params, kt.tol);
  Eigen::FFT<double> fft;
  std::vector<double> u(U.values().data(), U.values().data() + N), F(N);
  for (int k = 0; k < N; ++k) F[k] = nl.F(u[k]);
  std::vector<std::complex<double>> Uh, Fh;
  fft.fwd(Uh, u);
  fft.fwd(Fh, F);
  for (int j = 0; j < N; ++j) {
    const double w = kappa * signed_bin(j, N);
    Uh[j] *= -w * w;
    Fh[j] *= (*spectrum)(w);
  }
  std::vector<double> upp, conv;
  fft.inv(upp, Uh);
  fft.inv(conv, Fh);
  const double c0 = nu2(kt.params);
  Eigen::VectorXd res(N);
  double num = 0.0, den = 0.0;
  for (int k = 0; k < N; ++k) {
    const double lhs = -upp[k] + c0 * u[k];
    res[k] = lhs - conv[k] * nl.f(u[k]);
    num += res[k] * res[k];
    den += lhs * lhs;
  }
  OdeResidual out;
  out.relative_norm = den > 0.0 ? std::sqrt(num / den) : 0.0;
  out.residual = CylinderProfile::periodic(U.period(), std::move(res));
  return out;
}

}  // namespace

OdeResidual ode_residual(const CylinderProfile& U, const NonlinearitySpec& nl, const KernelTable& kt) {
  return U.boundary() == CylinderBoundary::Periodic ? residual_periodic(U, nl, kt) : residual_decaying(U, nl, kt);
}

double constant_solution(const ProblemParams& params, const NonlinearitySpec& nl, double tol) {
  const double l1 = kernel_spectrum(params, tol)->l1();
  return std::pow(nu2(params) / (nl.c_F * l1), 1.0 / (2.0 * nl.p - 2.0));
}

double dispersion_function(const ProblemParams& params, double w, double tol) {
  const auto spec = kernel_spectrum(params, tol);
  const double p = critical_exponent(params);
  const double c0 = nu2(params);
  const double A = c0 / spec->l1();
  return w * w + c0 - A * (p * (*spec)(w) + (p - 1.0) * spec->l1());
}

DispersionRoot dispersion_root(const ProblemParams& params, const NonlinearitySpec& nl, const KernelTable& kt,
                               double w_max, double w_step) {
  DispersionRoot out;
  out.U_c = constant_solution(params, nl, kt.tol);
  auto D = [&](double w) { return dispersion_function(params, w, kt.tol); };
  double a = 0.0;
  double Da = D(a);
  for (double b = w_step; b <= w_max + 1e-12; b += w_step) {
    const double Db = D(b);
    if ((Da < 0.0) != (Db < 0.0)) {
      double lo = a, hi = b, Dlo = Da;
      for (int it = 0; it < 200 && hi - lo > 4e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double Dm = D(mid);
        if ((Dm < 0.0) == (Dlo < 0.0)) {
          lo = mid;
          Dlo = Dm;
        } else {
          hi = mid;
        }
      }
      out.found = true;
      out.omega0 = 0.5 * (lo + hi);
      out.L0 = 2.0 * std::numbers::pi / out.omega0;
      return out;
    }
    a = b;
    Da = Db;
  }
  out.diagnostic = "no local bifurcation: dispersion function has no sign change on (0, w_max]";
  return out;
}

}  // namespace hartree

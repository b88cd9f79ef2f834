#include "hartree/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include <Eigen/LU>

namespace hartree {

namespace {

struct NewtonResult {
  bool converged = false;
  int iterations = 0;
  double relative = 0;
  std::vector<double> history;
};

// Reduced collocation operators on the even half period tau_k = 2 pi k / N, k = 0..N/2.
class HalfPeriodSystem {
 public:
  HalfPeriodSystem(const ProblemParams& params, const NonlinearitySpec& nl, int N, double tol)
      : nl_(nl), N_(N), M_(N / 2), c0_(0.25 * (params.n - 2) * (params.n - 2)),
        spectrum_(kernel_spectrum(params, tol)) {
    cos_.resize(N_);
    for (int k = 0; k < N_; ++k) cos_[k] = std::cos(2.0 * std::numbers::pi * k / N_);
    Eigen::VectorXd d2(N_);
    for (int j = 0; j < N_; ++j) {
      const double b = bin(j);
      d2[j] = -b * b;
    }
    E2_ = reduce(d2);
  }

  int unknowns() const { return M_ + 1; }

  void set_kappa(double kappa) {
    if (kappa == kappa_) return;
    kappa_ = kappa;
    Eigen::VectorXd c(N_), dc(N_);
    for (int j = 0; j < N_; ++j) {
      const double b = std::abs(bin(j));
      c[j] = (*spectrum_)(kappa * b);
      dc[j] = b * spectrum_->derivative(kappa * b);
    }
    EC_ = reduce(c);
    ECk_ = reduce(dc);
  }

  Eigen::VectorXd residual(const Eigen::VectorXd& y, Eigen::VectorXd* lhs = nullptr) const {
    const Eigen::VectorXd F = y.unaryExpr([&](double v) { return nl_.F(v); });
    const Eigen::VectorXd f = y.unaryExpr([&](double v) { return nl_.f(v); });
    const Eigen::VectorXd L = -kappa_ * kappa_ * (E2_ * y) + c0_ * y;
    if (lhs) *lhs = L;
    return L - f.cwiseProduct(EC_ * F);
  }

  Eigen::MatrixXd jacobian_y(const Eigen::VectorXd& y) const {
    const Eigen::VectorXd F = y.unaryExpr([&](double v) { return nl_.F(v); });
    const Eigen::VectorXd dF = y.unaryExpr([&](double v) { return nl_.dF(v); });
    const Eigen::VectorXd f = y.unaryExpr([&](double v) { return nl_.f(v); });
    const Eigen::VectorXd df = y.unaryExpr([&](double v) { return nl_.df(v); });
    Eigen::MatrixXd J = -kappa_ * kappa_ * E2_;
    J.diagonal().array() += c0_;
    J -= f.asDiagonal() * EC_ * dF.asDiagonal();
    J.diagonal() -= df.cwiseProduct(EC_ * F);
    return J;
  }

  Eigen::VectorXd jacobian_kappa(const Eigen::VectorXd& y) const {
    const Eigen::VectorXd F = y.unaryExpr([&](double v) { return nl_.F(v); });
    const Eigen::VectorXd f = y.unaryExpr([&](double v) { return nl_.f(v); });
    return -2.0 * kappa_ * (E2_ * y) - f.cwiseProduct(ECk_ * F);
  }

  // Norm over the full period of a vector given on the half period.
  double full_norm(const Eigen::VectorXd& v) const {
    double s = v[0] * v[0] + v[M_] * v[M_];
    for (int k = 1; k < M_; ++k) s += 2.0 * v[k] * v[k];
    return std::sqrt(s);
  }

  double relative(const Eigen::VectorXd& y) const {
    Eigen::VectorXd L;
    const Eigen::VectorXd R = residual(y, &L);
    return full_norm(R) / full_norm(L);
  }

  Eigen::VectorXd expand(const Eigen::VectorXd& y) const {
    Eigen::VectorXd u(N_);
    for (int k = 0; k < N_; ++k) u[k] = y[std::min(k, N_ - k)];
    return u;
  }

  double kappa() const { return kappa_; }

 private:
  double bin(int j) const { return (j <= M_) ? j : j - N_; }

  Eigen::MatrixXd reduce(const Eigen::VectorXd& symbol) const {
    Eigen::VectorXd c(N_);
    for (int m = 0; m < N_; ++m) {
      double s = 0.0;
      for (int j = 0; j < N_; ++j) s += symbol[j] * cos_[(static_cast<long>(j) * m) % N_];
      c[m] = s / N_;
    }
    auto at = [&](int m) { return c[((m % N_) + N_) % N_]; };
    Eigen::MatrixXd E(M_ + 1, M_ + 1);
    for (int k = 0; k <= M_; ++k)
      for (int l = 0; l <= M_; ++l) E(k, l) = (l == 0 || l == M_) ? at(k - l) : at(k - l) + at(k + l);
    return E;
  }

  NonlinearitySpec nl_;
  int N_, M_;
  double c0_;
  std::shared_ptr<const KernelSpectrum> spectrum_;
  std::vector<double> cos_;
  Eigen::MatrixXd E2_, EC_, ECk_;
  double kappa_ = -1.0;
};

// Damped Newton on z with merit ||G||; every accepted step lowers the merit.
template <class Eval, class Valid>
NewtonResult newton(Eigen::VectorXd& z, Eval&& eval, Valid&& valid, const std::function<double(const Eigen::VectorXd&)>& rel,
                    double tol, int max_iter) {
  NewtonResult out;
  Eigen::VectorXd G;
  Eigen::MatrixXd J;
  eval(z, G, &J);
  double merit = G.norm();
  out.relative = rel(z);
  for (int it = 0; it < max_iter; ++it) {
    if (out.relative < tol) {
      out.converged = true;
      return out;
    }
    const Eigen::VectorXd step = J.partialPivLu().solve(-G);
    if (!step.allFinite()) return out;
    double lambda = 1.0;
    bool accepted = false;
    for (int h = 0; h < 30; ++h, lambda *= 0.5) {
      Eigen::VectorXd trial = z + lambda * step;
      if (!valid(trial)) continue;
      Eigen::VectorXd Gt;
      eval(trial, Gt, nullptr);
      if (Gt.allFinite() && Gt.norm() < (1.0 - 1e-4 * lambda) * merit) {
        z = trial;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      out.converged = out.relative < 1e3 * tol;
      return out;
    }
    eval(z, G, &J);
    merit = G.norm();
    out.relative = rel(z);
    out.history.push_back(out.relative);
    out.iterations = it + 1;
  }
  out.converged = out.relative < tol;
  return out;
}

}  // namespace

DelaunaySolution find_delaunay(const ProblemParams& params, const NonlinearitySpec& nl, double epsilon_target,
                               double L, int continuation_steps, const DelaunayOptions& options) {
  params.validate();
  const int N = options.collocation;
  if (N < 8 || N > 2048 || N % 2 != 0) throw ParameterError("collocation size must be even and in [8, 2048]");
  if (!(epsilon_target > 0.0)) throw ParameterError("epsilon_target must be positive");
  if (continuation_steps < 1) throw ParameterError("continuation_steps must be positive");

  const KernelTable kt{params, options.tol, {}, {}, kernel_hat_decay_constant(params)};
  const DispersionRoot root = dispersion_root(params, nl, kt);
  DelaunaySolution sol;
  sol.U_c = root.U_c;
  sol.L0 = root.L0;
  const double Uc = root.U_c;

  auto finish = [&](const Eigen::VectorXd& u, double period) {
    sol.period = period;
    sol.profile = CylinderProfile::periodic(period, u);
    sol.epsilon = u[0];
    sol.residual_norm = ode_residual(sol.profile, nl, kt).relative_norm;
  };

  if (epsilon_target >= Uc) {
    finish(Eigen::VectorXd::Constant(N, Uc), L > 0.0 ? L : root.L0);
    sol.constant = true;
    sol.converged = sol.residual_norm <= 1e3 * options.newton_tol;
    return sol;
  }
  if (!root.found) {
    sol.diagnostic = root.diagnostic;
    return sol;
  }

  HalfPeriodSystem sys(params, nl, N, options.tol);
  const int M = N / 2;
  const int nu = sys.unknowns();

  auto positive = [&](const Eigen::VectorXd& z) { return (z.head(nu).array() > 0.0).all() && (z.size() == nu || z[nu] > 0.0); };

  // Branch system: unknowns (y, kappa), constraint y_0 = eps.
  double eps = 0.0;
  auto eval_branch = [&](const Eigen::VectorXd& z, Eigen::VectorXd& G, Eigen::MatrixXd* J) {
    sys.set_kappa(z[nu]);
    const Eigen::VectorXd y = z.head(nu);
    G.resize(nu + 1);
    G.head(nu) = sys.residual(y);
    G[nu] = y[0] - eps;
    if (J) {
      J->setZero(nu + 1, nu + 1);
      J->topLeftCorner(nu, nu) = sys.jacobian_y(y);
      J->col(nu).head(nu) = sys.jacobian_kappa(y);
      (*J)(nu, 0) = 1.0;
    }
  };
  auto rel_branch = [&](const Eigen::VectorXd& z) {
    sys.set_kappa(z[nu]);
    return std::max(sys.relative(z.head(nu)), std::abs(z[0] - eps) / Uc);
  };

  struct BranchPoint {
    double eps;
    Eigen::VectorXd z;
  };
  std::vector<BranchPoint> branch;

  const double a0 = options.initial_amplitude * Uc;
  Eigen::VectorXd z(nu + 1);
  for (int k = 0; k <= M; ++k) z[k] = Uc - a0 * std::cos(2.0 * std::numbers::pi * k / N);
  z[nu] = root.omega0;
  eps = Uc - a0;
  NewtonResult nr = newton(z, eval_branch, positive, rel_branch, options.newton_tol, options.max_newton);
  sol.log.push_back({eps, 2.0 * std::numbers::pi / z[nu], nr.relative, nr.iterations, nr.converged});
  if (!nr.converged) {
    sol.diagnostic = "Newton failed at the first branch point";
    finish(sys.expand(z.head(nu)), 2.0 * std::numbers::pi / z[nu]);
    return sol;
  }
  branch.push_back({eps, z});

  auto period_of = [&](const Eigen::VectorXd& zz) { return 2.0 * std::numbers::pi / zz[nu]; };

  // Fixed-period solve from an interpolated branch guess.
  auto polish = [&](const Eigen::VectorXd& guess) {
    const double kappa = 2.0 * std::numbers::pi / L;
    sys.set_kappa(kappa);
    Eigen::VectorXd y = guess.head(nu);
    auto eval_fixed = [&](const Eigen::VectorXd& yy, Eigen::VectorXd& G, Eigen::MatrixXd* J) {
      sys.set_kappa(kappa);
      G = sys.residual(yy);
      if (J) *J = sys.jacobian_y(yy);
    };
    auto rel_fixed = [&](const Eigen::VectorXd& yy) {
      sys.set_kappa(kappa);
      return sys.relative(yy);
    };
    const NewtonResult r = newton(y, eval_fixed, positive, rel_fixed, options.newton_tol, options.max_newton);
    sol.newton_history = r.history;
    sol.converged = r.converged;
    sol.log.push_back({y[0], L, r.relative, r.iterations, r.converged});
    finish(sys.expand(y), L);
    if (!r.converged) sol.diagnostic = "fixed-period Newton did not converge";
  };

  auto brackets = [&](double La, double Lb) { return L > 0.0 && (La - L) * (Lb - L) <= 0.0; };
  if (brackets(root.L0, period_of(z))) {
    polish(z);
    return sol;
  }

  double step = a0;
  const double step_min = 1e-8 * Uc;
  int taken = 0;
  while (taken < continuation_steps) {
    const BranchPoint& last = branch.back();
    const double next = std::max(last.eps - step, epsilon_target);
    Eigen::VectorXd guess = last.z;
    if (branch.size() >= 2) {
      const BranchPoint& prev = branch[branch.size() - 2];
      guess += (last.z - prev.z) * ((next - last.eps) / (last.eps - prev.eps));
    }
    eps = next;
    Eigen::VectorXd trial = guess;
    nr = newton(trial, eval_branch, positive, rel_branch, options.newton_tol, options.max_newton);
    sol.log.push_back({next, period_of(trial), nr.relative, nr.iterations, nr.converged});
    ++taken;
    if (!nr.converged) {
      step *= 0.5;
      if (step < step_min) {
        sol.diagnostic = "continuation step underflow";
        break;
      }
      continue;
    }
    const double L_last = period_of(last.z);
    branch.push_back({next, trial});
    const double L_new = period_of(trial);
    if (brackets(L_last, L_new)) {
      const BranchPoint& a = branch[branch.size() - 2];
      const BranchPoint& b = branch.back();
      const double rho = (L - L_last) / (L_new - L_last);
      polish(a.z + rho * (b.z - a.z));
      return sol;
    }
    if (next <= epsilon_target) {
      sol.newton_history = nr.history;
      sol.converged = true;
      sol.partial = L > 0.0;
      finish(sys.expand(trial.head(nu)), L_new);
      if (sol.partial) sol.diagnostic = "epsilon_target reached before the branch period reached L";
      return sol;
    }
    if (nr.iterations <= 4) step = std::min(1.5 * step, options.max_step * Uc);
  }
  const BranchPoint& last = branch.back();
  sol.partial = true;
  sol.converged = true;
  finish(sys.expand(last.z.head(nu)), period_of(last.z));
  if (sol.diagnostic.empty()) sol.diagnostic = "continuation_steps exhausted";
  return sol;
}

}  // namespace hartree

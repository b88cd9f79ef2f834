#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "hartree/constants.hpp"
#include "hartree/riesz.hpp"
#include "hartree/rng.hpp"

using namespace hartree;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double pi = std::numbers::pi;

RadialProfile bubble_profile(const ProblemParams& P, const RadialGrid& g = default_grid()) {
  return sample_radial(make_bubble(P, Point::Zero(P.n), 1.0, BubbleNormalization::Hartree), g);
}

}  // namespace

TEST_CASE("angular kernel closed form for n=3, beta=2") {
  const auto s = AngularKernelSpec::laplacian(ProblemParams(3, 2.0));
  for (const auto& [r, q] : {std::pair{1.0, 2.0}, {0.3, 0.1}, {1.0, 1.0 + 1e-9}, {5.0, 4.0}})
    CHECK_THAT(angular_kernel(s, r, q), WithinRel(4 * pi / std::max(r, q), 1e-10));
}

TEST_CASE("angular kernel symmetry and cylinder identity") {
  const CounterRng rng(3);
  for (const auto& [n, alpha] : {std::pair{3, 2.0}, {4, 2.0}, {5, 3.0}, {3, 1.0}}) {
    const ProblemParams P(n, alpha);
    const auto s = AngularKernelSpec::riesz_alpha(P);
    for (int i = 0; i < 20; ++i) {
      const double r = std::exp(4 * rng.uniform(2 * i) - 2), q = std::exp(4 * rng.uniform(2 * i + 1) - 2);
      const double k = angular_kernel(s, r, q);
      CHECK_THAT(angular_kernel(s, q, r), WithinRel(k, 1e-12));
      CHECK_THAT(std::pow(r * q, s.gamma()) * k, WithinRel(kernel_hat(s, std::log(r / q)), 1e-8));
    }
  }
}

TEST_CASE("kernel_hat for n=3, alpha=2 and its decay constant") {
  const ProblemParams P(3, 2.0);
  const auto s = AngularKernelSpec::riesz_alpha(P);
  for (double t : {0.0, 1e-8, 0.3, 3.0, 10.0, -7.0})
    CHECK_THAT(kernel_hat(s, t), WithinRel(4 * pi * std::exp(-std::abs(t) / 2), 1e-10));
  const ProblemParams Q(5, 3.0);
  const auto s5 = AngularKernelSpec::riesz_alpha(Q);
  CHECK_THAT(kernel_hat(s5, 30.0) * std::exp(30.0 * s5.gamma()), WithinRel(kernel_hat_decay_constant(Q), 1e-6));
  CHECK_THAT(kernel_hat(s5, 1.7), WithinRel(kernel_hat(s5, -1.7), 1e-14));
  CHECK(std::isinf(kernel_hat(AngularKernelSpec::riesz_alpha(ProblemParams(3, 1.0)), 0.0)));
}

TEST_CASE("invalid kernel orders are rejected") {
  CHECK_THROWS_AS(AngularKernelSpec(ProblemParams(3, 2.0), 3.0), ParameterError);
  CHECK_THROWS_AS(AngularKernelSpec(ProblemParams(3, 2.0), 2.0, 0.0), ParameterError);
  CHECK_THROWS_AS(angular_kernel(AngularKernelSpec::laplacian(ProblemParams(3, 2.0)), 0.0, 1.0), ParameterError);
}

TEST_CASE("Newton potential of an indicator") {
  const auto s = AngularKernelSpec::laplacian(ProblemParams(3, 2.0));
  RadialFunction ind;
  ind.g = [](double q) { return q <= 1.0 ? 1.0 : 0.0; };
  ind.s_max = 1.0;
  ind.inner_exponent = 0.0;
  Eigen::VectorXd r(2);
  r << 1e-5, 2.0;
  const Eigen::VectorXd o = riesz_convolve(ind, r, s);
  CHECK_THAT(o[0], WithinRel(2 * pi, 1e-6));
  CHECK_THAT(o[1], WithinRel(2 * pi / 3, 1e-10));
}

TEST_CASE("Riesz potential of the bubble matches the closed form") {
  for (const auto& [n, alpha] : {std::pair{3, 2.0}, {4, 2.0}, {5, 3.0}}) {
    const ProblemParams P(n, alpha);
    const RadialGrid g = default_grid();
    Eigen::VectorXd f(g.size());
    for (int i = 0; i < g.size(); ++i) f[i] = std::pow(1 + g[i] * g[i], -(n + alpha) / 2);
    const RadialProfile F(g, f, 0.0, -(n + alpha));
    const RadialProfile v = riesz_convolve(F, AngularKernelSpec::riesz_alpha(P));
    const double I = bubble_convolution_factor(P);
    for (int i = 0; i < g.size(); i += 37)
      CHECK_THAT(v.values()[i], WithinRel(I * std::pow(1 + g[i] * g[i], -(n - alpha) / 2), 1e-6));
  }
}

TEST_CASE("convolution edge cases") {
  const ProblemParams P(3, 2.0);
  const auto s = AngularKernelSpec::riesz_alpha(P);
  const RadialGrid g = RadialGrid::geometric(1e-2, 1e2, 40);
  const RadialProfile zero(g, Eigen::VectorXd::Zero(g.size()), {}, {});
  CHECK(riesz_convolve(zero, s).values().isZero());

  Eigen::VectorXd v(g.size());
  for (int i = 0; i < g.size(); ++i) v[i] = 1.0 / g[i];
  CHECK_THROWS_AS(riesz_convolve(RadialProfile(g, v, -1.0, -1.0), s), IntegrabilityError);

  // Scaling covariance: output(r; g(lambda .)) = lambda^{-beta} output(lambda r; g).
  const RadialGrid G = default_grid();
  Eigen::VectorXd a(G.size()), b(G.size());
  const double lambda = 2.0;
  for (int i = 0; i < G.size(); ++i) {
    a[i] = std::pow(1 + G[i] * G[i], -2.5);
    b[i] = std::pow(1 + lambda * lambda * G[i] * G[i], -2.5);
  }
  const RadialProfile A = riesz_convolve(RadialProfile(G, a, 0.0, -5.0), s);
  const RadialProfile B = riesz_convolve(RadialProfile(G, b, 0.0, -5.0), s);
  for (double r : {0.01, 0.3, 1.0, 30.0}) CHECK_THAT(B(r), WithinRel(std::pow(lambda, -2.0) * A(lambda * r), 1e-6));
  CHECK((A.values().array() > 0).all());
}

TEST_CASE("radial Laplacian on polynomials and harmonic functions") {
  const int n = 4;
  const RadialGrid g = RadialGrid::geometric(1e-2, 1e2, 100);
  Eigen::VectorXd sq(g.size()), h(g.size());
  for (int i = 0; i < g.size(); ++i) {
    sq[i] = g[i] * g[i];
    h[i] = std::pow(g[i], 2.0 - n);
  }
  const RadialProfile L1 = radial_laplacian(RadialProfile(g, sq, 2.0, 2.0), n);
  const RadialProfile L2 = radial_laplacian(RadialProfile(g, h, 2.0 - n, 2.0 - n), n);
  for (int i = 3; i < g.size() - 3; ++i) {
    CHECK_THAT(L1.values()[i], WithinRel(-2.0 * n, 1e-6));
    CHECK(std::abs(L2.values()[i]) <= 1e-8 * std::pow(g[i], -n));
  }
  CHECK_THROWS_AS(radial_laplacian(RadialProfile(RadialGrid(Eigen::Vector4d(1, 2, 3, 4)), Eigen::Vector4d(1, 1, 1, 1), 0.0, 0.0), n),
                  GridError);
}

TEST_CASE("Talenti identity at r = 1") {
  const ProblemParams P(3, 2.0);
  const Field t = make_bubble(P, Point::Zero(3), 1.0, BubbleNormalization::Talenti);
  const RadialProfile u = sample_radial(t, default_grid());
  const RadialProfile L = radial_laplacian(u, 3);
  // With the Talenti amplitude the n(n-2) factor is absorbed: -Delta u = u^5.
  CHECK_THAT(L(1.0), WithinRel(std::pow(u(1.0), 5.0), 1e-6));
  const SharpConstants k = sharp_constants(P);
  CHECK_THAT(sobolev_quotient(u, 3), WithinRel(1.0 / (k.S_n * k.S_n), 1e-4));
}

TEST_CASE("bubble residuals after calibration") {
  for (const auto& [n, alpha] : {std::pair{3, 2.0}, {4, 2.0}, {5, 3.0}}) {
    CAPTURE(n, alpha);
    const ProblemParams P(n, alpha);
    const RadialProfile u = bubble_profile(P);
    const double cf = calibrate_c_F(u, P);
    CHECK_THAT(cf, WithinRel(bubble_c_F(P), 1e-5));
    const auto nl = NonlinearitySpec::critical(P, cf);
    const ResidualReport d = residual(u, nl, P, ResidualForm::Differential);
    const ResidualReport i = residual(u, nl, P, ResidualForm::Integral);
    CHECK(d.relative_norm <= 1e-3);
    CHECK(i.relative_norm <= 1e-3);
    CHECK(i.c_2 == newton_constant(n));
    CHECK_THAT(pin_c_2(u, n), WithinRel(newton_constant(n), 1e-4));
  }
}

TEST_CASE("residual sign and zero cases") {
  const ProblemParams P(3, 2.0);
  const RadialGrid g = RadialGrid::geometric(1e-2, 1e2, 40);
  const auto nl = NonlinearitySpec::critical(P, 1.0);
  ResidualOptions opt;
  opt.window_lo = 0.1;
  opt.window_hi = 10.0;
  const RadialProfile zero(g, Eigen::VectorXd::Zero(g.size()), {}, {});
  const ResidualReport z = residual(zero, nl, P, ResidualForm::Differential, opt);
  CHECK(z.residual.values().isZero());

  // A constant with a fast cut-off: -Delta u = 0 on the window while the right side is positive.
  Eigen::VectorXd c(g.size());
  for (int i = 0; i < g.size(); ++i) c[i] = g[i] < 20.0 ? 1.0 : std::pow(g[i] / 20.0, -6.0);
  const ResidualReport r = residual(RadialProfile(g, c, 0.0, -6.0), nl, P, ResidualForm::Differential, opt);
  for (int i = 0; i < g.size(); ++i)
    if (g[i] >= 0.2 && g[i] <= 5.0) CHECK(r.residual.values()[i] < 0.0);
}

TEST_CASE("hartree right side scales with the critical dilation") {
  const ProblemParams P(3, 2.0);
  const auto nl = NonlinearitySpec::critical(P, 1.0);
  const auto s = AngularKernelSpec::riesz_alpha(P);
  const Field b = make_bubble(P, Point::Zero(3), 1.0, BubbleNormalization::Hartree);
  const double lambda = 2.0;
  const Field bl(P, [&](const Point& x) { return std::pow(lambda, P.nu()) * b(lambda * x); }, true);
  const HartreeRhs h1 = hartree_rhs(sample_radial(b, default_grid()), nl, s);
  const HartreeRhs h2 = hartree_rhs(sample_radial(bl, default_grid()), nl, s);
  for (double r : {0.01, 0.5, 3.0}) CHECK_THAT(h2.rhs(r), WithinRel(std::pow(lambda, 2.5) * h1.rhs(lambda * r), 1e-6));
}

TEST_CASE("HLS equality at the extremal") {
  const HlsCheck h = hls_extremal_check(ProblemParams(3, 2.0), default_grid());
  CHECK_THAT(h.ratio, WithinRel(1.0, 1e-3));
  CHECK_THAT(h.H_n, WithinRel(sharp_constants(ProblemParams(3, 2.0)).H_n, 1e-15));
}

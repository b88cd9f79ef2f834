#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>

#include "hartree/constants.hpp"
#include "hartree/radial.hpp"
#include "hartree/riesz.hpp"

using namespace hartree;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("geometric grids are log-uniform and validated") {
  const RadialGrid g = RadialGrid::geometric(1e-2, 1e2, 20);
  CHECK(g.log_uniform());
  CHECK_THAT(g.r_min(), WithinRel(1e-2, 1e-15));
  CHECK_THAT(g.r_max(), WithinRel(1e2, 1e-15));
  CHECK(g.size() == 81);
  CHECK(g.interval(1.0) == 40);
  CHECK_THROWS_AS(RadialGrid::geometric(1.0, 0.5, 20), GridError);
  CHECK_THROWS_AS(RadialGrid::geometric(1e-2, 1e2, 4), GridError);
  Eigen::VectorXd bad(3);
  bad << 1.0, 0.5, 2.0;
  CHECK_THROWS_AS(RadialGrid(bad), GridError);
}

TEST_CASE("bubble values at the center and at infinity") {
  for (const auto& [n, alpha] : {std::pair{3, 2.0}, {4, 2.0}, {5, 3.0}}) {
    const ProblemParams P(n, alpha);
    const double C = sharp_constants(P).C_n;
    const Field b = make_bubble(P, Point::Zero(n), 1.0, BubbleNormalization::Hartree);
    Point tiny = Point::Zero(n);
    tiny[0] = 1e-12;
    CHECK_THAT(b(tiny), WithinRel(C, 1e-14));
    const double mu = 2.0;
    const Field b2 = make_bubble(P, Point::Zero(n), mu, BubbleNormalization::Hartree);
    const double R = 1e6;
    // u r^{n-2} -> C mu^{(n-2)/2} mu^{2-n} with the mu^{nu} scale factor included
    CHECK_THAT(b2.along_axis(R) * std::pow(R, n - 2), WithinRel(C * std::pow(mu, -P.nu()), 1e-10));
  }
  CHECK_THAT(bubble_amplitude(ProblemParams(3, 2.0), BubbleNormalization::Talenti), WithinRel(std::pow(3.0, 0.25), 1e-15));
}

TEST_CASE("sample_radial fits end exponents") {
  const ProblemParams P(4, 2.0);
  const RadialGrid g = RadialGrid::geometric(1e-4, 1e4, 50);
  const RadialProfile b = sample_radial(make_bubble(P, Point::Zero(4), 1.0, BubbleNormalization::Hartree), g);
  const auto [in, out] = b.fitted_end_slopes();
  REQUIRE(in);
  REQUIRE(out);
  CHECK_THAT(*in, WithinAbs(0.0, 1e-3));
  CHECK_THAT(*out, WithinAbs(-2.0, 1e-3));
  CHECK(b.exponents_consistent());

  const RadialProfile s = sample_radial(make_power(P, P.nu()), g);
  CHECK_THAT(*s.inner_exponent(), WithinAbs(-1.0, 1e-12));
  CHECK_THAT(*s.outer_exponent(), WithinAbs(-1.0, 1e-12));

  const RadialProfile z = sample_radial(make_constant(P, 0.0), g);
  CHECK(z.values().isZero());
  CHECK_FALSE(z.inner_exponent());
  CHECK_FALSE(z.outer_exponent());
}

TEST_CASE("non-finite samples are reported") {
  const ProblemParams P(3, 2.0);
  const Field f(P, [](const Point& x) { return x.norm() > 1.0 ? std::numeric_limits<double>::quiet_NaN() : 1.0; }, true);
  CHECK_THROWS_AS(sample_radial(f, RadialGrid::geometric(0.1, 10.0, 20)), SamplingError);
}

TEST_CASE("interpolation reproduces the bubble between nodes") {
  const ProblemParams P(3, 2.0);
  const Field b = make_bubble(P, Point::Zero(3), 1.0, BubbleNormalization::Hartree);
  const RadialProfile u = sample_radial(b, default_grid());
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> lr(std::log(0.01), std::log(100.0));
  double worst = 0;
  for (int i = 0; i < 500; ++i) {
    const double r = std::exp(lr(gen));
    worst = std::max(worst, std::abs(u(r) / b.along_axis(r) - 1.0));
  }
  CHECK(worst <= 1e-6);
  CHECK_THROWS_AS(u(1e-6), GridError);
  CHECK_THAT(u(1e-6, Extrapolation::PowerLaw), WithinRel(b.along_axis(1e-6), 1e-6));
}

TEST_CASE("spherical averages") {
  const ProblemParams P(3, 2.0);
  const Field b = make_bubble(P, Point::Zero(3), 1.0, BubbleNormalization::Hartree);
  CHECK_THAT(spherical_average(b, 0.7), WithinRel(b.along_axis(0.7), 1e-15));

  const Field odd(P, [](const Point& x) { return x.dot(Eigen::Vector3d(1, 2, 2).normalized()); }, false, false);
  CHECK_THAT(spherical_average(odd, 1.3), WithinAbs(0.0, 1e-15));
  CHECK_THROWS_AS(spherical_average(b, 0.0), ParameterError);

  // Off-center bubble against dense Monte Carlo sampling on the sphere.
  Point c = Point::Zero(3);
  c[0] = 0.3;
  const Field off = make_bubble(P, c, 1.0, BubbleNormalization::Hartree);
  const double r = 0.1;
  const double avg = spherical_average(off, r);
  std::mt19937_64 gen(11);
  std::normal_distribution<double> nd;
  double acc = 0;
  const int N = 1000000;
  for (int i = 0; i < N; ++i) {
    Point y(3);
    y << nd(gen), nd(gen), nd(gen);
    acc += off(r * y.normalized());
  }
  CHECK_THAT(avg, WithinRel(acc / N, 1e-4));

  const Eigen::Matrix3d R = Eigen::AngleAxisd(1.1, Eigen::Vector3d(0.3, -1, 2).normalized()).toRotationMatrix();
  const Eigen::MatrixXd Rx = R;
  CHECK_THAT(spherical_average(off, r, 20, &Rx), WithinRel(avg, 1e-12));
}

TEST_CASE("radial moments with closed-form tails") {
  // int_0^inf (1+r^2)^{-2} r^2 dr = pi/4
  const RadialGrid g = RadialGrid::geometric(1e-3, 1e3, 50);
  Eigen::VectorXd v(g.size());
  for (int i = 0; i < g.size(); ++i) v[i] = std::pow(1 + g[i] * g[i], -2.0);
  const RadialProfile u(g, v, 0.0, -4.0);
  CHECK_THAT(radial_moment(u, 2.0), WithinRel(std::numbers::pi / 4, 1e-6));
}

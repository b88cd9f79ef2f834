#include <catch_amalgamated.hpp>

#include <cmath>

#include "hartree/moving_spheres.hpp"
#include "hartree/rng.hpp"

using namespace hartree;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Point e1(int n, double a) {
  Point p = Point::Zero(n);
  p[0] = a;
  return p;
}

}  // namespace

TEST_CASE("sphere inversion") {
  const SphereInversion unit(Point::Zero(3), 1.0);
  const Point z = Eigen::Vector3d(0.6, 0.0, 0.8);
  CHECK((invert_point(unit, z) - z).norm() <= 1e-15);
  CHECK((invert_point(unit, e1(3, 2.0)) - e1(3, 0.5)).norm() <= 1e-15);
  CHECK_THROWS_AS(invert_point(unit, Point::Zero(3)), RangeError);
  CHECK_THROWS_AS(SphereInversion(Point::Zero(3), 0.0), ParameterError);

  const SphereInversion inv(Eigen::Vector3d(0.2, -0.4, 1.0), 0.7);
  const CounterRng rng(9);
  for (int i = 0; i < 100; ++i) {
    const Point y = inv.center + 3.0 * rng.direction(3, i) * rng.uniform(1000 + i);
    CHECK((invert_point(inv, invert_point(inv, y)) - y).norm() <= 1e-14 * std::max(1.0, y.norm()));
  }
}

TEST_CASE("Kelvin transforms") {
  const ProblemParams P(4, 2.0);
  const SphereInversion inv(e1(4, 0.3), 0.8);
  const Field c = make_constant(P, 2.5);
  const Field kc = kelvin_transform(c, inv, P.n - 2.0);
  const Point y = Eigen::Vector4d(1.0, 2.0, -0.5, 0.1);
  CHECK_THAT(kc(y), WithinRel(2.5 * std::pow(0.8 / (y - inv.center).norm(), 2.0), 1e-15));

  const Field b = make_bubble(P, e1(4, -0.2), 1.3, BubbleNormalization::Hartree);
  const Field twice = kelvin_transform(kelvin_transform(b, inv, 2.0), inv, 2.0);
  for (const Point& q : sphere_samples(4, 0.1, 10.0, 4, 8, 2)) CHECK_THAT(twice(q), WithinRel(b(q), 1e-12));

  const Field s = make_power(P, P.nu());
  const Field ks = kelvin_transform(s, SphereInversion(Point::Zero(4), 0.37), 2.0);
  for (const Point& q : sphere_samples(4, 0.1, 10.0, 4, 8, 3)) CHECK_THAT(ks(q), WithinRel(s(q), 1e-13));
  CHECK_THROWS_AS(kelvin_transform(b, inv, 0.0), ParameterError);
}

TEST_CASE("comparison deficits") {
  for (const auto& [n, alpha] : {std::pair{3, 2.0}, {4, 2.0}, {5, 3.0}}) {
    CAPTURE(n, alpha);
    const ProblemParams P(n, alpha);

    const SphereInversion inv(e1(n, 0.4), 0.6);
    const auto ts = make_test_set(n, inv, {});
    const ComparisonReport cr = comparison_deficit(make_constant(P, 3.0), inv, ts);
    for (Eigen::Index i = 0; i < cr.deficits.size(); ++i) {
      const double d = (ts[i] - inv.center).norm();
      CHECK_THAT(cr.deficits[i], WithinAbs(3.0 * (1 - std::pow(0.6 / d, n - 2.0)), 1e-14));
    }
    CHECK(cr.nonnegative());

    const SphereInversion unit(Point::Zero(n), 1.0);
    const ComparisonReport br =
        comparison_deficit(make_bubble(P, Point::Zero(n), 1.0, BubbleNormalization::Hartree), unit, make_test_set(n, unit, {}));
    CHECK((br.deficits.array().abs() / br.scales.array()).maxCoeff() <= 1e-13);

    for (double mu : {0.1, 1.0, 3.0}) {
      const SphereInversion o(Point::Zero(n), mu);
      const ComparisonReport sr = comparison_deficit(make_power(P, P.nu()), o, make_test_set(n, o, {}), 1e-8, 50, 4);
      CHECK((sr.deficits.array().abs() / sr.scales.array()).maxCoeff() <= 1e-10);
      REQUIRE(sr.kernels);
      CHECK(sr.kernels->passed());
      CHECK(sr.kernels->boundary_max <= 1e-10);
    }
  }
}

TEST_CASE("inadmissible test points are rejected") {
  const ProblemParams P(3, 2.0);
  const SphereInversion inv(Point::Zero(3), 1.0);
  CHECK_THROWS_AS(comparison_deficit(make_constant(P, 1.0), inv, {e1(3, 0.5)}), ParameterError);
}

TEST_CASE("critical radius") {
  const ProblemParams P(3, 2.0);
  const CriticalRadius s = critical_radius(make_power(P, P.nu()), Eigen::Vector3d(0.0, 0.5, 0.0));
  CHECK_FALSE(s.unbounded);
  CHECK_THAT(s.mu_bar, WithinAbs(0.5, 1e-3));
  CHECK(s.distance_to_abs_x <= 1e-3);

  const CriticalRadius b = critical_radius(make_bubble(P, Point::Zero(3), 1.0, BubbleNormalization::Hartree), Point::Zero(3));
  CHECK_THAT(b.mu_bar, WithinAbs(1.0, 1e-3));

  const CriticalRadius c = critical_radius(make_constant(P, 2.0), e1(3, 0.5));
  CHECK(c.unbounded);
  CHECK(c.mu_bar == c.ceiling);
}

TEST_CASE("equality fit") {
  const ProblemParams P(3, 2.0);
  const auto samples = sphere_samples(3, 0.05, 20, 32, 64, 3);
  const EqualityFit f = equality_fit(make_bubble(P, e1(3, 0.1), 2.0, BubbleNormalization::Hartree), samples);
  CHECK(f.bubble);
  CHECK((f.x0 - e1(3, 0.1)).norm() <= 1e-3);
  CHECK_THAT(f.mu_bar, WithinRel(2.0, 1e-2));
  CHECK(f.fit_error <= 1e-6);

  const EqualityFit c = equality_fit(make_constant(P, 2.0), samples);
  CHECK(c.constant);
  CHECK_FALSE(c.bubble);

  const Field b1 = make_bubble(P, Point::Zero(3), 1.0, BubbleNormalization::Hartree);
  const Field b2 = make_bubble(P, e1(3, 2.0), 1.0, BubbleNormalization::Hartree);
  const Field mix(P, [=](const Point& y) { return b1(y) + 0.1 * b2(y); }, false);
  const EqualityFit m = equality_fit(mix, samples);
  CHECK(m.fit_error > 1e-3);
  CHECK_FALSE(m.bubble);
}

TEST_CASE("Kelvin image of the bubble solves the equation") {
  const ProblemParams P(3, 2.0);
  const Field b = make_bubble(P, Point::Zero(3), 1.0, BubbleNormalization::Hartree);
  const Point x = e1(3, 0.5);
  const Field w = kelvin_transform(b, SphereInversion(x, 0.2), 1.0);
  const auto pts = sphere_samples(3, 0.05, 20, 24, 32, 11);
  const KelvinResidual kr = kelvin_residual(w, NonlinearitySpec::critical(P, bubble_c_F(P)), pts, {x, Point::Zero(3)}, 0.05);
  CHECK(kr.image.bubble);
  CHECK(kr.points > 100);
  CHECK(kr.max_relative <= 1e-2);
}

TEST_CASE("finite-difference Laplacian") {
  const ProblemParams P(3, 2.0);
  const Field q(P, [](const Point& y) { return y.squaredNorm() + y[0] * y[1]; }, false, false);
  CHECK_THAT(fd_laplacian(q, Eigen::Vector3d(0.3, 0.2, 0.1), 1e-2), WithinRel(6.0, 1e-10));
}

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "hartree/quadrature.hpp"

using namespace hartree;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2m-1 exactly") {
  const quad::Rule& r = quad::gauss_legendre(8);
  for (int k = 0; k <= 15; ++k) {
    double acc = 0;
    for (int i = 0; i < r.size(); ++i) acc += r.weights[i] * std::pow(r.nodes[i], k);
    const double exact = k % 2 ? 0.0 : 2.0 / (k + 1);
    CHECK_THAT(acc, WithinAbs(exact, 1e-14));
  }
}

TEST_CASE("Gauss-Jacobi weights integrate the Jacobi weight") {
  // int_{-1}^{1} (1-x)^a (1+x)^b dx = 2^{a+b+1} B(a+1, b+1)
  for (const auto& [a, b] : {std::pair{0.5, -0.5}, {-0.7, 0.0}, {1.5, 2.0}}) {
    const quad::Rule& r = quad::gauss_jacobi(12, a, b);
    const double exact = std::pow(2.0, a + b + 1) * std::tgamma(a + 1) * std::tgamma(b + 1) / std::tgamma(a + b + 2);
    CHECK_THAT(r.weights.sum(), WithinRel(exact, 1e-13));
    for (int i = 0; i < r.size(); ++i) CHECK(std::abs(quad::jacobi_polynomial(12, a, b, r.nodes[i]).first) < 1e-10);
  }
}

TEST_CASE("left power integration carries the singular weight") {
  // int_0^2 s^{-1/2} cos(s) ds = 2 int_0^{sqrt 2} cos(u^2) du
  const double v = quad::integrate_left_power([](double s) { return std::cos(s); }, 2.0, -0.5, 20);
  const double ref = 2.0 * quad::integrate([](double u) { return std::cos(u * u); }, 0.0, std::sqrt(2.0), quad::gauss_legendre(40));
  CHECK_THAT(v, WithinRel(ref, 1e-14));
  const double w = quad::integrate_left_power([](double) { return 1.0; }, 2.0, -0.5, 10);
  CHECK_THAT(w, WithinRel(2.0 * std::sqrt(2.0), 1e-14));
}

TEST_CASE("graded unit rule sums to one and resolves a log singularity") {
  const quad::Rule r = quad::graded_unit_rule(30, 10);
  CHECK_THAT(r.weights.sum(), WithinRel(1.0, 1e-14));
  double acc = 0;
  for (int i = 0; i < r.size(); ++i) acc += r.weights[i] * std::log(r.nodes[i]);
  CHECK_THAT(acc, WithinRel(-1.0, 1e-8));
}

TEST_CASE("sphere rules integrate low moments exactly") {
  for (int n = 3; n <= 5; ++n) {
    const quad::SphereRule s = quad::sphere_rule(n, 20);
    CHECK_THAT(s.weights.sum(), WithinRel(1.0, 1e-13));
    double x2 = 0, x4 = 0, xy = 0;
    for (Eigen::Index k = 0; k < s.weights.size(); ++k) {
      x2 += s.weights[k] * std::pow(s.points(0, k), 2);
      x4 += s.weights[k] * std::pow(s.points(n - 1, k), 4);
      xy += s.weights[k] * s.points(0, k) * s.points(1, k);
      CHECK_THAT(s.points.col(k).norm(), WithinRel(1.0, 1e-14));
    }
    CHECK_THAT(x2, WithinRel(1.0 / n, 1e-13));
    CHECK_THAT(x4, WithinRel(3.0 / (n * (n + 2.0)), 1e-13));
    CHECK_THAT(xy, WithinAbs(0.0, 1e-15));
  }
}

TEST_CASE("rotated sphere rule keeps moments") {
  const quad::SphereRule s = quad::sphere_rule(3, 12);
  const Eigen::Matrix3d R = Eigen::AngleAxisd(0.7, Eigen::Vector3d(1, 2, 3).normalized()).toRotationMatrix();
  const quad::SphereRule t = quad::rotated(s, R);
  double x2 = 0;
  for (Eigen::Index k = 0; k < t.weights.size(); ++k) x2 += t.weights[k] * t.points(2, k) * t.points(2, k);
  CHECK_THAT(x2, WithinRel(1.0 / 3.0, 1e-13));
}

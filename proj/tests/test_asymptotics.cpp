#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "hartree/asymptotics.hpp"
#include "hartree/constants.hpp"

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

TEST_CASE("radii ladder") {
  const Eigen::VectorXd R = radii_ladder(1.0, 2.0);
  CHECK(R.size() == 27);
  CHECK(R[0] == 1.0);
  CHECK_THAT(R[1], WithinRel(std::pow(2.0, -0.25), 1e-15));
  CHECK(R[R.size() - 1] >= 1e-2);
  CHECK_THROWS_AS(radii_ladder(1.0, 5.0), ParameterError);
}

TEST_CASE("upper bound scan") {
  for (const auto& [n, alpha] : {std::pair{3, 2.0}, {4, 2.0}, {5, 3.0}}) {
    CAPTURE(n, alpha);
    const ProblemParams P(n, alpha);
    const Eigen::VectorXd R = radii_ladder(1.0, 4.0);
    const UpperBoundScan s = upper_bound_scan(make_power(P, P.nu()), R);
    CHECK((s.s.array() - 1.0).abs().maxCoeff() <= 1e-13);
    CHECK_FALSE(s.divergent);
    CHECK(upper_bound_scan(make_power(P, n - 2.0), R).divergent);
    const UpperBoundScan b = upper_bound_scan(make_bubble(P, Point::Zero(n), 1.0, BubbleNormalization::Hartree), R);
    CHECK_FALSE(b.divergent);
    CHECK(b.s[b.s.size() - 1] < 0.05 * b.sup);
    CHECK(std::isfinite(b.sup));
  }
}

TEST_CASE("symmetry ratio") {
  for (const auto& [n, alpha] : {std::pair{3, 2.0}, {4, 2.0}, {5, 3.0}}) {
    CAPTURE(n, alpha);
    const ProblemParams P(n, alpha);
    const Eigen::VectorXd R = radii_ladder(0.02, 2.0);
    const SymmetryScan off = symmetry_ratio(make_bubble(P, e1(n, 0.05), 1.0, BubbleNormalization::Hartree), R);
    REQUIRE(off.slope);
    CHECK_THAT(*off.slope, WithinAbs(1.0, 0.2));
    CHECK(off.certified);

    const SymmetryScan rad = symmetry_ratio(make_bubble(P, Point::Zero(n), 1.0, BubbleNormalization::Hartree), R);
    CHECK(rad.radial);
    CHECK(rad.ratio.maxCoeff() <= 1e-13);
    CHECK(rad.certified);

    const double nu = P.nu();
    const Field viol(P, [nu](const Point& x) {
      const double r = x.norm();
      return std::pow(r, -nu) * (1 + 0.5 * std::sin(std::acos(x[0] / r)));
    }, false);
    const SymmetryScan v = symmetry_ratio(viol, R);
    REQUIRE(v.slope);
    CHECK_THAT(*v.slope, WithinAbs(0.0, 0.05));
    CHECK_FALSE(v.certified);
  }
}

TEST_CASE("blow-up rescaling") {
  const ProblemParams P(3, 2.0);
  const Field b = make_bubble(P, Point::Zero(3), 1.0, BubbleNormalization::Hartree);
  const Point xb = e1(3, 0.3);
  const BlowupFrame f = blowup_rescale(b, xb);
  CHECK_THAT(f.w(Point::Zero(3)), WithinRel(1.0, 1e-15));
  CHECK_THAT(f.scale, WithinRel(std::pow(b(xb), -2.0), 1e-15));

  // Dilation equivariance: rescaling u_lambda at x/lambda gives the same frame field.
  const double lambda = 3.0;
  const Field bl(P, [&](const Point& x) { return std::pow(lambda, P.nu()) * b(lambda * x); }, true);
  const BlowupFrame g = blowup_rescale(bl, xb / lambda);
  for (const Point& y : {e1(3, 0.1), Point(Eigen::Vector3d(0.2, -0.3, 0.05))}) CHECK_THAT(g.w(y), WithinRel(f.w(y), 1e-13));
  CHECK_THROWS_AS(blowup_rescale(make_constant(P, 0.0), xb), ParameterError);
}

TEST_CASE("limit candidates") {
  const ProblemParams P(3, 2.0);
  const LimitCandidate cb = LimitCandidate::cylinder_bubble(P);
  CHECK(cb.U(0.4) == cylinder_bubble(P, 0.4));
  CHECK_THAT(cb.value(0.5, 0.2), WithinRel(std::pow(0.5, -0.5) * cylinder_bubble(P, -std::log(0.5) + 0.2), 1e-15));

  const int N = 32;
  const double L = 5.0;
  Eigen::VectorXd v(N);
  for (int k = 0; k < N; ++k) v[k] = 1.0 + 0.2 * std::cos(2 * std::numbers::pi * k / N);
  const LimitCandidate pc = LimitCandidate::periodic(P, CylinderProfile::periodic(L, v));
  CHECK(pc.period() == L);
  CHECK_THAT(pc.U(1.3), WithinRel(1.0 + 0.2 * std::cos(2 * std::numbers::pi * 1.3 / L), 1e-13));
  CHECK_THAT(pc.U(1.3 + 7 * L), WithinRel(pc.U(1.3), 1e-12));

  const CylinderProfile tab(-2.0, 0.01, Eigen::VectorXd::LinSpaced(401, 0.0, 4.0).array().exp(), CylinderBoundary::Decaying);
  const LimitCandidate tc = LimitCandidate::tabulated(P, tab);
  CHECK_THAT(tc.U(0.123), WithinRel(std::exp(2.123), 1e-9));
  CHECK_THROWS_AS(tc.U(3.0), CoverageError);
  const Field s = make_power(P, 0.5);
  CHECK_THROWS_AS(profile_fit(s, tc, radii_ladder(1.0, 4.0)), CoverageError);
}

TEST_CASE("profile fit") {
  for (const auto& [n, alpha] : {std::pair{3, 2.0}, {4, 2.0}, {5, 3.0}}) {
    CAPTURE(n, alpha);
    const ProblemParams P(n, alpha);
    const Eigen::VectorXd R = radii_ladder(1.0, 4.0);
    const LimitCandidate cb = LimitCandidate::cylinder_bubble(P);
    const double tau0 = 0.7;
    const Field u(P, [&](const Point& x) { const double r = x.norm(); return (1 + r) * cb.value(r, tau0); }, true);
    const ProfileFit f = profile_fit(u, cb, R);
    CHECK_THAT(f.tau, WithinAbs(tau0, 1e-3));
    CHECK(f.decreasing);
    CHECK(f.error[R.size() - 1] <= 1e-2);
    CHECK(f.accepted);

    const ProfileFit g = profile_fit(make_power(P, P.nu()), cb, R);
    CHECK_FALSE(g.accepted);
  }
}

TEST_CASE("asymptotics suite bundles the predicates") {
  const ProblemParams P(3, 2.0);
  const Eigen::VectorXd R = radii_ladder(1.0, 3.0);
  const AsymptoticsReport rep = asymptotics_suite(make_power(P, 0.5), R, {LimitCandidate::cylinder_bubble(P)});
  CHECK_FALSE(rep.upper.divergent);
  CHECK(rep.symmetry.radial);
  REQUIRE(rep.fits.size() == 1);
  CHECK(rep.fits[0].candidate == "cylinder_bubble");
}

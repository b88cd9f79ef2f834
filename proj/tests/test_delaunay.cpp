#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "hartree/delaunay.hpp"

using namespace hartree;
using Catch::Matchers::WithinRel;

namespace {

const ProblemParams P(3, 2.0);
const NonlinearitySpec nl = NonlinearitySpec::critical(P, bubble_c_F(P));

}  // namespace

TEST_CASE("epsilon at U_c returns the constant branch") {
  const double Uc = constant_solution(P, nl);
  const DelaunaySolution s = find_delaunay(P, nl, Uc, 5.0, 10);
  CHECK(s.constant);
  CHECK(s.converged);
  CHECK(s.period == 5.0);
  CHECK(s.residual_norm <= 1e-10);
  CHECK((s.profile.values().array() - Uc).abs().maxCoeff() <= 1e-14 * Uc);
}

TEST_CASE("invalid requests") {
  CHECK_THROWS_AS(find_delaunay(P, nl, -1.0, 7.0, 10), ParameterError);
  DelaunayOptions odd;
  odd.collocation = 127;
  CHECK_THROWS_AS(find_delaunay(P, nl, 1e-3, 7.0, 10, odd), ParameterError);
}

TEST_CASE("branch above the bifurcation period") {
  const double L = 1.05 * 2 * std::numbers::pi;
  const DelaunaySolution s = find_delaunay(P, nl, 1e-3, L, 200);
  REQUIRE(s.converged);
  CHECK_FALSE(s.constant);
  CHECK_THAT(s.period, WithinRel(L, 1e-14));
  CHECK(s.residual_norm <= 1e-6);
  const Eigen::VectorXd& U = s.profile.values();
  CHECK(U.maxCoeff() - U.minCoeff() > 1e-3 * s.U_c);
  CHECK(U.maxCoeff() < 2 * s.U_c);
  CHECK(U.minCoeff() > 0.0);
  CHECK(s.epsilon == U[0]);
  // Evenness: U(t) = U(-t) = U(L - t) on the collocation grid.
  const int N = static_cast<int>(U.size());
  for (int k = 1; k < N; ++k) CHECK(std::abs(U[k] - U[N - k]) <= 1e-12 * s.U_c);
  CHECK_FALSE(s.log.empty());
}

TEST_CASE("a short continuation budget reports a partial result") {
  const DelaunaySolution s = find_delaunay(P, nl, 1e-3, 0.0, 3);
  CHECK(s.partial);
  CHECK(s.diagnostic == "continuation_steps exhausted");
}

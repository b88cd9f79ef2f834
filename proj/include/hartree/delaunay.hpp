#pragma once

#include <string>
#include <vector>

#include "hartree/cylinder.hpp"

namespace hartree {

struct DelaunayOptions {
  int collocation = 128;            // points per period, even, <= 2048
  double newton_tol = 1e-11;        // relative residual at which Newton stops
  int max_newton = 40;
  double initial_amplitude = 1e-2;  // first branch point U_c (1 - a), a relative to U_c
  double max_step = 0.05;           // largest epsilon step, relative to U_c
  double tol = 1e-10;               // kernel quadrature tolerance
};

struct ContinuationStep {
  double epsilon = 0;
  double period = 0;
  double residual = 0;
  int iterations = 0;
  bool accepted = false;
};

struct DelaunaySolution {
  double epsilon = 0;  // U(0), the neck value
  double period = 0;
  CylinderProfile profile;
  double residual_norm = 0;  // relative ODE residual of `profile`
  bool converged = false;
  bool partial = false;   // stopped before reaching the period or epsilon target
  bool constant = false;  // the constant branch was returned
  double U_c = 0;
  double L0 = 0;
  std::vector<ContinuationStep> log;
  std::vector<double> newton_history;  // residual after each accepted Newton step of the final solve
  std::string diagnostic;
};

/// Even periodic solutions of the cylinder ODE by Fourier collocation on a half period.
///
/// The branch leaving the constant solution at (U_c, L0) is followed with the frequency as an
/// unknown and U(0) = epsilon as the continuation constraint, stepping epsilon down from U_c.
/// When the branch period passes L, the solution is re-solved at that fixed period with
/// U(0) left free. With L <= 0 the march runs to epsilon_target and keeps the branch period.
/// epsilon_target >= U_c returns the constant solution.
DelaunaySolution find_delaunay(const ProblemParams& params, const NonlinearitySpec& nl, double epsilon_target,
                               double L, int continuation_steps, const DelaunayOptions& options = {});

}  // namespace hartree

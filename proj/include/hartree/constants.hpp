#pragma once

#include "hartree/params.hpp"

namespace hartree {

/// Closed-form constants of the critical Hartree problem for given (n, alpha).
struct SharpConstants {
  double p = 0;          // critical exponent (n+alpha)/(n-2)
  double p_minus_1 = 0;  // (2+alpha)/(n-2)
  double S_n = 0;        // best Sobolev constant, ||u||_{2^*} <= S_n ||grad u||_2 normalization
  double H_n = 0;        // best HLS constant at q1 = q2 = 2n/(n+alpha)
  double K_n = 0;        // nonlocal Sobolev constant S_n H_n^{(2-n)/(n+alpha)}
  double C_n = 0;        // amplitude of the spherical solutions
  double omega = 0;      // |S^n|, the sphere measure entering S_n
  double omega_nm1 = 0;  // |S^{n-1}|
  double omega_nm2 = 0;  // |S^{n-2}|
};

/// Surface measure of the unit sphere S^k in R^{k+1}; omega(1) = 2 pi, omega(2) = 4 pi.
double sphere_measure(int k);

/// Volume of the unit ball in R^k.
double ball_volume(int k);

double critical_exponent(const ProblemParams& params);

/// 2^*_alpha - 1 = (2+alpha)/(n-2).
double critical_exponent_minus_one(const ProblemParams& params);

/// Evaluates every constant through std::tgamma; each gamma factor is range-checked
/// and an overflow is reported as RangeError naming the factor.
SharpConstants sharp_constants(const ProblemParams& params);

/// C_n(alpha) assembled from already computed S_n and K_n.
double bubble_amplitude(int n, double alpha, double S_n, double K_n);

/// Amplitude [n(n-2)]^{(n-2)/4} of the Talenti-Aubin bubble.
double talenti_amplitude(int n);

/// Closed form of R_alpha * (1+|y|^2)^{-(n+alpha)/2} at the origin, i.e. the factor I in
///   R_alpha * (1+|y|^2)^{-(n+alpha)/2} = I (1+|x|^2)^{-(n-alpha)/2}.
double bubble_convolution_factor(const ProblemParams& params);

}  // namespace hartree

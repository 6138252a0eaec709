#pragma once

#include <Eigen/Dense>

#include "symchi/edf.hpp"
#include "symchi/pearson.hpp"
#include "symchi/special.hpp"
#include "symchi/timeseries.hpp"

namespace symchi {

/// Inputs of the contamination-shift formulas: the true coefficients
/// (beta_0 = -1 is prepended internally), the true scale under the
/// normal-scale hypothesis, and the outlier law.
struct ShiftContext {
  Eigen::VectorXd beta;  // beta_1..beta_p
  double theta0 = 1.0;
  OutlierLaw pi = PointMassOutlier{0.0};
};

/// Shift of the residual e.d.f. induced by a unit contamination intensity:
///   Delta(x, Pi) = sum_{j=0..p} E[ G(x + beta_j xi) - G(x) ],  beta_0 = -1,
/// with G(x) = Phi(x/theta0).  Expectations are closed-form for point
/// masses and discrete laws, adaptive Gauss-Legendre quadrature (1e-9
/// absolute) for normal and uniform laws, and quadrature on the
/// tangent-substituted domain (1e-7 absolute) for the Cauchy law.
double shift_delta(double x, const ShiftContext& ctx);

/// Odd part (Delta(x) - Delta(-x)) / 2; this is the drift of the
/// symmetrized residual e.d.f.
double shift_delta_sym(double x, const ShiftContext& ctx);

/// Per-cell drift vector delta_j = 2 [Delta_S(x_j) - Delta_S(x_{j-1})],
/// j = 1..m.  The infinite boundary uses the limit Delta_S -> 0, verified
/// at a finite cutoff grown geometrically until |Delta_S| < 1e-10; the
/// entries telescope, so the vector sums to zero exactly.
Eigen::VectorXd cell_shift_vector(const Partition& part, const ShiftContext& ctx);

/// Intermediate quantities of the noncentrality quadratic form, exposed
/// for diagnostics and tests.
struct NoncentralitySpec {
  Eigen::VectorXd p_vec;      // p_j(theta0)
  Eigen::VectorXd p_prime;    // p'_j(theta0)
  Eigen::VectorXd b;          // P^{-1/2} p'
  Eigen::VectorXd alpha_vec;  // b / |b|
  Eigen::VectorXd delta;      // cell shift vector
  double gamma = 0.0;
  double lambda2 = 0.0;
};

NoncentralitySpec noncentrality_spec(double gamma, const Partition& part,
                                     const ShiftContext& ctx);

/// Noncentrality of the limiting chi-square law:
///   lambda^2(gamma, Pi) = gamma^2 |(I - alpha alpha^T) P^{-1/2} delta(Pi)|^2.
double noncentrality(double gamma, const Partition& part, const ShiftContext& ctx);

/// Limiting level of the nominal-alpha test under contamination:
///   1 - F_{m-2}( chi2_quantile(1 - alpha, m - 2), lambda^2(gamma, Pi) ).
/// Equals alpha exactly at gamma = 0.
double asymptotic_level(double gamma, double alpha, const Partition& part,
                        const ShiftContext& ctx);

}  // namespace symchi

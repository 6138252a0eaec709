#pragma once

#include <Eigen/Dense>
#include <variant>

#include "symchi/timeseries.hpp"

namespace symchi {

struct LeastSquares {};

/// Huber M-estimation with tuning constant k (default 1.345, the usual
/// 95%-efficiency choice at the normal).
struct HuberM {
  double k = 1.345;
};

using EstimatorChoice = std::variant<LeastSquares, HuberM>;

void validate(const EstimatorChoice& choice);
std::string describe(const EstimatorChoice& choice);

/// Residuals eps_hat_1..n together with the estimates that produced them.
struct ResidualSet {
  Eigen::VectorXd residuals;
  double mu_hat = 0.0;
  Eigen::VectorXd beta_hat;
  int n = 0;
};

/// Median of a sample (average of the middle pair for even length).
double median(Eigen::Ref<const Eigen::VectorXd> x);

/// MAD / 0.6745, the usual consistency-corrected robust scale.  Returns 0
/// for an all-constant sample.
double mad_scale(Eigen::Ref<const Eigen::VectorXd> x);

/// Location estimate from y_1..y_n.  LeastSquares takes the sample mean;
/// HuberM solves the Huber score equation with scale fixed at MAD/0.6745
/// by damped fixed-point iteration to 1e-10.  Throws DegenerateScaleError
/// when the HuberM scale is exactly zero.
double estimate_mu(const SeriesSample& y, const EstimatorChoice& choice);

/// Autoregression coefficients from the centered values u_t = y_t - mu_hat.
/// LeastSquares solves the normal equations; HuberM runs iteratively
/// reweighted least squares with the residual scale refreshed by MAD each
/// sweep (convergence 1e-10 on the largest coefficient change, at most 200
/// sweeps).  For p = 0 returns an empty vector.  Throws
/// SingularDesignError when the lagged design is rank deficient.
Eigen::VectorXd estimate_beta(const SeriesSample& y, double mu_hat,
                              const EstimatorChoice& choice);

/// eps_hat_t = u_hat_t - sum_j beta_hat_j u_hat_{t-j} for t = 1..n, using
/// the p pre-sample observations, with u_hat_t = y_t - mu_hat.
ResidualSet residuals(const SeriesSample& y, double mu_hat,
                      Eigen::Ref<const Eigen::VectorXd> beta_hat);

/// Full estimation pipeline in the construction order mu_hat -> beta_hat
/// -> residuals.  Pipeline failures are rethrown as StageError.
ResidualSet fit_residuals(const SeriesSample& y, const EstimatorChoice& choice);

}  // namespace symchi

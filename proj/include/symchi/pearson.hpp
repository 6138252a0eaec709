#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "symchi/edf.hpp"

namespace symchi {

/// Cell probabilities of the zero-mean normal scale family over a
/// partition: p_plus_j(theta) = Phi(x_j/theta) - Phi(x_{j-1}/theta),
/// p_j = 2 p_plus_j, with analytic theta-derivatives.  Since x_0 = 0 and
/// x_m = infinity, p(theta) sums to 1 and p'(theta) sums to 0 for every
/// theta > 0.
struct CellModel {
  Partition partition;

  Eigen::VectorXd p_plus(double theta) const;
  Eigen::VectorXd p(double theta) const;
  Eigen::VectorXd p_prime(double theta) const;
};

/// Scale estimate: the root of the modified minimum chi-square equation
/// sum_j (nu_j / p_j(theta)) p'_j(theta) = 0, located by a scan of the
/// bracket [s/10, 10 s] around the preliminary scale s (geometric
/// expansion up to 2^10 when no sign change is found) and refined by a
/// safeguarded bisection/secant hybrid to |hi - lo| < 1e-10 * theta.
/// When several roots are bracketed, the one closest to s is returned.
/// Throws IllPosedError when fewer than two cells are occupied and
/// NoRootError when the expansion finds no sign change.
double solve_theta(const CellCounts& nu, const CellModel& model);

/// Pearson statistic sum_j (nu_j - n p_j(theta_hat))^2 / (n p_j(theta_hat)),
/// with n the total residual count behind `nu`.
double chi_square_stat(const CellCounts& nu, const CellModel& model, double theta_hat);

struct TestReport {
  double theta_hat = 0.0;
  CellCounts nu;
  double statistic = 0.0;
  int df = 0;
  double critical_value = 0.0;
  double alpha = 0.0;
  bool reject = false;
  double p_value = 1.0;
  std::string estimator;
  std::vector<double> partition_interior;
  std::vector<std::string> warnings;
};

/// Data-driven partition mode: the default boundaries are rescaled by
/// MAD/0.6745 of the residuals (flagged in the report warnings, since the
/// limit theory assumes a fixed partition).
struct AutoPartition {
  int m = 6;
};

/// Full test pipeline on an observed series with a fixed partition:
/// estimates (mu, beta), forms residuals and cell counts, solves for the
/// scale, and compares the statistic against the chi-square quantile with
/// m - 2 degrees of freedom.  Stage failures propagate as StageError.
TestReport run_test(const SeriesSample& y, const EstimatorChoice& choice,
                    const Partition& part, double alpha);

/// Same pipeline with the data-driven default partition.
TestReport run_test(const SeriesSample& y, const EstimatorChoice& choice,
                    const AutoPartition& part, double alpha);

}  // namespace symchi

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "symchi/asymptotics.hpp"
#include "symchi/pearson.hpp"
#include "symchi/timeseries.hpp"

namespace symchi {

/// One replicated experiment: simulate, contaminate, test.
struct ExperimentSpec {
  ArModel model;
  ContaminationSpec contamination;
  int n = 0;
  int replications = 0;
  EstimatorChoice estimator = HuberM{};
  Partition partition = Partition::default_fixed();
  double alpha = 0.05;
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = hardware concurrency
};

void validate(const ExperimentSpec& spec);

struct ExperimentResult {
  double rejection_rate = 0.0;
  double rejection_se = 0.0;  // binomial standard error
  std::vector<double> statistic_samples;
  double ks_distance_to_reference = 0.0;  // NaN when no theory reference applies
  double theory_level = 0.0;              // NaN for non-normal innovations
  double theory_lambda2 = 0.0;            // NaN for non-normal innovations
  int failures = 0;
  int replications = 0;
  bool unreliable = false;  // more than 1% of replications aborted
};

/// Outcome of one replication inside a harness run.
struct RepOutcome {
  double statistic = 0.0;
  bool reject = false;
  bool failed = false;
};

/// Deterministic parallel map: task(i) fills slot i, so the result is the
/// same for every worker count.
std::vector<RepOutcome> parallel_map(int count, int threads,
                                     const std::function<RepOutcome(int)>& task);

/// Kolmogorov distance between the empirical d.f. of a sample and a
/// continuous reference CDF.
double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf);

/// Runs the full test pipeline over independent replications (each on its
/// own RNG substream) and compares the empirical behavior with the
/// noncentral chi-square reference implied by the contamination scheme.
ExperimentResult run_level_experiment(const ExperimentSpec& spec);

/// One grid point of the symmetrized-e.d.f. drift check.
struct ExpansionRow {
  double x = 0.0;
  double mean_drift = 0.0;    // Monte Carlo mean of sqrt(n) [S_hat(x) - S_n(x)]
  double se = 0.0;            // standard error of that mean
  double theory_drift = 0.0;  // gamma * Delta_S(x, Pi); NaN for non-normal innovations
};

struct ExpansionResult {
  std::vector<ExpansionRow> rows;
  int failures = 0;
  int replications = 0;
};

/// Monte Carlo check of the stochastic-expansion drift of the symmetrized
/// residual e.d.f. on a grid of evaluation points; each replication keeps
/// the latent innovations so the unobservable e.d.f. is available.
ExpansionResult run_expansion_check(const ExperimentSpec& spec,
                                    const std::vector<double>& x_grid);

struct SweepCell {
  double gamma = 0.0;
  std::string pi_label;
  double lambda2 = 0.0;
  double theory_level = 0.0;
  double empirical_level = 0.0;  // NaN in theory-only sweeps
  double empirical_se = 0.0;
  int failures = 0;
};

struct SweepResult {
  double alpha = 0.0;
  std::vector<double> gammas;
  std::vector<std::string> pi_labels;
  std::vector<SweepCell> cells;               // gamma-major order
  std::vector<double> max_theory_deviation;   // max_Pi |level - alpha| per gamma
};

/// Evaluates the limiting level over a (gamma, Pi) grid; optionally also
/// runs the finite-sample experiment per cell.
SweepResult robustness_sweep(const ExperimentSpec& base, const std::vector<double>& gammas,
                             const std::vector<OutlierLaw>& pis, bool empirical = false);

}  // namespace symchi

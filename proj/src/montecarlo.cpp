#include "symchi/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <cstdio>
#include <stdexcept>
#include <thread>

#include "symchi/edf.hpp"
#include "symchi/errors.hpp"

namespace symchi {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Substream convention: replication r draws its simulation stream at 2r
// and its contamination stream at 2r + 1.
std::uint64_t sim_stream(int rep) { return 2ull * static_cast<std::uint64_t>(rep); }
std::uint64_t cont_stream(int rep) { return 2ull * static_cast<std::uint64_t>(rep) + 1ull; }

const NormalInnovation* normal_innovation(const ArModel& model) {
  return std::get_if<NormalInnovation>(&model.innovation());
}

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string pi_label_of(const OutlierLaw& pi) {
  return std::visit(
      [](const auto& law) -> std::string {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, PointMassOutlier>) {
          return "pointmass:" + short_num(law.c);
        } else if constexpr (std::is_same_v<T, NormalOutlier>) {
          return "normal:" + short_num(law.mean) + "," + short_num(law.scale);
        } else if constexpr (std::is_same_v<T, CauchyOutlier>) {
          return "cauchy:" + short_num(law.location) + "," + short_num(law.scale);
        } else if constexpr (std::is_same_v<T, UniformOutlier>) {
          return "uniform:" + short_num(law.a) + "," + short_num(law.b);
        } else {
          return "discrete(" + std::to_string(law.atoms.size()) + " atoms)";
        }
      },
      pi);
}

}  // namespace

void validate(const ExperimentSpec& spec) {
  if (spec.replications < 1) throw std::invalid_argument("ExperimentSpec: replications must be >= 1");
  if (spec.n < 10 * (spec.model.order() + 1)) {
    throw std::invalid_argument("ExperimentSpec: n must be at least 10(p+1)");
  }
  if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) {
    throw std::invalid_argument("ExperimentSpec: alpha must lie in (0, 1)");
  }
  if (spec.contamination.gamma < 0.0) {
    throw std::invalid_argument("ExperimentSpec: gamma must be >= 0");
  }
  validate(spec.estimator);
  validate(spec.contamination.pi);
}

std::vector<RepOutcome> parallel_map(int count, int threads,
                                     const std::function<RepOutcome(int)>& task) {
  std::vector<RepOutcome> out(count);
  const int nthreads = std::min(resolve_threads(threads), std::max(count, 1));
  if (nthreads <= 1) {
    for (int i = 0; i < count; ++i) out[i] = task(i);
    return out;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (int t = 0; t < nthreads; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        const int i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= count) return;
        out[i] = task(i);
      }
    });
  }
  for (auto& th : pool) th.join();
  return out;
}

double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("ks_distance: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
  }
  return d;
}

ExperimentResult run_level_experiment(const ExperimentSpec& spec) {
  validate(spec);

  const auto task = [&spec](int rep) -> RepOutcome {
    try {
      const SeriesSample clean =
          simulate_clean(spec.model, spec.n, substream_key(spec.seed, sim_stream(rep)));
      const SeriesSample y =
          contaminate(clean, spec.contamination, substream_key(spec.seed, cont_stream(rep)));
      const TestReport report = run_test(y, spec.estimator, spec.partition, spec.alpha);
      return RepOutcome{report.statistic, report.reject, false};
    } catch (const std::exception&) {
      return RepOutcome{0.0, false, true};
    }
  };

  const std::vector<RepOutcome> outcomes = parallel_map(spec.replications, spec.threads, task);

  ExperimentResult result;
  result.replications = spec.replications;
  int rejects = 0;
  for (const RepOutcome& o : outcomes) {
    if (o.failed) {
      ++result.failures;
      continue;
    }
    result.statistic_samples.push_back(o.statistic);
    if (o.reject) ++rejects;
  }
  const int successes = spec.replications - result.failures;
  if (successes == 0) throw IllPosedError("run_level_experiment: every replication failed");
  result.rejection_rate = static_cast<double>(rejects) / successes;
  result.rejection_se =
      std::sqrt(result.rejection_rate * (1.0 - result.rejection_rate) / successes);
  result.unreliable = result.failures > spec.replications / 100;

  if (const NormalInnovation* normal = normal_innovation(spec.model)) {
    const ShiftContext ctx{spec.model.beta(), normal->scale, spec.contamination.pi};
    result.theory_lambda2 = noncentrality(spec.contamination.gamma, spec.partition, ctx);
    result.theory_level =
        asymptotic_level(spec.contamination.gamma, spec.alpha, spec.partition, ctx);
    const int df = spec.partition.cells() - 2;
    const double lambda2 = result.theory_lambda2;
    result.ks_distance_to_reference = ks_distance(
        result.statistic_samples,
        [df, lambda2](double x) { return noncentral_chi2_cdf(x, df, lambda2); });
  } else {
    result.theory_lambda2 = kNaN;
    result.theory_level = kNaN;
    result.ks_distance_to_reference = kNaN;
  }
  return result;
}

ExpansionResult run_expansion_check(const ExperimentSpec& spec,
                                    const std::vector<double>& x_grid) {
  validate(spec);
  if (x_grid.empty()) throw std::invalid_argument("run_expansion_check: empty grid");
  const int k = static_cast<int>(x_grid.size());
  const double sqrt_n = std::sqrt(static_cast<double>(spec.n));

  // Per replication, all grid drifts; packed row-major into a flat array
  // guarded by the RepOutcome failure flag.
  std::vector<double> drifts(static_cast<std::size_t>(spec.replications) * k, 0.0);
  const auto task = [&](int rep) -> RepOutcome {
    try {
      const SeriesSample clean =
          simulate_clean(spec.model, spec.n, substream_key(spec.seed, sim_stream(rep)));
      const SeriesSample y =
          contaminate(clean, spec.contamination, substream_key(spec.seed, cont_stream(rep)));

      const ResidualSet rs = fit_residuals(y, spec.estimator);
      const Edf residual_edf(rs.residuals);
      const Edf innovation_edf(y.sample_innovations());

      for (int j = 0; j < k; ++j) {
        const double x = x_grid[j];
        drifts[static_cast<std::size_t>(rep) * k + j] =
            sqrt_n * (residual_edf.symmetrized(x) - innovation_edf.symmetrized(x));
      }
      return RepOutcome{0.0, false, false};
    } catch (const std::exception&) {
      return RepOutcome{0.0, false, true};
    }
  };

  const std::vector<RepOutcome> outcomes = parallel_map(spec.replications, spec.threads, task);

  ExpansionResult result;
  result.replications = spec.replications;
  for (const RepOutcome& o : outcomes) result.failures += o.failed ? 1 : 0;
  const int successes = spec.replications - result.failures;
  if (successes < 2) throw IllPosedError("run_expansion_check: too few successful replications");

  const NormalInnovation* normal = normal_innovation(spec.model);
  ShiftContext ctx;
  if (normal) ctx = ShiftContext{spec.model.beta(), normal->scale, spec.contamination.pi};

  result.rows.reserve(k);
  for (int j = 0; j < k; ++j) {
    double mean = 0.0;
    for (int rep = 0; rep < spec.replications; ++rep) {
      if (!outcomes[rep].failed) mean += drifts[static_cast<std::size_t>(rep) * k + j];
    }
    mean /= successes;
    double var = 0.0;
    for (int rep = 0; rep < spec.replications; ++rep) {
      if (outcomes[rep].failed) continue;
      const double d = drifts[static_cast<std::size_t>(rep) * k + j] - mean;
      var += d * d;
    }
    var /= (successes - 1);

    ExpansionRow row;
    row.x = x_grid[j];
    row.mean_drift = mean;
    row.se = std::sqrt(var / successes);
    row.theory_drift =
        normal ? spec.contamination.gamma * shift_delta_sym(x_grid[j], ctx) : kNaN;
    result.rows.push_back(row);
  }
  return result;
}

SweepResult robustness_sweep(const ExperimentSpec& base, const std::vector<double>& gammas,
                             const std::vector<OutlierLaw>& pis, bool empirical) {
  if (gammas.empty() || pis.empty()) {
    throw std::invalid_argument("robustness_sweep: empty gamma or Pi grid");
  }
  const NormalInnovation* normal = normal_innovation(base.model);
  if (!normal) {
    throw std::invalid_argument("robustness_sweep: the limiting level requires normal innovations");
  }

  SweepResult result;
  result.alpha = base.alpha;
  result.gammas = gammas;
  for (const OutlierLaw& pi : pis) result.pi_labels.push_back(pi_label_of(pi));

  // delta(Pi) does not depend on gamma, so the unit noncentrality is
  // computed once per outlier law.
  std::vector<double> unit_lambda2;
  unit_lambda2.reserve(pis.size());
  for (const OutlierLaw& pi : pis) {
    const ShiftContext ctx{base.model.beta(), normal->scale, pi};
    unit_lambda2.push_back(noncentrality(1.0, base.partition, ctx));
  }

  const int df = base.partition.cells() - 2;
  if (df < 1) throw std::invalid_argument("robustness_sweep: partition needs more than two cells");
  const double quantile = chi2_quantile(1.0 - base.alpha, df);

  int cell_index = 0;
  for (double gamma : gammas) {
    if (gamma < 0.0) throw std::invalid_argument("robustness_sweep: gamma must be >= 0");
    double max_dev = 0.0;
    for (std::size_t ip = 0; ip < pis.size(); ++ip) {
      SweepCell cell;
      cell.gamma = gamma;
      cell.pi_label = result.pi_labels[ip];
      cell.lambda2 = gamma * gamma * unit_lambda2[ip];
      cell.theory_level = 1.0 - noncentral_chi2_cdf(quantile, df, cell.lambda2);
      max_dev = std::max(max_dev, std::abs(cell.theory_level - base.alpha));

      if (empirical) {
        ExperimentSpec spec = base;
        spec.contamination = ContaminationSpec{gamma, pis[ip]};
        spec.seed = substream_key(base.seed, 0x5eedull + cell_index);
        const ExperimentResult er = run_level_experiment(spec);
        cell.empirical_level = er.rejection_rate;
        cell.empirical_se = er.rejection_se;
        cell.failures = er.failures;
      } else {
        cell.empirical_level = kNaN;
        cell.empirical_se = kNaN;
      }
      result.cells.push_back(std::move(cell));
      ++cell_index;
    }
    result.max_theory_deviation.push_back(max_dev);
  }
  return result;
}

}  // namespace symchi

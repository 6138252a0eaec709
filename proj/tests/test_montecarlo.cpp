#include "symchi/montecarlo.hpp"

#include <cmath>
#include <doctest.h>
#include <stdexcept>

#include "symchi/io.hpp"
#include "symchi/rng.hpp"
#include "symchi/special.hpp"

using namespace symchi;

namespace {

Eigen::VectorXd vec_of(std::initializer_list<double> vals) {
  Eigen::VectorXd v(static_cast<int>(vals.size()));
  int i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

ExperimentSpec small_spec(double gamma, OutlierLaw pi, int n, int reps, std::uint64_t seed) {
  return ExperimentSpec{ArModel(vec_of({0.5}), 1.0, NormalInnovation{1.0}),
                        ContaminationSpec{gamma, std::move(pi)},
                        n,
                        reps,
                        HuberM{},
                        Partition::default_fixed(6, 1.0),
                        0.05,
                        seed,
                        0};
}

}  // namespace

TEST_CASE("experiment spec validation") {
  ExperimentSpec spec = small_spec(0.0, PointMassOutlier{0.0}, 500, 10, 1);
  CHECK_NOTHROW(validate(spec));
  spec.replications = 0;
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
  spec.replications = 10;
  spec.n = 15;  // below 10 (p + 1) = 20
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
  spec.n = 500;
  spec.alpha = 0.0;
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
}

TEST_CASE("ks distance matches a brute-force double loop") {
  Rng rng(17);
  const auto cdf = [](double x) { return normal_cdf(x); };
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 5 + static_cast<int>(rng.uniform01() * 95);
    std::vector<double> sample(n);
    for (double& v : sample) v = rng.normal() * (0.5 + rng.uniform01());

    double brute = 0.0;
    for (int j = 0; j < n; ++j) {
      int le = 0, lt = 0;
      for (int i = 0; i < n; ++i) {
        le += (sample[i] <= sample[j]);
        lt += (sample[i] < sample[j]);
      }
      const double f = cdf(sample[j]);
      brute = std::max(brute, std::abs(static_cast<double>(le) / n - f));
      brute = std::max(brute, std::abs(f - static_cast<double>(lt) / n));
    }
    CHECK(ks_distance(sample, cdf) == doctest::Approx(brute).epsilon(1e-15));
  }
}

TEST_CASE("parallel map is deterministic and slot ordered") {
  const auto task = [](int i) {
    Rng rng(7, static_cast<std::uint64_t>(i));
    return RepOutcome{rng.uniform01(), false, false};
  };
  const std::vector<RepOutcome> serial = parallel_map(64, 1, task);
  const std::vector<RepOutcome> wide = parallel_map(64, 4, task);
  REQUIRE(serial.size() == wide.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].statistic == wide[i].statistic);
  }
}

TEST_CASE("a calibrated coin flip oracle is covered by the harness error bars") {
  // Replaces the test pipeline with Bernoulli(alpha) rejections and checks
  // that the +-3 SE band around the reported rate covers alpha in at least
  // 99% of meta-replications.
  const double alpha = 0.05;
  const int reps = 1000;
  const int metas = 300;
  int covered = 0;
  for (int meta = 0; meta < metas; ++meta) {
    const std::uint64_t seed = 1000 + meta;
    const auto task = [&](int rep) {
      Rng rng(seed, static_cast<std::uint64_t>(rep));
      return RepOutcome{0.0, rng.uniform01() < alpha, false};
    };
    const std::vector<RepOutcome> outcomes = parallel_map(reps, 2, task);
    int rejects = 0;
    for (const RepOutcome& o : outcomes) rejects += o.reject;
    const double rate = static_cast<double>(rejects) / reps;
    const double se = std::sqrt(rate * (1.0 - rate) / reps);
    if (std::abs(rate - alpha) <= 3.0 * se) ++covered;
  }
  CHECK(covered >= static_cast<int>(0.99 * metas));
}

TEST_CASE("level experiment output is independent of the worker count") {
  ExperimentSpec spec = small_spec(1.0, CauchyOutlier{0.0, 1.0}, 300, 40, 99);
  spec.threads = 1;
  const ExperimentResult serial = run_level_experiment(spec);
  spec.threads = 4;
  const ExperimentResult wide = run_level_experiment(spec);

  REQUIRE(serial.statistic_samples.size() == wide.statistic_samples.size());
  for (std::size_t i = 0; i < serial.statistic_samples.size(); ++i) {
    CHECK(serial.statistic_samples[i] == wide.statistic_samples[i]);
  }
  CHECK(serial.rejection_rate == wide.rejection_rate);
  CHECK(to_json(serial).dump() == to_json(wide).dump());
}

TEST_CASE("a single replication rejects or accepts outright") {
  const ExperimentSpec spec = small_spec(0.0, PointMassOutlier{0.0}, 300, 1, 3);
  const ExperimentResult result = run_level_experiment(spec);
  CHECK((result.rejection_rate == 0.0 || result.rejection_rate == 1.0));
}

TEST_CASE("clean gaussian data hold the nominal level approximately") {
  const ExperimentSpec spec = small_spec(0.0, PointMassOutlier{0.0}, 500, 300, 2025);
  const ExperimentResult result = run_level_experiment(spec);
  CHECK(result.failures == 0);
  CHECK_FALSE(result.unreliable);
  CHECK(result.theory_lambda2 == 0.0);
  CHECK(std::abs(result.theory_level - 0.05) < 1e-10);
  // 300 replications put 3 SE near 0.038; allow finite-sample slack on top
  CHECK(std::abs(result.rejection_rate - 0.05) < 0.05);
  CHECK(result.ks_distance_to_reference < 0.12);
}

TEST_CASE("non-normal innovations leave the theory columns empty") {
  ExperimentSpec spec{ArModel(vec_of({0.5}), 0.0, LaplaceInnovation{1.0}),
                      ContaminationSpec{0.0, PointMassOutlier{0.0}},
                      400,
                      25,
                      HuberM{},
                      Partition::default_fixed(6, 1.0),
                      0.05,
                      7,
                      0};
  const ExperimentResult result = run_level_experiment(spec);
  CHECK(std::isnan(result.theory_level));
  CHECK(std::isnan(result.theory_lambda2));
  CHECK(std::isnan(result.ks_distance_to_reference));
  CHECK(result.rejection_rate > 0.2);  // heavy tails are easy to spot
}

TEST_CASE("drift check: no contamination, no drift") {
  const ExperimentSpec spec = small_spec(0.0, PointMassOutlier{0.0}, 400, 120, 11);
  const ExpansionResult result = run_expansion_check(spec, {0.0, 0.5, 1.0, 2.0});
  REQUIRE(result.rows.size() == 4);

  // x = 0 pins both symmetrized e.d.f.s at 1/2 exactly
  CHECK(result.rows[0].mean_drift == 0.0);
  CHECK(result.rows[0].se == 0.0);
  CHECK(result.rows[0].theory_drift == 0.0);

  for (std::size_t j = 1; j < result.rows.size(); ++j) {
    const ExpansionRow& row = result.rows[j];
    CHECK(row.theory_drift == 0.0);
    CHECK(std::abs(row.mean_drift) < 3.0 * row.se);
  }
}

TEST_CASE("drift check matches the shift theory under contamination") {
  ExperimentSpec spec = small_spec(1.0, PointMassOutlier{3.0}, 10000, 300, 771);
  const std::vector<double> grid = {0.5, 1.0, 1.5, 2.0};
  const ExpansionResult result = run_expansion_check(spec, grid);
  REQUIRE(result.rows.size() == grid.size());
  for (const ExpansionRow& row : result.rows) {
    CHECK(std::isfinite(row.theory_drift));
    CHECK(std::abs(row.mean_drift - row.theory_drift) < 3.0 * row.se);
  }
}

TEST_CASE("cell increments of the drift reproduce the shift vector") {
  // Monte Carlo analogue of the per-cell drift: increments of the mean
  // drift across consecutive boundaries estimate gamma * delta_j / 2.
  ExperimentSpec spec = small_spec(1.0, PointMassOutlier{3.0}, 10000, 300, 4242);
  const Partition part = spec.partition;
  std::vector<double> grid;
  for (int j = 1; j < part.cells(); ++j) grid.push_back(part.boundary(j));
  const ExpansionResult result = run_expansion_check(spec, grid);

  const ShiftContext ctx{spec.model.beta(), 1.0, spec.contamination.pi};
  const Eigen::VectorXd delta = cell_shift_vector(part, ctx);

  double prev_mean = 0.0, prev_se = 0.0;  // drift at x_0 = 0 is identically zero
  for (int j = 1; j < part.cells(); ++j) {
    const ExpansionRow& row = result.rows[j - 1];
    const double increment = row.mean_drift - prev_mean;
    const double se = row.se + prev_se;
    CHECK(std::abs(increment - 0.5 * delta[j - 1]) < 3.0 * se + 1e-12);
    prev_mean = row.mean_drift;
    prev_se = row.se;
  }
}

TEST_CASE("moderate contamination level tracks the limiting level") {
  // Gentle contamination keeps the finite-sample remainder small, so the
  // rejection rate sits between the nominal level and the limit.
  const ExperimentSpec spec = small_spec(1.0, PointMassOutlier{2.0}, 5000, 600, 2718);
  const ExperimentResult result = run_level_experiment(spec);
  CHECK(result.theory_level > 0.055);  // contamination lifts the level
  CHECK(std::abs(result.rejection_rate - result.theory_level) <
        3.0 * result.rejection_se + 0.01);
}

TEST_CASE("robustness sweep theory grid") {
  const ExperimentSpec base = small_spec(0.0, PointMassOutlier{0.0}, 300, 10, 5);
  const std::vector<double> gammas = {1.0, 0.5, 0.25, 0.0};
  const std::vector<OutlierLaw> pis = {PointMassOutlier{3.0}, NormalOutlier{0.0, 9.0}};
  const SweepResult sweep = robustness_sweep(base, gammas, pis, false);

  REQUIRE(sweep.cells.size() == gammas.size() * pis.size());
  REQUIRE(sweep.max_theory_deviation.size() == gammas.size());

  // the gamma = 0 row is exactly the nominal level
  for (const SweepCell& cell : sweep.cells) {
    if (cell.gamma == 0.0) {
      CHECK(cell.lambda2 == 0.0);
      CHECK(cell.theory_level == doctest::Approx(0.05).epsilon(1e-12));
      CHECK(std::isnan(cell.empirical_level));
    }
  }
  CHECK(sweep.max_theory_deviation.back() == doctest::Approx(0.0).epsilon(1e-10));

  // halving gamma divides every noncentrality by exactly four
  for (std::size_t ip = 0; ip < pis.size(); ++ip) {
    const double l_full = sweep.cells[0 * pis.size() + ip].lambda2;   // gamma = 1
    const double l_half = sweep.cells[1 * pis.size() + ip].lambda2;   // gamma = 0.5
    CHECK(4.0 * l_half == l_full);
  }

  // deviations shrink along the decreasing-gamma grid
  for (std::size_t g = 1; g < gammas.size(); ++g) {
    CHECK(sweep.max_theory_deviation[g] <= sweep.max_theory_deviation[g - 1] + 1e-15);
  }
}

TEST_CASE("robustness sweep with finite-sample experiments") {
  ExperimentSpec base = small_spec(0.0, PointMassOutlier{0.0}, 400, 150, 31);
  const SweepResult sweep =
      robustness_sweep(base, {0.5}, {OutlierLaw(PointMassOutlier{5.0})}, true);
  REQUIRE(sweep.cells.size() == 1);
  const SweepCell& cell = sweep.cells[0];
  CHECK(std::isfinite(cell.empirical_level));
  // generous 3 SE + asymptotic slack band around the limiting level
  CHECK(std::abs(cell.empirical_level - cell.theory_level) < 3.0 * cell.empirical_se + 0.06);
}

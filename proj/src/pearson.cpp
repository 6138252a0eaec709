#include "symchi/pearson.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "symchi/errors.hpp"
#include "symchi/special.hpp"

namespace symchi {

namespace {

constexpr double kThetaRelTol = 1e-10;
constexpr int kScanPoints = 128;
constexpr int kMaxExpansions = 10;

double phi_x(double x, double theta) {
  if (std::isinf(x)) return 0.0;  // phi(x/theta) * x -> 0 at the infinite boundary
  return normal_pdf(x / theta) * x;
}

// Estimating-equation value sum_j (nu_j / p_j) p'_j at theta.
double score(const CellCounts& nu, const CellModel& model, double theta) {
  const Eigen::VectorXd p = model.p(theta);
  const Eigen::VectorXd pp = model.p_prime(theta);
  double h = 0.0;
  for (int j = 0; j < p.size(); ++j) {
    if (nu.nu[j] == 0.0) continue;
    h += nu.nu[j] * pp[j] / std::max(p[j], 1e-300);
  }
  return h;
}

// Safeguarded secant/bisection on a sign-change bracket.
double refine_root(const CellCounts& nu, const CellModel& model, double lo, double hi,
                   double flo, double fhi) {
  for (int it = 0; it < 200; ++it) {
    double mid;
    const double denom = fhi - flo;
    if (denom != 0.0) {
      mid = hi - fhi * (hi - lo) / denom;
      const double margin = 0.01 * (hi - lo);
      if (!(mid > lo + margin && mid < hi - margin)) mid = 0.5 * (lo + hi);
    } else {
      mid = 0.5 * (lo + hi);
    }
    const double fmid = score(nu, model, mid);
    if (fmid == 0.0) return mid;
    if ((fmid > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
      fhi = fmid;
    }
    if (hi - lo < kThetaRelTol * (0.5 * (lo + hi))) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Eigen::VectorXd CellModel::p_plus(double theta) const {
  if (!(theta > 0.0)) throw std::invalid_argument("CellModel: theta must be positive");
  const int m = partition.cells();
  Eigen::VectorXd out(m);
  double prev = 0.5;  // Phi(0)
  for (int j = 1; j <= m; ++j) {
    const double hi = partition.boundary(j);
    const double cur = std::isinf(hi) ? 1.0 : normal_cdf(hi / theta);
    out[j - 1] = cur - prev;
    prev = cur;
  }
  return out;
}

Eigen::VectorXd CellModel::p(double theta) const { return 2.0 * p_plus(theta); }

Eigen::VectorXd CellModel::p_prime(double theta) const {
  if (!(theta > 0.0)) throw std::invalid_argument("CellModel: theta must be positive");
  const int m = partition.cells();
  const double inv_t2 = 1.0 / (theta * theta);
  Eigen::VectorXd out(m);
  double prev = 0.0;  // phi(x_0/theta) * x_0 with x_0 = 0
  for (int j = 1; j <= m; ++j) {
    const double cur = phi_x(partition.boundary(j), theta);
    out[j - 1] = 2.0 * (prev - cur) * inv_t2;
    prev = cur;
  }
  return out;
}

double solve_theta(const CellCounts& nu, const CellModel& model) {
  if (nu.nu.sum() <= 0.0) throw IllPosedError("solve_theta: no counts");
  if ((nu.nu.array() > 0.0).count() < 2) {
    throw IllPosedError("solve_theta: counts concentrated in a single cell");
  }
  const double s = nu.prelim_scale;
  if (!(s > 0.0)) throw IllPosedError("solve_theta: degenerate preliminary scale");

  double lo = s / 10.0;
  double hi = 10.0 * s;
  for (int expansion = 0; expansion <= kMaxExpansions; ++expansion) {
    // Scan a geometric grid and bracket every sign change between nonzero
    // score values; exact zeros are underflow, not roots.
    const double ratio = std::pow(hi / lo, 1.0 / (kScanPoints - 1));
    double tl = 0.0, fl = 0.0;
    double best = std::numeric_limits<double>::quiet_NaN();
    double best_dist = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kScanPoints; ++i) {
      const double tr = (i == kScanPoints - 1) ? hi : lo * std::pow(ratio, i);
      const double fr = score(nu, model, tr);
      if (fr == 0.0) continue;
      if (fl != 0.0 && (fl > 0.0) != (fr > 0.0)) {
        const double root = refine_root(nu, model, tl, tr, fl, fr);
        const double dist = std::abs(root - s);
        if (dist < best_dist) {
          best = root;
          best_dist = dist;
        }
      }
      tl = tr;
      fl = fr;
    }
    if (std::isfinite(best)) return best;
    lo *= 0.5;
    hi *= 2.0;
  }
  throw NoRootError("solve_theta: no sign change after bracket expansion");
}

double chi_square_stat(const CellCounts& nu, const CellModel& model, double theta_hat) {
  if (!(theta_hat > 0.0)) throw std::invalid_argument("chi_square_stat: theta_hat must be positive");
  const Eigen::VectorXd p = model.p(theta_hat);
  if (p.minCoeff() < 1e-300) {
    throw PrecisionError("chi_square_stat: cell probability underflow", p.minCoeff());
  }
  const double n = static_cast<double>(nu.n);
  return ((nu.nu - n * p).array().square() / (n * p.array())).sum();
}

namespace {

TestReport finish_test(const ResidualSet& rs, const EstimatorChoice& choice,
                       const Partition& part, double alpha, std::vector<std::string> warnings) {
  if (part.cells() <= 2) {
    throw std::invalid_argument("run_test: the partition must have more than two cells");
  }
  const CellModel model{part};
  const CellCounts counts = cell_counts(rs, part);

  double theta_hat = 0.0;
  try {
    theta_hat = solve_theta(counts, model);
  } catch (const std::exception& e) {
    throw StageError("solve_theta", e.what());
  }
  double stat = 0.0;
  try {
    stat = chi_square_stat(counts, model, theta_hat);
  } catch (const std::exception& e) {
    throw StageError("chi_square_stat", e.what());
  }

  TestReport report;
  report.theta_hat = theta_hat;
  report.nu = counts;
  report.statistic = stat;
  report.df = part.cells() - 2;
  report.critical_value = chi2_quantile(1.0 - alpha, report.df);
  report.alpha = alpha;
  report.reject = stat > report.critical_value;
  report.p_value = 1.0 - chi2_cdf(stat, report.df);
  report.estimator = describe(choice);
  report.partition_interior = part.interior();
  report.warnings = std::move(warnings);
  return report;
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("run_test: alpha must lie in (0, 1)");
  }
}

}  // namespace

TestReport run_test(const SeriesSample& y, const EstimatorChoice& choice,
                    const Partition& part, double alpha) {
  check_alpha(alpha);
  const ResidualSet rs = fit_residuals(y, choice);
  return finish_test(rs, choice, part, alpha, {});
}

TestReport run_test(const SeriesSample& y, const EstimatorChoice& choice,
                    const AutoPartition& part, double alpha) {
  check_alpha(alpha);
  const ResidualSet rs = fit_residuals(y, choice);
  const double s = mad_scale(rs.residuals);
  if (!(s > 0.0)) throw StageError("partition", "degenerate residual scale for the default partition");
  std::vector<std::string> warnings = {
      "partition boundaries rescaled by the data-driven preliminary scale; "
      "the limit theory assumes a fixed partition"};
  return finish_test(rs, choice, Partition::default_fixed(part.m, s), alpha,
                     std::move(warnings));
}

}  // namespace symchi

#include "symchi/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "symchi/errors.hpp"

namespace symchi {

namespace {

constexpr double kMadNormalizer = 0.6745;
constexpr double kFixedPointTol = 1e-10;
constexpr double kIrlsTol = 1e-10;
constexpr int kMaxSweeps = 200;

double huber_weight(double r, double bound) {
  const double a = std::abs(r);
  return (a <= bound) ? 1.0 : bound / a;
}

// Weighted normal-equation solve for the lagged regression; throws on a
// rank-deficient design.
Eigen::VectorXd solve_lagged(const Eigen::VectorXd& u, int p,
                             const Eigen::VectorXd* weights) {
  const int n = static_cast<int>(u.size()) - p;
  Eigen::MatrixXd xtx = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd xty = Eigen::VectorXd::Zero(p);
  for (int t = 0; t < n; ++t) {
    const double w = weights ? (*weights)[t] : 1.0;
    // row of regressors for target u[p + t]: lags u[p+t-1], ..., u[t]
    for (int j = 0; j < p; ++j) {
      const double xj = u[p + t - 1 - j];
      xty[j] += w * xj * u[p + t];
      for (int k = j; k < p; ++k) {
        xtx(j, k) += w * xj * u[p + t - 1 - k];
      }
    }
  }
  xtx = xtx.selfadjointView<Eigen::Upper>();

  Eigen::LDLT<Eigen::MatrixXd> ldlt(xtx);
  const Eigen::VectorXd d = ldlt.vectorD().cwiseAbs();
  const double dmax = d.maxCoeff();
  if (ldlt.info() != Eigen::Success || dmax <= 0.0 || d.minCoeff() < 1e-12 * dmax) {
    throw SingularDesignError("estimate_beta: lagged design is rank deficient");
  }
  return ldlt.solve(xty);
}

}  // namespace

void validate(const EstimatorChoice& choice) {
  if (const auto* h = std::get_if<HuberM>(&choice)) {
    if (!(h->k > 0.0)) throw std::invalid_argument("HuberM: k must be positive");
  }
}

std::string describe(const EstimatorChoice& choice) {
  if (const auto* h = std::get_if<HuberM>(&choice)) {
    return "huber(k=" + std::to_string(h->k) + ")";
  }
  return "ls";
}

double median(Eigen::Ref<const Eigen::VectorXd> x) {
  const int n = static_cast<int>(x.size());
  if (n == 0) throw std::invalid_argument("median: empty sample");
  std::vector<double> buf(x.data(), x.data() + n);
  auto mid = buf.begin() + n / 2;
  std::nth_element(buf.begin(), mid, buf.end());
  if (n % 2 == 1) return *mid;
  const double hi = *mid;
  std::nth_element(buf.begin(), buf.begin() + n / 2 - 1, buf.end());
  return 0.5 * (buf[n / 2 - 1] + hi);
}

double mad_scale(Eigen::Ref<const Eigen::VectorXd> x) {
  const double med = median(x);
  Eigen::VectorXd dev = (x.array() - med).abs();
  return median(dev) / kMadNormalizer;
}

double estimate_mu(const SeriesSample& y, const EstimatorChoice& choice) {
  validate(choice);
  const int n = y.n();
  if (n < y.order() + 1) throw std::invalid_argument("estimate_mu: series too short");
  const Eigen::VectorXd sample = y.observed().tail(n);

  if (std::holds_alternative<LeastSquares>(choice)) {
    return sample.mean();
  }

  const double k = std::get<HuberM>(choice).k;
  const double scale = mad_scale(sample);
  if (scale == 0.0) {
    throw DegenerateScaleError("estimate_mu: MAD of the sample is zero");
  }
  const double bound = k * scale;

  double mu = median(sample);
  for (int it = 0; it < 500; ++it) {
    double wsum = 0.0, wysum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double w = huber_weight(sample[i] - mu, bound);
      wsum += w;
      wysum += w * sample[i];
    }
    const double next = wysum / wsum;
    const double step = next - mu;
    mu = next;
    if (std::abs(step) <= kFixedPointTol * std::max(1.0, scale)) break;
  }
  return mu;
}

Eigen::VectorXd estimate_beta(const SeriesSample& y, double mu_hat,
                              const EstimatorChoice& choice) {
  validate(choice);
  const int p = y.order();
  if (p == 0) return Eigen::VectorXd();
  const int n = y.n();
  if (n < p + 1) throw std::invalid_argument("estimate_beta: series too short");

  const Eigen::VectorXd u = y.observed().array() - mu_hat;
  Eigen::VectorXd beta = solve_lagged(u, p, nullptr);
  if (std::holds_alternative<LeastSquares>(choice)) return beta;

  const double k = std::get<HuberM>(choice).k;
  Eigen::VectorXd r(n), w(n);
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    for (int t = 0; t < n; ++t) {
      double fit = 0.0;
      for (int j = 0; j < p; ++j) fit += beta[j] * u[p + t - 1 - j];
      r[t] = u[p + t] - fit;
    }
    const double scale = std::max(mad_scale(r), 1e-12);
    const double bound = k * scale;
    for (int t = 0; t < n; ++t) w[t] = huber_weight(r[t], bound);

    const Eigen::VectorXd next = solve_lagged(u, p, &w);
    const double change = (next - beta).cwiseAbs().maxCoeff();
    beta = next;
    if (change < kIrlsTol) break;
  }
  return beta;
}

ResidualSet residuals(const SeriesSample& y, double mu_hat,
                      Eigen::Ref<const Eigen::VectorXd> beta_hat) {
  const int p = y.order();
  if (beta_hat.size() != p) {
    throw std::invalid_argument("residuals: beta_hat length must equal the model order");
  }
  const int n = y.n();

  const Eigen::VectorXd u = y.observed().array() - mu_hat;
  Eigen::VectorXd eps(n);
  for (int t = 0; t < n; ++t) {
    double acc = 0.0;
    for (int j = 0; j < p; ++j) acc += beta_hat[j] * u[p + t - 1 - j];
    eps[t] = u[p + t] - acc;
  }
  return ResidualSet{std::move(eps), mu_hat, beta_hat, n};
}

ResidualSet fit_residuals(const SeriesSample& y, const EstimatorChoice& choice) {
  double mu_hat = 0.0;
  try {
    mu_hat = estimate_mu(y, choice);
  } catch (const std::exception& e) {
    throw StageError("estimate_mu", e.what());
  }
  Eigen::VectorXd beta_hat;
  try {
    beta_hat = estimate_beta(y, mu_hat, choice);
  } catch (const std::exception& e) {
    throw StageError("estimate_beta", e.what());
  }
  return residuals(y, mu_hat, beta_hat);
}

}  // namespace symchi

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <variant>
#include <vector>

#include "symchi/rng.hpp"

namespace symchi {

inline constexpr double kStabilityTol = 1e-8;

// ---------------------------------------------------------------------------
// Innovation laws: symmetric about 0, mean 0, finite positive variance.
// ---------------------------------------------------------------------------

struct NormalInnovation {
  double scale = 1.0;  // N(0, scale^2)
};
struct LaplaceInnovation {
  double scale = 1.0;  // density exp(-|x|/scale)/(2 scale); variance 2 scale^2
};
struct StudentTInnovation {
  double df = 5.0;  // must exceed 2 so the variance is finite
  double scale = 1.0;
};
struct LogisticInnovation {
  double scale = 1.0;  // CDF 1/(1+exp(-x/scale)); variance (pi scale)^2/3
};

using InnovationLaw =
    std::variant<NormalInnovation, LaplaceInnovation, StudentTInnovation, LogisticInnovation>;

void validate(const InnovationLaw& law);
double variance(const InnovationLaw& law);
double draw(const InnovationLaw& law, Rng& rng);

// ---------------------------------------------------------------------------
// Outlier laws.
// ---------------------------------------------------------------------------

struct PointMassOutlier {
  double c = 0.0;
};
struct NormalOutlier {
  double mean = 0.0;
  double scale = 1.0;
};
struct CauchyOutlier {
  double location = 0.0;
  double scale = 1.0;
};
struct UniformOutlier {
  double a = -1.0;
  double b = 1.0;
};
struct DiscreteOutlier {
  std::vector<double> atoms;
  std::vector<double> probs;  // must sum to 1 within 1e-12
};

using OutlierLaw =
    std::variant<PointMassOutlier, NormalOutlier, CauchyOutlier, UniformOutlier, DiscreteOutlier>;

void validate(const OutlierLaw& law);
double draw(const OutlierLaw& law, Rng& rng);

/// Scheme applying an additive outlier to each observation independently
/// with probability min(1, gamma/sqrt(n)).
struct ContaminationSpec {
  double gamma = 0.0;
  OutlierLaw pi = PointMassOutlier{0.0};
};

/// Effective contamination intensity at sample size n: min(1, gamma/sqrt(n)).
double effective_intensity(double gamma, int n);

// ---------------------------------------------------------------------------
// AR(p) model with nonzero mean.
// ---------------------------------------------------------------------------

/// Stationary autoregression  v_t = beta_1 v_{t-1} + ... + beta_p v_{t-p} + nu + eps_t
/// parameterized by the stationary mean mu, with nu = (1 - sum beta_j) mu.
/// Construction rejects coefficient vectors whose companion matrix has
/// spectral radius >= 1 - kStabilityTol.
class ArModel {
 public:
  ArModel(Eigen::VectorXd beta, double mu, InnovationLaw innovation);

  const Eigen::VectorXd& beta() const { return beta_; }
  int order() const { return static_cast<int>(beta_.size()); }
  double mu() const { return mu_; }
  double nu() const { return (1.0 - beta_.sum()) * mu_; }
  const InnovationLaw& innovation() const { return innovation_; }

 private:
  Eigen::VectorXd beta_;
  double mu_;
  InnovationLaw innovation_;
};

/// True iff the companion matrix of beta has spectral radius < 1 - tol.
/// An empty vector (p = 0, i.i.d. observations) is stationary.
bool check_stationary(const Eigen::VectorXd& beta, double tol = kStabilityTol);

// ---------------------------------------------------------------------------
// Observed series.
// ---------------------------------------------------------------------------

/// A series y_t observed for t = 1-p, ..., n (p pre-sample values followed
/// by n sample values).  Simulated samples optionally retain the latent
/// clean path v, the outlier indicators z, the outlier sizes xi, and the
/// innovations, for oracle tests against the generating mechanism.
class SeriesSample {
 public:
  SeriesSample(int order, Eigen::VectorXd y);
  SeriesSample(int order, Eigen::VectorXd y, Eigen::VectorXd v, Eigen::VectorXi z,
               Eigen::VectorXd xi, Eigen::VectorXd innovations);

  int order() const { return order_; }
  int n() const { return static_cast<int>(y_.size()) - order_; }

  /// Value at time t, for t in [1-p, n].
  double y(int t) const { return y_[t + order_ - 1]; }

  /// Contiguous storage; index i corresponds to t = i + 1 - p.
  const Eigen::VectorXd& observed() const { return y_; }

  bool has_latent() const { return has_latent_; }
  bool has_innovations() const { return innovations_.size() > 0; }
  const Eigen::VectorXd& latent_v() const;
  const Eigen::VectorXi& latent_z() const;
  const Eigen::VectorXd& latent_xi() const;
  const Eigen::VectorXd& latent_innovations() const;

  /// Innovations for t = 1..n (the sample range).
  Eigen::VectorXd sample_innovations() const;

 private:
  int order_;
  Eigen::VectorXd y_;
  bool has_latent_ = false;
  Eigen::VectorXd v_;
  Eigen::VectorXi z_;
  Eigen::VectorXd xi_;
  Eigen::VectorXd innovations_;
};

/// Draws v_{1-p}, ..., v_n from (approximately) the stationary law, by
/// running the recursion from zeros through a burn-in of 1000 + 50 p steps.
/// Deterministic given the seed; latent v and innovations are retained.
SeriesSample simulate_clean(const ArModel& model, int n, std::uint64_t seed);

/// Applies y_t = v_t + z_t xi_t independently across t = 1-p..n, where
/// P(z_t = 1) = min(1, gamma/sqrt(n)).  Latent components are retained.
/// Deterministic given the seed; for gamma = 0 the observed values are
/// returned unchanged.
SeriesSample contaminate(const SeriesSample& clean, const ContaminationSpec& spec,
                         std::uint64_t seed);

}  // namespace symchi

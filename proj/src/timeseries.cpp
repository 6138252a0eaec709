#include "symchi/timeseries.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "symchi/special.hpp"

namespace symchi {

namespace {

struct InnovationValidator {
  void operator()(const NormalInnovation& l) const {
    if (!(l.scale > 0.0) || !std::isfinite(l.scale)) {
      throw std::invalid_argument("normal innovation: scale must be positive");
    }
  }
  void operator()(const LaplaceInnovation& l) const {
    if (!(l.scale > 0.0) || !std::isfinite(l.scale)) {
      throw std::invalid_argument("laplace innovation: scale must be positive");
    }
  }
  void operator()(const StudentTInnovation& l) const {
    if (!(l.df > 2.0) || !(l.scale > 0.0)) {
      throw std::invalid_argument("student-t innovation: needs df > 2 and scale > 0");
    }
  }
  void operator()(const LogisticInnovation& l) const {
    if (!(l.scale > 0.0) || !std::isfinite(l.scale)) {
      throw std::invalid_argument("logistic innovation: scale must be positive");
    }
  }
};

struct OutlierValidator {
  void operator()(const PointMassOutlier& l) const {
    if (!std::isfinite(l.c)) throw std::invalid_argument("point-mass outlier: c must be finite");
  }
  void operator()(const NormalOutlier& l) const {
    if (!(l.scale > 0.0) || !std::isfinite(l.mean)) {
      throw std::invalid_argument("normal outlier: needs finite mean and scale > 0");
    }
  }
  void operator()(const CauchyOutlier& l) const {
    if (!(l.scale > 0.0) || !std::isfinite(l.location)) {
      throw std::invalid_argument("cauchy outlier: needs finite location and scale > 0");
    }
  }
  void operator()(const UniformOutlier& l) const {
    if (!(l.a < l.b) || !std::isfinite(l.a) || !std::isfinite(l.b)) {
      throw std::invalid_argument("uniform outlier: needs finite a < b");
    }
  }
  void operator()(const DiscreteOutlier& l) const {
    if (l.atoms.empty() || l.atoms.size() != l.probs.size()) {
      throw std::invalid_argument("discrete outlier: atoms/probs must be nonempty and equal length");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < l.atoms.size(); ++i) {
      if (!std::isfinite(l.atoms[i]) || l.probs[i] < 0.0) {
        throw std::invalid_argument("discrete outlier: atoms finite, probs nonnegative");
      }
      total += l.probs[i];
    }
    if (std::abs(total - 1.0) > 1e-12) {
      throw std::invalid_argument("discrete outlier: probabilities must sum to 1 within 1e-12");
    }
  }
};

}  // namespace

void validate(const InnovationLaw& law) { std::visit(InnovationValidator{}, law); }

double variance(const InnovationLaw& law) {
  return std::visit(
      [](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, NormalInnovation>) {
          return l.scale * l.scale;
        } else if constexpr (std::is_same_v<T, LaplaceInnovation>) {
          return 2.0 * l.scale * l.scale;
        } else if constexpr (std::is_same_v<T, StudentTInnovation>) {
          return l.scale * l.scale * l.df / (l.df - 2.0);
        } else {
          return l.scale * l.scale * M_PI * M_PI / 3.0;
        }
      },
      law);
}

double draw(const InnovationLaw& law, Rng& rng) {
  return std::visit(
      [&rng](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, NormalInnovation>) {
          return l.scale * rng.normal();
        } else if constexpr (std::is_same_v<T, LaplaceInnovation>) {
          const double u = rng.uniform_open() - 0.5;
          const double s = (u < 0.0) ? -1.0 : 1.0;
          return -l.scale * s * std::log1p(-2.0 * std::abs(u));
        } else if constexpr (std::is_same_v<T, StudentTInnovation>) {
          // Bailey's polar method.
          for (;;) {
            const double u = 2.0 * rng.uniform_open() - 1.0;
            const double v = 2.0 * rng.uniform_open() - 1.0;
            const double w = u * u + v * v;
            if (w >= 1.0 || w == 0.0) continue;
            const double t = u * std::sqrt(l.df * (std::pow(w, -2.0 / l.df) - 1.0) / w);
            return l.scale * t;
          }
        } else {
          const double u = rng.uniform_open();
          return l.scale * std::log(u / (1.0 - u));
        }
      },
      law);
}

void validate(const OutlierLaw& law) { std::visit(OutlierValidator{}, law); }

double draw(const OutlierLaw& law, Rng& rng) {
  return std::visit(
      [&rng](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, PointMassOutlier>) {
          return l.c;
        } else if constexpr (std::is_same_v<T, NormalOutlier>) {
          return l.mean + l.scale * rng.normal();
        } else if constexpr (std::is_same_v<T, CauchyOutlier>) {
          return l.location + l.scale * std::tan(M_PI * (rng.uniform_open() - 0.5));
        } else if constexpr (std::is_same_v<T, UniformOutlier>) {
          return l.a + (l.b - l.a) * rng.uniform01();
        } else {
          const double u = rng.uniform01();
          double acc = 0.0;
          for (std::size_t i = 0; i < l.atoms.size(); ++i) {
            acc += l.probs[i];
            if (u < acc) return l.atoms[i];
          }
          return l.atoms.back();
        }
      },
      law);
}

double effective_intensity(double gamma, int n) {
  if (gamma < 0.0) throw std::invalid_argument("contamination: gamma must be >= 0");
  if (n < 1) throw std::invalid_argument("contamination: n must be >= 1");
  return std::min(1.0, gamma / std::sqrt(static_cast<double>(n)));
}

bool check_stationary(const Eigen::VectorXd& beta, double tol) {
  if (!beta.allFinite()) {
    throw std::invalid_argument("check_stationary: coefficients must be finite");
  }
  const int p = static_cast<int>(beta.size());
  if (p == 0) return true;
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
  companion.row(0) = beta.transpose();
  if (p > 1) companion.block(1, 0, p - 1, p - 1).setIdentity();
  const Eigen::VectorXcd eig = Eigen::EigenSolver<Eigen::MatrixXd>(companion, false).eigenvalues();
  return eig.cwiseAbs().maxCoeff() < 1.0 - tol;
}

ArModel::ArModel(Eigen::VectorXd beta, double mu, InnovationLaw innovation)
    : beta_(std::move(beta)), mu_(mu), innovation_(std::move(innovation)) {
  if (!std::isfinite(mu_)) throw std::invalid_argument("ArModel: mu must be finite");
  if (!check_stationary(beta_)) {
    throw std::invalid_argument("ArModel: coefficients are not stationary");
  }
  validate(innovation_);
}

SeriesSample::SeriesSample(int order, Eigen::VectorXd y) : order_(order), y_(std::move(y)) {
  if (order_ < 0) throw std::invalid_argument("SeriesSample: order must be >= 0");
  if (y_.size() < order_ + 1) {
    throw std::invalid_argument("SeriesSample: series must hold at least p+1 values");
  }
}

SeriesSample::SeriesSample(int order, Eigen::VectorXd y, Eigen::VectorXd v, Eigen::VectorXi z,
                           Eigen::VectorXd xi, Eigen::VectorXd innovations)
    : SeriesSample(order, std::move(y)) {
  v_ = std::move(v);
  z_ = std::move(z);
  xi_ = std::move(xi);
  innovations_ = std::move(innovations);
  if (v_.size() != y_.size() || z_.size() != y_.size() || xi_.size() != y_.size()) {
    throw std::invalid_argument("SeriesSample: latent vectors must match the series length");
  }
  if (innovations_.size() != 0 && innovations_.size() != y_.size()) {
    throw std::invalid_argument("SeriesSample: innovation vector must match the series length");
  }
  has_latent_ = true;
}

const Eigen::VectorXd& SeriesSample::latent_v() const {
  if (!has_latent_) throw std::logic_error("SeriesSample: no latent data");
  return v_;
}
const Eigen::VectorXi& SeriesSample::latent_z() const {
  if (!has_latent_) throw std::logic_error("SeriesSample: no latent data");
  return z_;
}
const Eigen::VectorXd& SeriesSample::latent_xi() const {
  if (!has_latent_) throw std::logic_error("SeriesSample: no latent data");
  return xi_;
}
const Eigen::VectorXd& SeriesSample::latent_innovations() const {
  if (!has_innovations()) throw std::logic_error("SeriesSample: no latent innovations");
  return innovations_;
}

Eigen::VectorXd SeriesSample::sample_innovations() const {
  return latent_innovations().tail(n());
}

SeriesSample simulate_clean(const ArModel& model, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("simulate_clean: n must be >= 1");
  const int p = model.order();
  const int burnin = 1000 + 50 * p;
  const int total = burnin + n + p;

  Rng rng(seed);
  const Eigen::VectorXd& beta = model.beta();

  Eigen::VectorXd u(total);
  Eigen::VectorXd eps(total);
  for (int t = 0; t < total; ++t) {
    double acc = 0.0;
    for (int j = 0; j < p; ++j) {
      const int lag = t - 1 - j;
      if (lag >= 0) acc += beta[j] * u[lag];  // zeros before the start
    }
    eps[t] = draw(model.innovation(), rng);
    u[t] = acc + eps[t];
  }

  const int kept = n + p;
  Eigen::VectorXd v = u.tail(kept).array() + model.mu();
  Eigen::VectorXd eps_kept = eps.tail(kept);
  Eigen::VectorXi z = Eigen::VectorXi::Zero(kept);
  Eigen::VectorXd xi = Eigen::VectorXd::Zero(kept);
  return SeriesSample(p, v, v, std::move(z), std::move(xi), std::move(eps_kept));
}

SeriesSample contaminate(const SeriesSample& clean, const ContaminationSpec& spec,
                         std::uint64_t seed) {
  validate(spec.pi);
  const int n = clean.n();
  const double intensity = effective_intensity(spec.gamma, n);

  const Eigen::VectorXd& v = clean.observed();
  const int kept = static_cast<int>(v.size());

  Rng rng(seed);
  Eigen::VectorXd y(kept);
  Eigen::VectorXi z = Eigen::VectorXi::Zero(kept);
  Eigen::VectorXd xi = Eigen::VectorXd::Zero(kept);
  for (int i = 0; i < kept; ++i) {
    if (rng.uniform01() < intensity) {
      z[i] = 1;
      xi[i] = draw(spec.pi, rng);
      y[i] = v[i] + xi[i];
    } else {
      y[i] = v[i];
    }
  }

  Eigen::VectorXd innovations =
      clean.has_innovations() ? clean.latent_innovations() : Eigen::VectorXd();
  return SeriesSample(clean.order(), std::move(y), v, std::move(z), std::move(xi),
                      std::move(innovations));
}

}  // namespace symchi

#include "symchi/asymptotics.hpp"

#include <cmath>
#include <doctest.h>
#include <stdexcept>

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

// Closed form of E Phi((x + b xi)/theta) for xi ~ N(mean, s^2):
// Phi((x + b mean) / sqrt(theta^2 + b^2 s^2)).
double normal_mix_cdf(double x, double b, double mean, double s, double theta) {
  return normal_cdf((x + b * mean) / std::sqrt(theta * theta + b * b * s * s));
}

// Antiderivative-based value of E Phi((x + b xi)/theta) for xi ~ U(a, c).
double uniform_mix_cdf(double x, double b, double a, double c, double theta) {
  const auto psi = [](double z) { return z * normal_cdf(z) + normal_pdf(z); };
  const double za = (x + b * a) / theta;
  const double zc = (x + b * c) / theta;
  return (theta / b) * (psi(zc) - psi(za)) / (c - a);
}

}  // namespace

TEST_CASE("a point mass at zero produces no shift") {
  const ShiftContext ctx{vec_of({0.5, -0.3}), 1.0, PointMassOutlier{0.0}};
  for (double x : {-3.0, -0.5, 0.0, 1.0, 7.5}) {
    CHECK(shift_delta(x, ctx) == 0.0);
    CHECK(shift_delta_sym(x, ctx) == 0.0);
  }
}

TEST_CASE("zero coefficients contribute nothing") {
  const ShiftContext with_zero{vec_of({0.0}), 1.0, PointMassOutlier{2.0}};
  const ShiftContext iid{Eigen::VectorXd(), 1.0, PointMassOutlier{2.0}};
  for (double x : {-1.0, 0.3, 2.0}) {
    CHECK(shift_delta(x, with_zero) == shift_delta(x, iid));
  }
}

TEST_CASE("point-mass shift worked example") {
  // beta = (0.5), theta0 = 1, Pi = pointmass(3), x = 1:
  // [Phi(-2) - Phi(1)] + [Phi(2.5) - Phi(1)]
  const ShiftContext ctx{vec_of({0.5}), 1.0, PointMassOutlier{3.0}};
  CHECK(shift_delta(1.0, ctx) == doctest::Approx(-0.6661490255146828).epsilon(1e-10));
}

TEST_CASE("shift is bounded by the number of terms") {
  Rng rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const int p = static_cast<int>(rng.uniform01() * 3);
    Eigen::VectorXd beta(p);
    for (int j = 0; j < p; ++j) beta[j] = (rng.uniform01() - 0.5) * 0.8;
    const ShiftContext ctx{beta, 0.5 + rng.uniform01(),
                           PointMassOutlier{(rng.uniform01() - 0.5) * 20.0}};
    const double x = (rng.uniform01() - 0.5) * 10.0;
    CHECK(std::abs(shift_delta(x, ctx)) <= p + 1.0);
  }
}

TEST_CASE("normal outlier expectation agrees with its closed form") {
  const double theta = 1.3;
  for (double mean : {0.0, 1.5}) {
    for (double s : {0.7, 3.0}) {
      const ShiftContext ctx{vec_of({0.5}), theta, NormalOutlier{mean, s}};
      for (double x : {-2.0, -0.4, 0.0, 0.9, 3.1}) {
        const double expected = (normal_mix_cdf(x, -1.0, mean, s, theta) -
                                 normal_cdf(x / theta)) +
                                (normal_mix_cdf(x, 0.5, mean, s, theta) -
                                 normal_cdf(x / theta));
        CHECK(shift_delta(x, ctx) == doctest::Approx(expected).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("uniform outlier expectation agrees with its antiderivative") {
  const ShiftContext ctx{vec_of({0.4}), 1.0, UniformOutlier{-1.0, 2.0}};
  for (double x : {-1.5, 0.0, 0.8, 2.5}) {
    const double expected =
        (uniform_mix_cdf(x, -1.0, -1.0, 2.0, 1.0) - normal_cdf(x)) +
        (uniform_mix_cdf(x, 0.4, -1.0, 2.0, 1.0) - normal_cdf(x));
    CHECK(shift_delta(x, ctx) == doctest::Approx(expected).epsilon(1e-8));
  }
}

TEST_CASE("cauchy outlier expectation agrees with direct sampling") {
  const ShiftContext ctx{vec_of({0.5}), 1.0, CauchyOutlier{0.0, 1.0}};
  const double x = 0.8;
  Rng rng(99);
  const int draws = 2000000;
  double sum = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double xi = std::tan(M_PI * (rng.uniform_open() - 0.5));
    sum += (normal_cdf(x - xi) - normal_cdf(x)) + (normal_cdf(x + 0.5 * xi) - normal_cdf(x));
  }
  const double mc = sum / draws;
  // each summand is bounded by 2, so the SE is below 2/sqrt(draws)
  CHECK(std::abs(shift_delta(x, ctx) - mc) < 3.0 * 2.0 / std::sqrt(static_cast<double>(draws)));
}

TEST_CASE("symmetrized shift is odd and vanishes at zero") {
  const ShiftContext ctx{vec_of({0.5, -0.3}), 1.0, PointMassOutlier{5.0}};
  CHECK(shift_delta_sym(0.0, ctx) == 0.0);
  for (double x : {0.3, 1.0, 2.7}) {
    CHECK(shift_delta_sym(-x, ctx) == -shift_delta_sym(x, ctx));
  }
}

TEST_CASE("symmetric outlier laws give an odd shift already") {
  for (const OutlierLaw& pi :
       {OutlierLaw(NormalOutlier{0.0, 2.0}), OutlierLaw(CauchyOutlier{0.0, 1.0})}) {
    const ShiftContext ctx{vec_of({0.5}), 1.0, pi};
    for (double x : {0.4, 1.1, 2.5}) {
      CHECK(shift_delta_sym(x, ctx) == doctest::Approx(shift_delta(x, ctx)).epsilon(1e-6));
    }
  }
}

TEST_CASE("cell shift vector telescopes to zero") {
  const Partition part = Partition::default_fixed(6, 1.0);
  for (const OutlierLaw& pi :
       {OutlierLaw(PointMassOutlier{3.0}), OutlierLaw(PointMassOutlier{100.0}),
        OutlierLaw(NormalOutlier{0.0, 9.0}), OutlierLaw(CauchyOutlier{0.0, 1.0}),
        OutlierLaw(UniformOutlier{-2.0, 5.0})}) {
    const ShiftContext ctx{vec_of({0.5, -0.3}), 1.0, pi};
    const Eigen::VectorXd delta = cell_shift_vector(part, ctx);
    REQUIRE(delta.size() == 6);
    CHECK(std::abs(delta.sum()) < 1e-12);
    CHECK(delta.allFinite());
  }
}

TEST_CASE("cell shift vector of a trivial law is zero") {
  const Partition part = Partition::default_fixed(6, 1.0);
  const ShiftContext ctx{vec_of({0.5}), 1.0, PointMassOutlier{0.0}};
  CHECK(cell_shift_vector(part, ctx).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("distant point masses saturate the shift vector") {
  // For |c| far beyond every boundary, only the transition through the
  // finite cells matters: Delta_S(x) = 1.5 - 3 Phi(x) for beta = (0.5, -0.3),
  // so delta_j = -3 p_j for the finite cells.
  const Partition part = Partition::default_fixed(6, 1.0);
  const ShiftContext ctx{vec_of({0.5, -0.3}), 1.0, PointMassOutlier{1000.0}};
  const Eigen::VectorXd delta = cell_shift_vector(part, ctx);
  const CellModel model{part};
  const Eigen::VectorXd p = model.p(1.0);
  for (int j = 0; j < 5; ++j) {
    CHECK(delta[j] == doctest::Approx(-3.0 * p[j]).epsilon(1e-9));
  }
  CHECK(delta[5] == doctest::Approx(3.0 * (1.0 - p[5])).epsilon(1e-9));
}

TEST_CASE("noncentrality quadratic form") {
  const Partition part = Partition::default_fixed(6, 1.0);
  const ShiftContext ctx{vec_of({0.5, -0.3}), 1.0, PointMassOutlier{5.0}};

  CHECK(noncentrality(0.0, part, ctx) == 0.0);

  const double l1 = noncentrality(1.0, part, ctx);
  CHECK(l1 > 0.0);
  CHECK(noncentrality(2.0, part, ctx) == 4.0 * l1);  // exact quadratic scaling

  const NoncentralitySpec spec = noncentrality_spec(1.0, part, ctx);
  CHECK(spec.alpha_vec.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(spec.lambda2 == doctest::Approx(l1).epsilon(1e-12));

  // the projection annihilates the alpha direction
  const Eigen::VectorXd r =
      spec.b - spec.alpha_vec * spec.alpha_vec.dot(spec.b);
  CHECK(r.norm() < 1e-12 * spec.b.norm());

  // and is idempotent on a generic vector
  Eigen::VectorXd w(6);
  w << 1.0, -2.0, 0.5, 3.0, -1.0, 0.25;
  const auto project = [&spec](const Eigen::VectorXd& v) {
    return Eigen::VectorXd(v - spec.alpha_vec * spec.alpha_vec.dot(v));
  };
  CHECK((project(project(w)) - project(w)).norm() < 1e-12);
}

TEST_CASE("noncentrality matches a direct simulation of the limit experiment") {
  // Draw the limiting Gaussian count fluctuations (mean = scaled shift
  // vector, covariance I - pi pi^T), apply the scale-estimation projection,
  // and compare the rejection frequency of the projected quadratic form
  // with the noncentral chi-square tail.
  const Partition part = Partition::default_fixed(6, 1.0);
  const ShiftContext ctx{vec_of({0.5, -0.3}), 1.0, PointMassOutlier{5.0}};
  const double gamma = 2.0;
  const NoncentralitySpec spec = noncentrality_spec(gamma, part, ctx);
  const Eigen::VectorXd pi_dir = spec.p_vec.cwiseSqrt();
  const Eigen::VectorXd mean =
      gamma * spec.p_vec.cwiseSqrt().cwiseInverse().cwiseProduct(spec.delta);
  const double q = chi2_quantile(0.95, 4);

  Rng rng(5150);
  const int draws = 100000;
  int rejects = 0;
  double mean_stat = 0.0;
  for (int i = 0; i < draws; ++i) {
    Eigen::VectorXd z(6);
    for (int j = 0; j < 6; ++j) z[j] = rng.normal();
    Eigen::VectorXd y = mean + z - pi_dir * pi_dir.dot(z);
    y -= spec.alpha_vec * spec.alpha_vec.dot(y);
    const double stat = y.squaredNorm();
    mean_stat += stat;
    rejects += stat > q;
  }
  const double rate = static_cast<double>(rejects) / draws;
  const double theory = 1.0 - noncentral_chi2_cdf(q, 4, spec.lambda2);
  CHECK(std::abs(rate - theory) < 3.0 * std::sqrt(theory * (1.0 - theory) / draws));
  CHECK(mean_stat / draws == doctest::Approx(4.0 + spec.lambda2).epsilon(0.01));
}

TEST_CASE("asymptotic level equals alpha without contamination") {
  const Partition part = Partition::default_fixed(6, 1.0);
  const ShiftContext ctx{vec_of({0.5, -0.3}), 1.0, CauchyOutlier{0.0, 1.0}};
  for (double alpha : {0.01, 0.05, 0.2}) {
    CHECK(std::abs(asymptotic_level(0.0, alpha, part, ctx) - alpha) < 1e-10);
  }
}

TEST_CASE("asymptotic level grows with the contamination intensity") {
  const Partition part = Partition::default_fixed(6, 1.0);
  const ShiftContext ctx{vec_of({0.5, -0.3}), 1.0, PointMassOutlier{5.0}};
  double prev = 0.05;
  for (double gamma : {0.1, 0.25, 0.5, 1.0, 2.0}) {
    const double level = asymptotic_level(gamma, 0.05, part, ctx);
    CHECK(level >= prev - 1e-12);
    prev = level;
  }
}

TEST_CASE("worst-case level deviation shrinks with gamma") {
  const Partition part = Partition::default_fixed(6, 1.0);
  const std::vector<OutlierLaw> grid = {
      PointMassOutlier{1.0},  PointMassOutlier{3.0},     PointMassOutlier{10.0},
      PointMassOutlier{100.0}, CauchyOutlier{0.0, 1.0}, NormalOutlier{0.0, 9.0}};
  double prev = 1.0;
  for (double gamma : {1.0, 0.5, 0.25, 0.1}) {
    double worst = 0.0;
    for (const OutlierLaw& pi : grid) {
      const ShiftContext ctx{vec_of({0.5, -0.3}), 1.0, pi};
      worst = std::max(worst, std::abs(asymptotic_level(gamma, 0.05, part, ctx) - 0.05));
    }
    CHECK(worst < prev);
    prev = worst;
  }
  CHECK(prev < 0.01);  // at gamma = 0.1 the level barely moves
}

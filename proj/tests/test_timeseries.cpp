#include "symchi/timeseries.hpp"

#include <cmath>
#include <doctest.h>
#include <stdexcept>

using namespace symchi;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> vals) {
  Eigen::VectorXd v(static_cast<int>(vals.size()));
  int i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("stationarity check") {
  // Roots of z^2 - 0.5 z + 0.3 have modulus sqrt(0.3) < 1.
  CHECK(check_stationary(vec({0.5, -0.3})));
  CHECK_FALSE(check_stationary(vec({1.0})));  // unit root
  CHECK(check_stationary(Eigen::VectorXd()));  // i.i.d. case
  CHECK(check_stationary(vec({0.99})));
  CHECK_FALSE(check_stationary(vec({0.6, 0.5})));

  Eigen::VectorXd bad(1);
  bad[0] = std::nan("");
  CHECK_THROWS_AS(check_stationary(bad), std::invalid_argument);
}

TEST_CASE("stationarity is invariant under trailing zero coefficients") {
  for (const auto& base : {vec({0.5, -0.3}), vec({0.9}), vec({-0.4, 0.1, 0.2})}) {
    const bool verdict = check_stationary(base);
    Eigen::VectorXd padded = Eigen::VectorXd::Zero(base.size() + 3);
    padded.head(base.size()) = base;
    CHECK(check_stationary(padded) == verdict);
  }
}

TEST_CASE("model construction validates inputs") {
  CHECK_THROWS_AS(ArModel(vec({1.2}), 0.0, NormalInnovation{1.0}), std::invalid_argument);
  CHECK_THROWS_AS(ArModel(vec({0.5}), 0.0, NormalInnovation{-1.0}), std::invalid_argument);
  CHECK_THROWS_AS(ArModel(vec({0.5}), 0.0, StudentTInnovation{2.0, 1.0}), std::invalid_argument);

  const ArModel model(vec({0.25, 0.25}), 2.0, NormalInnovation{1.0});
  CHECK(model.nu() == doctest::Approx(1.0));  // (1 - 0.5) * 2
}

TEST_CASE("white-noise simulation returns the innovations themselves") {
  const ArModel model(Eigen::VectorXd(), 0.0, NormalInnovation{1.0});
  const SeriesSample s = simulate_clean(model, 500, 9);
  REQUIRE(s.order() == 0);
  REQUIRE(s.n() == 500);
  for (int i = 0; i < 500; ++i) {
    CHECK(s.observed()[i] == s.latent_innovations()[i]);
  }
}

TEST_CASE("simulation hits the stationary mean") {
  const int n = 100000;
  const ArModel model(Eigen::VectorXd(), 5.0, NormalInnovation{1.0});
  const SeriesSample s = simulate_clean(model, n, 31);
  const double mean = s.observed().mean();
  const double se = 1.0 / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(mean - 5.0) < 3.0 * se);
}

TEST_CASE("ar(1) sample autocorrelation matches the coefficient") {
  const int n = 100000;
  const ArModel model(vec({0.5}), 0.0, NormalInnovation{1.0});
  const SeriesSample s = simulate_clean(model, n, 77);
  const Eigen::VectorXd& v = s.observed();
  const double mean = v.mean();
  double num = 0.0, den = 0.0;
  for (int i = 0; i + 1 < v.size(); ++i) {
    num += (v[i] - mean) * (v[i + 1] - mean);
    den += (v[i] - mean) * (v[i] - mean);
  }
  den += (v[v.size() - 1] - mean) * (v[v.size() - 1] - mean);
  CHECK(num / den == doctest::Approx(0.5).epsilon(0.04));
}

TEST_CASE("simulation is reproducible") {
  const ArModel model(vec({0.5, -0.3}), 1.0, NormalInnovation{2.0});
  const SeriesSample a = simulate_clean(model, 200, 123);
  const SeriesSample b = simulate_clean(model, 200, 123);
  CHECK((a.observed().array() == b.observed().array()).all());
  const SeriesSample c = simulate_clean(model, 200, 124);
  CHECK_FALSE((a.observed().array() == c.observed().array()).all());
}

TEST_CASE("effective intensity clamps at one") {
  CHECK(effective_intensity(2.0, 400) == 0.1);
  CHECK(effective_intensity(20.0, 100) == 1.0);
  CHECK(effective_intensity(0.0, 50) == 0.0);
  CHECK_THROWS_AS(effective_intensity(-1.0, 50), std::invalid_argument);
}

TEST_CASE("zero contamination is the identity on the observations") {
  const ArModel model(vec({0.5}), 1.0, NormalInnovation{1.0});
  const SeriesSample clean = simulate_clean(model, 300, 5);
  const SeriesSample y = contaminate(clean, {0.0, PointMassOutlier{100.0}}, 6);
  CHECK((y.observed().array() == clean.observed().array()).all());
  CHECK(y.latent_z().sum() == 0);
}

TEST_CASE("full-intensity contamination hits every observation") {
  const ArModel model(Eigen::VectorXd(), 0.0, NormalInnovation{1.0});
  const SeriesSample clean = simulate_clean(model, 100, 5);
  const SeriesSample y = contaminate(clean, {20.0, PointMassOutlier{3.0}}, 6);
  CHECK(y.latent_z().sum() == y.observed().size());
  for (int i = 0; i < y.observed().size(); ++i) {
    CHECK(y.observed()[i] == clean.observed()[i] + 3.0);
  }
}

TEST_CASE("contamination frequency matches the local intensity") {
  const int n = 10000;
  const ArModel model(Eigen::VectorXd(), 0.0, NormalInnovation{1.0});
  const SeriesSample clean = simulate_clean(model, n, 11);
  const SeriesSample y = contaminate(clean, {2.0, PointMassOutlier{5.0}}, 12);
  const double intensity = effective_intensity(2.0, n);  // 0.02
  const double count = y.latent_z().sum();
  const double sd = std::sqrt(n * intensity * (1.0 - intensity));
  CHECK(std::abs(count - n * intensity) < 3.0 * sd + 1.0);
}

TEST_CASE("contamination is reproducible given the seed") {
  const ArModel model(vec({0.3}), 0.0, NormalInnovation{1.0});
  const SeriesSample clean = simulate_clean(model, 500, 1);
  const SeriesSample a = contaminate(clean, {1.0, CauchyOutlier{0.0, 1.0}}, 42);
  const SeriesSample b = contaminate(clean, {1.0, CauchyOutlier{0.0, 1.0}}, 42);
  CHECK((a.observed().array() == b.observed().array()).all());
}

TEST_CASE("innovation samplers match their declared variances") {
  const int n = 400000;
  const auto sample_var = [n](const InnovationLaw& law, std::uint64_t seed) {
    Rng rng(seed);
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = draw(law, rng);
      sum += x;
      sq += x * x;
    }
    const double mean = sum / n;
    return sq / n - mean * mean;
  };
  CHECK(sample_var(LaplaceInnovation{1.0}, 2) == doctest::Approx(2.0).epsilon(0.03));
  CHECK(sample_var(StudentTInnovation{5.0, 1.0}, 3) ==
        doctest::Approx(5.0 / 3.0).epsilon(0.06));
  CHECK(sample_var(LogisticInnovation{1.0}, 4) ==
        doctest::Approx(M_PI * M_PI / 3.0).epsilon(0.03));
}

TEST_CASE("discrete outlier law validates and samples its atoms") {
  CHECK_THROWS_AS(validate(OutlierLaw(DiscreteOutlier{{1.0, 2.0}, {0.6, 0.5}})),
                  std::invalid_argument);
  const DiscreteOutlier law{{-1.0, 4.0}, {0.25, 0.75}};
  Rng rng(8);
  int high = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) high += (draw(OutlierLaw(law), rng) == 4.0);
  CHECK(std::abs(high / static_cast<double>(n) - 0.75) < 0.02);
}

#include "symchi/rng.hpp"

#include <cmath>
#include <doctest.h>

using namespace symchi;

TEST_CASE("same seed and stream reproduce the sequence") {
  Rng a(42, 7), b(42, 7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct streams differ") {
  Rng a(42, 0), b(42, 1);
  int equal = 0;
  for (int i = 0; i < 64; ++i) equal += (a.next_u64() == b.next_u64());
  CHECK(equal == 0);
}

TEST_CASE("uniform01 stays in range with the right mean") {
  Rng rng(1);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  // SE of the mean is 1/sqrt(12 n) ~ 6.5e-4
  CHECK(std::abs(sum / n - 0.5) < 3.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("normal draws have the right first two moments") {
  Rng rng(1234);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 3.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(var - 1.0) < 3.0 * std::sqrt(2.0 / n));
}

#include "symchi/edf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "symchi/special.hpp"

namespace symchi {

Edf::Edf(Eigen::Ref<const Eigen::VectorXd> sample)
    : sorted_(sample.data(), sample.data() + sample.size()) {
  if (sorted_.empty()) throw std::invalid_argument("Edf: empty sample");
  std::sort(sorted_.begin(), sorted_.end());
}

int Edf::count_le(double x) const {
  return static_cast<int>(std::upper_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin());
}

int Edf::count_lt(double x) const {
  return static_cast<int>(std::lower_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin());
}

Partition::Partition(std::vector<double> interior) : interior_(std::move(interior)) {
  if (interior_.empty()) {
    throw std::invalid_argument("Partition: needs at least one finite boundary");
  }
  double prev = 0.0;
  for (double x : interior_) {
    if (!std::isfinite(x) || !(x > prev)) {
      throw std::invalid_argument("Partition: boundaries must be finite, positive, increasing");
    }
    prev = x;
  }
}

Partition Partition::default_fixed(int m, double scale) {
  if (m < 3) throw std::invalid_argument("Partition: default partition needs m > 2");
  if (!(scale > 0.0)) throw std::invalid_argument("Partition: scale must be positive");
  std::vector<double> interior(m - 1);
  for (int j = 1; j < m; ++j) {
    interior[j - 1] = scale * normal_quantile(0.5 + static_cast<double>(j) / (2.0 * m));
  }
  return Partition(std::move(interior));
}

double Partition::boundary(int j) const {
  if (j < 0 || j > cells()) throw std::out_of_range("Partition: boundary index");
  if (j == 0) return 0.0;
  if (j == cells()) return std::numeric_limits<double>::infinity();
  return interior_[j - 1];
}

Partition Partition::scaled(double factor) const {
  if (!(factor > 0.0)) throw std::invalid_argument("Partition: scale factor must be positive");
  std::vector<double> interior(interior_);
  for (double& x : interior) x *= factor;
  return Partition(std::move(interior));
}

CellCounts cell_counts(const ResidualSet& res, const Partition& part) {
  const Edf edf(res.residuals);
  const int n = edf.n();
  const int m = part.cells();

  CellCounts out;
  out.nu_plus.resize(m);
  out.nu_minus.resize(m);
  out.nu.resize(m);
  out.n = n;
  out.prelim_scale = mad_scale(res.residuals);

  for (int j = 1; j <= m; ++j) {
    const double lo = part.boundary(j - 1);
    const double hi = part.boundary(j);
    const int plus = (j == m ? n : edf.count_le(hi)) - edf.count_le(lo);
    // Mirror cell (-x_j, -x_{j-1}]; for j = 1 the right endpoint is 0,
    // which belongs to no cell, hence the strict count there.
    const int upper = (j == 1) ? edf.count_lt(0.0) : edf.count_le(-lo);
    const int minus = upper - (j == m ? 0 : edf.count_le(-hi));
    out.nu_plus[j - 1] = plus;
    out.nu_minus[j - 1] = minus;
    out.nu[j - 1] = plus + minus;
  }
  return out;
}

}  // namespace symchi

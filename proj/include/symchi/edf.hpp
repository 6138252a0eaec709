#pragma once

#include <Eigen/Dense>
#include <vector>

#include "symchi/estimation.hpp"

namespace symchi {

/// Empirical distribution function over a stored sorted copy of the
/// sample; evaluation is a binary search, so G(x) is the exact count
/// proportion #{x_i <= x}/n.
class Edf {
 public:
  explicit Edf(Eigen::Ref<const Eigen::VectorXd> sample);

  int n() const { return static_cast<int>(sorted_.size()); }

  /// #{x_i <= x}.
  int count_le(double x) const;
  /// #{x_i < x}.
  int count_lt(double x) const;

  /// G_n(x).
  double operator()(double x) const { return static_cast<double>(count_le(x)) / n(); }

  /// 2n * S_n(x) as an exact integer: count_le(x) + n - count_le(-x).
  int symmetrized_count2(double x) const { return count_le(x) + n() - count_le(-x); }

  /// Symmetrized e.d.f.  S_n(x) = (G_n(x) + 1 - G_n(-x)) / 2.
  double symmetrized(double x) const {
    return static_cast<double>(symmetrized_count2(x)) / (2.0 * n());
  }

 private:
  std::vector<double> sorted_;
};

/// Cell boundaries 0 = x_0 < x_1 < ... < x_m = +infinity over the positive
/// half line; only the finite interior boundaries are stored.  Cells pair
/// the half-open intervals (x_{j-1}, x_j] with their mirror images on the
/// negative half line.
class Partition {
 public:
  explicit Partition(std::vector<double> interior);

  /// Interior boundaries at the standard normal quantiles of
  /// 1/2 + j/(2m), j = 1..m-1, times `scale`; for m = 6 the cells are
  /// exactly equiprobable under a standard normal with that scale.
  static Partition default_fixed(int m = 6, double scale = 1.0);

  int cells() const { return static_cast<int>(interior_.size()) + 1; }

  /// x_j for j = 0..m; x_0 = 0 and x_m = +infinity.
  double boundary(int j) const;

  const std::vector<double>& interior() const { return interior_; }

  Partition scaled(double factor) const;

 private:
  std::vector<double> interior_;
};

/// Paired-cell counts of a residual set.  nu[j] = nu_plus[j] + nu_minus[j]
/// counts residuals in (x_{j-1}, x_j] and its mirror cell; residuals equal
/// to zero fall in no cell.  prelim_scale carries MAD/0.6745 of the
/// residuals for downstream bracket initialization.
struct CellCounts {
  Eigen::VectorXd nu_plus;
  Eigen::VectorXd nu_minus;
  Eigen::VectorXd nu;
  int n = 0;
  double prelim_scale = 0.0;
};

CellCounts cell_counts(const ResidualSet& res, const Partition& part);

}  // namespace symchi

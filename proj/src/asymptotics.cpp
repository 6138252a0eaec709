#include "symchi/asymptotics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "symchi/errors.hpp"

namespace symchi {

namespace {

constexpr double kQuadTolSmooth = 1e-9;  // normal/uniform outlier laws
constexpr double kQuadTolCauchy = 1e-7;  // tangent-substituted Cauchy integral
constexpr double kTailThreshold = 1e-10;
constexpr int kMaxQuadDepth = 60;

// 15-point Gauss-Legendre rule on [-1, 1]; nodes found once by Newton
// iteration on the Legendre recurrence.
struct Gl15 {
  std::array<double, 15> x{};
  std::array<double, 15> w{};

  Gl15() {
    constexpr int n = 15;
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double pp = 0.0;
      for (;;) {
        double p0 = 1.0, p1 = 0.0;
        for (int j = 0; j < n; ++j) {
          const double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
        }
        pp = n * (z * p0 - p1) / (z * z - 1.0);
        const double z1 = z;
        z = z1 - p0 / pp;
        if (std::abs(z - z1) <= 1e-15) break;
      }
      x[i] = -z;
      x[n - 1 - i] = z;
      w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
      w[n - 1 - i] = w[i];
    }
  }
};

const Gl15& gl15_rule() {
  static const Gl15 rule;
  return rule;
}

template <typename F>
double gl15(const F& f, double a, double b) {
  const Gl15& rule = gl15_rule();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < 15; ++i) sum += rule.w[i] * f(mid + half * rule.x[i]);
  return half * sum;
}

template <typename F>
double adaptive_gl(const F& f, double a, double b, double tol, int depth, double& err) {
  const double whole = gl15(f, a, b);
  const double mid = 0.5 * (a + b);
  const double left = gl15(f, a, mid);
  const double right = gl15(f, mid, b);
  const double disc = left + right - whole;
  if (std::abs(disc) <= tol || depth >= kMaxQuadDepth) {
    err += std::abs(disc);
    return left + right;
  }
  return adaptive_gl(f, a, mid, 0.5 * tol, depth + 1, err) +
         adaptive_gl(f, mid, b, 0.5 * tol, depth + 1, err);
}

// Integrates over consecutive breakpoint pairs; throws PrecisionError when
// the accumulated error estimate misses the requested tolerance badly.
template <typename F>
double integrate(const F& f, const std::vector<double>& pts, double tol) {
  const int pieces = static_cast<int>(pts.size()) - 1;
  double total = 0.0;
  double err = 0.0;
  for (int i = 0; i < pieces; ++i) {
    total += adaptive_gl(f, pts[i], pts[i + 1], tol / pieces, 0, err);
  }
  if (err > 16.0 * tol) {
    throw PrecisionError("quadrature did not reach the requested tolerance", err);
  }
  return total;
}

// Where G((x + coeff*u)/theta) transitions between 0 and 1, as u-values.
void add_transition_breakpoints(std::vector<double>& pts, double x, double coeff,
                                double theta, double lo, double hi) {
  const double reach = 10.0 * theta;
  for (const double edge : {-reach, reach}) {
    const double u = (edge - x) / coeff;
    if (u > lo && u < hi) pts.push_back(u);
  }
  std::sort(pts.begin(), pts.end());
}

// E[ G(x + coeff*xi) - G(x) ] for xi ~ pi, with G(x) = Phi(x/theta).
// Integrating the difference keeps the result well conditioned far in the
// tails, where both terms are within an ulp of 1.
double shift_term(double x, double coeff, const OutlierLaw& pi, double theta,
                  double tol_smooth, double tol_cauchy) {
  const double gx = normal_cdf(x / theta);
  const auto h = [x, coeff, theta, gx](double u) {
    return normal_cdf((x + coeff * u) / theta) - gx;
  };

  return std::visit(
      [&](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, PointMassOutlier>) {
          return h(law.c);
        } else if constexpr (std::is_same_v<T, DiscreteOutlier>) {
          double sum = 0.0;
          for (std::size_t i = 0; i < law.atoms.size(); ++i) {
            sum += law.probs[i] * h(law.atoms[i]);
          }
          return sum;
        } else if constexpr (std::is_same_v<T, UniformOutlier>) {
          std::vector<double> pts = {law.a, law.b};
          add_transition_breakpoints(pts, x, coeff, theta, law.a, law.b);
          return integrate(h, pts, tol_smooth) / (law.b - law.a);
        } else if constexpr (std::is_same_v<T, NormalOutlier>) {
          const double lo = law.mean - 12.0 * law.scale;
          const double hi = law.mean + 12.0 * law.scale;
          std::vector<double> pts = {lo, hi};
          add_transition_breakpoints(pts, x, coeff, theta, lo, hi);
          const auto f = [&](double u) {
            return h(u) * normal_pdf((u - law.mean) / law.scale) / law.scale;
          };
          return integrate(f, pts, tol_smooth);
        } else {  // CauchyOutlier, via xi = location + scale * tan(t)
          std::vector<double> pts = {-M_PI / 2.0, M_PI / 2.0};
          const double reach = 10.0 * theta;
          for (const double edge : {-reach, reach}) {
            const double tanv = ((edge - x) / coeff - law.location) / law.scale;
            pts.push_back(std::atan(tanv));
          }
          std::sort(pts.begin(), pts.end());
          const auto f = [&](double t) {
            return h(law.location + law.scale * std::tan(t)) / M_PI;
          };
          return integrate(f, pts, tol_cauchy);
        }
      },
      pi);
}

double delta_at(double x, const ShiftContext& ctx, double tol_smooth, double tol_cauchy) {
  double sum = shift_term(x, -1.0, ctx.pi, ctx.theta0, tol_smooth, tol_cauchy);  // beta_0
  for (int j = 0; j < ctx.beta.size(); ++j) {
    if (ctx.beta[j] == 0.0) continue;  // a zero coefficient contributes nothing
    sum += shift_term(x, ctx.beta[j], ctx.pi, ctx.theta0, tol_smooth, tol_cauchy);
  }
  return sum;
}

double delta_sym_at(double x, const ShiftContext& ctx, double tol_smooth, double tol_cauchy) {
  return 0.5 * (delta_at(x, ctx, tol_smooth, tol_cauchy) -
                delta_at(-x, ctx, tol_smooth, tol_cauchy));
}

double outlier_reach(const OutlierLaw& pi) {
  return std::visit(
      [](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, PointMassOutlier>) {
          return std::abs(law.c);
        } else if constexpr (std::is_same_v<T, NormalOutlier>) {
          return std::abs(law.mean) + 8.0 * law.scale;
        } else if constexpr (std::is_same_v<T, CauchyOutlier>) {
          return std::abs(law.location) + 8.0 * law.scale;
        } else if constexpr (std::is_same_v<T, UniformOutlier>) {
          return std::max(std::abs(law.a), std::abs(law.b));
        } else {
          double m = 0.0;
          for (double a : law.atoms) m = std::max(m, std::abs(a));
          return m;
        }
      },
      pi);
}

void validate_ctx(const ShiftContext& ctx) {
  if (!(ctx.theta0 > 0.0)) throw std::invalid_argument("ShiftContext: theta0 must be positive");
  if (!ctx.beta.allFinite()) {
    throw std::invalid_argument("ShiftContext: coefficients must be finite");
  }
  validate(ctx.pi);
}

}  // namespace

double shift_delta(double x, const ShiftContext& ctx) {
  validate_ctx(ctx);
  return delta_at(x, ctx, kQuadTolSmooth, kQuadTolCauchy);
}

double shift_delta_sym(double x, const ShiftContext& ctx) {
  validate_ctx(ctx);
  return delta_sym_at(x, ctx, kQuadTolSmooth, kQuadTolCauchy);
}

Eigen::VectorXd cell_shift_vector(const Partition& part, const ShiftContext& ctx) {
  validate_ctx(ctx);
  const int m = part.cells();
  Eigen::VectorXd out(m);

  double prev = 0.0;  // Delta_S(0) vanishes identically
  for (int j = 1; j < m; ++j) {
    const double cur = delta_sym_at(part.boundary(j), ctx, kQuadTolSmooth, kQuadTolCauchy);
    out[j - 1] = 2.0 * (cur - prev);
    prev = cur;
  }

  // The x_m = infinity entry uses lim Delta_S = 0.  The limit is checked
  // at a finite cutoff, enlarged geometrically until the drift is
  // negligible; heavy-tailed laws (Cauchy) need many doublings.
  const double coeff_bound = std::max(1.0, ctx.beta.size() > 0 ? ctx.beta.cwiseAbs().maxCoeff() : 0.0);
  double cutoff = 8.0 * ctx.theta0 + outlier_reach(ctx.pi) * coeff_bound;
  bool vanished = false;
  double tail = 0.0;
  for (int i = 0; i < 64; ++i) {
    tail = delta_sym_at(cutoff, ctx, 1e-12, 1e-12);
    if (std::abs(tail) < kTailThreshold) {
      vanished = true;
      break;
    }
    cutoff *= 2.0;
  }
  if (!vanished) {
    throw PrecisionError("cell_shift_vector: tail drift did not vanish at the cutoff",
                         std::abs(tail));
  }
  out[m - 1] = 2.0 * (0.0 - prev);
  return out;
}

NoncentralitySpec noncentrality_spec(double gamma, const Partition& part,
                                     const ShiftContext& ctx) {
  if (gamma < 0.0) throw std::invalid_argument("noncentrality: gamma must be >= 0");
  const CellModel model{part};

  NoncentralitySpec spec;
  spec.gamma = gamma;
  spec.p_vec = model.p(ctx.theta0);
  spec.p_prime = model.p_prime(ctx.theta0);
  const Eigen::VectorXd inv_sqrt_p = spec.p_vec.cwiseSqrt().cwiseInverse();
  spec.b = inv_sqrt_p.cwiseProduct(spec.p_prime);
  spec.alpha_vec = spec.b / spec.b.norm();
  spec.delta = cell_shift_vector(part, ctx);

  const Eigen::VectorXd d = inv_sqrt_p.cwiseProduct(spec.delta);
  const Eigen::VectorXd residual = d - spec.alpha_vec * spec.alpha_vec.dot(d);
  spec.lambda2 = gamma * gamma * residual.squaredNorm();
  return spec;
}

double noncentrality(double gamma, const Partition& part, const ShiftContext& ctx) {
  if (gamma < 0.0) throw std::invalid_argument("noncentrality: gamma must be >= 0");
  validate_ctx(ctx);
  if (gamma == 0.0) return 0.0;
  return noncentrality_spec(gamma, part, ctx).lambda2;
}

double asymptotic_level(double gamma, double alpha, const Partition& part,
                        const ShiftContext& ctx) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("asymptotic_level: alpha must lie in (0, 1)");
  }
  const int df = part.cells() - 2;
  if (df < 1) throw std::invalid_argument("asymptotic_level: partition needs more than two cells");
  const double q = chi2_quantile(1.0 - alpha, df);
  return 1.0 - noncentral_chi2_cdf(q, df, noncentrality(gamma, part, ctx));
}

}  // namespace symchi

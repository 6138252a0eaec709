#include "symchi/special.hpp"

#include <cmath>
#include <stdexcept>

#include "symchi/errors.hpp"

namespace symchi {

namespace {

constexpr double kHalfLog2Pi = 0.9189385332046727417803297;  // ln(2*pi)/2

// Lanczos (g = 7, n = 9) log-gamma for z >= 0.5.  Local so that threaded
// callers avoid the signgam global touched by the libm lgamma.
double lgamma_pos(double z) {
  static const double c[9] = {
      0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
      771.32342877765313,       -176.61502916214059,   12.507343278686905,
      -0.13857109526572012,     9.9843695780195716e-6, 1.5056327351493116e-7};
  double x = c[0];
  for (int i = 1; i < 9; ++i) x += c[i] / (z - 1.0 + i);
  const double t = z + 6.5;
  return kHalfLog2Pi + (z - 0.5) * std::log(t) - t + std::log(x);
}

// Series expansion of P(a, x), valid for x < a + 1.
double gammap_series(double a, double x) {
  double ap = a;
  double del = 1.0 / a;
  double sum = del;
  for (int i = 0; i < 1000; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-16) {
      return sum * std::exp(-x + a * std::log(x) - lgamma_pos(a));
    }
  }
  throw PrecisionError("incomplete gamma series did not converge", std::abs(del / sum));
}

// Lentz continued fraction for Q(a, x), valid for x >= a + 1.
double gammaq_cf(double a, double x) {
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) {
      return h * std::exp(-x + a * std::log(x) - lgamma_pos(a));
    }
  }
  throw PrecisionError("incomplete gamma continued fraction did not converge", 0.0);
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double normal_pdf(double x) {
  constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double normal_quantile(double p) {
  // Wichura's algorithm AS 241 (PPND16), accurate to ~1e-16 relative.
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("normal_quantile: p must lie in (0, 1)");
  }
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
              6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
            1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
          1.3314166789178437745e2) * r + 3.3871328727963666080e0);
    const double den =
        (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
              3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
            5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
          4.2313330701600911252e1) * r + 1.0);
    return q * num / den;
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
            3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
          4.63033784615654529590e0) * r + 1.42343711074968357734e0);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
          2.05319162663775882187e0) * r + 1.0);
    val = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
          5.46378491116411436990e0) * r + 6.65790464350110377720e0);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
    val = num / den;
  }
  return (q < 0.0) ? -val : val;
}

double gammap(double a, double x) {
  if (!(a > 0.0)) throw std::invalid_argument("gammap: a must be positive");
  if (x < 0.0) throw std::invalid_argument("gammap: x must be nonnegative");
  if (x == 0.0) return 0.0;
  return (x < a + 1.0) ? gammap_series(a, x) : 1.0 - gammaq_cf(a, x);
}

double chi2_cdf(double x, int df) {
  if (df < 1) throw std::invalid_argument("chi2_cdf: df must be >= 1");
  if (x <= 0.0) return 0.0;
  return gammap(0.5 * df, 0.5 * x);
}

double chi2_quantile(double prob, int df) {
  if (!(prob > 0.0 && prob < 1.0)) {
    throw std::invalid_argument("chi2_quantile: prob must lie in (0, 1)");
  }
  if (df < 1) throw std::invalid_argument("chi2_quantile: df must be >= 1");
  double lo = 0.0;
  double hi = df + 10.0 * std::sqrt(2.0 * df) + 10.0;
  while (chi2_cdf(hi, df) < prob) {
    hi *= 2.0;
    if (hi > 1e300) throw NoRootError("chi2_quantile: bracket expansion failed");
  }
  double flo = -prob;  // chi2_cdf(0) - prob
  double fhi = chi2_cdf(hi, df) - prob;
  // Safeguarded secant: fall back to bisection whenever the secant step
  // leaves the bracket or stalls.  The interval is driven well below the
  // documented 1e-10 so that the CDF round trip holds near steep regions.
  for (int it = 0; it < 300; ++it) {
    double mid;
    const double denom = fhi - flo;
    if (denom != 0.0) {
      mid = hi - fhi * (hi - lo) / denom;
      const double margin = 0.01 * (hi - lo);
      if (!(mid > lo + margin && mid < hi - margin)) mid = 0.5 * (lo + hi);
    } else {
      mid = 0.5 * (lo + hi);
    }
    const double fmid = chi2_cdf(mid, df) - prob;
    if (fmid <= 0.0) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
      fhi = fmid;
    }
    if (hi - lo < 1e-13 * std::max(1.0, std::abs(hi))) break;
  }
  return 0.5 * (lo + hi);
}

double noncentral_chi2_cdf(double x, int df, double lambda2) {
  if (df < 1) throw std::invalid_argument("noncentral_chi2_cdf: df must be >= 1");
  if (lambda2 < 0.0) {
    throw std::invalid_argument("noncentral_chi2_cdf: lambda2 must be >= 0");
  }
  if (x <= 0.0) return 0.0;
  if (lambda2 == 0.0) return chi2_cdf(x, df);

  constexpr double kTailEps = 1e-13;
  const double pois_mean = 0.5 * lambda2;
  const double hx = 0.5 * x;
  const double a0 = 0.5 * df;

  // Start at the Poisson mode and walk outward; this stays in range even
  // when exp(-lambda2/2) underflows.
  const long i0 = static_cast<long>(pois_mean);
  const double w0 =
      std::exp(-pois_mean + i0 * std::log(pois_mean) - lgamma_pos(i0 + 1.0));
  const double p0 = gammap(a0 + i0, hx);
  const double t0 =
      std::exp((a0 + i0) * std::log(hx) - hx - lgamma_pos(a0 + i0 + 1.0));

  double sum = w0 * p0;

  // Rightward: weights decay geometrically once past the mode.
  {
    double w = w0, pc = p0, t = t0;
    for (long i = i0; i - i0 < 1000000;) {
      pc -= t;
      if (pc < 0.0) pc = 0.0;
      w *= pois_mean / static_cast<double>(i + 1);
      ++i;
      t *= hx / (a0 + static_cast<double>(i));
      sum += w * pc;
      const double r = pois_mean / static_cast<double>(i + 2);
      if (w < 1e-280 || pc == 0.0) break;
      if (r < 1.0 && w * r / (1.0 - r) < 0.5 * kTailEps) break;
    }
  }

  // Leftward, down to i = 0 at most.
  {
    double w = w0, pc = p0, t = t0;
    for (long i = i0; i >= 1;) {
      t *= (a0 + static_cast<double>(i)) / hx;  // now t(a0 + i - 1)
      pc += t;
      if (pc > 1.0) pc = 1.0;
      w *= static_cast<double>(i) / pois_mean;
      --i;
      sum += w * pc;
      if (i == 0 || w < 1e-280) break;
      const double next = w * static_cast<double>(i) / pois_mean;
      if (next * static_cast<double>(i) < 0.5 * kTailEps) break;
    }
  }

  if (sum < 0.0) return 0.0;
  if (sum > 1.0) return 1.0;
  return sum;
}

}  // namespace symchi

#pragma once

namespace symchi {

/// Standard normal distribution function, computed through erfc.
double normal_cdf(double x);

/// Standard normal density.
double normal_pdf(double x);

/// Inverse standard normal distribution function (Wichura's PPND16).
/// Requires 0 < p < 1.
double normal_quantile(double p);

/// Regularized lower incomplete gamma P(a, x) for a > 0, x >= 0.
double gammap(double a, double x);

/// Central chi-square distribution function; returns 0 for x < 0.
double chi2_cdf(double x, int df);

/// Quantile of the central chi-square law, solved by bracketed root
/// finding on chi2_cdf to 1e-10.
double chi2_quantile(double prob, int df);

/// Noncentral chi-square distribution function with noncentrality
/// lambda2, evaluated as a Poisson mixture of central terms.  The mixture
/// is truncated once the neglected Poisson mass is below 1e-12; at
/// lambda2 = 0 it reduces to the single central term.  Returns 0 for
/// x < 0.
double noncentral_chi2_cdf(double x, int df, double lambda2);

}  // namespace symchi

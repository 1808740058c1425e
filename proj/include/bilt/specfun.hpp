#pragma once

namespace bilt::specfun {

/// Digamma function Psi(x) = Gamma'(x)/Gamma(x) for x > 0.
double digamma(double x);

/// Trigamma function Psi'(x) for x > 0.
double trigamma(double x);

/// D(x) = Psi((x+1)/2) - Psi(x/2).
double d_func(double x);

/// D_s(x) = Psi((x+1)/2) - Psi((x-s+1)/2), the telescoped sum of D(j) for
/// j = x-s+1 .. x.  Requires x - s + 1 > 0.
double d_s(int s, double x);

/// d/dx D_s(x) = (Psi'((x+1)/2) - Psi'((x-s+1)/2)) / 2.
double d_s_prime(int s, double x);

/// Exact mean of N log(1 + A/(N-2)) for a null block of size b: N D_b(N-2).
double block_null_mean(int block_size, int n_total);

/// Exact variance of the same quantity: -2 N^2 D'_b(N-2).
double block_null_variance(int block_size, int n_total);

/// Standard normal CDF.
double normal_cdf(double x);

/// Upper q-quantile of N(0,1), i.e. z with 1 - Phi(z) = q.
double normal_upper_quantile(double q);

} // namespace bilt::specfun

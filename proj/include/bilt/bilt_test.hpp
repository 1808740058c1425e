#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bilt/blockstats.hpp"

namespace bilt {

enum class KernelKind { Parzen, Truncated, QuadraticSpectral };

/// Lag window used by the long-run variance estimator.
struct KernelSpec {
    KernelKind kind = KernelKind::Parzen;
    int bandwidth = 5;
};

std::string to_string(KernelKind kind);
KernelKind parse_kernel_kind(std::string_view name);

/// Outcome of one BILT (or DLRT) test.
struct BiltResult {
    double t_bilt = 0.0;     ///< sum of U_{N,k}
    int k = 0;               ///< number of blocks
    double centering = 0.0;  ///< exact null mean of t_bilt
    double tau_sq_hat = 0.0; ///< long-run variance estimate (after the floor)
    double z = 0.0;          ///< (t_bilt - centering) / sqrt(k * tau_sq_hat)
    double p_value = 1.0;    ///< two-sided normal p-value
    bool reject = false;     ///< p_value <= level
    double level = 0.05;
    bool tau_floored = false; ///< raw estimate fell below the variance floor
};

struct TauSqEstimate {
    double value = 0.0;      ///< estimate used for standardization
    double parametric = 0.0; ///< -2 N^2 mean_k D'_{p_k}(N-2)
    double raw = 0.0;        ///< parametric + weighted lag covariances, before the floor
    bool floored = false;
};

/// The variance estimate is floored at this fraction of the parametric term.
inline constexpr double kTauFloorFraction = 0.05;

/// Kernel weight w(x) for x >= 0; w(0) = 1 for every kernel.
double kernel_weight(const KernelSpec& spec, double ratio);

/// Sample lag-l autocovariance of u with divisor K - l around the full mean.
/// Throws LagTooLarge when lag >= K.
double lag_covariance(std::span<const double> u, int lag);

/// Kernel long-run variance estimate of the U sequence.
///
/// The lag sum runs to min(L, K-1).  A raw value below kTauFloorFraction
/// times the parametric term is replaced by that floor and flagged.
TauSqEstimate estimate_tau_sq(std::span<const double> u, std::span<const int> block_sizes, int n_total,
                              const KernelSpec& spec);

/// Sum of exact per-block null means N D_{p_k}(N-2).
double null_centering(std::span<const int> block_sizes, int n_total);

/// Standardize precomputed block statistics into a test result.
BiltResult bilt_from_block_stats(std::span<const BlockStat> stats, int n_total, const KernelSpec& spec,
                                 double level);

/// Block independent likelihood ratio test of equal means.
///
/// Throws InsufficientSampleSize when N < max block + 3 and propagates
/// SingularBlockCovariance from the block statistics.
BiltResult bilt_test(const TwoSampleData& data, const BlockPartition& partition, const KernelSpec& spec = {},
                double level = 0.05);

/// BILT with unit blocks.
BiltResult dlrt_test(const TwoSampleData& data, const KernelSpec& spec = {}, double level = 0.05);

/// Two-sided normal p-value 2(1 - Phi(|z|)).
double two_sided_p_value(double z);

/// Asymptotic one-sided power 1 - Phi(z_level - (sum_k lambda_k / sqrt(K)) / tau).
///
/// `noncentralities` holds the block quadratic forms
/// lambda_k = delta_k' Sigma_kk^{-1} delta_k of the local alternative.
double theoretical_power(std::span<const double> noncentralities, int k, double tau, double level);

/// Same, from the aggregate sum_k lambda_k.
double theoretical_power_from_sum(double noncentrality_sum, int k, double tau, double level);

} // namespace bilt

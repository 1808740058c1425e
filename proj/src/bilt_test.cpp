#include "bilt/bilt_test.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "bilt/error.hpp"
#include "bilt/specfun.hpp"

namespace bilt {
namespace {

void require_level(double level)
{
    if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("level must lie in (0, 1)");
}

} // namespace

std::string to_string(KernelKind kind)
{
    switch (kind) {
    case KernelKind::Parzen: return "parzen";
    case KernelKind::Truncated: return "truncated";
    case KernelKind::QuadraticSpectral: return "qs";
    }
    return "unknown";
}

KernelKind parse_kernel_kind(std::string_view name)
{
    if (name == "parzen") return KernelKind::Parzen;
    if (name == "truncated") return KernelKind::Truncated;
    if (name == "qs" || name == "quadratic_spectral") return KernelKind::QuadraticSpectral;
    throw InvalidArgument("unknown kernel '" + std::string(name) + "' (expected parzen, truncated or qs)");
}

double kernel_weight(const KernelSpec& spec, double ratio)
{
    const double x = std::abs(ratio);
    switch (spec.kind) {
    case KernelKind::Parzen:
        if (x <= 0.5) return 1.0 - 6.0 * x * x + 6.0 * x * x * x;
        if (x <= 1.0) return 2.0 * (1.0 - x) * (1.0 - x) * (1.0 - x);
        return 0.0;
    case KernelKind::Truncated:
        return x <= 1.0 ? 1.0 : 0.0;
    case KernelKind::QuadraticSpectral: {
        if (x == 0.0) return 1.0;
        const double arg = 6.0 * std::numbers::pi * x / 5.0;
        if (arg < 0.1) {
            // sin(a)/a - cos(a) loses every digit near 0; use its series.
            const double a2 = arg * arg;
            return 3.0 * (1.0 / 3.0 - a2 * (1.0 / 30.0 - a2 * (1.0 / 840.0 - a2 / 45360.0)));
        }
        return 25.0 / (12.0 * std::numbers::pi * std::numbers::pi * x * x) * (std::sin(arg) / arg - std::cos(arg));
    }
    }
    return 0.0;
}

double lag_covariance(std::span<const double> u, int lag)
{
    const auto k = static_cast<int>(u.size());
    if (lag < 0 || lag >= k) {
        throw LagTooLarge("lag " + std::to_string(lag) + " needs a sequence longer than " + std::to_string(k));
    }
    const double mean = std::accumulate(u.begin(), u.end(), 0.0) / k;
    double acc = 0.0;
    for (int i = 0; i + lag < k; ++i) acc += (u[i] - mean) * (u[i + lag] - mean);
    return acc / (k - lag);
}

TauSqEstimate estimate_tau_sq(std::span<const double> u, std::span<const int> block_sizes, int n_total,
                              const KernelSpec& spec)
{
    if (u.empty() || u.size() != block_sizes.size()) {
        throw InvalidArgument("estimate_tau_sq: u and block sizes must be nonempty and of equal length");
    }
    if (spec.bandwidth < 1) throw InvalidArgument("kernel bandwidth must be at least 1");
    const int max_block = *std::max_element(block_sizes.begin(), block_sizes.end());
    if (n_total < max_block + 3) {
        throw InsufficientSampleSize("N = " + std::to_string(n_total) + " is below block size " +
                                     std::to_string(max_block) + " + 3");
    }

    const double n = n_total;
    double mean_deriv = 0.0;
    for (int s : block_sizes) mean_deriv += specfun::d_s_prime(s, n - 2.0);
    mean_deriv /= static_cast<double>(block_sizes.size());

    TauSqEstimate est;
    est.parametric = -2.0 * n * n * mean_deriv;

    const int k = static_cast<int>(u.size());
    const int max_lag = std::min(spec.bandwidth, k - 1);
    double lag_sum = 0.0;
    for (int l = 1; l <= max_lag; ++l) {
        const double w = kernel_weight(spec, static_cast<double>(l) / spec.bandwidth);
        if (w != 0.0) lag_sum += w * lag_covariance(u, l);
    }
    est.raw = est.parametric + 2.0 * lag_sum;

    const double floor = kTauFloorFraction * est.parametric;
    est.floored = !(est.raw >= floor);
    est.value = est.floored ? floor : est.raw;
    return est;
}

double null_centering(std::span<const int> block_sizes, int n_total)
{
    double c = 0.0;
    for (int s : block_sizes) c += specfun::block_null_mean(s, n_total);
    return c;
}

double two_sided_p_value(double z)
{
    return std::erfc(std::abs(z) / std::numbers::sqrt2);
}

BiltResult bilt_from_block_stats(std::span<const BlockStat> stats, int n_total, const KernelSpec& spec,
                                 double level)
{
    require_level(level);
    std::vector<double> u;
    std::vector<int> sizes;
    u.reserve(stats.size());
    sizes.reserve(stats.size());
    for (const auto& s : stats) {
        u.push_back(s.u);
        sizes.push_back(s.block_size);
    }

    const TauSqEstimate tau = estimate_tau_sq(u, sizes, n_total, spec);

    BiltResult r;
    r.k = static_cast<int>(stats.size());
    r.t_bilt = std::accumulate(u.begin(), u.end(), 0.0);
    r.centering = null_centering(sizes, n_total);
    r.tau_sq_hat = tau.value;
    r.tau_floored = tau.floored;
    r.z = (r.t_bilt - r.centering) / std::sqrt(r.k * r.tau_sq_hat);
    r.p_value = two_sided_p_value(r.z);
    r.level = level;
    r.reject = r.p_value <= level;
    return r;
}

BiltResult bilt_test(const TwoSampleData& data, const BlockPartition& partition, const KernelSpec& spec, double level)
{
    require_level(level);
    const auto stats = all_block_statistics(data, partition);
    return bilt_from_block_stats(stats, data.n_total(), spec, level);
}

BiltResult dlrt_test(const TwoSampleData& data, const KernelSpec& spec, double level)
{
    return bilt_test(data, BlockPartition::fixed(data.dim(), 1), spec, level);
}

double theoretical_power_from_sum(double noncentrality_sum, int k, double tau, double level)
{
    require_level(level);
    if (k < 1) throw InvalidArgument("number of blocks must be positive");
    if (!(tau > 0.0)) throw InvalidArgument("tau must be positive");
    if (!(noncentrality_sum >= 0.0)) throw InvalidArgument("noncentralities must be nonnegative");
    const double shift = noncentrality_sum / std::sqrt(static_cast<double>(k)) / tau;
    return specfun::normal_cdf(shift - specfun::normal_upper_quantile(level));
}

double theoretical_power(std::span<const double> noncentralities, int k, double tau, double level)
{
    double sum = 0.0;
    for (double lambda : noncentralities) {
        if (!(lambda >= 0.0)) throw InvalidArgument("noncentralities must be nonnegative");
        sum += lambda;
    }
    return theoretical_power_from_sum(sum, k, tau, level);
}

} // namespace bilt

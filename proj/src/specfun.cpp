#include "bilt/specfun.hpp"

#include <cmath>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "bilt/error.hpp"

namespace bilt::specfun {
namespace {

constexpr double kShiftThreshold = 6.0;

void require_positive(double x, const char* name)
{
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw std::domain_error(std::string(name) + ": argument must be positive and finite, got " +
                                std::to_string(x));
    }
}

} // namespace

double digamma(double x)
{
    require_positive(x, "digamma");
    double shift = 0.0;
    while (x < kShiftThreshold) {
        shift += 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // Bernoulli-number series in 1/x^2, B_2 .. B_14.
    const double series =
        inv2 * (1.0 / 12 -
                inv2 * (1.0 / 120 -
                        inv2 * (1.0 / 252 -
                                inv2 * (1.0 / 240 -
                                        inv2 * (1.0 / 132 - inv2 * (691.0 / 32760 - inv2 / 12))))));
    return std::log(x) - 0.5 * inv - series - shift;
}

double trigamma(double x)
{
    require_positive(x, "trigamma");
    double shift = 0.0;
    while (x < kShiftThreshold) {
        shift += 1.0 / (x * x);
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    const double series =
        inv * inv2 *
        (1.0 / 6 -
         inv2 * (1.0 / 30 -
                 inv2 * (1.0 / 42 - inv2 * (1.0 / 30 - inv2 * (5.0 / 66 - inv2 * (691.0 / 2730 - inv2 * 7.0 / 6))))));
    return inv + 0.5 * inv2 + series + shift;
}

double d_func(double x)
{
    require_positive(x, "d_func");
    return digamma((x + 1.0) / 2.0) - digamma(x / 2.0);
}

double d_s(int s, double x)
{
    if (s < 0) throw std::domain_error("d_s: s must be nonnegative");
    if (!(x - s + 1.0 > 0.0)) throw std::domain_error("d_s: requires x - s + 1 > 0");
    if (s == 0) return 0.0;
    return digamma((x + 1.0) / 2.0) - digamma((x - s + 1.0) / 2.0);
}

double d_s_prime(int s, double x)
{
    if (s < 0) throw std::domain_error("d_s_prime: s must be nonnegative");
    if (!(x - s + 1.0 > 0.0)) throw std::domain_error("d_s_prime: requires x - s + 1 > 0");
    if (s == 0) return 0.0;
    return 0.5 * (trigamma((x + 1.0) / 2.0) - trigamma((x - s + 1.0) / 2.0));
}

double block_null_mean(int block_size, int n_total)
{
    const double n = n_total;
    return n * d_s(block_size, n - 2.0);
}

double block_null_variance(int block_size, int n_total)
{
    const double n = n_total;
    return -2.0 * n * n * d_s_prime(block_size, n - 2.0);
}

double normal_cdf(double x)
{
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double normal_upper_quantile(double q)
{
    if (!(q > 0.0 && q < 1.0)) throw InvalidArgument("normal_upper_quantile: q must lie in (0, 1)");
    return boost::math::quantile(boost::math::complement(boost::math::normal_distribution<double>(), q));
}

} // namespace bilt::specfun

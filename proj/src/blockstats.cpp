#include "bilt/blockstats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <boost/math/distributions/fisher_f.hpp>

#include "bilt/error.hpp"
#include "linalg.hpp"

namespace bilt {
namespace {

struct CenteredData {
    Eigen::MatrixXd xc;
    Eigen::MatrixXd yc;
    Eigen::RowVectorXd diff;
};

CenteredData center(const TwoSampleData& data)
{
    const Eigen::RowVectorXd mx = data.x().colwise().mean();
    const Eigen::RowVectorXd my = data.y().colwise().mean();
    return {data.x().rowwise() - mx, data.y().rowwise() - my, mx - my};
}

double group_factor(const TwoSampleData& data)
{
    return static_cast<double>(data.n1()) * data.n2() / data.n_total();
}

void require_sample_size(const TwoSampleData& data, int block_size)
{
    if (data.n_total() < block_size + 3) {
        throw InsufficientSampleSize("N = " + std::to_string(data.n_total()) + " is below block size " +
                                     std::to_string(block_size) + " + 3");
    }
}

void require_in_range(const TwoSampleData& data, BlockRange block)
{
    if (block.size < 1 || block.begin < 0 || block.begin + block.size > data.dim()) {
        throw InvalidArgument("block range [" + std::to_string(block.begin) + ", " +
                              std::to_string(block.begin + block.size) + ") outside 0.." +
                              std::to_string(data.dim()));
    }
}

Eigen::MatrixXd pooled_from_centered(const CenteredData& c, BlockRange block, int n_total)
{
    const auto xb = c.xc.middleCols(block.begin, block.size);
    const auto yb = c.yc.middleCols(block.begin, block.size);
    Eigen::MatrixXd s = xb.transpose() * xb;
    s.noalias() += yb.transpose() * yb;
    s /= static_cast<double>(n_total - 2);
    return s.selfadjointView<Eigen::Lower>();
}

BlockStat stat_from_centered(const CenteredData& c, BlockRange block, const TwoSampleData& data,
                             std::size_t block_index)
{
    const double factor = group_factor(data);
    const int n = data.n_total();
    double quad = 0.0;
    if (block.size == 1) {
        const double s2 = (c.xc.col(block.begin).squaredNorm() + c.yc.col(block.begin).squaredNorm()) / (n - 2);
        if (!(s2 > 0.0)) {
            throw SingularBlockCovariance(block_index, "block " + std::to_string(block_index) +
                                                           ": pooled variance is zero (constant variable)");
        }
        const double d = c.diff[block.begin];
        quad = d * d / s2;
    } else {
        const auto llt = detail::checked_cholesky(pooled_from_centered(c, block, n));
        if (!llt) {
            throw SingularBlockCovariance(block_index, "block " + std::to_string(block_index) +
                                                           ": pooled covariance is not positive definite");
        }
        const Eigen::VectorXd d = c.diff.segment(block.begin, block.size).transpose();
        const Eigen::VectorXd w = llt->matrixL().solve(d);
        quad = w.squaredNorm();
    }
    const double a = factor * quad;
    return {a, block_log_statistic(a, n), block.size};
}

} // namespace

TwoSampleData::TwoSampleData(Eigen::MatrixXd x, Eigen::MatrixXd y) : x_(std::move(x)), y_(std::move(y))
{
    if (x_.rows() < 2 || y_.rows() < 2) throw InvalidArgument("each group needs at least two observations");
    if (x_.cols() < 1) throw InvalidArgument("data must have at least one variable");
    if (x_.cols() != y_.cols()) {
        throw ShapeMismatch("groups have different variable counts: " + std::to_string(x_.cols()) + " vs " +
                            std::to_string(y_.cols()));
    }
    if (!x_.allFinite() || !y_.allFinite()) throw InvalidArgument("data contains non-finite entries");
}

BlockPartition::BlockPartition(std::vector<int> sizes) : sizes_(std::move(sizes))
{
    if (sizes_.empty()) throw InvalidArgument("partition needs at least one block");
    for (int s : sizes_) {
        if (s < 1) throw InvalidArgument("block sizes must be positive");
        total_ += s;
        max_size_ = std::max(max_size_, s);
    }
}

BlockPartition BlockPartition::fixed(int p, int b)
{
    if (p < 1 || b < 1) throw InvalidArgument("fixed partition needs p >= 1 and b >= 1");
    std::vector<int> sizes(static_cast<std::size_t>(p / b), b);
    if (p % b != 0) sizes.push_back(p % b);
    return BlockPartition(std::move(sizes));
}

bool BlockPartition::uniform() const
{
    return std::all_of(sizes_.begin(), sizes_.end(), [&](int s) { return s == sizes_.front(); });
}

std::vector<BlockRange> BlockPartition::ranges() const
{
    std::vector<BlockRange> out;
    out.reserve(sizes_.size());
    int begin = 0;
    for (int s : sizes_) {
        out.push_back({begin, s});
        begin += s;
    }
    return out;
}

void BlockPartition::check_dimension(int p) const
{
    if (total_ != p) {
        throw InvalidArgument("partition covers " + std::to_string(total_) + " variables but data has " +
                              std::to_string(p));
    }
}

double block_log_statistic(double a, int n_total)
{
    return n_total * std::log1p(a / (n_total - 2));
}

Eigen::MatrixXd pooled_block_covariance(const TwoSampleData& data, BlockRange block)
{
    require_in_range(data, block);
    return pooled_from_centered(center(data), block, data.n_total());
}

BlockStat block_statistic(const TwoSampleData& data, BlockRange block)
{
    require_in_range(data, block);
    require_sample_size(data, block.size);
    return stat_from_centered(center(data), block, data, 0);
}

std::vector<BlockStat> all_block_statistics(const TwoSampleData& data, const BlockPartition& partition)
{
    partition.check_dimension(data.dim());
    require_sample_size(data, partition.max_size());
    const CenteredData c = center(data);
    const auto ranges = partition.ranges();
    std::vector<BlockStat> out;
    out.reserve(ranges.size());
    for (std::size_t k = 0; k < ranges.size(); ++k) out.push_back(stat_from_centered(c, ranges[k], data, k));
    return out;
}

HotellingResult hotelling_t2(const TwoSampleData& data)
{
    const int n = data.n_total();
    const int p = data.dim();
    if (p > n - 2) {
        throw DimensionTooLarge("Hotelling T^2 needs p <= N - 2 (p = " + std::to_string(p) +
                                ", N = " + std::to_string(n) + "); the pooled covariance is singular");
    }
    const CenteredData c = center(data);
    const auto llt = detail::checked_cholesky(pooled_from_centered(c, {0, p}, n));
    if (!llt) throw NotPositiveDefinite("pooled covariance is not positive definite");
    const Eigen::VectorXd w = llt->matrixL().solve(Eigen::VectorXd(c.diff.transpose()));

    HotellingResult r;
    r.t2 = group_factor(data) * w.squaredNorm();
    r.df1 = p;
    r.df2 = n - p - 1;
    r.f_stat = r.t2 * r.df2 / (static_cast<double>(n - 2) * p);
    r.p_value = f_upper_tail(r.f_stat, r.df1, r.df2);
    return r;
}

double f_upper_tail(double f, int df1, int df2)
{
    if (df1 < 1 || df2 < 1) throw InvalidArgument("F degrees of freedom must be positive");
    if (!(f > 0.0)) return 1.0;
    const boost::math::fisher_f_distribution<double> dist(df1, df2);
    return boost::math::cdf(boost::math::complement(dist, f));
}

} // namespace bilt

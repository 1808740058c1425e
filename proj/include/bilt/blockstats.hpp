#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace bilt {

/// Two groups of observations sharing the variable axis. Rows are subjects.
class TwoSampleData {
public:
    /// Validates n1, n2 >= 2, equal column counts and finite entries.
    TwoSampleData(Eigen::MatrixXd x, Eigen::MatrixXd y);

    const Eigen::MatrixXd& x() const { return x_; }
    const Eigen::MatrixXd& y() const { return y_; }

    int n1() const { return static_cast<int>(x_.rows()); }
    int n2() const { return static_cast<int>(y_.rows()); }
    int n_total() const { return n1() + n2(); }
    int dim() const { return static_cast<int>(x_.cols()); }

    TwoSampleData swapped() const { return TwoSampleData(y_, x_); }

private:
    Eigen::MatrixXd x_;
    Eigen::MatrixXd y_;
};

/// Contiguous range of variable indices [begin, begin + size).
struct BlockRange {
    int begin = 0;
    int size = 0;
};

/// Ordered block sizes p_1..p_K that partition the variables.
class BlockPartition {
public:
    explicit BlockPartition(std::vector<int> sizes);

    /// floor(p/b) blocks of size b, followed by one remainder block of size
    /// p mod b when b does not divide p.
    static BlockPartition fixed(int p, int b);

    const std::vector<int>& sizes() const { return sizes_; }
    int count() const { return static_cast<int>(sizes_.size()); }
    int total() const { return total_; }
    int max_size() const { return max_size_; }
    bool uniform() const;

    std::vector<BlockRange> ranges() const;

    /// Throws InvalidArgument when total() != p.
    void check_dimension(int p) const;

    bool operator==(const BlockPartition&) const = default;

private:
    std::vector<int> sizes_;
    int total_ = 0;
    int max_size_ = 0;
};

/// Per-block quadratic form A_{N,k} and its log transform U_{N,k}.
struct BlockStat {
    double a = 0.0;
    double u = 0.0;
    int block_size = 0;
};

struct HotellingResult {
    double t2 = 0.0;
    double f_stat = 0.0;
    int df1 = 0;
    int df2 = 0;
    double p_value = 1.0;
};

/// U = N log(1 + A/(N-2)).
double block_log_statistic(double a, int n_total);

/// Pooled within-group covariance of the variables in `block`, divisor N - 2.
Eigen::MatrixXd pooled_block_covariance(const TwoSampleData& data, BlockRange block);

/// A_{N,k} = (n1 n2 / N) d' S_k^{-1} d with d the block mean difference,
/// solved through a Cholesky factor of S_k.
///
/// Throws SingularBlockCovariance when a pivot falls to 1e-12 times the
/// largest diagonal entry or below, and InsufficientSampleSize when
/// N < block size + 3.
BlockStat block_statistic(const TwoSampleData& data, BlockRange block);

/// block_statistic over every block of the partition, in partition order.
/// A SingularBlockCovariance carries the index of the failing block.
std::vector<BlockStat> all_block_statistics(const TwoSampleData& data, const BlockPartition& partition);

/// Classical Hotelling T^2 with its exact F calibration.
/// Throws DimensionTooLarge when p > N - 2.
HotellingResult hotelling_t2(const TwoSampleData& data);

/// Upper-tail probability of F(df1, df2) at f.
double f_upper_tail(double f, int df1, int df2);

} // namespace bilt

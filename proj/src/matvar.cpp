#include "bilt/matvar.hpp"

#include "bilt/error.hpp"

namespace bilt {

void MatrixLayout::validate() const
{
    if (rows < 1 || cols < 1) throw InvalidArgument("matrix layout needs positive rows and cols");
    if (cols_per_block < 1) throw InvalidArgument("cols_per_block must be at least 1");
    if (cols_per_block > cols) throw InvalidArgument("cols_per_block exceeds the number of columns");
}

Eigen::MatrixXd vectorize(std::span<const Eigen::MatrixXd> sample)
{
    if (sample.empty()) throw ShapeMismatch("cannot vectorize an empty sample");
    const auto rows = sample.front().rows();
    const auto cols = sample.front().cols();
    Eigen::MatrixXd out(static_cast<Eigen::Index>(sample.size()), rows * cols);
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const auto& m = sample[i];
        if (m.rows() != rows || m.cols() != cols) {
            throw ShapeMismatch("matrix " + std::to_string(i) + " is " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()) + ", expected " + std::to_string(rows) + "x" +
                                std::to_string(cols));
        }
        // Eigen storage is column-major, which is exactly the stacking order.
        out.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::RowVectorXd>(m.data(), m.size());
    }
    return out;
}

std::vector<Eigen::MatrixXd> devectorize(const Eigen::MatrixXd& vectors, int rows, int cols)
{
    if (rows < 1 || cols < 1 || vectors.cols() != static_cast<Eigen::Index>(rows) * cols) {
        throw ShapeMismatch("vector length does not match the requested matrix shape");
    }
    std::vector<Eigen::MatrixXd> out;
    out.reserve(static_cast<std::size_t>(vectors.rows()));
    Eigen::RowVectorXd row(vectors.cols());
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
        row = vectors.row(i);
        out.emplace_back(Eigen::Map<const Eigen::MatrixXd>(row.data(), rows, cols));
    }
    return out;
}

BlockPartition layout_partition(const MatrixLayout& layout)
{
    layout.validate();
    return BlockPartition::fixed(layout.dim(), layout.block_size());
}

std::optional<std::string> layout_warning(const MatrixLayout& layout)
{
    layout.validate();
    const int remainder = layout.cols % layout.cols_per_block;
    if (remainder == 0) return std::nullopt;
    return std::to_string(layout.cols) + " columns are not divisible by " + std::to_string(layout.cols_per_block) +
           "; the last block spans " + std::to_string(remainder) + " column(s) (" +
           std::to_string(remainder * layout.rows) + " variables)";
}

BiltResult matrix_two_sample_test(std::span<const Eigen::MatrixXd> group1, std::span<const Eigen::MatrixXd> group2,
                                  const MatrixLayout& layout, const KernelSpec& spec, double level)
{
    layout.validate();
    for (const auto* group : {&group1, &group2}) {
        for (const auto& m : *group) {
            if (m.rows() != layout.rows || m.cols() != layout.cols) {
                throw ShapeMismatch("observation shape " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                                    " does not match layout " + std::to_string(layout.rows) + "x" +
                                    std::to_string(layout.cols));
            }
        }
    }
    const TwoSampleData data(vectorize(group1), vectorize(group2));
    return bilt_test(data, layout_partition(layout), spec, level);
}

} // namespace bilt

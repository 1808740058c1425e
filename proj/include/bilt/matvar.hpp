#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bilt/bilt_test.hpp"

namespace bilt {

/// Block layout for l x m matrix observations (rows are e.g. time points,
/// columns spatial locations).  Each block spans all rows of
/// `cols_per_block` consecutive columns.
struct MatrixLayout {
    int rows = 1;
    int cols = 1;
    int cols_per_block = 1;

    int dim() const { return rows * cols; }
    int block_size() const { return rows * cols_per_block; }
    void validate() const;
};

/// Stacks each matrix column by column, so the l entries of one location
/// are consecutive: (loc1,t1), (loc1,t2), ..., (loc2,t1), ...
/// Throws ShapeMismatch on inconsistent shapes.
Eigen::MatrixXd vectorize(std::span<const Eigen::MatrixXd> sample);

/// Inverse of vectorize for an n x (rows*cols) matrix.
std::vector<Eigen::MatrixXd> devectorize(const Eigen::MatrixXd& vectors, int rows, int cols);

/// Partition aligned with vectorize(): blocks of rows*cols_per_block
/// entries, plus a remainder block when cols_per_block does not divide cols.
BlockPartition layout_partition(const MatrixLayout& layout);

/// Warning text when the layout leaves a remainder block.
std::optional<std::string> layout_warning(const MatrixLayout& layout);

/// vectorize -> layout_partition -> bilt_test.
BiltResult matrix_two_sample_test(std::span<const Eigen::MatrixXd> group1, std::span<const Eigen::MatrixXd> group2,
                                  const MatrixLayout& layout, const KernelSpec& spec = {}, double level = 0.05);

} // namespace bilt

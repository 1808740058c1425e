#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace bilt::app {

/// A parsed comma-separated file: header plus raw cells.
struct CsvTable {
    std::string source;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<int> line_numbers; ///< 1-based file line of each row

    /// Column index by name, or -1.
    int column(const std::string& name) const;
};

/// Reads a header row and data rows; blank lines are skipped, fields may be
/// double-quoted.  Throws InvalidArgument naming the line on ragged rows.
CsvTable read_csv(const std::string& path);

/// Cell parsed as a finite double; the error names file, line and column.
double numeric_cell(const CsvTable& table, std::size_t row, std::size_t col);
long long integer_cell(const CsvTable& table, std::size_t row, std::size_t col);

/// All columns except `skip` as an n x p matrix.
Eigen::MatrixXd numeric_matrix(const CsvTable& table, const std::vector<std::size_t>& rows, int skip = -1);

struct GroupedData {
    Eigen::MatrixXd x;
    Eigen::MatrixXd y;
    std::string label1;
    std::string label2;
};

/// Splits a table on its `group` column.  The two distinct labels are
/// ordered lexicographically; the first becomes x.
GroupedData split_by_group(const CsvTable& table);

} // namespace bilt::app

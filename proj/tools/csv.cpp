#include "csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>

#include "bilt/error.hpp"

namespace bilt::app {

namespace {

std::string trim(std::string s)
{
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::vector<std::string> split_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cell += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cell += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(trim(cell));
            cell.clear();
        } else {
            cell += c;
        }
    }
    out.push_back(trim(cell));
    return out;
}

std::string where(const CsvTable& t, std::size_t row, std::size_t col)
{
    return t.source + ": line " + std::to_string(t.line_numbers[row]) + ", column '" + t.header[col] + "'";
}

} // namespace

int CsvTable::column(const std::string& name) const
{
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

CsvTable read_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open '" + path + "'");
    CsvTable t;
    t.source = path;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
        if (trim(line).empty()) continue;
        auto cells = split_line(line);
        if (t.header.empty()) {
            t.header = std::move(cells);
            continue;
        }
        if (cells.size() != t.header.size()) {
            throw InvalidArgument(path + ": line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                                  " fields, header has " + std::to_string(t.header.size()));
        }
        t.rows.push_back(std::move(cells));
        t.line_numbers.push_back(line_no);
    }
    if (t.header.empty()) throw InvalidArgument(path + ": missing header row");
    return t;
}

double numeric_cell(const CsvTable& t, std::size_t row, std::size_t col)
{
    const std::string& s = t.rows[row][col];
    double v = 0.0;
    const char* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (s.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
        throw InvalidArgument(where(t, row, col) + ": cannot parse '" + s + "' as a finite number");
    }
    return v;
}

long long integer_cell(const CsvTable& t, std::size_t row, std::size_t col)
{
    const std::string& s = t.rows[row][col];
    long long v = 0;
    const char* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (s.empty() || ec != std::errc() || ptr != end) {
        throw InvalidArgument(where(t, row, col) + ": cannot parse '" + s + "' as an integer");
    }
    return v;
}

Eigen::MatrixXd numeric_matrix(const CsvTable& t, const std::vector<std::size_t>& rows, int skip)
{
    const int p = static_cast<int>(t.header.size()) - (skip >= 0 ? 1 : 0);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), p);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        int j = 0;
        for (std::size_t c = 0; c < t.header.size(); ++c) {
            if (static_cast<int>(c) == skip) continue;
            m(static_cast<Eigen::Index>(i), j++) = numeric_cell(t, rows[i], c);
        }
    }
    return m;
}

GroupedData split_by_group(const CsvTable& t)
{
    const int g = t.column("group");
    if (g < 0) throw InvalidArgument(t.source + ": no 'group' column");
    std::map<std::string, std::vector<std::size_t>> by_label;
    for (std::size_t r = 0; r < t.rows.size(); ++r) by_label[t.rows[r][static_cast<std::size_t>(g)]].push_back(r);
    if (by_label.size() != 2) {
        throw InvalidArgument(t.source + ": column 'group' must hold exactly two labels, found " +
                              std::to_string(by_label.size()));
    }
    GroupedData out;
    auto it = by_label.begin();
    out.label1 = it->first;
    out.x = numeric_matrix(t, it->second, g);
    ++it;
    out.label2 = it->first;
    out.y = numeric_matrix(t, it->second, g);
    return out;
}

} // namespace bilt::app

#include "blockggm/io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "blockggm/common.hpp"
#include "blockggm/special.hpp"

namespace blockggm {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

}  // namespace

Eigen::MatrixXd read_csv_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open data file: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    long line_no = 0;
    bool first_content_line = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const std::vector<std::string> fields = split_fields(line);
        std::vector<double> row(fields.size());
        bool ok = true;
        std::size_t bad_col = 0;
        for (std::size_t c = 0; c < fields.size(); ++c)
            if (!parse_double(fields[c], row[c])) {
                ok = false;
                bad_col = c;
                break;
            }
        if (!ok) {
            if (first_content_line) {  // header line
                first_content_line = false;
                continue;
            }
            throw input_error(path + ": line " + std::to_string(line_no) +
                              ", column " + std::to_string(bad_col + 1) +
                              ": cannot parse '" + fields[bad_col] + "'");
        }
        first_content_line = false;
        if (!rows.empty() && row.size() != rows.front().size())
            throw input_error(path + ": line " + std::to_string(line_no) +
                              " has " + std::to_string(row.size()) +
                              " fields, expected " +
                              std::to_string(rows.front().size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw input_error(path + ": no numeric rows");
    Eigen::MatrixXd m(static_cast<long>(rows.size()),
                      static_cast<long>(rows.front().size()));
    for (long i = 0; i < m.rows(); ++i)
        for (long j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
    return m;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv_matrix(const std::string& path, const Eigen::MatrixXd& m) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write file: " + path);
    for (long i = 0; i < m.rows(); ++i) {
        for (long j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
    if (!out) throw input_error("failed while writing: " + path);
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open config file: " + path);
    std::map<std::string, std::string> entries;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string content = trim(line);
        if (content.empty()) continue;
        const std::size_t eq = content.find('=');
        if (eq == std::string::npos)
            throw input_error(path + ": line " + std::to_string(line_no) +
                              ": expected key = value");
        const std::string key = trim(content.substr(0, eq));
        const std::string value = trim(content.substr(eq + 1));
        if (key.empty())
            throw input_error(path + ": line " + std::to_string(line_no) +
                              ": empty key");
        entries[key] = value;
    }
    return entries;
}

std::vector<double> quantile_normalize(const std::vector<double>& column) {
    const std::size_t n = column.size();
    if (n == 0) throw input_error("quantile_normalize: empty column");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                         return column[a] < column[b];
                     });
    std::vector<double> result(n);
    std::size_t start = 0;
    while (start < n) {
        std::size_t stop = start + 1;
        while (stop < n && column[order[stop]] == column[order[start]]) ++stop;
        /* average 1-based rank over the tied run */
        const double rank = 0.5 * (start + 1 + stop);
        const double value = norm_quantile((rank - 0.5) / n);
        for (std::size_t t = start; t < stop; ++t) result[order[t]] = value;
        start = stop;
    }
    return result;
}

Eigen::MatrixXd quantile_normalize_columns(const Eigen::MatrixXd& y) {
    Eigen::MatrixXd out(y.rows(), y.cols());
    std::vector<double> column(y.rows());
    for (long j = 0; j < y.cols(); ++j) {
        for (long i = 0; i < y.rows(); ++i) column[i] = y(i, j);
        const std::vector<double> normalized = quantile_normalize(column);
        for (long i = 0; i < y.rows(); ++i) out(i, j) = normalized[i];
    }
    return out;
}

Graph karate_graph() {
    /* 1-indexed friendship pairs (Zachary, 1977). */
    static const int edges[78][2] = {
        {1, 2},   {1, 3},   {1, 4},   {1, 5},   {1, 6},   {1, 7},   {1, 8},
        {1, 9},   {1, 11},  {1, 12},  {1, 13},  {1, 14},  {1, 18},  {1, 20},
        {1, 22},  {1, 32},  {2, 3},   {2, 4},   {2, 8},   {2, 14},  {2, 18},
        {2, 20},  {2, 22},  {2, 31},  {3, 4},   {3, 8},   {3, 9},   {3, 10},
        {3, 14},  {3, 28},  {3, 29},  {3, 33},  {4, 8},   {4, 13},  {4, 14},
        {5, 7},   {5, 11},  {6, 7},   {6, 11},  {6, 17},  {7, 17},  {9, 31},
        {9, 33},  {9, 34},  {10, 34}, {14, 34}, {15, 33}, {15, 34}, {16, 33},
        {16, 34}, {19, 33}, {19, 34}, {20, 34}, {21, 33}, {21, 34}, {23, 33},
        {23, 34}, {24, 26}, {24, 28}, {24, 30}, {24, 33}, {24, 34}, {25, 26},
        {25, 28}, {25, 32}, {26, 32}, {27, 30}, {27, 34}, {28, 34}, {29, 32},
        {29, 34}, {30, 33}, {30, 34}, {31, 33}, {31, 34}, {32, 33}, {32, 34},
        {33, 34}};
    Graph g(34);
    for (const auto& e : edges) g.set_edge(e[0] - 1, e[1] - 1, true);
    return g;
}

const std::vector<int>& karate_factions() {
    static const std::vector<int> factions = {
        0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 1, 0,
        0, 1, 0, 1, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1};
    return factions;
}

}  // namespace blockggm

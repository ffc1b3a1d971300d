#include "lever/matrix_io.hpp"

#include "lever/error.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <vector>

namespace lever {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_field(std::string_view field, std::size_t line_no) {
    field = trim(field);
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
        throw Error(ErrorCode::MalformedInput,
                    "line " + std::to_string(line_no) + ": cannot parse '" + std::string(field) + "'");
    }
    return value;
}

} // namespace

std::string format_double(double value) {
    char buf[32];
    const int len = std::snprintf(buf, sizeof buf, "%.17g", value);
    return std::string(buf, static_cast<std::size_t>(len));
}

DenseMatrix read_matrix_csv(std::istream& in) {
    std::vector<double> entries;
    std::size_t cols = 0;
    std::size_t rows = 0;
    std::size_t line_no = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view view = trim(line);
        if (view.empty()) continue;
        std::size_t count = 0;
        std::size_t start = 0;
        while (true) {
            const auto comma = view.find(',', start);
            const auto field = view.substr(start, comma == std::string_view::npos ? view.npos : comma - start);
            entries.push_back(parse_field(field, line_no));
            ++count;
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (rows == 0) {
            cols = count;
        } else if (count != cols) {
            throw Error(ErrorCode::MalformedInput,
                        "line " + std::to_string(line_no) + ": expected " + std::to_string(cols) +
                            " fields, got " + std::to_string(count));
        }
        ++rows;
    }
    if (rows == 0) throw Error(ErrorCode::MalformedInput, "no matrix rows found");
    try {
        return DenseMatrix(rows, cols, entries);
    } catch (const Error& e) {
        throw Error(ErrorCode::MalformedInput, e.what());
    }
}

DenseMatrix read_matrix_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::MalformedInput, "cannot open " + path.string());
    return read_matrix_csv(in);
}

void write_matrix_csv(std::ostream& out, const Matrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j > 0) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

void write_matrix_file(const std::filesystem::path& path, const DenseMatrix& m) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
    write_matrix_csv(out, m);
}

} // namespace lever

#include "simsr/csv.hpp"

#include "simsr/errors.hpp"

#include <cstdio>
#include <sstream>

namespace simsr {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns)
    : out_(path), n_cols_(columns.size()), path_(path) {
    if (!out_) throw IoError("csv: cannot open " + path + " for writing");
    if (columns.empty()) throw ValidationError("csv: need at least one column");
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out_ << ',';
        out_ << columns[i];
    }
    out_ << '\n';
}

void CsvWriter::write_row(const std::vector<double>& values) {
    if (values.size() != n_cols_) throw ValidationError("csv: row width mismatch in " + path_);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out_ << ',';
        out_ << format_double(values[i]);
    }
    out_ << '\n';
    if (!out_) throw IoError("csv: write failed for " + path_);
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
    std::ofstream out(path);
    if (!out) throw IoError("csv: cannot open " + path + " for writing");
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (c) out << ',';
        out << c;
    }
    out << '\n';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) out << ',';
            out << format_double(m(r, c));
        }
        out << '\n';
    }
    if (!out) throw IoError("csv: write failed for " + path);
}

Matrix read_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError("csv: empty file " + path);
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (!rows.empty() && row.size() != rows.front().size())
            throw IoError("csv: ragged rows in " + path);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IoError("csv: no data rows in " + path);
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    return m;
}

}  // namespace simsr

#pragma once

#include "simsr/types.hpp"

#include <fstream>
#include <string>
#include <vector>

namespace simsr {

// Deterministic CSV emitter: fixed header, %.17g numbers, no timestamps,
// so identical runs produce byte-identical files.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns);

    void write_row(const std::vector<double>& values);

  private:
    std::ofstream out_;
    std::size_t n_cols_;
    std::string path_;
};

std::string format_double(double v);  // %.17g

// Header row of column indices, then the matrix rows.
void write_matrix_csv(const std::string& path, const Matrix& m);
Matrix read_matrix_csv(const std::string& path);

}  // namespace simsr

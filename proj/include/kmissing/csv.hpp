#ifndef KMISSING_CSV_HPP
#define KMISSING_CSV_HPP

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "kmissing/model.hpp"

namespace kmissing {

/// Malformed or unreadable CSV input.
class CsvError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Headerless CSV, one row per observation. Doubles are written in shortest
// round-trip form so a write/read cycle is lossless.

DataMatrix read_data_csv(std::istream& in);
DataMatrix read_data_csv(const std::filesystem::path& path);
MaskMatrix read_mask_csv(std::istream& in);
MaskMatrix read_mask_csv(const std::filesystem::path& path);
CenterMatrix read_centers_csv(const std::filesystem::path& path);

void write_matrix_csv(std::ostream& out, const MatrixView& m);
void write_matrix_csv(const std::filesystem::path& path, const MatrixView& m);
void write_mask_csv(const std::filesystem::path& path, const MaskMatrix& r);
void write_labels_csv(const std::filesystem::path& path, const std::vector<int>& labels);

}  // namespace kmissing

#endif  // KMISSING_CSV_HPP

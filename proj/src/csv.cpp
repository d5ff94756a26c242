#include "kmissing/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include <fmt/format.h>

namespace kmissing {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

struct Table {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;
};

Table read_table(std::istream& in) {
    Table t;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::size_t fields = 0;
        std::string_view rest(line);
        while (true) {
            const auto comma = rest.find(',');
            const auto cell = trim(rest.substr(0, comma));
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
                throw CsvError(fmt::format("line {}: cannot parse '{}' as a number", line_no, cell));
            }
            t.values.push_back(v);
            ++fields;
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (t.rows == 0) {
            t.cols = fields;
        } else if (fields != t.cols) {
            throw CsvError(fmt::format("line {}: expected {} fields, found {}", line_no, t.cols, fields));
        }
        ++t.rows;
    }
    return t;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw CsvError(fmt::format("cannot open '{}'", path.string()));
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw CsvError(fmt::format("cannot write '{}'", path.string()));
    return out;
}

}  // namespace

DataMatrix read_data_csv(std::istream& in) {
    auto t = read_table(in);
    if (t.rows == 0) throw CsvError("data CSV has no rows");
    try {
        return DataMatrix(t.rows, t.cols, std::move(t.values));
    } catch (const std::invalid_argument& e) {
        throw CsvError(e.what());
    }
}

DataMatrix read_data_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_data_csv(in);
}

MaskMatrix read_mask_csv(std::istream& in) {
    auto t = read_table(in);
    if (t.rows == 0) throw CsvError("mask CSV has no rows");
    std::vector<std::uint8_t> bits;
    bits.reserve(t.values.size());
    for (double v : t.values) {
        if (v != 0.0 && v != 1.0) throw CsvError(fmt::format("mask entry {} is not 0 or 1", v));
        bits.push_back(v == 1.0 ? 1 : 0);
    }
    return MaskMatrix(t.rows, t.cols, std::move(bits));
}

MaskMatrix read_mask_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_mask_csv(in);
}

CenterMatrix read_centers_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    auto t = read_table(in);
    if (t.rows == 0) throw CsvError(fmt::format("'{}' has no rows", path.string()));
    try {
        return CenterMatrix(t.rows, t.cols, std::move(t.values));
    } catch (const std::invalid_argument& e) {
        throw CsvError(e.what());
    }
}

void write_matrix_csv(std::ostream& out, const MatrixView& m) {
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j) {
            if (j) out << ',';
            out << fmt::format("{}", m(i, j));
        }
        out << '\n';
    }
}

void write_matrix_csv(const std::filesystem::path& path, const MatrixView& m) {
    auto out = open_out(path);
    write_matrix_csv(out, m);
}

void write_mask_csv(const std::filesystem::path& path, const MaskMatrix& r) {
    auto out = open_out(path);
    for (std::size_t i = 0; i < r.rows(); ++i) {
        for (std::size_t j = 0; j < r.cols(); ++j) {
            if (j) out << ',';
            out << (r(i, j) ? '1' : '0');
        }
        out << '\n';
    }
}

void write_labels_csv(const std::filesystem::path& path, const std::vector<int>& labels) {
    auto out = open_out(path);
    for (int l : labels) out << l << '\n';
}

}  // namespace kmissing

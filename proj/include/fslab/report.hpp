#ifndef FSLAB_REPORT_HPP
#define FSLAB_REPORT_HPP

#include "fslab/common.hpp"
#include "fslab/nonlocal_form.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace fslab {

/// CSV table with a fixed column order, serialized with round-trip formatting
/// so identical runs produce byte-identical artifacts.
class CsvTable {
  public:
    explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void add_row(const std::vector<double>& row) {
        if (row.size() != columns_.size())
            throw NumericalError("csv: row width does not match the header");
        rows_.push_back(row);
    }

    std::string serialize() const {
        std::string out;
        for (std::size_t c = 0; c < columns_.size(); ++c) {
            out += columns_[c];
            out += c + 1 < columns_.size() ? ',' : '\n';
        }
        char buf[40];
        for (const auto& row : rows_) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                std::snprintf(buf, sizeof buf, "%.17g", row[c]);
                out += buf;
                out += c + 1 < row.size() ? ',' : '\n';
            }
        }
        return out;
    }

  private:
    std::vector<std::string> columns_;
    std::vector<std::vector<double>> rows_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw NumericalError("report: cannot write '" + path.string() + "'");
    out << text;
}

/// Binary dump of the assembled form matrix for external verification:
/// header uint32 d, float64 alpha, uint64 N, then N*N row-major float64 entries.
inline void dump_form(const NonlocalForm& form, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw NumericalError("report: cannot write '" + path.string() + "'");
    const std::uint32_t d = std::uint32_t(form.grid.dim);
    const double alpha = form.alpha;
    const std::uint64_t n = std::uint64_t(form.grid.size());
    out.write(reinterpret_cast<const char*>(&d), sizeof d);
    out.write(reinterpret_cast<const char*>(&alpha), sizeof alpha);
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    for (Index i = 0; i < form.grid.size(); ++i)
        for (Index j = 0; j < form.grid.size(); ++j) {
            const double v = form.form_matrix(i, j);
            out.write(reinterpret_cast<const char*>(&v), sizeof v);
        }
}

}  // namespace fslab

#endif

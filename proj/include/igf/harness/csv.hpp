#ifndef IGF_HARNESS_CSV_HPP
#define IGF_HARNESS_CSV_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace igf::harness {

using Cell = std::variant<double, std::int64_t, std::string>;

/// Column-labelled table with a key=value metadata header.  Numeric cells are
/// rendered with the shortest round-trip decimal representation, locale
/// independent, so identical inputs always produce identical bytes.
struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> cells);
};

using Metadata = std::vector<std::pair<std::string, std::string>>;

std::string format_double(double v);

/// Serialised form: '# key=value' lines, then the header row, then data rows.
std::string render_csv(const ResultTable& table, const Metadata& metadata);

void write_csv(const std::filesystem::path& path, const ResultTable& table,
               const Metadata& metadata);

}  // namespace igf::harness

#endif

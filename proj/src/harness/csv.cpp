#include "igf/harness/csv.hpp"

#include <charconv>
#include <fstream>

#include "igf/errors.hpp"

namespace igf::harness {

void ResultTable::add_row(std::vector<Cell> cells) {
    if (cells.size() != columns.size()) {
        throw InvalidInputError("ResultTable: row width does not match the column count");
    }
    rows.push_back(std::move(cells));
}

std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::string format_cell(const Cell& cell) {
    if (const auto* d = std::get_if<double>(&cell)) return format_double(*d);
    if (const auto* i = std::get_if<std::int64_t>(&cell)) {
        char buf[24];
        const auto res = std::to_chars(buf, buf + sizeof(buf), *i);
        return std::string(buf, res.ptr);
    }
    const auto& s = std::get<std::string>(cell);
    if (s.find_first_of(",\n\"") != std::string::npos) {
        throw InvalidInputError("ResultTable: string cells must not contain separators");
    }
    return s;
}

}  // namespace

std::string render_csv(const ResultTable& table, const Metadata& metadata) {
    std::string out;
    for (const auto& [key, value] : metadata) {
        out += "# " + key + "=" + value + "\n";
    }
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) out += ',';
        out += table.columns[c];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += format_cell(row[c]);
        }
        out += '\n';
    }
    return out;
}

void write_csv(const std::filesystem::path& path, const ResultTable& table,
               const Metadata& metadata) {
    std::ofstream stream(path, std::ios::binary);
    if (!stream) throw IoError("write_csv: cannot open " + path.string());
    const std::string body = render_csv(table, metadata);
    stream.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!stream) throw IoError("write_csv: write failed for " + path.string());
}

}  // namespace igf::harness

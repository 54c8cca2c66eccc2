#include "tpjc/table_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace tpjc {

void Table::add_row(std::vector<std::string> cells) {
    if (cells.size() != columns.size())
        throw IoError("table row has " + std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(columns.size()));
    rows.push_back(std::move(cells));
}

std::string format_double(double x) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc()) throw IoError("double formatting failed");
    return std::string(buf, ptr);
}

namespace {

std::string csv_escape(const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
    std::string quoted = "\"";
    for (char c : cell) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    return quoted + "\"";
}

}  // namespace

std::string render_csv(const Table& table) {
    std::ostringstream out;
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        out << (c ? "," : "") << csv_escape(table.columns[c]);
    out << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << csv_escape(row[c]);
        out << "\n";
    }
    return out.str();
}

void write_table(const Table& table, const std::string& path) {
    write_text_file(path, render_csv(table));
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw IoError("write failed for '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace tpjc

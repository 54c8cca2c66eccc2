#pragma once

#include <string>
#include <vector>

#include "tpjc/errors.hpp"

namespace tpjc {

// Plot-ready comma-separated table. Column names carry the units
// (e.g. "eta_per_kappa"); doubles are written round-trip exact.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> cells);
};

std::string format_double(double x);  // shortest round-trip representation

std::string render_csv(const Table& table);
void write_table(const Table& table, const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace tpjc

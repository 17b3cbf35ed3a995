// csv.hpp — Deterministic CSV emission: fixed headers, 12 significant digits,
// UTF-8, LF line endings.

#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace qbatt::cli {

// %.12g rendering shared by CSV, summaries, and config echoes.
std::string format_g12(double value);

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);

    void row(const std::vector<std::string>& cells);

    static std::string cell(double value) { return format_g12(value); }
    static std::string cell(int value) { return std::to_string(value); }

private:
    std::ofstream out_;
    std::size_t columns_;
};

} // namespace qbatt::cli

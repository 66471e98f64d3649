#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "lamptf/error.hpp"

namespace lamptf {

/// Round-trip-safe decimal rendering (17 significant digits, '.' decimal point).
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string fmt_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

/// Comma-separated table with a mandatory header row and LF line endings.
class CsvTable {
  public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(const std::vector<std::string>& cells) {
        if (cells.size() != header_.size()) throw DomainError("CsvTable: row width mismatch");
        rows_.push_back(cells);
    }

    void add_numeric_row(const std::vector<double>& cells) {
        std::vector<std::string> r;
        r.reserve(cells.size());
        for (double c : cells) r.push_back(fmt17(c));
        add_row(r);
    }

    std::string str() const {
        std::string out = join(header_);
        for (const auto& r : rows_) out += join(r);
        return out;
    }

    void write(const std::string& path) const { write_text_file(path, str()); }

    static void write_text_file(const std::string& path, const std::string& content) {
        std::ofstream os(path, std::ios::binary); // LF endings regardless of platform
        if (!os) throw Error("cannot open for writing: " + path);
        os << content;
        if (!os) throw Error("write failed: " + path);
    }

  private:
    static std::string join(const std::vector<std::string>& cells) {
        std::string line;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) line += ',';
            line += cells[i];
        }
        line += '\n';
        return line;
    }

    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

} // namespace lamptf

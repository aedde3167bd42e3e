#include "csv.hpp"

#include <robin/errors.hpp>

#include <cstdio>
#include <sstream>

namespace robin::cli {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt(int v) { return std::to_string(v); }

std::string fmt(std::uint64_t v) { return std::to_string(v); }

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path, std::ios::trunc), n_cols_(header.size()), path_(path.string()) {
    if (!out_) throw std::runtime_error("cannot open " + path_ + " for writing");
    write_line(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != n_cols_)
        throw std::runtime_error(path_ + ": row width does not match the header");
    write_line(cells);
}

void CsvWriter::write_line(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        out_ << cells[i];
    }
    out_ << '\n';
    if (!out_) throw std::runtime_error("write failed on " + path_);
}

int CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open " + path.string());

    CsvTable t;
    t.path = path.string();
    std::string line;
    int lineno = 0;
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ss(s);
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!s.empty() && s.back() == ',') cells.emplace_back();
        return cells;
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (t.header.empty()) {
            t.header = split(line);
            continue;
        }
        const std::vector<std::string> cells = split(line);
        if (cells.size() != t.header.size())
            throw InvalidArgument(t.path + ":" + std::to_string(lineno) +
                                  ": expected " + std::to_string(t.header.size()) +
                                  " columns, got " + std::to_string(cells.size()));
        std::vector<double> vals;
        vals.reserve(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            try {
                std::size_t pos = 0;
                const double v = std::stod(cells[c], &pos);
                while (pos < cells[c].size() && std::isspace(static_cast<unsigned char>(cells[c][pos]))) ++pos;
                if (pos != cells[c].size()) throw std::invalid_argument("trailing junk");
                vals.push_back(v);
            } catch (const std::exception&) {
                throw InvalidArgument(t.path + ":" + std::to_string(lineno) + ": column " +
                                      t.header[c] + ": not a number: '" + cells[c] + "'");
            }
        }
        t.rows.push_back(std::move(vals));
        t.row_lines.push_back(lineno);
    }
    if (t.header.empty()) throw InvalidArgument(t.path + ": empty file");
    return t;
}

}  // namespace robin::cli

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace robin::cli {

/// 17 significant digits, round-trip exact for doubles.
std::string fmt(double v);
std::string fmt(int v);
std::string fmt(std::uint64_t v);

/// One header line, comma separation, '\n' endings, no quoting. Every row
/// must match the header width; cells may be empty.
class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
    void row(const std::vector<std::string>& cells);

  private:
    std::ofstream out_;
    std::size_t n_cols_;
    std::string path_;

    void write_line(const std::vector<std::string>& cells);
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::vector<int> row_lines;  // source line per row, for error messages
    std::string path;

    int column(const std::string& name) const;  // -1 when absent
};

/// Strict numeric CSV reader for input data files; every cell must parse as a
/// double. Errors carry file and line.
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace robin::cli

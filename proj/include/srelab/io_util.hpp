#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace srelab::io {

// 17 significant digits; numeric payloads in CSV files are byte-stable
std::string fmt17(double v);

// Buffered CSV writer with atomic publication (temp file + rename).
class CsvWriter {
  public:
    CsvWriter(std::filesystem::path path, std::vector<std::string> columns);
    void add_row(const std::vector<double>& values);
    void add_row_raw(const std::vector<std::string>& cells);
    // writes <path>.tmp-<pid> and renames onto the target
    void commit();
    const std::filesystem::path& path() const { return path_; }

  private:
    std::filesystem::path path_;
    std::vector<std::string> columns_;
    std::vector<std::string> rows_;
};

void write_text_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace srelab::io

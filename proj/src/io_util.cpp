#include "srelab/io_util.hpp"

#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace srelab::io {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(std::filesystem::path path, std::vector<std::string> columns)
    : path_(std::move(path)), columns_(std::move(columns)) {}

void CsvWriter::add_row(const std::vector<double>& values) {
    if (values.size() != columns_.size())
        throw std::invalid_argument("CsvWriter: row width mismatch");
    std::string line;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) line += ',';
        line += fmt17(values[i]);
    }
    rows_.push_back(std::move(line));
}

void CsvWriter::add_row_raw(const std::vector<std::string>& cells) {
    if (cells.size() != columns_.size())
        throw std::invalid_argument("CsvWriter: row width mismatch");
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) line += ',';
        line += cells[i];
    }
    rows_.push_back(std::move(line));
}

void CsvWriter::commit() {
    std::ostringstream out;
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (i) out << ',';
        out << columns_[i];
    }
    out << '\n';
    for (const auto& r : rows_) out << r << '\n';
    write_text_atomic(path_, out.str());
}

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp-" + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        f << content;
        if (!f.good()) throw std::runtime_error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace srelab::io

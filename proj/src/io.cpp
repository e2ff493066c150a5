#include "qreset/io.hpp"

#include <cstdio>
#include <stdexcept>

namespace qreset::io {

std::string format_full(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

CsvWriter::CsvWriter(const std::filesystem::path& path) : path_(path) {
    if (!path.parent_path().empty()) std::filesystem::create_directories(path.parent_path());
    out_.open(path);
    if (!out_) throw std::runtime_error("cannot open for writing: " + path.string());
}

void CsvWriter::comment(const std::string& line) { out_ << "# " << line << "\n"; }

void CsvWriter::columns(std::initializer_list<std::string> names) {
    out_ << "#";
    bool first = true;
    for (const auto& name : names) {
        out_ << (first ? " " : ",") << name;
        first = false;
    }
    out_ << "\n";
}

void CsvWriter::row(std::span<const double> values) {
    bool first = true;
    for (const double v : values) {
        if (!first) out_ << ",";
        out_ << format_full(v);
        first = false;
    }
    out_ << "\n";
    if (!out_) throw std::runtime_error("write failed: " + path_.string());
}

void CsvWriter::row(std::initializer_list<double> values) {
    row(std::span<const double>(values.begin(), values.size()));
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    if (!path.parent_path().empty()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << j.dump(2) << "\n";
}

nlohmann::json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    return nlohmann::json::parse(in);
}

} // namespace qreset::io

// io.hpp — CSV emission with full-precision values and provenance headers

#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <span>
#include <string>

#include <json.hpp>

namespace qreset::io {

// shortest representation that round-trips a double (up to 17 significant digits)
std::string format_full(double value);

// Comma-separated files: '#'-prefixed header lines (provenance plus the
// column line), then plain data rows at full double precision.
class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path);

    void comment(const std::string& line);
    void columns(std::initializer_list<std::string> names);
    void row(std::span<const double> values);
    void row(std::initializer_list<double> values);

private:
    std::ofstream out_;
    std::filesystem::path path_;
};

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

} // namespace qreset::io

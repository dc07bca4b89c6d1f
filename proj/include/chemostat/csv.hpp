#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace chemostat::csv {

// Shortest round-trip decimal form, '.' decimal separator, locale-free.
std::string field(double v);
std::string field(std::uint64_t v);
std::string field(long long v);

// Minimal RFC-4180-subset writer: header row, '\n' line ends, no quoting
// (fields never contain commas).
class Table {
public:
    Table(std::filesystem::path file, const std::vector<std::string>& columns);
    void add_row(const std::vector<std::string>& fields);
    void close();
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t columns_ = 0;
};

}  // namespace chemostat::csv

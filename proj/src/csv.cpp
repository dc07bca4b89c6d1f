#include "chemostat/csv.hpp"

#include <charconv>
#include <stdexcept>

namespace chemostat::csv {

std::string field(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string field(std::uint64_t v) {
    char buf[24];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string field(long long v) {
    char buf[24];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

Table::Table(std::filesystem::path file, const std::vector<std::string>& columns)
    : path_(std::move(file)), columns_(columns.size()) {
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    out_.open(path_, std::ios::binary | std::ios::trunc);
    if (!out_) throw std::runtime_error("cannot open " + path_.string() + " for writing");
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out_ << ',';
        out_ << columns[i];
    }
    out_ << '\n';
}

void Table::add_row(const std::vector<std::string>& fields) {
    if (fields.size() != columns_)
        throw std::logic_error("csv row width mismatch for " + path_.string());
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << ',';
        out_ << fields[i];
    }
    out_ << '\n';
}

void Table::close() {
    if (out_.is_open()) {
        out_.flush();
        out_.close();
    }
}

}  // namespace chemostat::csv

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace chemostat {

inline std::vector<double> linspace(double lo, double hi, std::size_t count) {
    std::vector<double> v;
    v.reserve(count);
    if (count == 0) return v;
    if (count == 1) {
        v.push_back(lo);
        return v;
    }
    const double step = (hi - lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i + 1 < count; ++i) v.push_back(lo + step * static_cast<double>(i));
    v.push_back(hi);
    return v;
}

inline double sup_distance(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    const std::size_t n = a.size() < b.size() ? a.size() : b.size();
    for (std::size_t i = 0; i < n; ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

inline double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double c : v) s += c * c;
    return std::sqrt(s);
}

inline double norm_inf(std::span<const double> v) {
    double s = 0.0;
    for (double c : v) s = std::max(s, std::abs(c));
    return s;
}

}  // namespace chemostat

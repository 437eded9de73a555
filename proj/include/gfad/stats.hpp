#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace gfad {

/// Lower empirical quantile: the smallest sample x with F_n(x) >= q.
inline double empirical_quantile(std::span<const double> values, double q) {
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    const auto n = static_cast<double>(v.size());
    auto idx = static_cast<long>(std::ceil(q * n - 1e-9)) - 1;
    idx = std::clamp(idx, 0L, static_cast<long>(v.size()) - 1);
    return v[static_cast<std::size_t>(idx)];
}

inline double dbm_to_watts(double dbm) { return std::pow(10.0, dbm / 10.0) / 1000.0; }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w * 1000.0); }
inline double to_db(double linear) { return 10.0 * std::log10(linear); }

} // namespace gfad

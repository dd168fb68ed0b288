#pragma once

#include <stdexcept>
#include <vector>

namespace tranche {

inline constexpr int max_hermite_degree = 64;

/// Probabilists' Hermite polynomial He_n(x), by the three-term recurrence
/// He_{n+1}(x) = x He_n(x) - n He_{n-1}(x), He_0 = 1, He_1 = x.
inline double hermite(int n, double x) {
    if (n < 0 || n > max_hermite_degree)
        throw std::invalid_argument("hermite: degree out of range [0,64]");
    if (n == 0)
        return 1.0;
    double prev = 1.0;
    double cur = x;
    for (int k = 1; k < n; ++k) {
        const double next = x * cur - static_cast<double>(k) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

/// Monomial coefficients of He_0..He_n; row k lists He_k's coefficients with
/// the constant term first. Entries are integers, exact in double for the
/// degrees allowed here.
inline std::vector<std::vector<double>> hermite_coefficient_rows(int n) {
    if (n < 0 || n > 16)
        throw std::invalid_argument("hermite_coefficient_rows: degree out of range [0,16]");
    std::vector<std::vector<double>> rows;
    rows.reserve(static_cast<std::size_t>(n) + 1);
    rows.push_back({1.0});
    if (n >= 1)
        rows.push_back({0.0, 1.0});
    for (int k = 1; k < n; ++k) {
        std::vector<double> next(static_cast<std::size_t>(k) + 2, 0.0);
        for (std::size_t j = 0; j < rows[static_cast<std::size_t>(k)].size(); ++j)
            next[j + 1] += rows[static_cast<std::size_t>(k)][j];
        for (std::size_t j = 0; j < rows[static_cast<std::size_t>(k) - 1].size(); ++j)
            next[j] -= static_cast<double>(k) * rows[static_cast<std::size_t>(k) - 1][j];
        rows.push_back(std::move(next));
    }
    return rows;
}

} // namespace tranche

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tranche/hermite.hpp"
#include "tranche/moments.hpp"
#include "tranche/normal.hpp"
#include "tranche/portfolio.hpp"

namespace tranche {

/// Truncation orders above this are rejected: the series is known to degrade
/// rather than improve once pushed past low orders.
inline constexpr int max_truncation_order = 12;

/// Scenario is deterministic (zero conditional variance), so no expansion exists.
class DegenerateScenarioError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Truncated Hermite-series expansion of one conditional loss distribution:
/// density (1/std) sum_n coeffs[n] He_n(z) pdf(z), z = (x - mean)/std.
struct GCExpansion {
    double mean = 0.0;
    double std = 1.0;
    std::vector<double> coeffs; // c_0..c_N

    int order() const { return static_cast<int>(coeffs.size()) - 1; }
};

/// Expansion coefficients c_n = E[He_n(L~)]/n! of the standardized loss,
/// evaluated from standardized central moments through the Hermite monomial
/// table. c_0 = 1 and c_1 = c_2 = 0 hold exactly by standardization.
inline GCExpansion gram_charlier_coefficients(const ConditionalMoments& moments, int order) {
    if (order < 1 || order > max_truncation_order)
        throw std::invalid_argument("gram_charlier_coefficients: order out of range [1,12]");
    if (moments.order() < order)
        throw std::invalid_argument("gram_charlier_coefficients: moments available only to order " +
                                    std::to_string(moments.order()));
    if (!(moments.variance > 0.0))
        throw DegenerateScenarioError("gram_charlier_coefficients: zero conditional variance");

    GCExpansion expansion;
    expansion.mean = moments.mean;
    expansion.std = std::sqrt(moments.variance);
    expansion.coeffs.assign(static_cast<std::size_t>(order) + 1, 0.0);
    expansion.coeffs[0] = 1.0;

    if (order >= 3) {
        // standardized central moments mu_j / sigma^j
        std::vector<double> standardized(static_cast<std::size_t>(order) + 1, 0.0);
        standardized[0] = 1.0;
        standardized[2] = 1.0;
        double sigma_pow = expansion.std * expansion.std;
        for (int j = 3; j <= order; ++j) {
            sigma_pow *= expansion.std;
            standardized[static_cast<std::size_t>(j)] =
                moments.central_moment(j) / sigma_pow;
        }
        const auto rows = hermite_coefficient_rows(order);
        double factorial = 2.0;
        for (int n = 3; n <= order; ++n) {
            factorial *= n;
            double expectation = 0.0;
            for (std::size_t k = 0; k < rows[static_cast<std::size_t>(n)].size(); ++k)
                expectation += rows[static_cast<std::size_t>(n)][k] * standardized[k];
            expansion.coeffs[static_cast<std::size_t>(n)] = expectation / factorial;
        }
    }
    return expansion;
}

/// Value of the truncated density at x. May be negative: the truncation is
/// a signed density whose moments up to the expansion order are exact.
inline double truncated_density(const GCExpansion& expansion, double x) {
    const double z = (x - expansion.mean) / expansion.std;
    const double pdf = std_normal_pdf(z);
    if (pdf == 0.0)
        return 0.0;
    double sum = expansion.coeffs[0];
    double prev = 1.0;
    double cur = z;
    for (int n = 1; n <= expansion.order(); ++n) {
        sum += expansion.coeffs[static_cast<std::size_t>(n)] * cur;
        const double next = z * cur - static_cast<double>(n) * prev;
        prev = cur;
        cur = next;
    }
    return sum * pdf / expansion.std;
}

} // namespace tranche

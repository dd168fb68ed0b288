#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "tranche/portfolio.hpp"

namespace tranche {

inline constexpr int max_moment_order = 16;

namespace detail {

/// Binomial coefficients C(n,k) for n <= 16; all values integer-exact in double.
inline const std::array<std::array<double, max_moment_order + 1>, max_moment_order + 1>&
binomial_table() {
    static const auto table = [] {
        std::array<std::array<double, max_moment_order + 1>, max_moment_order + 1> t{};
        for (int n = 0; n <= max_moment_order; ++n) {
            t[n][0] = 1.0;
            for (int k = 1; k <= n; ++k)
                t[n][k] = t[n - 1][k - 1] + (k <= n - 1 ? t[n - 1][k] : 0.0);
        }
        return t;
    }();
    return table;
}

/// Adds the cumulants of v*Bernoulli(p) into acc[1..order] (acc[0] untouched).
/// Raw moments of v*I are v^j p; cumulants follow from the raw-moment
/// recursion kappa_n = m_n - sum_{j<n} C(n-1,j-1) kappa_j m_{n-j}.
inline void accumulate_scaled_bernoulli_cumulants(double value, double p, int order,
                                                  std::span<double> acc) {
    const auto& binom = binomial_table();
    std::array<double, max_moment_order + 1> raw{};
    std::array<double, max_moment_order + 1> kappa{};
    raw[0] = 1.0;
    double vpow = 1.0;
    for (int j = 1; j <= order; ++j) {
        vpow *= value;
        raw[j] = vpow * p;
    }
    for (int n = 1; n <= order; ++n) {
        double k = raw[n];
        for (int j = 1; j < n; ++j)
            k -= binom[n - 1][j - 1] * kappa[j] * raw[n - j];
        kappa[n] = k;
        acc[static_cast<std::size_t>(n)] += k;
    }
}

} // namespace detail

/// Cumulants kappa_1..kappa_order of the scaled Bernoulli loss v*I with
/// P(I=1) = p. Index 0 of the result is unused and set to zero.
inline std::vector<double> scaled_bernoulli_cumulants(double value, double p, int order) {
    if (order < 1 || order > max_moment_order)
        throw std::invalid_argument("scaled_bernoulli_cumulants: order out of range [1,16]");
    std::vector<double> kappa(static_cast<std::size_t>(order) + 1, 0.0);
    detail::accumulate_scaled_bernoulli_cumulants(value, p, order, kappa);
    return kappa;
}

/// Central moments mu_0..mu_K from cumulants kappa[1..K] (kappa[0] ignored):
/// the centered-variable recursion mu_n = sum_{j=0}^{n-2} C(n-1,j) kappa_{n-j} mu_j.
inline std::vector<double> central_moments_from_cumulants(std::span<const double> kappa) {
    const int order = static_cast<int>(kappa.size()) - 1;
    if (order < 2 || order > max_moment_order)
        throw std::invalid_argument("central_moments_from_cumulants: order out of range [2,16]");
    const auto& binom = detail::binomial_table();
    std::vector<double> mu(static_cast<std::size_t>(order) + 1, 0.0);
    mu[0] = 1.0;
    mu[1] = 0.0;
    for (int n = 2; n <= order; ++n) {
        double m = 0.0;
        for (int j = 0; j <= n - 2; ++j)
            m += binom[n - 1][j] * kappa[static_cast<std::size_t>(n - j)] *
                 mu[static_cast<std::size_t>(j)];
        mu[static_cast<std::size_t>(n)] = m;
    }
    return mu;
}

namespace detail {

/// Core of conditional_central_moments for a prepared portfolio and
/// precomputed conditional default probabilities.
inline ConditionalMoments conditional_central_moments_from_probs(std::span<const double> lgds,
                                                                 std::span<const double> probs,
                                                                 int order) {
    std::vector<double> kappa(static_cast<std::size_t>(order) + 1, 0.0);
    for (std::size_t i = 0; i < lgds.size(); ++i)
        accumulate_scaled_bernoulli_cumulants(lgds[i], probs[i], order, kappa);
    ConditionalMoments moments;
    moments.mean = kappa[1];
    moments.central = central_moments_from_cumulants(kappa);
    moments.variance = moments.central[2];
    return moments;
}

} // namespace detail

/// Central moments mu_2..mu_K of the conditional portfolio loss: per-loan
/// scaled-Bernoulli cumulants are summed (conditional independence), then
/// converted back to central moments.
inline ConditionalMoments conditional_central_moments(const Portfolio& portfolio,
                                                      const FactorDraw& factors, int order) {
    if (order < 2 || order > max_moment_order)
        throw std::invalid_argument("conditional_central_moments: order out of range [2,16]");
    const PreparedPortfolio prepared(portfolio);
    if (factors.values.size() != prepared.factor_count())
        throw std::invalid_argument("conditional_central_moments: factor dimension mismatch");
    std::vector<double> probs(prepared.size());
    prepared.conditional_default_probs(factors.values, probs);
    return detail::conditional_central_moments_from_probs(prepared.lgds(), probs, order);
}

} // namespace tranche

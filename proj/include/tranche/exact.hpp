#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "tranche/portfolio.hpp"
#include "tranche/quadrature.hpp"
#include "tranche/tranche_profile.hpp"

namespace tranche {

inline constexpr std::size_t max_enumeration_size = 20;
inline constexpr std::size_t max_convolution_buckets = 10'000'000;

namespace detail {

/// Exact conditional expectation of f(L) over all default patterns by
/// depth-first recursion. Each leaf's probability is a fresh product of n
/// factors and the tree summation is pairwise, so no per-pattern drift
/// accumulates across the 2^n terms.
template <class F>
double enumerate_patterns(std::span<const double> lgds, std::span<const double> probs,
                          std::size_t i, double prob, double loss, F&& f) {
    if (i == lgds.size())
        return prob * f(loss);
    return enumerate_patterns(lgds, probs, i + 1, prob * (1.0 - probs[i]), loss, f) +
           enumerate_patterns(lgds, probs, i + 1, prob * probs[i], loss + lgds[i], f);
}

} // namespace detail

/// Exact expected tranche loss by enumerating all 2^n default patterns at
/// every quadrature node. Exact up to quadrature error; guarded to n <= 20.
inline double exact_tranche_loss_enumeration(const Portfolio& portfolio, const TrancheSpec& t,
                                             const QuadratureRule& quad) {
    const PreparedPortfolio prepared(portfolio);
    if (prepared.size() > max_enumeration_size)
        throw std::invalid_argument("exact_tranche_loss_enumeration: portfolio size above 20");
    if (quad.dim != prepared.factor_count())
        throw std::invalid_argument("exact_tranche_loss_enumeration: quadrature dimension mismatch");

    std::vector<double> probs(prepared.size());
    double total = 0.0;
    for (std::size_t j = 0; j < quad.size(); ++j) {
        prepared.conditional_default_probs(quad.node(j), probs);
        total += quad.weights[j] *
                 detail::enumerate_patterns(prepared.lgds(), probs, 0, 1.0, 0.0,
                                            [&](double loss) { return tranche_profile(t, loss); });
    }
    return total;
}

/// Conditional loss distribution on a uniform grid: each lgd is rounded to
/// the nearest grid multiple (ties to even), shifting the total loss by at
/// most rounding_bound = n * grid_step / 2.
struct DiscreteLossDistribution {
    double grid_step = 0.0;
    std::vector<double> probabilities; // index g -> loss g * grid_step
    double rounding_bound = 0.0;

    double total_mass() const {
        double mass = 0.0;
        for (const double p : probabilities)
            mass += p;
        return mass;
    }

    double mean() const {
        double m = 0.0;
        for (std::size_t g = 0; g < probabilities.size(); ++g)
            m += probabilities[g] * (static_cast<double>(g) * grid_step);
        return m;
    }

    double expectation(const std::function<double(double)>& f) const {
        double e = 0.0;
        for (std::size_t g = 0; g < probabilities.size(); ++g)
            e += probabilities[g] * f(static_cast<double>(g) * grid_step);
        return e;
    }

    double expected_tranche_loss(const TrancheSpec& t) const {
        return expectation([&](double loss) { return tranche_profile(t, loss); });
    }
};

/// Exact conditional loss distribution for one factor scenario by recursive
/// convolution of the per-loan two-point distributions on the rounded grid.
inline DiscreteLossDistribution exact_conditional_distribution_convolution(
    const Portfolio& portfolio, const FactorDraw& factors, double grid_step) {
    if (!(grid_step > 0.0))
        throw std::invalid_argument("exact_conditional_distribution_convolution: grid_step must be positive");
    const PreparedPortfolio prepared(portfolio);
    if (factors.values.size() != prepared.factor_count())
        throw std::invalid_argument("exact_conditional_distribution_convolution: factor dimension mismatch");

    const std::size_t n = prepared.size();
    std::vector<std::size_t> steps(n);
    std::size_t total_steps = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double rounded = std::nearbyint(prepared.loan_lgd(i) / grid_step);
        steps[i] = static_cast<std::size_t>(rounded);
        total_steps += steps[i];
        if (total_steps + 1 > max_convolution_buckets)
            throw std::invalid_argument(
                "exact_conditional_distribution_convolution: grid would exceed 1e7 buckets");
    }

    DiscreteLossDistribution dist;
    dist.grid_step = grid_step;
    dist.rounding_bound = static_cast<double>(n) * grid_step / 2.0;
    dist.probabilities.assign(total_steps + 1, 0.0);
    dist.probabilities[0] = 1.0;

    std::size_t reach = 0; // highest occupied bucket so far
    for (std::size_t i = 0; i < n; ++i) {
        const double p = prepared.conditional_default_prob(i, factors.values);
        const std::size_t shift = steps[i];
        if (shift == 0)
            continue; // loan's lgd rounds to nothing on this grid
        reach += shift;
        for (std::size_t g = reach + 1; g-- > 0;) {
            const double stay = dist.probabilities[g] * (1.0 - p);
            const double jump = g >= shift ? dist.probabilities[g - shift] * p : 0.0;
            dist.probabilities[g] = stay + jump;
        }
    }
    return dist;
}

/// Convenience oracle for 20 < n: integrates the convolution distribution's
/// tranche expectation over the factor rule.
inline double convolution_tranche_loss(const Portfolio& portfolio, const TrancheSpec& t,
                                       const QuadratureRule& quad, double grid_step) {
    double total = 0.0;
    for (std::size_t j = 0; j < quad.size(); ++j) {
        FactorDraw draw;
        draw.values.assign(quad.node(j).begin(), quad.node(j).end());
        const auto dist = exact_conditional_distribution_convolution(portfolio, draw, grid_step);
        total += quad.weights[j] * dist.expected_tranche_loss(t);
    }
    return total;
}

} // namespace tranche

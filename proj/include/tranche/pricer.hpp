#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tranche/gram_charlier.hpp"
#include "tranche/moments.hpp"
#include "tranche/portfolio.hpp"
#include "tranche/quadrature.hpp"
#include "tranche/stop_loss.hpp"
#include "tranche/tranche_profile.hpp"

namespace tranche {

enum class PricingMethod { hermite, normal, mc, exact };

inline const char* to_string(PricingMethod method) {
    switch (method) {
    case PricingMethod::hermite: return "hermite";
    case PricingMethod::normal: return "normal";
    case PricingMethod::mc: return "mc";
    case PricingMethod::exact: return "exact";
    }
    return "?";
}

struct PriceResult {
    double value = 0.0;
    PricingMethod method = PricingMethod::hermite;
    int truncation_order = 0;         // 0 when not applicable
    int quad_order = 0;               // 1-d quadrature order, 0 when not applicable
    bool clamped = false;
    std::size_t nodes_evaluated = 0;  // factor scenarios visited in this call
};

/// Expected loss per tranche: for every quadrature node build the conditional
/// expansion once and evaluate each tranche's analytic inner integral, then
/// accumulate the outer sum in fixed node order. Deterministic for fixed inputs.
///
/// Degenerate nodes (zero conditional variance) contribute the deterministic
/// value tranche_profile(mean). With clamp set, final values are clamped to
/// [0,1]; conditional values are never clamped.
inline std::vector<PriceResult> expected_tranche_losses(const Portfolio& portfolio,
                                                        std::span<const TrancheSpec> tranches,
                                                        int order, const QuadratureRule& quad,
                                                        bool clamp = false) {
    if (order < 1 || order > max_truncation_order)
        throw std::invalid_argument("expected_tranche_losses: order out of range [1,12]");
    const PreparedPortfolio prepared(portfolio);
    if (quad.dim != prepared.factor_count())
        throw std::invalid_argument("expected_tranche_losses: quadrature dimension " +
                                    std::to_string(quad.dim) + " does not match factor count " +
                                    std::to_string(prepared.factor_count()));

    const int moment_order = std::max(order, 2);
    std::vector<double> probs(prepared.size());
    std::vector<double> acc(tranches.size(), 0.0);

    for (std::size_t j = 0; j < quad.size(); ++j) {
        const double weight = quad.weights[j];
        prepared.conditional_default_probs(quad.node(j), probs);
        const ConditionalMoments moments =
            detail::conditional_central_moments_from_probs(prepared.lgds(), probs, moment_order);
        if (moments.degenerate()) {
            for (std::size_t t = 0; t < tranches.size(); ++t)
                acc[t] += weight * tranche_profile(tranches[t], moments.mean);
        } else {
            const GCExpansion expansion = gram_charlier_coefficients(moments, order);
            for (std::size_t t = 0; t < tranches.size(); ++t)
                acc[t] += weight * conditional_tranche_loss(expansion, tranches[t]);
        }
    }

    std::vector<PriceResult> results(tranches.size());
    for (std::size_t t = 0; t < tranches.size(); ++t) {
        PriceResult& r = results[t];
        r.value = clamp ? std::clamp(acc[t], 0.0, 1.0) : acc[t];
        r.method = order == 1 ? PricingMethod::normal : PricingMethod::hermite;
        r.truncation_order = order;
        r.quad_order = quad.order_1d;
        r.clamped = clamp;
        r.nodes_evaluated = quad.size();
    }
    return results;
}

inline PriceResult expected_tranche_loss(const Portfolio& portfolio, const TrancheSpec& t,
                                         int order, const QuadratureRule& quad,
                                         bool clamp = false) {
    return expected_tranche_losses(portfolio, std::span<const TrancheSpec>(&t, 1), order, quad,
                                   clamp)[0];
}

/// The plain normal conditional approximation: the order-1 expansion.
inline PriceResult normal_approx_tranche_loss(const Portfolio& portfolio, const TrancheSpec& t,
                                              const QuadratureRule& quad, bool clamp = false) {
    return expected_tranche_loss(portfolio, t, 1, quad, clamp);
}

/// Unconditional expected portfolio loss, closed form: sum f_i (1-r_i) p_i.
inline double expected_portfolio_loss(const Portfolio& portfolio) {
    const PreparedPortfolio prepared(portfolio);
    double total = 0.0;
    for (std::size_t i = 0; i < prepared.size(); ++i) {
        const Loan& loan = portfolio.loans[i];
        total += prepared.loan_lgd(i) * loan.default_prob;
    }
    return total;
}

} // namespace tranche

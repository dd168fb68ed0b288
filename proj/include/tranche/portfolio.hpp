#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tranche/normal.hpp"

namespace tranche {

/// One obligor: notional fraction f, default probability p, recovery r,
/// and one loading per systematic factor.
struct Loan {
    double notional_fraction = 0.0;
    double default_prob = 0.0;
    double recovery = 0.0;
    std::vector<double> loadings;

    double loadings_norm_sq() const {
        return std::inner_product(loadings.begin(), loadings.end(), loadings.begin(), 0.0);
    }
};

struct Portfolio {
    std::vector<Loan> loans;
    std::size_t factor_count = 1;

    std::size_t size() const { return loans.size(); }
};

/// One draw of the systematic factors.
struct FactorDraw {
    std::vector<double> values;
};

/// Conditional loss moments for one factor scenario. central[j] holds the
/// j-th central moment (central[0] = 1, central[1] = 0, central[2] = variance).
struct ConditionalMoments {
    double mean = 0.0;
    double variance = 0.0;
    std::vector<double> central;

    int order() const { return static_cast<int>(central.size()) - 1; }
    double central_moment(int j) const { return central.at(static_cast<std::size_t>(j)); }
    bool degenerate() const;
};

/// Variance floor below which a scenario is treated as deterministic: the
/// standardization of the conditional loss divides by sigma^j, which turns
/// into overflow noise once sigma drops to ~1e-12.
inline constexpr double degenerate_variance_floor = 1e-24;

inline bool ConditionalMoments::degenerate() const { return variance <= degenerate_variance_floor; }

// loadings norms this close to one are rejected: the idiosyncratic scale
// sqrt(1 - |w|^2) would lose all precision
inline constexpr double max_loadings_norm_sq = 1.0 - 1e-9;
inline constexpr double notional_sum_slack = 1e-12;

/// Collects every violated invariant; an empty list means the portfolio is
/// valid. Never throws: violations are data.
inline std::vector<std::string> validate(const Portfolio& portfolio) {
    std::vector<std::string> violations;
    if (portfolio.factor_count < 1)
        violations.push_back("factor_count must be at least 1");
    double notional_sum = 0.0;
    for (std::size_t i = 0; i < portfolio.loans.size(); ++i) {
        const Loan& loan = portfolio.loans[i];
        const std::string tag = "loan " + std::to_string(i) + ": ";
        if (!(loan.notional_fraction > 0.0 && loan.notional_fraction <= 1.0))
            violations.push_back(tag + "notional_fraction out of range (0,1]");
        if (!(loan.default_prob > 0.0 && loan.default_prob < 1.0))
            violations.push_back(tag + "default_prob out of range (0,1)");
        if (!(loan.recovery >= 0.0 && loan.recovery < 1.0))
            violations.push_back(tag + "recovery out of range [0,1)");
        if (loan.loadings.size() != portfolio.factor_count)
            violations.push_back(tag + "loadings length " + std::to_string(loan.loadings.size()) +
                                 " does not match factor_count " +
                                 std::to_string(portfolio.factor_count));
        if (!(loan.loadings_norm_sq() < max_loadings_norm_sq))
            violations.push_back(tag + "loadings norm too close to or above 1");
        notional_sum += loan.notional_fraction;
    }
    if (notional_sum > 1.0 + notional_sum_slack)
        violations.push_back("notional fractions sum to " + std::to_string(notional_sum) +
                             ", above 1");
    return violations;
}

/// Loss given default as a fraction of total portfolio notional: f(1-r).
inline double lgd(const Loan& loan) {
    return loan.notional_fraction * (1.0 - loan.recovery);
}

/// Default boundary of the latent variable: the x with cdf(x) = p.
inline double default_threshold(const Loan& loan) {
    return std_normal_inv_cdf(loan.default_prob);
}

namespace detail {

inline double conditional_default_prob_from_threshold(double threshold, double inv_idio_scale,
                                                      std::span<const double> loadings,
                                                      std::span<const double> factors) {
    double shift = 0.0;
    for (std::size_t k = 0; k < loadings.size(); ++k)
        shift += loadings[k] * factors[k];
    return std_normal_cdf((threshold - shift) * inv_idio_scale);
}

} // namespace detail

/// Default probability of the loan once the factors are fixed:
/// cdf((threshold - w.phi) / sqrt(1 - |w|^2)).
inline double conditional_default_prob(const Loan& loan, const FactorDraw& factors) {
    if (factors.values.size() != loan.loadings.size())
        throw std::invalid_argument("conditional_default_prob: factor dimension mismatch");
    const double norm_sq = loan.loadings_norm_sq();
    if (!(norm_sq < 1.0))
        throw std::invalid_argument("conditional_default_prob: loadings norm must be below 1");
    return detail::conditional_default_prob_from_threshold(
        default_threshold(loan), 1.0 / std::sqrt(1.0 - norm_sq), loan.loadings, factors.values);
}

/// Validated portfolio with the factor-independent per-loan quantities
/// (lgd, default threshold, idiosyncratic scale) computed once.
class PreparedPortfolio {
public:
    explicit PreparedPortfolio(const Portfolio& portfolio)
        : factor_count_(portfolio.factor_count) {
        auto violations = validate(portfolio);
        if (!violations.empty()) {
            std::ostringstream msg;
            msg << "invalid portfolio:";
            for (const auto& v : violations)
                msg << "\n  " << v;
            throw std::invalid_argument(msg.str());
        }
        const std::size_t n = portfolio.size();
        lgds_.reserve(n);
        thresholds_.reserve(n);
        inv_idio_scales_.reserve(n);
        loadings_.reserve(n * factor_count_);
        for (const Loan& loan : portfolio.loans) {
            lgds_.push_back(lgd(loan));
            thresholds_.push_back(default_threshold(loan));
            inv_idio_scales_.push_back(1.0 / std::sqrt(1.0 - loan.loadings_norm_sq()));
            loadings_.insert(loadings_.end(), loan.loadings.begin(), loan.loadings.end());
        }
    }

    std::size_t size() const { return lgds_.size(); }
    std::size_t factor_count() const { return factor_count_; }
    double loan_lgd(std::size_t i) const { return lgds_[i]; }
    double threshold(std::size_t i) const { return thresholds_[i]; }
    std::span<const double> lgds() const { return lgds_; }

    std::span<const double> loadings(std::size_t i) const {
        return {loadings_.data() + i * factor_count_, factor_count_};
    }

    double conditional_default_prob(std::size_t i, std::span<const double> factors) const {
        return detail::conditional_default_prob_from_threshold(thresholds_[i], inv_idio_scales_[i],
                                                               loadings(i), factors);
    }

    /// Fills out[i] with the conditional default probability of loan i.
    void conditional_default_probs(std::span<const double> factors, std::span<double> out) const {
        if (factors.size() != factor_count_)
            throw std::invalid_argument("conditional_default_probs: factor dimension mismatch");
        for (std::size_t i = 0; i < size(); ++i)
            out[i] = conditional_default_prob(i, factors);
    }

private:
    std::size_t factor_count_;
    std::vector<double> lgds_;
    std::vector<double> thresholds_;
    std::vector<double> inv_idio_scales_;
    std::vector<double> loadings_;
};

/// Conditional mean and variance of the portfolio loss for fixed factors:
/// mean = sum lgd_i p^i, variance = sum lgd_i^2 p^i (1 - p^i).
inline ConditionalMoments conditional_mean_variance(const Portfolio& portfolio,
                                                    const FactorDraw& factors) {
    const PreparedPortfolio prepared(portfolio);
    if (factors.values.size() != prepared.factor_count())
        throw std::invalid_argument("conditional_mean_variance: factor dimension mismatch");
    ConditionalMoments moments;
    double mean = 0.0;
    double variance = 0.0;
    for (std::size_t i = 0; i < prepared.size(); ++i) {
        const double p = prepared.conditional_default_prob(i, factors.values);
        const double v = prepared.loan_lgd(i);
        mean += v * p;
        variance += v * v * p * (1.0 - p);
    }
    moments.mean = mean;
    moments.variance = variance;
    moments.central = {1.0, 0.0, variance};
    return moments;
}

} // namespace tranche

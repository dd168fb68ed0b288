#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "test_utils.hpp"
#include "tranche/exact.hpp"
#include "tranche/io.hpp"
#include "tranche/quadrature.hpp"

using namespace tranche;

namespace {

Portfolio flat_portfolio(std::size_t n, double f, double p, double w) {
    Portfolio portfolio;
    portfolio.factor_count = 1;
    for (std::size_t i = 0; i < n; ++i) {
        Loan loan;
        loan.notional_fraction = f;
        loan.default_prob = p;
        loan.recovery = 0.0;
        loan.loadings = {w};
        portfolio.loans.push_back(loan);
    }
    return portfolio;
}

} // namespace

TEST_CASE("one-loan enumeration") {
    const auto rule = gauss_hermite_rule(64);
    const double value =
        exact_tranche_loss_enumeration(flat_portfolio(1, 1.0, 0.3, 0.0), TrancheSpec(0.0, 1.0), rule);
    REQUIRE(value == Catch::Approx(0.3).margin(1e-14));
}

TEST_CASE("two-loan enumeration by hand") {
    // patterns 00,01,10,11 have losses 0, .5, .5, 1 and probability 1/4 each;
    // the (0,0.5) tranche profile maps them to 0,1,1,1
    const auto rule = gauss_hermite_rule(32);
    const double value =
        exact_tranche_loss_enumeration(flat_portfolio(2, 0.5, 0.5, 0.0), TrancheSpec(0.0, 0.5), rule);
    REQUIRE(value == Catch::Approx(0.75).margin(1e-14));
}

TEST_CASE("factor-free enumeration ignores the quadrature order") {
    const Portfolio p = flat_portfolio(6, 0.1, 0.07, 0.0);
    const TrancheSpec t(0.0, 0.25);
    const double small = exact_tranche_loss_enumeration(p, t, gauss_hermite_rule(8));
    const double big = exact_tranche_loss_enumeration(p, t, gauss_hermite_rule(64));
    REQUIRE(small == Catch::Approx(big).epsilon(1e-14));
}

TEST_CASE("pattern probabilities sum to one at every node") {
    const Portfolio p = synth_portfolio(12);
    const PreparedPortfolio prepared(p);
    const auto rule = gauss_hermite_rule(64);
    std::vector<double> probs(prepared.size());
    for (std::size_t j = 0; j < rule.size(); ++j) {
        prepared.conditional_default_probs(rule.node(j), probs);
        const double mass = detail::enumerate_patterns(prepared.lgds(), probs, 0, 1.0, 0.0,
                                                       [](double) { return 1.0; });
        REQUIRE(std::abs(mass - 1.0) <= 1e-12);
    }
}

TEST_CASE("enumeration size guard") {
    const auto rule = gauss_hermite_rule(8);
    REQUIRE_THROWS_AS(
        exact_tranche_loss_enumeration(flat_portfolio(21, 0.04, 0.02, 0.3), TrancheSpec(0.0, 0.1),
                                       rule),
        std::invalid_argument);
}

TEST_CASE("single on-grid loan convolution is the two-point distribution") {
    Portfolio p = flat_portfolio(1, 0.5, 0.2, 0.0);
    p.loans[0].recovery = 0.5; // lgd = 0.25, exactly 25 steps of 0.01
    const auto dist = exact_conditional_distribution_convolution(p, {{0.0}}, 0.01);
    REQUIRE(dist.probabilities.size() == 26);
    REQUIRE(dist.probabilities[0] == Catch::Approx(0.8).epsilon(1e-15));
    REQUIRE(dist.probabilities[25] == Catch::Approx(0.2).epsilon(1e-15));
    for (std::size_t g = 1; g < 25; ++g)
        REQUIRE(dist.probabilities[g] == 0.0);
    REQUIRE(dist.rounding_bound == Catch::Approx(0.005).epsilon(1e-15));
}

TEST_CASE("convolution conserves mass and the on-grid mean") {
    const Portfolio p = flat_portfolio(10, 0.05, 0.08, 0.4); // lgd 0.05, on a 0.01 grid
    const FactorDraw draw{{-0.7}};
    const auto dist = exact_conditional_distribution_convolution(p, draw, 0.01);
    REQUIRE(std::abs(dist.total_mass() - 1.0) <= 1e-12);

    const PreparedPortfolio prepared(p);
    double mean = 0.0;
    for (std::size_t i = 0; i < prepared.size(); ++i)
        mean += prepared.loan_lgd(i) * prepared.conditional_default_prob(i, draw.values);
    REQUIRE(std::abs(dist.mean() - mean) <= 1e-12);
}

TEST_CASE("convolution tranche values approach enumeration as the grid refines") {
    const Portfolio p = synth_portfolio(12); // lgds are off-grid
    const TrancheSpec t(0.0, 0.03);
    const auto rule = gauss_hermite_rule(64);
    const double exact = exact_tranche_loss_enumeration(p, t, rule);

    const double coarse = convolution_tranche_loss(p, t, rule, 1e-3);
    const double fine = convolution_tranche_loss(p, t, rule, 5e-4);
    const double coarse_bound = 12.0 * 1e-3 / (2.0 * t.width());
    const double fine_bound = 12.0 * 5e-4 / (2.0 * t.width());
    REQUIRE(std::abs(coarse - exact) <= coarse_bound);
    REQUIRE(std::abs(fine - exact) <= fine_bound);
    REQUIRE(std::abs(fine - coarse) <= coarse_bound + fine_bound);
}

TEST_CASE("lgd values round half to even onto the grid") {
    // exact binary values: on a 2^-7 grid, lgd 2.5*2^-7 rounds to 2 steps
    // (ties to even) and lgd 3.5*2^-7 rounds to 4
    const double h = 0.0078125;
    Portfolio p;
    p.factor_count = 1;
    for (double f : {2.5 * h, 3.5 * h}) {
        Loan loan;
        loan.notional_fraction = f;
        loan.default_prob = 0.5;
        loan.recovery = 0.0;
        loan.loadings = {0.0};
        p.loans.push_back(loan);
    }
    const auto dist = exact_conditional_distribution_convolution(p, {{0.0}}, h);
    REQUIRE(dist.probabilities.size() == 7); // 2 + 4 steps
    REQUIRE(dist.probabilities[2] == Catch::Approx(0.25).epsilon(1e-14)); // only first defaults
    REQUIRE(dist.probabilities[4] == Catch::Approx(0.25).epsilon(1e-14)); // only second
    REQUIRE(dist.probabilities[6] == Catch::Approx(0.25).epsilon(1e-14)); // both
}

TEST_CASE("convolution guards") {
    const Portfolio p = flat_portfolio(5, 0.2, 0.1, 0.2);
    REQUIRE_THROWS_AS(exact_conditional_distribution_convolution(p, {{0.0}}, 0.0),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(exact_conditional_distribution_convolution(p, {{0.0}}, -0.1),
                      std::invalid_argument);
    // 5 loans with lgd 0.2 on a 1e-9 grid would need 1e9 buckets
    REQUIRE_THROWS_AS(exact_conditional_distribution_convolution(p, {{0.0}}, 1e-9),
                      std::invalid_argument);
}

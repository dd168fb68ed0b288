#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>

#include "test_utils.hpp"
#include "tranche/normal.hpp"
#include "tranche/quadrature.hpp"

using namespace tranche;

TEST_CASE("order-2 rule is the two-point rule") {
    const auto rule = gauss_hermite_rule(2);
    REQUIRE(rule.size() == 2);
    REQUIRE(rule.nodes[0] == Catch::Approx(-1.0).margin(1e-13));
    REQUIRE(rule.nodes[1] == Catch::Approx(1.0).margin(1e-13));
    REQUIRE(rule.weights[0] == Catch::Approx(0.5).margin(1e-14));
    REQUIRE(rule.weights[1] == Catch::Approx(0.5).margin(1e-14));
}

TEST_CASE("degree-4 exactness at order 3") {
    const auto rule = gauss_hermite_rule(3);
    const double integral = integrate_gaussian([](double x) { return x * x * x * x; }, rule);
    REQUIRE(std::abs(integral - 3.0) <= 1e-12);
}

TEST_CASE("polynomial exactness through degree 2q-1") {
    const auto rule = gauss_hermite_rule(5);
    // E[x^d] = 0 for odd d, (d-1)!! for even d
    double expected_even = 1.0; // E[x^0]
    for (int d = 0; d <= 9; ++d) {
        const double integral =
            integrate_gaussian([d](double x) { return std::pow(x, d); }, rule);
        if (d % 2 == 1) {
            REQUIRE(std::abs(integral) <= 1e-12);
        } else {
            if (d > 0)
                expected_even *= (d - 1);
            REQUIRE(std::abs(integral - expected_even) <= 1e-12 * std::max(1.0, expected_even));
        }
    }
}

TEST_CASE("weights are positive, sum to one; nodes symmetric") {
    for (int q : {2, 3, 5, 16, 64, 128, 256}) {
        const auto rule = gauss_hermite_rule(q);
        REQUIRE(rule.size() == static_cast<std::size_t>(q));
        double sum = 0.0;
        for (std::size_t j = 0; j < rule.size(); ++j) {
            REQUIRE(rule.weights[j] > 0.0);
            sum += rule.weights[j];
            REQUIRE(rule.nodes[j] == Catch::Approx(-rule.nodes[rule.size() - 1 - j]).margin(1e-13));
        }
        REQUIRE(std::abs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("total-probability identity at order 64") {
    // integral of cdf((cdf^{-1}(p) - w phi)/sqrt(1-w^2)) over the factor
    // density recovers p; closed form Phi(a/sqrt(1+b^2)) makes it exact
    const auto rule = gauss_hermite_rule(64);
    const double p = 0.05;
    const double w = 0.5;
    const double threshold = std_normal_inv_cdf(p);
    const double scale = 1.0 / std::sqrt(1.0 - w * w);
    const double integral = integrate_gaussian(
        [&](double phi) { return std_normal_cdf((threshold - w * phi) * scale); }, rule);
    REQUIRE(std::abs(integral - p) <= 1e-8);
}

TEST_CASE("tensor rule") {
    const auto rule1 = gauss_hermite_rule(2);
    SECTION("m=1 returns the input") {
        const auto rule = tensor_rule(rule1, 1);
        REQUIRE(rule.nodes == rule1.nodes);
        REQUIRE(rule.weights == rule1.weights);
    }
    SECTION("m=2, q=2 gives the four corner nodes") {
        const auto rule = tensor_rule(rule1, 2);
        REQUIRE(rule.size() == 4);
        REQUIRE(rule.dim == 2);
        double sum = 0.0;
        for (std::size_t j = 0; j < 4; ++j) {
            REQUIRE(rule.weights[j] == Catch::Approx(0.25).margin(1e-14));
            sum += rule.weights[j];
            REQUIRE(std::abs(rule.node(j)[0]) == Catch::Approx(1.0).margin(1e-13));
            REQUIRE(std::abs(rule.node(j)[1]) == Catch::Approx(1.0).margin(1e-13));
        }
        REQUIRE(std::abs(sum - 1.0) <= 1e-12);
    }
    SECTION("independent second moments across dimensions") {
        const auto rule = tensor_rule(gauss_hermite_rule(3), 2);
        const double integral = integrate_gaussian(
            [](std::span<const double> x) { return x[0] * x[0] * x[1] * x[1]; }, rule);
        REQUIRE(std::abs(integral - 1.0) <= 1e-12);
    }
}

TEST_CASE("integrate_gaussian basics") {
    const auto rule = gauss_hermite_rule(16);
    REQUIRE(std::abs(integrate_gaussian([](double) { return 1.0; }, rule) - 1.0) <= 1e-12);
    REQUIRE(std::abs(integrate_gaussian([](double x) { return x; }, rule)) <= 1e-12);
}

TEST_CASE("integrand failures are annotated with the node") {
    const auto rule = gauss_hermite_rule(4);
    try {
        integrate_gaussian(
            [](double) -> double { throw std::runtime_error("boom"); }, rule);
        FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
        REQUIRE(std::string(e.what()).find("node 0") != std::string::npos);
        REQUIRE(std::string(e.what()).find("boom") != std::string::npos);
    }
}

TEST_CASE("guards") {
    REQUIRE_THROWS_AS(gauss_hermite_rule(1), std::invalid_argument);
    REQUIRE_THROWS_AS(gauss_hermite_rule(257), std::invalid_argument);
    const auto rule1 = gauss_hermite_rule(3);
    REQUIRE_THROWS_AS(tensor_rule(rule1, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(tensor_rule(rule1, 5), std::invalid_argument);
    REQUIRE_THROWS_AS(tensor_rule(tensor_rule(rule1, 2), 2), std::invalid_argument);
    REQUIRE_THROWS_AS(
        integrate_gaussian([](double x) { return x; }, tensor_rule(rule1, 2)),
        std::invalid_argument);
}

// Command-line interface: validate portfolios, price tranches with the
// Hermite-expansion pricer, and cross-check against Monte Carlo and exact
// enumeration. See `tranche --help` and the README for usage.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tranche/exact.hpp"
#include "tranche/io.hpp"
#include "tranche/monte_carlo.hpp"
#include "tranche/pricer.hpp"
#include "tranche/quadrature.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_io = 3;
constexpr int exit_guard = 4;

struct RunConfig {
    std::string portfolio_path;
    std::size_t synth_n = 0;
    std::vector<double> attach{0.0};
    std::vector<double> detach{0.03};
    int order = 5;
    int quad_order = 64;
    std::uint64_t samples = 1000000;
    std::uint64_t seed = 42;
    bool clamp = false;
    std::string format = "csv";
    std::string output;
};

void add_source_options(CLI::App& cmd, RunConfig& opt) {
    auto* file = cmd.add_option("--portfolio", opt.portfolio_path, "portfolio file (.json or .csv)");
    auto* synth = cmd.add_option("--synth", opt.synth_n,
                                 "synthesize the reference portfolio with this many loans");
    file->excludes(synth);
    synth->excludes(file);
}

void add_tranche_options(CLI::App& cmd, RunConfig& opt) {
    cmd.add_option("--attach", opt.attach, "tranche attachment points")
        ->delimiter(',')
        ->capture_default_str();
    cmd.add_option("--detach", opt.detach, "tranche detachment points")
        ->delimiter(',')
        ->capture_default_str();
}

void add_output_options(CLI::App& cmd, RunConfig& opt) {
    cmd.add_option("--format", opt.format, "result format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd.add_option("--output", opt.output, "write results to this file instead of stdout");
}

tranche::Portfolio resolve_portfolio(const RunConfig& opt) {
    if (opt.synth_n > 0)
        return tranche::synth_portfolio(opt.synth_n);
    if (opt.portfolio_path.empty())
        throw CLI::ValidationError("either --portfolio or --synth is required");
    return tranche::load_portfolio(opt.portfolio_path);
}

std::vector<tranche::TrancheSpec> resolve_tranches(const RunConfig& opt) {
    if (opt.attach.size() != opt.detach.size())
        throw CLI::ValidationError("--attach and --detach need the same number of values");
    std::vector<tranche::TrancheSpec> tranches;
    tranches.reserve(opt.attach.size());
    for (std::size_t i = 0; i < opt.attach.size(); ++i)
        tranches.emplace_back(opt.attach[i], opt.detach[i]);
    return tranches;
}

void emit(const std::vector<tranche::ResultRow>& rows, const RunConfig& opt) {
    const auto format =
        opt.format == "json" ? tranche::ResultFormat::json : tranche::ResultFormat::csv;
    if (opt.output.empty())
        tranche::write_results(rows, format, std::cout);
    else
        tranche::write_results(rows, format, std::filesystem::path(opt.output));
}

tranche::ResultRow analytic_row(const tranche::Portfolio& portfolio,
                                const tranche::TrancheSpec& t,
                                const tranche::PriceResult& price) {
    tranche::ResultRow row;
    row.n = portfolio.size();
    row.attach = t.attach;
    row.detach = t.detach;
    row.method = tranche::to_string(price.method);
    row.order_n = price.truncation_order;
    row.quad_order = price.quad_order;
    row.value = price.value;
    return row;
}

tranche::ResultRow mc_row(const tranche::Portfolio& portfolio, const tranche::TrancheSpec& t,
                          const tranche::McResult& mc) {
    tranche::ResultRow row;
    row.n = portfolio.size();
    row.attach = t.attach;
    row.detach = t.detach;
    row.method = "mc";
    row.samples = mc.samples;
    row.seed = mc.seed;
    row.value = mc.estimate;
    row.std_error = mc.std_error;
    return row;
}

tranche::ResultRow exact_row(const tranche::Portfolio& portfolio, const tranche::TrancheSpec& t,
                             int quad_order, double value) {
    tranche::ResultRow row;
    row.n = portfolio.size();
    row.attach = t.attach;
    row.detach = t.detach;
    row.method = "exact";
    row.quad_order = quad_order;
    row.value = value;
    return row;
}

std::vector<tranche::ResultRow> price_rows(const tranche::Portfolio& portfolio,
                                           const std::vector<tranche::TrancheSpec>& tranches,
                                           const std::string& method, const RunConfig& opt) {
    std::vector<tranche::ResultRow> rows;
    if (method == "hermite" || method == "normal") {
        const auto rule = tranche::tensor_rule(tranche::gauss_hermite_rule(opt.quad_order),
                                               portfolio.factor_count);
        const int order = method == "normal" ? 1 : opt.order;
        const auto prices =
            tranche::expected_tranche_losses(portfolio, tranches, order, rule, opt.clamp);
        for (std::size_t i = 0; i < tranches.size(); ++i)
            rows.push_back(analytic_row(portfolio, tranches[i], prices[i]));
    } else if (method == "mc") {
        for (const auto& t : tranches)
            rows.push_back(mc_row(
                portfolio, t,
                tranche::mc_expected_tranche_loss(portfolio, t, opt.samples, opt.seed)));
    } else if (method == "exact") {
        const auto rule = tranche::tensor_rule(tranche::gauss_hermite_rule(opt.quad_order),
                                               portfolio.factor_count);
        for (const auto& t : tranches)
            rows.push_back(exact_row(portfolio, t, opt.quad_order,
                                     tranche::exact_tranche_loss_enumeration(portfolio, t, rule)));
    } else {
        throw CLI::ValidationError("unknown method '" + method + "'");
    }
    return rows;
}

int run_validate(const RunConfig& opt) {
    tranche::Portfolio portfolio;
    if (opt.synth_n > 0) {
        portfolio = tranche::synth_portfolio(opt.synth_n);
    } else if (!opt.portfolio_path.empty()) {
        // loading already validates; route the violation list to stderr
        try {
            portfolio = tranche::load_portfolio(std::filesystem::path(opt.portfolio_path));
        } catch (const std::invalid_argument& e) {
            std::cerr << e.what() << '\n';
            return exit_guard;
        }
    } else {
        throw CLI::ValidationError("either --portfolio or --synth is required");
    }
    const auto violations = tranche::validate(portfolio);
    if (violations.empty()) {
        std::cout << "ok: " << portfolio.size() << " loans, " << portfolio.factor_count
                  << " factor(s)\n";
        return exit_ok;
    }
    for (const auto& v : violations)
        std::cerr << v << '\n';
    return exit_guard;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tranche expected-loss pricer for the Gaussian factor model"};
    app.require_subcommand(1);

    RunConfig opt;
    std::string method = "hermite";
    std::vector<std::string> sweep_methods{"hermite", "normal", "mc"};
    std::vector<std::size_t> sweep_sizes;

    auto* validate_cmd = app.add_subcommand("validate", "check a portfolio against the model invariants");
    add_source_options(*validate_cmd, opt);

    auto* price_cmd = app.add_subcommand("price", "price tranches with the selected method");
    add_source_options(*price_cmd, opt);
    add_tranche_options(*price_cmd, opt);
    price_cmd->add_option("--method", method, "hermite | normal | mc | exact")
        ->check(CLI::IsMember({"hermite", "normal", "mc", "exact"}))
        ->capture_default_str();
    price_cmd->add_option("--order", opt.order, "expansion truncation order")->capture_default_str();
    price_cmd->add_option("--quad-order", opt.quad_order, "factor quadrature order")
        ->capture_default_str();
    price_cmd->add_option("--samples", opt.samples, "Monte Carlo sample count")->capture_default_str();
    price_cmd->add_option("--seed", opt.seed, "Monte Carlo seed")->capture_default_str();
    price_cmd->add_flag("--clamp", opt.clamp, "clamp reported analytic values to [0,1]");
    add_output_options(*price_cmd, opt);

    auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo estimate of the tranche loss");
    add_source_options(*mc_cmd, opt);
    add_tranche_options(*mc_cmd, opt);
    mc_cmd->add_option("--samples", opt.samples, "sample count")->capture_default_str();
    mc_cmd->add_option("--seed", opt.seed, "seed")->capture_default_str();
    add_output_options(*mc_cmd, opt);

    auto* exact_cmd = app.add_subcommand("exact", "exact enumeration price (portfolios up to 20 loans)");
    add_source_options(*exact_cmd, opt);
    add_tranche_options(*exact_cmd, opt);
    exact_cmd->add_option("--quad-order", opt.quad_order, "factor quadrature order")
        ->capture_default_str();
    add_output_options(*exact_cmd, opt);

    auto* sweep_cmd = app.add_subcommand("sweep", "price a grid of synthesized portfolio sizes and methods");
    sweep_cmd->add_option("--synth", sweep_sizes, "portfolio sizes to synthesize")
        ->delimiter(',')
        ->required();
    add_tranche_options(*sweep_cmd, opt);
    sweep_cmd->add_option("--methods", sweep_methods, "methods to compare")
        ->delimiter(',')
        ->capture_default_str();
    sweep_cmd->add_option("--order", opt.order, "expansion truncation order")->capture_default_str();
    sweep_cmd->add_option("--quad-order", opt.quad_order, "factor quadrature order")
        ->capture_default_str();
    sweep_cmd->add_option("--samples", opt.samples, "Monte Carlo sample count")->capture_default_str();
    sweep_cmd->add_option("--seed", opt.seed, "Monte Carlo seed")->capture_default_str();
    sweep_cmd->add_flag("--clamp", opt.clamp, "clamp reported analytic values to [0,1]");
    add_output_options(*sweep_cmd, opt);

    auto* synth_cmd = app.add_subcommand("synth", "write the synthesized reference portfolio");
    std::size_t synth_count = 0;
    std::string synth_format;
    synth_cmd->add_option("--n", synth_count, "loan count")->required();
    synth_cmd->add_option("--output", opt.output, "portfolio file to write (stdout when omitted)");
    synth_cmd->add_option("--format", synth_format, "portfolio format")
        ->check(CLI::IsMember({"json", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        if (validate_cmd->parsed())
            return run_validate(opt);

        if (price_cmd->parsed()) {
            const auto portfolio = resolve_portfolio(opt);
            emit(price_rows(portfolio, resolve_tranches(opt), method, opt), opt);
            return exit_ok;
        }

        if (mc_cmd->parsed()) {
            const auto portfolio = resolve_portfolio(opt);
            emit(price_rows(portfolio, resolve_tranches(opt), "mc", opt), opt);
            return exit_ok;
        }

        if (exact_cmd->parsed()) {
            const auto portfolio = resolve_portfolio(opt);
            emit(price_rows(portfolio, resolve_tranches(opt), "exact", opt), opt);
            return exit_ok;
        }

        if (sweep_cmd->parsed()) {
            const auto tranches = resolve_tranches(opt);
            std::vector<tranche::ResultRow> rows;
            for (const std::size_t n : sweep_sizes) {
                const auto portfolio = tranche::synth_portfolio(n);
                for (const auto& t : tranches) {
                    const std::vector<tranche::TrancheSpec> one{t};
                    for (const auto& m : sweep_methods) {
                        const auto batch = price_rows(portfolio, one, m, opt);
                        rows.insert(rows.end(), batch.begin(), batch.end());
                    }
                }
            }
            emit(rows, opt);
            return exit_ok;
        }

        if (synth_cmd->parsed()) {
            const auto portfolio = tranche::synth_portfolio(synth_count);
            std::optional<tranche::PortfolioFormat> fmt;
            if (synth_format == "json")
                fmt = tranche::PortfolioFormat::json;
            else if (synth_format == "csv")
                fmt = tranche::PortfolioFormat::csv;
            if (opt.output.empty()) {
                if (fmt.value_or(tranche::PortfolioFormat::json) == tranche::PortfolioFormat::json)
                    tranche::write_portfolio_json(portfolio, std::cout);
                else
                    tranche::write_portfolio_csv(portfolio, std::cout);
            } else {
                tranche::write_portfolio(portfolio, opt.output, fmt);
            }
            return exit_ok;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << '\n';
        return exit_config;
    } catch (const tranche::IoError& e) {
        std::cerr << e.what() << '\n';
        return exit_io;
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << '\n';
        return exit_guard;
    } catch (const std::domain_error& e) {
        std::cerr << e.what() << '\n';
        return exit_guard;
    } catch (const std::out_of_range& e) {
        std::cerr << e.what() << '\n';
        return exit_guard;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return exit_config;
}

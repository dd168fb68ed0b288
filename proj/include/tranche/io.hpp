#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tranche/portfolio.hpp"

namespace tranche {

/// File or stream problem: missing file, malformed content, failed write.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class PortfolioFormat { json, csv };

inline PortfolioFormat portfolio_format_from_path(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".json")
        return PortfolioFormat::json;
    if (ext == ".csv")
        return PortfolioFormat::csv;
    throw std::invalid_argument("cannot infer portfolio format from extension '" + ext + "'");
}

/// The reference test portfolio: n equally weighted loans with linear ramps
/// in default probability, recovery, and single-factor loading.
inline Portfolio synth_portfolio(std::size_t n) {
    if (n < 2)
        throw std::invalid_argument("synth_portfolio: need at least 2 loans");
    Portfolio portfolio;
    portfolio.factor_count = 1;
    portfolio.loans.reserve(n);
    const double denom = static_cast<double>(n) - 1.0;
    for (std::size_t i = 1; i <= n; ++i) {
        const double ramp = static_cast<double>(i - 1) / denom;
        Loan loan;
        loan.notional_fraction = 1.0 / static_cast<double>(n);
        loan.default_prob = 0.015 + 0.05 * ramp;
        loan.recovery = 0.5 - 0.1 * ramp;
        loan.loadings = {0.5 - 0.1 * ramp};
        portfolio.loans.push_back(std::move(loan));
    }
    return portfolio;
}

namespace detail {

/// Shortest text that round-trips the double exactly: 17 significant digits.
inline std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline double parse_double(std::string_view text, const std::string& where) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw IoError(where + ": cannot parse number '" + std::string(text) + "'");
    return value;
}

inline void throw_if_invalid(const Portfolio& portfolio, const std::string& source) {
    const auto violations = validate(portfolio);
    if (violations.empty())
        return;
    std::ostringstream msg;
    msg << source << ": portfolio fails validation:";
    for (const auto& v : violations)
        msg << "\n  " << v;
    throw std::invalid_argument(msg.str());
}

} // namespace detail

inline void write_portfolio_json(const Portfolio& portfolio, std::ostream& out) {
    nlohmann::json doc;
    doc["factor_count"] = portfolio.factor_count;
    auto& loans = doc["loans"] = nlohmann::json::array();
    for (const Loan& loan : portfolio.loans) {
        loans.push_back({{"f", loan.notional_fraction},
                         {"p", loan.default_prob},
                         {"r", loan.recovery},
                         {"w", loan.loadings}});
    }
    out << doc.dump(2) << '\n';
}

inline void write_portfolio_csv(const Portfolio& portfolio, std::ostream& out) {
    out << "f,p,r";
    for (std::size_t k = 1; k <= portfolio.factor_count; ++k)
        out << ",w" << k;
    out << '\n';
    for (const Loan& loan : portfolio.loans) {
        out << detail::format_double(loan.notional_fraction) << ','
            << detail::format_double(loan.default_prob) << ','
            << detail::format_double(loan.recovery);
        for (const double w : loan.loadings)
            out << ',' << detail::format_double(w);
        out << '\n';
    }
}

inline void write_portfolio(const Portfolio& portfolio, const std::filesystem::path& path,
                            std::optional<PortfolioFormat> format = std::nullopt) {
    const PortfolioFormat fmt = format ? *format : portfolio_format_from_path(path);
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open '" + path.string() + "' for writing");
    if (fmt == PortfolioFormat::json)
        write_portfolio_json(portfolio, out);
    else
        write_portfolio_csv(portfolio, out);
    if (!out)
        throw IoError("write to '" + path.string() + "' failed");
}

inline Portfolio read_portfolio_json(std::istream& in, const std::string& source) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError(source + ": " + e.what());
    }
    Portfolio portfolio;
    try {
        portfolio.factor_count = doc.at("factor_count").get<std::size_t>();
        for (const auto& entry : doc.at("loans")) {
            Loan loan;
            loan.notional_fraction = entry.at("f").get<double>();
            loan.default_prob = entry.at("p").get<double>();
            loan.recovery = entry.at("r").get<double>();
            loan.loadings = entry.at("w").get<std::vector<double>>();
            portfolio.loans.push_back(std::move(loan));
        }
    } catch (const nlohmann::json::exception& e) {
        throw IoError(source + ": " + e.what());
    }
    detail::throw_if_invalid(portfolio, source);
    return portfolio;
}

inline Portfolio read_portfolio_csv(std::istream& in, const std::string& source) {
    std::string line;
    std::size_t line_no = 0;

    auto split = [](const std::string& text) {
        std::vector<std::string_view> fields;
        std::size_t start = 0;
        for (std::size_t pos = 0; pos <= text.size(); ++pos) {
            if (pos == text.size() || text[pos] == ',') {
                fields.emplace_back(text.data() + start, pos - start);
                start = pos + 1;
            }
        }
        return fields;
    };

    if (!std::getline(in, line))
        throw IoError(source + ": empty file, expected header 'f,p,r,w1[,w2,...]'");
    ++line_no;
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    const auto header = split(line);
    if (header.size() < 4 || header[0] != "f" || header[1] != "p" || header[2] != "r")
        throw IoError(source + ": line 1: expected header 'f,p,r,w1[,w2,...]', got '" + line + "'");
    for (std::size_t k = 3; k < header.size(); ++k) {
        const std::string expected = "w" + std::to_string(k - 2);
        if (header[k] != expected)
            throw IoError(source + ": line 1: expected column '" + expected + "', got '" +
                          std::string(header[k]) + "'");
    }
    const std::size_t factor_count = header.size() - 3;

    Portfolio portfolio;
    portfolio.factor_count = factor_count;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const auto fields = split(line);
        const std::string where = source + ": line " + std::to_string(line_no);
        if (fields.size() != 3 + factor_count)
            throw IoError(where + ": expected " + std::to_string(3 + factor_count) +
                          " fields, got " + std::to_string(fields.size()));
        Loan loan;
        loan.notional_fraction = detail::parse_double(fields[0], where + ", field 1 (f)");
        loan.default_prob = detail::parse_double(fields[1], where + ", field 2 (p)");
        loan.recovery = detail::parse_double(fields[2], where + ", field 3 (r)");
        loan.loadings.reserve(factor_count);
        for (std::size_t k = 0; k < factor_count; ++k)
            loan.loadings.push_back(detail::parse_double(
                fields[3 + k], where + ", field " + std::to_string(4 + k) + " (w" +
                                   std::to_string(k + 1) + ")"));
        portfolio.loans.push_back(std::move(loan));
    }
    detail::throw_if_invalid(portfolio, source);
    return portfolio;
}

inline Portfolio load_portfolio(const std::filesystem::path& path,
                                std::optional<PortfolioFormat> format = std::nullopt) {
    const PortfolioFormat fmt = format ? *format : portfolio_format_from_path(path);
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open '" + path.string() + "' for reading");
    return fmt == PortfolioFormat::json ? read_portfolio_json(in, path.string())
                                        : read_portfolio_csv(in, path.string());
}

/// One emitted price: empty optionals render as empty CSV fields / absent
/// JSON keys for parameters the method does not use.
struct ResultRow {
    std::size_t n = 0;
    double attach = 0.0;
    double detach = 0.0;
    std::string method;
    std::optional<int> order_n;
    std::optional<int> quad_order;
    std::optional<std::uint64_t> samples;
    std::optional<std::uint64_t> seed;
    double value = 0.0;
    std::optional<double> std_error;
};

inline constexpr const char* result_csv_header =
    "n,attach,detach,method,order_N,quad_order,samples,seed,value,std_error";

inline void write_results_csv(std::span<const ResultRow> rows, std::ostream& out) {
    out << result_csv_header << '\n';
    for (const ResultRow& row : rows) {
        out << row.n << ',' << detail::format_double(row.attach) << ','
            << detail::format_double(row.detach) << ',' << row.method << ',';
        if (row.order_n)
            out << *row.order_n;
        out << ',';
        if (row.quad_order)
            out << *row.quad_order;
        out << ',';
        if (row.samples)
            out << *row.samples;
        out << ',';
        if (row.seed)
            out << *row.seed;
        out << ',' << detail::format_double(row.value) << ',';
        if (row.std_error)
            out << detail::format_double(*row.std_error);
        out << '\n';
    }
}

inline void write_results_json(std::span<const ResultRow> rows, std::ostream& out) {
    nlohmann::json doc = nlohmann::json::array();
    for (const ResultRow& row : rows) {
        nlohmann::json entry{{"n", row.n},       {"attach", row.attach},
                             {"detach", row.detach}, {"method", row.method},
                             {"value", row.value}};
        if (row.order_n)
            entry["order_N"] = *row.order_n;
        if (row.quad_order)
            entry["quad_order"] = *row.quad_order;
        if (row.samples)
            entry["samples"] = *row.samples;
        if (row.seed)
            entry["seed"] = *row.seed;
        if (row.std_error)
            entry["std_error"] = *row.std_error;
        doc.push_back(std::move(entry));
    }
    out << doc.dump(2) << '\n';
}

enum class ResultFormat { csv, json };

inline void write_results(std::span<const ResultRow> rows, ResultFormat format,
                          std::ostream& out) {
    if (format == ResultFormat::csv)
        write_results_csv(rows, out);
    else
        write_results_json(rows, out);
}

inline void write_results(std::span<const ResultRow> rows, ResultFormat format,
                          const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open '" + path.string() + "' for writing");
    write_results(rows, format, out);
    if (!out)
        throw IoError("write to '" + path.string() + "' failed");
}

} // namespace tranche

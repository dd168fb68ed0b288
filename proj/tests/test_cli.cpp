#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

#include "tranche/io.hpp"
#include "tranche/pricer.hpp"
#include "tranche/quadrature.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

struct CliFixture {
    fs::path dir;

    CliFixture() {
        dir = fs::temp_directory_path() / ("tranche_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    ~CliFixture() { fs::remove_all(dir); }

    RunResult run(const std::string& args) const {
        const fs::path out_path = dir / "stdout.txt";
        const fs::path err_path = dir / "stderr.txt";
        const std::string command = std::string(TRANCHE_CLI_PATH) + " " + args + " > " +
                                    out_path.string() + " 2> " + err_path.string();
        const int status = std::system(command.c_str());
        RunResult result;
        result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        result.out = slurp(out_path);
        result.err = slurp(err_path);
        return result;
    }
};

int count_lines(const std::string& text) {
    int lines = 0;
    for (char c : text)
        if (c == '\n')
            ++lines;
    return lines;
}

} // namespace

TEST_CASE("price subcommand emits one csv row") {
    CliFixture cli;
    const auto result =
        cli.run("price --synth 25 --attach 0 --detach 0.03 --method hermite --order 5");
    CAPTURE(result.err);
    REQUIRE(result.exit_code == 0);
    REQUIRE(count_lines(result.out) == 2);
    REQUIRE(result.out.find(tranche::result_csv_header) == 0);
    REQUIRE(result.out.find("25,0,0.029999999999999999,hermite,5,64,,,") != std::string::npos);

    // the emitted value equals the library's
    const auto expected = tranche::expected_tranche_loss(
        tranche::synth_portfolio(25), tranche::TrancheSpec(0.0, 0.03), 5,
        tranche::gauss_hermite_rule(64));
    std::ostringstream formatted;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", expected.value);
    REQUIRE(result.out.find(buf) != std::string::npos);
}

TEST_CASE("validate accepts good portfolios and reports violations") {
    CliFixture cli;
    const fs::path good = cli.dir / "good.json";
    tranche::write_portfolio(tranche::synth_portfolio(10), good);
    auto result = cli.run("validate --portfolio " + good.string());
    REQUIRE(result.exit_code == 0);
    REQUIRE(result.out.find("ok") == 0);

    const fs::path bad = cli.dir / "bad.json";
    std::ofstream(bad) << R"({"factor_count": 1,
                              "loans": [{"f": 1.0, "p": 0.0, "r": 0.0, "w": [0.0]}]})";
    result = cli.run("validate --portfolio " + bad.string());
    REQUIRE(result.exit_code == 4);
    REQUIRE(result.err.find("default_prob") != std::string::npos);
}

TEST_CASE("pricing an invalid portfolio fails with the violations on stderr") {
    CliFixture cli;
    const fs::path bad = cli.dir / "bad.json";
    std::ofstream(bad) << R"({"factor_count": 1,
                              "loans": [{"f": 1.0, "p": 0.0, "r": 0.0, "w": [0.0]}]})";
    const auto result = cli.run("price --portfolio " + bad.string());
    REQUIRE(result.exit_code == 4);
    REQUIRE(result.err.find("default_prob") != std::string::npos);
}

TEST_CASE("distinct exit codes for config, io, and guard problems") {
    CliFixture cli;
    REQUIRE(cli.run("price --synth 25 --no-such-flag").exit_code == 2);
    REQUIRE(cli.run("nonsense").exit_code == 2);
    REQUIRE(cli.run("price").exit_code == 2); // no portfolio source
    REQUIRE(cli.run("price --portfolio " + (cli.dir / "missing.json").string()).exit_code == 3);
    // enumeration guard: n > 20
    REQUIRE(cli.run("price --synth 25 --method exact").exit_code == 4);
    // quadrature order guard
    REQUIRE(cli.run("price --synth 10 --quad-order 1000").exit_code == 4);
}

TEST_CASE("synth writes loadable portfolios in both formats") {
    CliFixture cli;
    const fs::path json_path = cli.dir / "s.json";
    const fs::path csv_path = cli.dir / "s.csv";
    REQUIRE(cli.run("synth --n 25 --output " + json_path.string()).exit_code == 0);
    REQUIRE(cli.run("synth --n 25 --output " + csv_path.string()).exit_code == 0);
    const auto from_json = tranche::load_portfolio(json_path);
    const auto from_csv = tranche::load_portfolio(csv_path);
    REQUIRE(from_json.size() == 25);
    REQUIRE(from_csv.size() == 25);
    REQUIRE(from_json.loans[0].default_prob == 0.015);
    REQUIRE(from_csv.loans[0].default_prob == 0.015);
    REQUIRE(from_csv.loans[24].loadings == from_json.loans[24].loadings);
}

TEST_CASE("sweep emits the full grid") {
    CliFixture cli;
    const auto result = cli.run(
        "sweep --synth 8,10 --attach 0,0.03 --detach 0.03,0.1 "
        "--methods hermite,normal,mc,exact --samples 20000 --seed 7");
    CAPTURE(result.err);
    REQUIRE(result.exit_code == 0);
    // 2 sizes x 2 tranches x 4 methods + header
    REQUIRE(count_lines(result.out) == 17);
}

TEST_CASE("repeated sweeps are byte-identical") {
    CliFixture cli;
    const fs::path first = cli.dir / "a.csv";
    const fs::path second = cli.dir / "b.csv";
    const std::string args =
        "sweep --synth 8,10 --attach 0 --detach 0.03 --methods hermite,normal,mc "
        "--samples 50000 --seed 42 --output ";
    REQUIRE(cli.run(args + first.string()).exit_code == 0);
    REQUIRE(cli.run(args + second.string()).exit_code == 0);
    const std::string a = slurp(first);
    REQUIRE(!a.empty());
    REQUIRE(a == slurp(second));
    REQUIRE(count_lines(a) == 7);
}

TEST_CASE("thread cap env var does not change results") {
    CliFixture cli;
    const fs::path one = cli.dir / "one.csv";
    const fs::path four = cli.dir / "four.csv";
    const std::string tail = " mc --synth 10 --samples 100000 --seed 42 --output ";
    REQUIRE(std::system(("TRANCHE_KERNEL_THREADS=1 " + std::string(TRANCHE_CLI_PATH) + tail +
                         one.string())
                            .c_str()) == 0);
    REQUIRE(std::system(("TRANCHE_KERNEL_THREADS=4 " + std::string(TRANCHE_CLI_PATH) + tail +
                         four.string())
                            .c_str()) == 0);
    const std::string a = slurp(one);
    REQUIRE(!a.empty());
    REQUIRE(a == slurp(four));
}

TEST_CASE("json result output") {
    CliFixture cli;
    const auto result = cli.run("price --synth 10 --method mc --samples 20000 --format json");
    REQUIRE(result.exit_code == 0);
    const auto doc = nlohmann::json::parse(result.out);
    REQUIRE(doc.is_array());
    REQUIRE(doc.size() == 1);
    REQUIRE(doc[0]["method"] == "mc");
    REQUIRE(doc[0]["samples"] == 20000);
    REQUIRE(doc[0].contains("std_error"));
}

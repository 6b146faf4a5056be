#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "picketlab/experiment.hpp"

using namespace picketlab;
namespace fs = std::filesystem;

namespace {

constexpr double kGamma = std::numbers::egamma;

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "picketlab_experiment_tests";
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

double cell(const ResultRecord& record, std::size_t row, std::size_t col) {
    return std::stod(record.rows.at(row).at(col));
}

std::string meta(const ResultRecord& record, const std::string& key) {
    for (const auto& [k, v] : record.metadata)
        if (k == key)
            return v;
    throw std::out_of_range("metadata key " + key);
}

}  // namespace

TEST_CASE("config defaults") {
    const ExperimentConfig config = ExperimentConfig::parse("");
    CHECK(config.n() == 1);
    CHECK(config.pattern() == std::vector<Entry>{Entry::infinity()});
    CHECK(config.T() == 1000);
    CHECK(config.trials() == 8);
    CHECK(config.seed() == 12345ULL);
    CHECK(config.c() == 0.5);
    CHECK(config.chat() == 1.0);
    CHECK(config.i_max() == 5);
    CHECK(config.n_grid() == std::vector<long long>{100, 1000, 10000});
    CHECK(config.nodes() == 256);
    CHECK(config.out().empty());
    CHECK(config.serialize().empty());
}

TEST_CASE("config parse and canonical serialization") {
    const ExperimentConfig config = ExperimentConfig::parse(
        "# comment line\n"
        "\n"
        "seed = 99\n"
        "pattern=inf,5\n"
        "n=3\n");
    CHECK(config.n() == 3);
    CHECK(config.seed() == 99ULL);
    CHECK(config.has("pattern"));
    CHECK(!config.has("c"));

    // Canonical order is the known-key order, not insertion order.
    CHECK(config.serialize() == "n=3\npattern=inf,5\nseed=99\n");
    CHECK(ExperimentConfig::parse(config.serialize()) == config);

    ExperimentConfig built;
    built.set("n", "3");
    built.set("pattern", "inf,5");
    built.set("seed", "99");
    CHECK(built == config);
}

TEST_CASE("config parse errors carry line numbers") {
    CHECK_THROWS_WITH_AS(ExperimentConfig::parse("bogus=1\n"),
                         doctest::Contains("unknown key 'bogus' on line 1"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(ExperimentConfig::parse("n=1\nn=2\n"),
                         doctest::Contains("duplicate key 'n' on line 2"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(ExperimentConfig::parse("# fine\nnonsense\n"),
                         doctest::Contains("line 2 has no '='"), std::invalid_argument);
}

TEST_CASE("typed getters reject malformed values by key") {
    ExperimentConfig config;
    config.set("n", "abc");
    CHECK_THROWS_WITH_AS(config.n(), doctest::Contains("key 'n'"), std::invalid_argument);
    config.set("n", "0");
    CHECK_THROWS_AS(config.n(), std::invalid_argument);
    config.set("T", "-5");
    CHECK_THROWS_WITH_AS(config.T(), doctest::Contains("key 'T'"), std::invalid_argument);
    config.set("c", "0");
    CHECK_THROWS_WITH_AS(config.c(), doctest::Contains("must be positive"),
                         std::invalid_argument);
    config.set("pattern", "inf,,3");
    CHECK_THROWS_AS(config.pattern(), std::invalid_argument);
    CHECK_THROWS_AS(config.set("unknown", "1"), std::invalid_argument);
}

TEST_CASE("git blob hash matches stock git") {
    CHECK(git_blob_sha1("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
    CHECK(git_blob_sha1("hello world\n") == "3b18e512dba79e4c8300dd08aeb37f8e728b8dad");
    CHECK(git_blob_sha1("what is up, doc?") == "bd9dbf5aae1a3862dd1526723246b20206e5fc37");
}

TEST_CASE("format_g17 is shortest round-trip decimal") {
    CHECK(format_g17(1.0 / 3.0) == "0.3333333333333333");
    CHECK(format_g17(0.1 + 0.2) == "0.30000000000000004");
    CHECK(format_g17(0.5) == "0.5");
    CHECK(format_g17(2.0) == "2");
    CHECK(format_g17(0.0) == "0");
    for (double x : {0.1, -123.456e30, 1e-300, 6.02214076e23, std::numbers::pi})
        CHECK(std::strtod(format_g17(x).c_str(), nullptr) == x);
}

TEST_CASE("record_to_csv layout") {
    ResultRecord record;
    record.experiment_id = "demo";
    record.config_hash = "abc123";
    record.columns = {"a", "b"};
    record.rows = {{"1", "2"}, {"3", "4"}};
    record.metadata = {{"k", "v"}};
    record.duration_seconds = 5.0;  // never serialized into the CSV
    CHECK(record_to_csv(record) ==
          "# experiment=demo\n# config_hash=abc123\n# k=v\na,b\n1,2\n3,4\n");
}

TEST_CASE("write_record_csv emits file plus sidecar") {
    const fs::path dir = scratch_dir();
    ResultRecord record;
    record.experiment_id = "demo";
    record.config_hash = "abc123";
    record.columns = {"x"};
    record.rows = {{"7"}};
    record.duration_seconds = 0.25;

    write_record_csv(record, "");
    CHECK(!fs::exists(dir / "unnamed.csv"));

    const fs::path out = dir / "demo.csv";
    write_record_csv(record, out.string());
    REQUIRE(fs::exists(out));
    std::ifstream in(out);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(text == record_to_csv(record));

    const fs::path sidecar = dir / "demo.csv.meta.json";
    REQUIRE(fs::exists(sidecar));
    std::ifstream side(sidecar);
    const nlohmann::json parsed = nlohmann::json::parse(side);
    CHECK(parsed.at("experiment") == "demo");
    CHECK(parsed.at("config_hash") == "abc123");
    CHECK(parsed.at("duration_seconds").get<double>() == 0.25);
    CHECK(parsed.at("versions").at("picketlab") == "1.0.0");
}

TEST_CASE("cmd_analytic tabulates the limit spectrum") {
    ExperimentConfig config;
    config.set("n", "3");
    const ResultRecord record = cmd_analytic(config);
    CHECK(record.experiment_id == "analytic");
    CHECK(record.config_hash == git_blob_sha1(config.serialize()));
    CHECK(record.columns ==
          std::vector<std::string>{"i", "lambda_i", "normalized_gap_i", "epsilon_bound_i"});
    REQUIRE(record.rows.size() == 3);

    const double log3 = std::log(3.0);
    CHECK(std::abs(cell(record, 0, 1) - (1.5 - kGamma - log3)) < 1e-10);
    CHECK(std::abs(cell(record, 1, 1) - (1.0 - kGamma - log3)) < 1e-10);
    CHECK(std::abs(cell(record, 2, 1) - (-kGamma - log3)) < 1e-10);
    CHECK(record.rows[0][2] == "0");
    CHECK(std::abs(std::stod(meta(record, "alpha")) - (kGamma + log3)) < 1e-10);
    CHECK(meta(record, "pattern") == "inf");

    ExperimentConfig single;
    single.set("n", "1");
    single.set("pattern", "2");
    const ResultRecord one = cmd_analytic(single);
    REQUIRE(one.rows.size() == 1);
    CHECK(std::abs(cell(one, 0, 1) - (std::log(2.0) - 1.0)) < 1e-10);
}

TEST_CASE("cmd_simulate centers on the analytic exponent") {
    ExperimentConfig config;
    config.set("n", "1");
    config.set("T", "4000");
    config.set("trials", "4");
    config.set("seed", "777");
    const ResultRecord record = cmd_simulate(config);
    CHECK(record.columns ==
          std::vector<std::string>{"kind", "trial", "i", "estimate", "stderr",
                                   "analytic_lambda", "z"});
    REQUIRE(record.rows.size() == 5);  // 4 trial rows + 1 aggregate
    const auto& aggregate = record.rows.back();
    CHECK(aggregate[0] == "aggregate");
    CHECK(std::abs(std::stod(aggregate[3]) + kGamma) < 0.1);
    CHECK(std::abs(std::stod(aggregate[5]) + kGamma) < 1e-10);
    CHECK(std::abs(std::stod(aggregate[6])) < 4.0);

    // Identical config must yield identical cells for any worker count.
    setenv("PICKETLAB_WORKERS", "1", 1);
    const ResultRecord serial = cmd_simulate(config);
    setenv("PICKETLAB_WORKERS", "4", 1);
    const ResultRecord threaded = cmd_simulate(config);
    unsetenv("PICKETLAB_WORKERS");
    CHECK(serial.rows == threaded.rows);
    CHECK(serial.rows == record.rows);
}

TEST_CASE("cmd_moments reports three agreeing methods") {
    ExperimentConfig config;
    config.set("n", "2");
    config.set("pattern", "inf,5");
    config.set("T", "4");
    config.set("c", "0.3");
    config.set("trials", "200000");
    const ResultRecord record = cmd_moments(config);
    REQUIRE(record.rows.size() == 3);
    CHECK(record.rows[0][0] == "residue");
    CHECK(record.rows[1][0] == "quadrature");
    CHECK(record.rows[2][0] == "monte_carlo");
    CHECK(record.rows[0][3] == "true");
    CHECK(record.rows[1][3] == "true");
    CHECK(record.rows[2][3] == "true");
    CHECK(std::abs(cell(record, 0, 1) - cell(record, 1, 1)) < 1e-8);

    ExperimentConfig bad = config;
    bad.set("c", "0");
    CHECK_THROWS_AS(cmd_moments(bad), std::invalid_argument);
    ExperimentConfig big = config;
    big.set("T", "300");
    CHECK_THROWS_AS(cmd_moments(big), std::invalid_argument);
}

TEST_CASE("cmd_picketfence flags the theorem window") {
    ExperimentConfig config;
    config.set("n_grid", "16,100");
    const ResultRecord record = cmd_picketfence(config);
    REQUIRE(record.rows.size() == 10);  // i_max=5 rows per grid point

    // Rows are (n, i, gap, deviation, envelope, in_window); floor(sqrt(16)) = 4.
    CHECK(record.rows[0][0] == "16");
    CHECK(record.rows[0][3] == "0");
    CHECK(record.rows[3][5] == "true");
    CHECK(record.rows[4][5] == "false");
    CHECK(record.rows[9][5] == "true");

    const double dev_100_2 = cell(record, 6, 3);
    CHECK(std::abs(dev_100_2 + 0.00506) < 1e-5);

    ExperimentConfig flat;
    flat.set("n_grid", "100,100");
    CHECK_THROWS_AS(cmd_picketfence(flat), std::invalid_argument);
    ExperimentConfig descending;
    descending.set("n_grid", "100,50");
    CHECK_THROWS_AS(cmd_picketfence(descending), std::invalid_argument);
}

TEST_CASE("cmd_verify passes and stays seed-robust") {
    const ExperimentConfig config;
    const VerifyReport report = cmd_verify(config);
    CHECK(report.all_passed);
    CHECK(report.record.columns ==
          std::vector<std::string>{"property", "passed", "discrepancy", "tolerance"});
    REQUIRE(report.record.rows.size() == 6);
    for (const auto& row : report.record.rows)
        CHECK(row[1] == "true");

    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL}) {
        ExperimentConfig seeded;
        seeded.set("seed", std::to_string(seed));
        CHECK(cmd_verify(seeded).all_passed);
    }
}

TEST_CASE("cmd_verify corrupt-tolerance fixture reports red") {
    VerifyOptions options;
    options.corrupt_tolerance = true;
    const VerifyReport report = cmd_verify(ExperimentConfig{}, options);
    CHECK(!report.all_passed);
    CHECK(report.record.rows[0][0] == "determinant_identity");
    CHECK(report.record.rows[0][1] == "false");
}

TEST_CASE("cmd_verify pins resumption inputs to the config hash") {
    const fs::path dir = scratch_dir();
    ExperimentConfig config;
    config.set("n", "2");
    const fs::path prior = dir / "analytic.csv";
    write_record_csv(cmd_analytic(config), prior.string());

    VerifyOptions options;
    options.against = prior.string();
    CHECK(cmd_verify(config, options).all_passed);

    ExperimentConfig other;
    other.set("n", "3");
    CHECK_THROWS_WITH_AS(cmd_verify(other, options), doctest::Contains("hash mismatch"),
                         std::invalid_argument);

    options.against = (dir / "missing.csv").string();
    CHECK_THROWS_AS(cmd_verify(config, options), std::invalid_argument);
}

TEST_CASE("validation failures leave no partial output") {
    const fs::path dir = scratch_dir();
    const fs::path out = dir / "never.csv";

    ExperimentConfig moments;
    moments.set("c", "0");
    moments.set("out", out.string());
    CHECK_THROWS_AS(cmd_moments(moments), std::invalid_argument);
    CHECK(!fs::exists(out));

    ExperimentConfig fence;
    fence.set("n_grid", "100,50");
    fence.set("out", out.string());
    CHECK_THROWS_AS(cmd_picketfence(fence), std::invalid_argument);
    CHECK(!fs::exists(out));
}

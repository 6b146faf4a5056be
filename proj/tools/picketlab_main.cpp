// picketlab - reproducible experiments on Lyapunov spectra and singular-value
// moments of products of Ginibre and truncated Haar-unitary matrices.
//
// Subcommands map one-to-one onto the cmd_* runners.  Options mirror config
// keys; precedence is defaults < --config file < explicit flags.  Exit codes:
// 0 success, 2 validation error, 3 numeric or property failure, 4 contour
// infeasibility, 1 unexpected.

#include <cstdio>
#include <iostream>
#include <string>
#include <utility>

#include "CLI11.hpp"
#include "picketlab/experiment.hpp"
#include "picketlab/moments.hpp"

namespace {

struct CommonOptions {
    std::string config_path;
    std::string n, pattern, T, trials, seed, c, chat, i_max, n_grid, nodes, out;
};

// Flag spelling -> config key; values stay strings so the config store sees
// exactly what was typed.
constexpr std::pair<const char*, const char*> kFlagKeys[] = {
    {"--n", "n"},         {"--pattern", "pattern"}, {"--T", "T"},
    {"--trials", "trials"}, {"--seed", "seed"},     {"--c", "c"},
    {"--chat", "chat"},   {"--i-max", "i_max"},     {"--n-grid", "n_grid"},
    {"--nodes", "nodes"}, {"--out", "out"},
};

void add_common_options(CLI::App* sub, CommonOptions& common) {
    sub->add_option("--config", common.config_path, "key=value config file");
    sub->add_option("--n", common.n, "matrix dimension");
    sub->add_option("--pattern", common.pattern,
                    "cyclic factor sizes, entries > n or 'inf' (e.g. inf,5)");
    sub->add_option("--T", common.T, "number of factors");
    sub->add_option("--trials", common.trials, "independent repetitions");
    sub->add_option("--seed", common.seed, "base RNG seed");
    sub->add_option("--c", common.c, "moment exponent (c > 0)");
    sub->add_option("--chat", common.chat, "scaled exponent c-hat, so c = c-hat/T");
    sub->add_option("--i-max", common.i_max, "largest exponent index tabulated");
    sub->add_option("--n-grid", common.n_grid, "ascending dimensions (e.g. 100,1000,10000)");
    sub->add_option("--nodes", common.nodes, "starting quadrature node count");
    sub->add_option("--out", common.out, "CSV output path (stdout when absent)");
}

picketlab::ExperimentConfig build_config(const CLI::App* sub, const CommonOptions& common) {
    picketlab::ExperimentConfig config;
    if (sub->count("--config") != 0)
        config = picketlab::ExperimentConfig::from_file(common.config_path);
    const std::string* values[] = {&common.n,     &common.pattern, &common.T,
                                   &common.trials, &common.seed,    &common.c,
                                   &common.chat,  &common.i_max,   &common.n_grid,
                                   &common.nodes, &common.out};
    for (std::size_t j = 0; j < std::size(kFlagKeys); ++j)
        if (sub->count(kFlagKeys[j].first) != 0)
            config.set(kFlagKeys[j].second, *values[j]);
    return config;
}

void emit(const picketlab::ResultRecord& record, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << picketlab::record_to_csv(record);
        return;
    }
    picketlab::write_record_csv(record, out_path);
    std::cout << "wrote " << out_path << " (" << record.rows.size() << " rows, "
              << picketlab::format_g17(record.duration_seconds) << " s)\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lyapunov spectra and singular-value moments of random matrix products"};
    app.require_subcommand(1);

    CommonOptions common;
    picketlab::VerifyOptions verify_options;

    CLI::App* analytic =
        app.add_subcommand("analytic", "limit spectrum table for a factor pattern");
    CLI::App* simulate =
        app.add_subcommand("simulate", "QR-sweep Lyapunov estimates vs analytic values");
    CLI::App* moments =
        app.add_subcommand("moments", "E[S_c] by residue, quadrature, and Monte Carlo");
    CLI::App* picketfence =
        app.add_subcommand("picketfence", "normalized-gap deviations along an n-grid");
    CLI::App* verify = app.add_subcommand("verify", "run the full property suite");
    for (CLI::App* sub : {analytic, simulate, moments, picketfence, verify})
        add_common_options(sub, common);
    verify->add_option("--against", verify_options.against,
                       "previous output whose config hash must match");
    verify->add_flag("--corrupt-tolerance", verify_options.corrupt_tolerance)->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    const CLI::App* sub = app.get_subcommands().front();
    try {
        const picketlab::ExperimentConfig config = build_config(sub, common);
        if (sub == verify) {
            const picketlab::VerifyReport report = picketlab::cmd_verify(config, verify_options);
            emit(report.record, config.out());
            std::cout << "verify: " << (report.all_passed ? "all properties passed"
                                                          : "PROPERTY FAILURE")
                      << "\n";
            return report.all_passed ? 0 : 3;
        }
        picketlab::ResultRecord record;
        if (sub == analytic)
            record = picketlab::cmd_analytic(config);
        else if (sub == simulate)
            record = picketlab::cmd_simulate(config);
        else if (sub == moments)
            record = picketlab::cmd_moments(config);
        else
            record = picketlab::cmd_picketfence(config);
        emit(record, config.out());
        return 0;
    } catch (const picketlab::contour_infeasible& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const picketlab::numeric_failure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
}

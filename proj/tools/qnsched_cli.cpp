// qnsched command-line entry point: run sweeps, validate configs, print
// defaults and query the reference oracles.

#include "qnsched/experiment.hpp"
#include "qnsched/pgt.hpp"
#include "qnsched/scan_stats.hpp"
#include "oracle/brute_force.hpp"

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"

using namespace qnsched;

namespace {

void print_kv(const char* key, double v) { std::printf("%s=%.15g\n", key, v); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scheduling and admission control for a quantum network controller"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Run the (lambda, rate) sweep of a config");
    std::string run_config;
    std::optional<std::uint64_t> seed;
    std::optional<int> replications;
    std::optional<std::string> mode;
    std::optional<double> duration;
    experiment::RunOptions opts;
    std::string out_dir = "out";
    bool quiet = false;
    run->add_option("config", run_config, "JSON config file")->required()->check(CLI::ExistingFile);
    run->add_option("--seed", seed, "Base seed (replication i uses seed + i)");
    run->add_option("--replications", replications, "Replications per cell")->check(CLI::PositiveNumber);
    run->add_option("--mode", mode, "Network scheduler")->check(CLI::IsMember({"full", "dummy"}));
    run->add_option("--duration", duration, "Simulated seconds per run")->check(CLI::PositiveNumber);
    run->add_option("--out", out_dir, "Output directory");
    run->add_flag("--events", opts.events, "Write an event log per run");
    run->add_flag("--schedules", opts.export_schedules, "Write computed schedules per run (full mode)");
    run->add_flag("--time-schedules", opts.time_schedules, "Log wall-clock time of each schedule computation");
    run->add_flag("-q,--quiet", quiet, "No progress output");

    // validate
    auto* validate = app.add_subcommand("validate", "Check a config file and print it with defaults filled in");
    std::string validate_config;
    validate->add_option("config", validate_config, "JSON config file")->required();

    // defaults
    auto* defaults = app.add_subcommand("defaults", "Print the default config of an application");
    std::string app_name = "MDA";
    defaults->add_option("--app", app_name, "Application")->check(CLI::IsMember({"MDA", "CKA"}));

    // oracle
    auto* oracle = app.add_subcommand("oracle", "Scan statistics and Hoeffding reference values");
    oracle->require_subcommand(1);
    int k = 3;
    std::int64_t m = 3;
    double p = 0.5;
    std::int64_t n = 6;
    auto add_scan_opts = [&](CLI::App* sub) {
        sub->add_option("-k", k, "Successes required in a window")->required();
        sub->add_option("-m", m, "Window length in trials")->required();
        sub->add_option("-p", p, "Per-trial success probability")->required();
    };
    auto* naus = oracle->add_subcommand("naus", "Q2, Q3 and the approximate packet probability");
    add_scan_opts(naus);
    naus->add_option("-n", n, "Trials");
    auto* scan = oracle->add_subcommand("scan", "Exhaustive window probability (n <= 30)");
    add_scan_opts(scan);
    scan->add_option("-n", n, "Trials")->required();
    auto* length = oracle->add_subcommand("pga-length", "Shortest PGA reaching a packet probability");
    double target = 0.2;
    add_scan_opts(length);
    length->add_option("--target", target, "Packet probability")->required();
    auto* hoeff = oracle->add_subcommand("hoeffding", "Minimum attempts for n_inst successes");
    int n_inst = 100;
    double eps = 1e-5;
    hoeff->add_option("--n-inst", n_inst, "Required successes")->required();
    hoeff->add_option("-p", p, "Per-attempt success probability")->required();
    hoeff->add_option("--eps", eps, "Allowed failure probability")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            auto cfg = experiment::load_config(run_config);
            if (seed) cfg.base_seed = *seed;
            if (replications) cfg.replications = *replications;
            if (mode) cfg.mode = sim::mode_from_string(*mode);
            if (duration) cfg.duration_s = *duration;
            cfg.validate();
            opts.out_dir = out_dir;
            if (!quiet) opts.progress = &std::cerr;
            const auto rows = experiment::run_experiment(cfg, opts);
            if (!quiet) std::cerr << rows.size() << " runs written to " << out_dir << '\n';
        } else if (*validate) {
            const auto cfg = experiment::load_config(validate_config);
            std::cout << experiment::to_json(cfg).dump(2) << '\n';
        } else if (*defaults) {
            std::cout << experiment::to_json(experiment::default_experiment(app_from_string(app_name))).dump(2)
                      << '\n';
        } else if (*naus) {
            print_kv("q2", scan::naus_q2(k, m, p));
            print_kv("q3", scan::naus_q3(k, m, p));
            print_kv("packet_success_prob", scan::packet_success_prob({k, m, p, n}));
        } else if (*scan) {
            const oracle::WindowScanTable table(static_cast<int>(m), static_cast<int>(n));
            print_kv("window_prob", table.window_prob(k, p));
        } else if (*length) {
            std::printf("pga_length=%lld\n", static_cast<long long>(scan::min_pga_length(k, m, p, target)));
        } else if (*hoeff) {
            std::printf("min_attempts=%lld\n", static_cast<long long>(hoeffding_min_attempts(n_inst, p, eps)));
            std::printf("min_attempts_scan=%lld\n",
                        static_cast<long long>(oracle::hoeffding_min_attempts_scan(n_inst, p, eps)));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

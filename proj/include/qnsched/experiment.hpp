#pragma once

// Experiment configuration, its JSON file format and the sweep driver that
// runs every (lambda, rate) cell for a number of seeded replications.

#include "qnsched/metrics.hpp"
#include "qnsched/simulator.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace qnsched::experiment {

struct ExperimentConfig {
    NetworkConfig network;
    ControllerConfig controller;
    sim::AppTemplate app;
    sim::Regime regime = sim::Regime::peer_to_peer;
    std::vector<double> lambdas_hz{0.001};
    /// Requested packet rates; 0 stands for the adaptive rate.
    std::vector<double> rates_hz{0.1};
    double duration_s = 3600.0;
    int replications = 1;
    std::uint64_t base_seed = 1;
    sim::Mode mode = sim::Mode::dummy;

    /// Throws DomainError naming the offending key.
    void validate() const;
    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Default sweep for one application: MDA runs peer-to-peer with a 300 s
/// interval, CKA client-server with a 3600 s interval.
ExperimentConfig default_experiment(AppKind app);

nlohmann::json to_json(const ExperimentConfig& cfg);
/// Missing keys take the defaults of the application named under
/// session.app; unknown keys are an error.
ExperimentConfig from_json(const nlohmann::json& j);

ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const ExperimentConfig& cfg, const std::filesystem::path& path);

/// "adaptive" for 0, otherwise the rate in Hz with up to 12 significant digits.
std::string rate_label(double rate_hz);

sim::SimConfig cell_config(const ExperimentConfig& cfg, double lambda_hz, double rate_hz);

struct RunOptions {
    std::filesystem::path out_dir = ".";
    bool events = false;
    bool export_schedules = false;
    bool time_schedules = false;
    std::ostream* progress = nullptr;
};

struct MetricsRow {
    double lambda_hz = 0.0;
    std::string rate_label;
    int replication = 0;
    std::uint64_t seed = 0;
    metrics::RunMetrics metrics;
};

/// Runs the sweep and writes metrics.csv and summary.csv into out_dir,
/// plus per-run event logs and schedules when requested. Each run is
/// seeded with base_seed + replication index.
std::vector<MetricsRow> run_experiment(const ExperimentConfig& cfg, const RunOptions& opts);

/// One simulation of a cell; the building block of run_experiment.
MetricsRow run_replication(const ExperimentConfig& cfg, double lambda_hz, double rate_hz, int replication,
                           const RunOptions& opts);

void write_metrics_header(std::ostream& out);
void write_metrics_row(std::ostream& out, const MetricsRow& row);
void write_summary(std::ostream& out, const std::vector<MetricsRow>& rows);

}  // namespace qnsched::experiment

#include "qnsched/experiment.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace qnsched::experiment {

using nlohmann::json;

namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : ""; }

// Reads obj[key] into out if present, with a diagnostic naming the key.
template <typename T>
void read(const json& obj, const std::string& section, const char* key, T& out) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    try {
        out = it->template get<T>();
    } catch (const json::exception&) {
        throw DomainError(section + "." + key + ": wrong type (" + it->dump() + ")");
    }
}

void reject_unknown(const json& obj, const std::string& section, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) throw DomainError(section + ": expected an object");
    std::set<std::string> known(keys.begin(), keys.end());
    for (const auto& [k, v] : obj.items())
        if (!known.contains(k)) throw DomainError(section + ": unknown key '" + k + "'");
}

const json& section(const json& j, const char* name) {
    static const json empty = json::object();
    auto it = j.find(name);
    return it == j.end() ? empty : *it;
}

std::string file_tag(double lambda, const std::string& rate, int rep) {
    return "l" + num(lambda) + "_r" + rate + "_rep" + std::to_string(rep);
}

}  // namespace

void ExperimentConfig::validate() const {
    network.validate();
    controller.validate();
    if (!(app.window_s > 0.0)) throw DomainError("session.window_s must be positive");
    if (app.links < 1) throw DomainError("session.links must be at least 1");
    if (!(app.min_fidelity >= 0.0 && app.min_fidelity <= 1.0))
        throw DomainError("session.min_fidelity must lie in [0, 1]");
    if (!(app.min_separation_s >= 0.0)) throw DomainError("session.min_separation_s must be non-negative");
    if (app.n_inst < 1) throw DomainError("session.n_inst must be at least 1");
    if (!(app.max_duration_s > 0.0)) throw DomainError("session.max_duration_s must be positive");
    if (lambdas_hz.empty()) throw DomainError("session.lambdas_hz must not be empty");
    for (double l : lambdas_hz)
        if (!(l > 0.0)) throw DomainError("session.lambdas_hz entries must be positive");
    if (rates_hz.empty()) throw DomainError("session.rates_hz must not be empty");
    for (double r : rates_hz)
        if (!(r >= 0.0)) throw DomainError("session.rates_hz entries must be non-negative (0 = adaptive)");
    if (!(duration_s > 0.0)) throw DomainError("sim.duration_s must be positive");
    if (replications < 1) throw DomainError("sim.replications must be at least 1");
}

ExperimentConfig default_experiment(AppKind app) {
    ExperimentConfig c;
    c.app = sim::default_template(app);
    if (app == AppKind::MDA) {
        c.regime = sim::Regime::peer_to_peer;
        c.controller.scheduling_interval_s = 300.0;
        c.rates_hz = {0.1, 0.2, 0.0};
        c.lambdas_hz = {0.00025, 0.0005, 0.001, 0.0015, 0.002, 0.0025};
        c.duration_s = 24.0 * 3600.0;
    } else {
        c.regime = sim::Regime::client_server;
        c.controller.scheduling_interval_s = 3600.0;
        c.rates_hz = {0.001, 0.0};
        c.lambdas_hz = {5e-6, 1e-5, 2e-5, 4e-5};
        c.duration_s = 60.0 * 24.0 * 3600.0;
    }
    c.replications = 10;
    return c;
}

json to_json(const ExperimentConfig& c) {
    return json{
        {"network",
         {{"n_nodes", c.network.n_nodes},
          {"slot_duration_s", c.network.slot_duration_s},
          {"p_gen", c.network.p_gen},
          {"fidelity", c.network.fidelity},
          {"qubits_per_node", c.network.qubits_per_node}}},
        {"controller",
         {{"p_packet", c.controller.p_packet},
          {"epsilon_service", c.controller.epsilon_service},
          {"pga_cap", c.controller.pga_cap},
          {"utilisation_bound", c.controller.utilisation_bound},
          {"registration_utilisation_bound", c.controller.registration_utilisation_bound},
          {"alpha_c", c.controller.alpha_c},
          {"scheduling_interval_s", c.controller.scheduling_interval_s}}},
        {"session",
         {{"app", to_string(c.app.app)},
          {"regime", sim::to_string(c.regime)},
          {"window_s", c.app.window_s},
          {"links", c.app.links},
          {"min_fidelity", c.app.min_fidelity},
          {"min_separation_s", c.app.min_separation_s},
          {"n_inst", c.app.n_inst},
          {"max_duration_s", c.app.max_duration_s},
          {"lambdas_hz", c.lambdas_hz},
          {"rates_hz", c.rates_hz}}},
        {"sim",
         {{"duration_s", c.duration_s},
          {"replications", c.replications},
          {"base_seed", c.base_seed},
          {"mode", sim::to_string(c.mode)}}},
    };
}

ExperimentConfig from_json(const json& j) {
    reject_unknown(j, "config", {"network", "controller", "session", "sim"});
    const json& net = section(j, "network");
    const json& ctl = section(j, "controller");
    const json& ses = section(j, "session");
    const json& sm = section(j, "sim");
    reject_unknown(net, "network", {"n_nodes", "slot_duration_s", "p_gen", "fidelity", "qubits_per_node"});
    reject_unknown(ctl, "controller",
                   {"p_packet", "epsilon_service", "pga_cap", "utilisation_bound", "registration_utilisation_bound",
                    "alpha_c", "scheduling_interval_s"});
    reject_unknown(ses, "session",
                   {"app", "regime", "window_s", "links", "min_fidelity", "min_separation_s", "n_inst",
                    "max_duration_s", "lambdas_hz", "rates_hz"});
    reject_unknown(sm, "sim", {"duration_s", "replications", "base_seed", "mode"});

    std::string app = "MDA";
    read(ses, "session", "app", app);
    ExperimentConfig c = default_experiment(app_from_string(app));

    read(net, "network", "n_nodes", c.network.n_nodes);
    read(net, "network", "slot_duration_s", c.network.slot_duration_s);
    read(net, "network", "p_gen", c.network.p_gen);
    read(net, "network", "fidelity", c.network.fidelity);
    read(net, "network", "qubits_per_node", c.network.qubits_per_node);

    read(ctl, "controller", "p_packet", c.controller.p_packet);
    read(ctl, "controller", "epsilon_service", c.controller.epsilon_service);
    read(ctl, "controller", "pga_cap", c.controller.pga_cap);
    read(ctl, "controller", "utilisation_bound", c.controller.utilisation_bound);
    read(ctl, "controller", "registration_utilisation_bound", c.controller.registration_utilisation_bound);
    read(ctl, "controller", "alpha_c", c.controller.alpha_c);
    read(ctl, "controller", "scheduling_interval_s", c.controller.scheduling_interval_s);

    std::string regime = sim::to_string(c.regime);
    read(ses, "session", "regime", regime);
    c.regime = sim::regime_from_string(regime);
    read(ses, "session", "window_s", c.app.window_s);
    read(ses, "session", "links", c.app.links);
    read(ses, "session", "min_fidelity", c.app.min_fidelity);
    read(ses, "session", "min_separation_s", c.app.min_separation_s);
    read(ses, "session", "n_inst", c.app.n_inst);
    read(ses, "session", "max_duration_s", c.app.max_duration_s);
    read(ses, "session", "lambdas_hz", c.lambdas_hz);
    read(ses, "session", "rates_hz", c.rates_hz);

    read(sm, "sim", "duration_s", c.duration_s);
    read(sm, "sim", "replications", c.replications);
    read(sm, "sim", "base_seed", c.base_seed);
    std::string mode = sim::to_string(c.mode);
    read(sm, "sim", "mode", mode);
    c.mode = sim::mode_from_string(mode);

    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open config file '" + path.string() + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw DomainError("config file '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return from_json(j);
}

void save_config(const ExperimentConfig& cfg, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DomainError("cannot write config file '" + path.string() + "'");
    out << to_json(cfg).dump(2) << '\n';
}

std::string rate_label(double rate_hz) { return rate_hz == 0.0 ? "adaptive" : num(rate_hz); }

sim::SimConfig cell_config(const ExperimentConfig& cfg, double lambda_hz, double rate_hz) {
    sim::SimConfig s;
    s.network = cfg.network;
    s.controller = cfg.controller;
    s.sessions.app = cfg.app;
    s.sessions.regime = cfg.regime;
    s.sessions.lambda_hz = lambda_hz;
    s.sessions.rate_hz = rate_hz;
    s.duration_s = cfg.duration_s;
    s.mode = cfg.mode;
    return s;
}

MetricsRow run_replication(const ExperimentConfig& cfg, double lambda_hz, double rate_hz, int replication,
                           const RunOptions& opts) {
    sim::SimConfig sc = cell_config(cfg, lambda_hz, rate_hz);
    sc.log_events = opts.events;
    sc.time_schedules = opts.time_schedules;
    const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(replication);
    const std::string tag = file_tag(lambda_hz, rate_label(rate_hz), replication);

    sim::Simulation simulation(sc, seed);
    std::ofstream schedules;
    if (opts.export_schedules && cfg.mode == sim::Mode::full) {
        schedules.open(opts.out_dir / ("schedule_" + tag + ".csv"));
        simulation.set_schedule_sink(&schedules);
    }
    simulation.run();

    if (opts.events) {
        std::ofstream ev(opts.out_dir / ("events_" + tag + ".csv"));
        simulation.events().write_csv(ev);
    }
    if (opts.time_schedules && !simulation.schedule_times_s().empty()) {
        std::ofstream tf(opts.out_dir / ("schedule_times_" + tag + ".csv"));
        tf << "interval_index,seconds\n";
        const auto& times = simulation.schedule_times_s();
        for (std::size_t i = 0; i < times.size(); ++i) tf << i << ',' << num(times[i]) << '\n';
    }

    MetricsRow row;
    row.lambda_hz = lambda_hz;
    row.rate_label = rate_label(rate_hz);
    row.replication = replication;
    row.seed = seed;
    row.metrics = metrics::compute(simulation.sessions());
    return row;
}

void write_metrics_header(std::ostream& out) {
    out << "lambda,rate_label,replication,seed,p_ms,mean_queue_s,n_sessions,n_ended\n";
}

void write_metrics_row(std::ostream& out, const MetricsRow& r) {
    out << num(r.lambda_hz) << ',' << r.rate_label << ',' << r.replication << ',' << r.seed << ','
        << opt_num(r.metrics.p_ms) << ',' << opt_num(r.metrics.mean_queue_time_s) << ',' << r.metrics.n_sessions
        << ',' << r.metrics.n_ended << '\n';
}

void write_summary(std::ostream& out, const std::vector<MetricsRow>& rows) {
    out << "lambda,rate_label,replications,p_ms_mean,p_ms_std,mean_queue_s_mean,mean_queue_s_std\n";
    std::vector<std::pair<double, std::string>> cells;
    std::map<std::pair<double, std::string>, std::pair<std::vector<double>, std::vector<double>>> values;
    std::map<std::pair<double, std::string>, int> counts;
    for (const auto& r : rows) {
        const auto key = std::make_pair(r.lambda_hz, r.rate_label);
        if (!counts.contains(key)) cells.push_back(key);
        ++counts[key];
        if (r.metrics.p_ms) values[key].first.push_back(*r.metrics.p_ms);
        if (r.metrics.mean_queue_time_s) values[key].second.push_back(*r.metrics.mean_queue_time_s);
    }
    for (const auto& key : cells) {
        const auto& [pm, qt] = values[key];
        auto cols = [&](const std::vector<double>& v) {
            if (v.empty()) return std::string(",");
            const auto s = metrics::summarise(v);
            return num(s.mean) + "," + num(s.stddev);
        };
        out << num(key.first) << ',' << key.second << ',' << counts[key] << ',' << cols(pm) << ',' << cols(qt)
            << '\n';
    }
}

std::vector<MetricsRow> run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
    cfg.validate();
    std::filesystem::create_directories(opts.out_dir);
    std::ofstream metrics_out(opts.out_dir / "metrics.csv");
    if (!metrics_out) throw DomainError("cannot write to output directory '" + opts.out_dir.string() + "'");
    write_metrics_header(metrics_out);

    std::vector<MetricsRow> rows;
    for (double lambda : cfg.lambdas_hz) {
        for (double rate : cfg.rates_hz) {
            for (int rep = 0; rep < cfg.replications; ++rep) {
                rows.push_back(run_replication(cfg, lambda, rate, rep, opts));
                write_metrics_row(metrics_out, rows.back());
                metrics_out.flush();
                if (opts.progress)
                    *opts.progress << "lambda=" << num(lambda) << " rate=" << rate_label(rate) << " rep=" << rep
                                   << " p_ms=" << opt_num(rows.back().metrics.p_ms) << '\n';
            }
        }
    }
    std::ofstream summary(opts.out_dir / "summary.csv");
    write_summary(summary, rows);
    return rows;
}

}  // namespace qnsched::experiment

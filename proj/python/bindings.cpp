#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "qnsched/edf.hpp"
#include "qnsched/experiment.hpp"
#include "qnsched/metrics.hpp"
#include "qnsched/pgt.hpp"
#include "qnsched/scan_stats.hpp"
#include "qnsched/simulator.hpp"

namespace py = pybind11;
using namespace qnsched;

namespace {

experiment::ExperimentConfig parse_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DomainError(std::string("config is not valid JSON: ") + e.what());
    }
    return experiment::from_json(j);
}

py::dict row_to_dict(const experiment::MetricsRow& r) {
    py::dict d;
    d["lambda"] = r.lambda_hz;
    d["rate_label"] = r.rate_label;
    d["replication"] = r.replication;
    d["seed"] = r.seed;
    d["p_ms"] = r.metrics.p_ms;
    d["mean_queue_s"] = r.metrics.mean_queue_time_s;
    d["n_sessions"] = r.metrics.n_sessions;
    d["n_ended"] = r.metrics.n_ended;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Scheduling and admission control for a quantum network controller";
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

    py::class_<NetworkConfig>(m, "NetworkConfig")
        .def(py::init<>())
        .def_readwrite("n_nodes", &NetworkConfig::n_nodes)
        .def_readwrite("slot_duration_s", &NetworkConfig::slot_duration_s)
        .def_readwrite("p_gen", &NetworkConfig::p_gen)
        .def_readwrite("fidelity", &NetworkConfig::fidelity)
        .def_readwrite("qubits_per_node", &NetworkConfig::qubits_per_node)
        .def("validate", &NetworkConfig::validate);

    py::class_<ControllerConfig>(m, "ControllerConfig")
        .def(py::init<>())
        .def_readwrite("p_packet", &ControllerConfig::p_packet)
        .def_readwrite("epsilon_service", &ControllerConfig::epsilon_service)
        .def_readwrite("pga_cap", &ControllerConfig::pga_cap)
        .def_readwrite("utilisation_bound", &ControllerConfig::utilisation_bound)
        .def_readwrite("registration_utilisation_bound", &ControllerConfig::registration_utilisation_bound)
        .def_readwrite("alpha_c", &ControllerConfig::alpha_c)
        .def_readwrite("scheduling_interval_s", &ControllerConfig::scheduling_interval_s)
        .def("validate", &ControllerConfig::validate);

    m.def("seconds_to_slots", &seconds_to_slots, py::arg("seconds"), py::arg("slot_duration"));

    // Scan statistics.
    m.def("binom_cdf", &scan::binom_cdf, py::arg("r"), py::arg("s"), py::arg("p"));
    m.def("naus_q2", &scan::naus_q2, py::arg("k"), py::arg("m"), py::arg("p"));
    m.def("naus_q3", &scan::naus_q3, py::arg("k"), py::arg("m"), py::arg("p"));
    m.def(
        "packet_success_prob",
        [](int k, std::int64_t mm, double p, std::int64_t n) { return scan::packet_success_prob({k, mm, p, n}); },
        py::arg("k"), py::arg("m"), py::arg("p"), py::arg("n"));
    m.def("min_pga_length", &scan::min_pga_length, py::arg("k"), py::arg("m"), py::arg("p"), py::arg("target"));

    // Task creation.
    m.def("hoeffding_min_attempts", &hoeffding_min_attempts, py::arg("n_inst"), py::arg("p_packet"),
          py::arg("epsilon_service"));
    m.def("period_from_rate", &period_from_rate, py::arg("attempt_rate_hz"), py::arg("slot_duration_s"));

    py::class_<PacketGenerationTask>(m, "PacketGenerationTask")
        .def(py::init([](PgtId id, Slot execution, Slot period, std::vector<ResourceId> resources, Slot offset,
                         Slot min_separation, Slot expiry_slot) {
                 PacketGenerationTask t;
                 t.id = id;
                 t.demand_id = id;
                 t.realisation.execution_slots = execution;
                 t.realisation.resources = std::move(resources);
                 t.period = period;
                 t.offset = offset;
                 t.min_separation = min_separation;
                 t.expiry_slot = expiry_slot;
                 return t;
             }),
             py::arg("id"), py::arg("execution"), py::arg("period"), py::arg("resources"), py::arg("offset") = 0,
             py::arg("min_separation") = 0, py::arg("expiry_slot") = std::numeric_limits<Slot>::max() / 4)
        .def_readonly("id", &PacketGenerationTask::id)
        .def_property_readonly("execution", &PacketGenerationTask::execution)
        .def_readonly("period", &PacketGenerationTask::period)
        .def_readonly("offset", &PacketGenerationTask::offset)
        .def_readonly("min_separation", &PacketGenerationTask::min_separation)
        .def_readonly("expiry_slot", &PacketGenerationTask::expiry_slot)
        .def_property_readonly("resources", &PacketGenerationTask::resources)
        .def_property_readonly("utilisation", &PacketGenerationTask::utilisation)
        .def_property_readonly("job_limit", &PacketGenerationTask::job_limit);

    // Scheduling.
    py::class_<ScheduleEntry>(m, "ScheduleEntry")
        .def_readonly("pgt_id", &ScheduleEntry::pgt_id)
        .def_readonly("job_index", &ScheduleEntry::job_index)
        .def_readonly("start", &ScheduleEntry::start)
        .def_readonly("end", &ScheduleEntry::end)
        .def_readonly("deadline", &ScheduleEntry::deadline)
        .def_readonly("resources", &ScheduleEntry::resources)
        .def("__repr__", [](const ScheduleEntry& e) {
            return "<ScheduleEntry pgt=" + std::to_string(e.pgt_id) + " job=" + std::to_string(e.job_index) +
                   " [" + std::to_string(e.start) + ", " + std::to_string(e.end) + ")>";
        });

    py::class_<NetworkSchedule>(m, "NetworkSchedule")
        .def_readonly("interval_index", &NetworkSchedule::interval_index)
        .def_readonly("start_slot", &NetworkSchedule::start_slot)
        .def_readonly("end_slot", &NetworkSchedule::end_slot)
        .def_readonly("entries", &NetworkSchedule::entries);

    py::class_<SchedulerState>(m, "SchedulerState")
        .def(py::init<>())
        .def_property_readonly("deadline_misses", &SchedulerState::deadline_misses);

    m.def(
        "compute_schedule",
        [](const std::vector<PacketGenerationTask>& tasks, std::int64_t index, Slot start, Slot end,
           SchedulerState& state) { return compute_schedule(tasks, index, start, end, state); },
        py::arg("tasks"), py::arg("interval_index"), py::arg("start_slot"), py::arg("end_slot"), py::arg("state"));

    // Simulation and metrics.
    py::class_<Session>(m, "Session")
        .def_readonly("id", &Session::id)
        .def_property_readonly("pair", [](const Session& s) { return py::make_tuple(s.nodes.first, s.nodes.second); })
        .def_property_readonly("state", [](const Session& s) { return to_string(s.state); })
        .def_readonly("submit_s", &Session::submit_s)
        .def_readonly("expiry_s", &Session::expiry_s)
        .def_readonly("queue_exit_s", &Session::queue_exit_s)
        .def_readonly("packets_generated", &Session::packets_generated)
        .def_readonly("pgas_executed", &Session::pgas_executed)
        .def_property_readonly("minimal_service", &Session::minimal_service);

    m.def(
        "simulate",
        [](const std::string& config_json, double lambda_hz, double rate_hz, std::uint64_t seed) {
            const auto cfg = parse_config(config_json);
            sim::Simulation s(experiment::cell_config(cfg, lambda_hz, rate_hz), seed);
            {
                py::gil_scoped_release release;
                s.run();
            }
            return s.sessions();
        },
        py::arg("config_json"), py::arg("lambda_hz"), py::arg("rate_hz"), py::arg("seed"),
        "Runs one simulation of a (lambda, rate) cell and returns its sessions.");

    m.def(
        "session_metrics",
        [](const std::vector<Session>& sessions) {
            const auto r = metrics::compute(sessions);
            py::dict d;
            d["p_ms"] = r.p_ms;
            d["mean_queue_s"] = r.mean_queue_time_s;
            d["n_sessions"] = r.n_sessions;
            d["n_ended"] = r.n_ended;
            return d;
        },
        py::arg("sessions"));
    m.def("analytic_expected_queue", &metrics::analytic_expected_queue, py::arg("lambda_hz"),
          py::arg("interval_s"));
    m.def(
        "ks_two_sample",
        [](std::vector<double> a, std::vector<double> b) {
            const auto r = metrics::ks_two_sample(std::move(a), std::move(b));
            return py::make_tuple(r.statistic, r.p_value);
        },
        py::arg("a"), py::arg("b"), "Returns (statistic, asymptotic p-value).");

    // Configuration and sweeps.
    m.def(
        "default_config",
        [](const std::string& app) { return experiment::to_json(experiment::default_experiment(app_from_string(app))).dump(2); },
        py::arg("app") = "MDA");
    m.def(
        "normalise_config", [](const std::string& text) { return experiment::to_json(parse_config(text)).dump(2); },
        py::arg("config_json"), "Validates a config and returns it with every default filled in.");
    m.def(
        "run_experiment",
        [](const std::string& config_json, const std::filesystem::path& out_dir, bool events) {
            const auto cfg = parse_config(config_json);
            experiment::RunOptions opts;
            opts.out_dir = out_dir;
            opts.events = events;
            std::vector<experiment::MetricsRow> rows;
            {
                py::gil_scoped_release release;
                rows = experiment::run_experiment(cfg, opts);
            }
            py::list out;
            for (const auto& r : rows) out.append(row_to_dict(r));
            return out;
        },
        py::arg("config_json"), py::arg("out_dir"), py::arg("events") = false);
}

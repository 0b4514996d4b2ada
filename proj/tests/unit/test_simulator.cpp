#include "qnsched/simulator.hpp"

#include "qnsched/scan_stats.hpp"
#include "support/builders.hpp"

#include "doctest.h"

#include <cmath>
#include <set>
#include <sstream>

using namespace qnsched;
using namespace qnsched::sim;
using qnsched::testing::make_task;

namespace {

PgaExecution execution(Slot window, int links, Slot start = 0, Slot end = 1000) {
    PgaExecution ex;
    ex.entry.start = start;
    ex.entry.end = end;
    ex.window = window;
    ex.links = links;
    return ex;
}

SimConfig small_config(Mode mode) {
    SimConfig c;
    c.controller.scheduling_interval_s = 30.0;
    c.controller.pga_cap = 150;
    c.sessions.app = default_template(AppKind::MDA);
    c.sessions.app.max_duration_s = 600.0;
    c.sessions.app.n_inst = 10;
    c.sessions.lambda_hz = 0.01;
    c.sessions.rate_hz = 0.1;
    c.duration_s = 900.0;
    c.mode = mode;
    c.log_events = true;
    return c;
}

}  // namespace

TEST_CASE("regimes and pairs") {
    CHECK(session_pairs(Regime::peer_to_peer, 6).size() == 15);
    const auto cs = session_pairs(Regime::client_server, 6);
    REQUIRE(cs.size() == 5);
    for (const auto& p : cs) CHECK(p.first == 0);
    CHECK(regime_from_string("client_server") == Regime::client_server);
    CHECK(mode_from_string("full") == Mode::full);
    CHECK_THROWS_AS(mode_from_string("fast"), DomainError);
}

TEST_CASE("default templates") {
    const auto mda = default_template(AppKind::MDA);
    CHECK(mda.links == 1);
    CHECK(mda.window_s == 0.01);
    CHECK(mda.n_inst == 100);
    CHECK(mda.max_duration_s == 2100.0);
    const auto cka = default_template(AppKind::CKA);
    CHECK(cka.links == 2);
    CHECK(cka.window_s == 0.1);
    CHECK(cka.min_separation_s == 0.1);
    CHECK(cka.max_duration_s == 345600.0);
}

TEST_CASE("step_slot with p_gen = 0 never produces a packet") {
    Rng rng(1);
    std::vector<PgaExecution> ex{execution(3, 1), execution(5, 2)};
    for (Slot t = 0; t < 1000; ++t) CHECK(step_slot(ex, t, 0.0, rng).empty());
}

TEST_CASE("step_slot with p_gen = 1 completes after links slots") {
    Rng rng(1);
    std::vector<PgaExecution> ex{execution(3, 3)};
    CHECK(step_slot(ex, 0, 1.0, rng).empty());
    CHECK(step_slot(ex, 1, 1.0, rng).empty());
    const auto ev = step_slot(ex, 2, 1.0, rng);
    REQUIRE(ev.size() == 1);
    CHECK(ev[0].slot == 2);
    CHECK(ex[0].packet_done);
    CHECK(step_slot(ex, 3, 1.0, rng).empty());  // one packet per PGA
}

TEST_CASE("single-link packets arrive after a geometric wait") {
    Rng rng(7);
    const double p = 0.05;
    double sum = 0.0;
    const int runs = 20000;
    for (int i = 0; i < runs; ++i) {
        std::vector<PgaExecution> ex{execution(1, 1)};
        Slot t = 0;
        while (step_slot(ex, t, p, rng).empty()) ++t;
        sum += static_cast<double>(t + 1);
    }
    const double mean = sum / runs;
    const double se = std::sqrt((1 - p) / (p * p) / runs);
    CHECK(std::abs(mean - 1.0 / p) < 4 * se);
}

TEST_CASE("three successes in a window of three means three in a row") {
    Rng rng(3);
    int hits = 0;
    const int runs = 40000;
    for (int i = 0; i < runs; ++i) {
        std::vector<PgaExecution> ex{execution(3, 3)};
        for (Slot t = 0; t < 12; ++t)
            if (!step_slot(ex, t, 0.5, rng).empty()) break;
        hits += ex[0].packet_done;
    }
    const double exact = 0.583740234375;  // enumeration over 2^12 sequences
    const double freq = static_cast<double>(hits) / runs;
    CHECK(std::abs(freq - exact) < 4 * std::sqrt(exact * (1 - exact) / runs));
}

TEST_CASE("run_interval counts one PGA and at most one packet per entry") {
    auto task = make_task(1, 50, 100, {0, 1});
    task.realisation.window_slots = 10;
    task.realisation.links = 1;
    std::map<PgtId, PacketGenerationTask> tasks{{1, task}};
    NetworkSchedule s;
    s.start_slot = 0;
    s.end_slot = 1000;
    for (int j = 0; j < 10; ++j) s.entries.push_back({1, 1, j + 1, j * 100, j * 100 + 50, (j + 1) * 100, {0, 1}});
    Rng rng(5);
    EventLog log;
    const auto rep = run_interval(s, tasks, 0.05, rng, &log);
    CHECK(rep.pgas.at(1) == 10);
    const auto& pk = rep.packets.count(1) ? rep.packets.at(1) : std::vector<Slot>{};
    CHECK(pk.size() <= 10);
    CHECK(log.count(EventType::pga_start) == 10);
    CHECK(log.count(EventType::pga_end) == 10);
    CHECK(log.count(EventType::packet) == pk.size());
    // Every packet lies inside one of the PGAs.
    for (Slot at : pk) {
        bool inside = false;
        for (const auto& e : s.entries) inside = inside || (at >= e.start && at < e.end);
        CHECK(inside);
    }
}

TEST_CASE("PGA counts per interval follow nominal releases") {
    auto t = make_task(1, 10, 100, {0}, 1000, 0, 1000 + 100 * 25);
    CHECK(pga_count_in_interval(t, 0, 1000) == 0);
    CHECK(pga_count_in_interval(t, 1000, 2000) == 10);
    CHECK(pga_count_in_interval(t, 1050, 1150) == 1);
    CHECK(pga_count_in_interval(t, 3000, 5000) == 5);  // capped by the job limit
    CHECK(pga_count_in_interval(t, 0, 100000) == 25);
}

TEST_CASE("dummy interval draws binomial packets") {
    Rng rng(11);
    auto none = dummy_run_interval({{1, 0}}, 0.2, 100, rng);
    CHECK(none.packets.empty());
    CHECK(none.pgas.at(1) == 0);
    double total = 0.0;
    for (int i = 0; i < 2000; ++i) {
        auto r = dummy_run_interval({{1, 100}}, 0.2, 100, rng);
        total += r.packets.count(1) ? static_cast<double>(r.packets.at(1).size()) : 0.0;
    }
    CHECK(total / 2000 == doctest::Approx(20.0).epsilon(0.03));
}

TEST_CASE("simulation is deterministic per seed") {
    for (Mode mode : {Mode::dummy, Mode::full}) {
        Simulation a(small_config(mode), 42);
        Simulation b(small_config(mode), 42);
        a.run();
        b.run();
        std::ostringstream la;
        std::ostringstream lb;
        a.events().write_csv(la);
        b.events().write_csv(lb);
        CHECK(la.str() == lb.str());
        CHECK(a.sessions().size() == b.sessions().size());
        Simulation c(small_config(mode), 43);
        c.run();
        std::ostringstream lc;
        c.events().write_csv(lc);
        CHECK(la.str() != lc.str());
    }
}

TEST_CASE("one live session per pair and consistent lifecycles") {
    Simulation s(small_config(Mode::full), 9);
    s.run();
    CHECK(s.interval_index() == 30);
    std::map<NodePair, std::vector<const Session*>> by_pair;
    for (const auto& x : s.sessions()) by_pair[x.nodes].push_back(&x);
    for (const auto& [pair, list] : by_pair) {
        // Sessions of a pair follow each other; only the last may be live.
        for (std::size_t i = 0; i + 1 < list.size(); ++i) CHECK(list[i]->ended());
        for (const auto* x : list) {
            CHECK(x->packets_generated <= x->pgas_executed);
            CHECK(x->packets_generated >= 0);
            if (x->state == SessionState::terminated) CHECK(x->minimal_service());
            if (x->queue_exit_s) CHECK(*x->queue_exit_s >= x->submit_s);
        }
    }
    for (const auto& e : s.events().events())
        if (e.type == EventType::terminate) CHECK(e.time_slot % 300000 == 0);
}

TEST_CASE("a session that is never scheduled expires without service") {
    SimConfig c = small_config(Mode::dummy);
    c.controller.pga_cap = 1;  // nothing fits
    Simulation s(c, 3);
    s.run();
    REQUIRE_FALSE(s.sessions().empty());
    for (const auto& x : s.sessions()) {
        CHECK(x.pgas_executed == 0);
        CHECK_FALSE(x.minimal_service());
        CHECK(x.state != SessionState::terminated);
    }
}

TEST_CASE("a single instance is enough to terminate") {
    SimConfig c = small_config(Mode::full);
    c.sessions.app.n_inst = 1;
    Simulation s(c, 4);
    s.run();
    int terminated = 0;
    for (const auto& x : s.sessions()) terminated += x.state == SessionState::terminated;
    CHECK(terminated > 0);
}

TEST_CASE("schedules can be exported") {
    SimConfig c = small_config(Mode::full);
    c.duration_s = 60.0;
    Simulation s(c, 4);
    std::ostringstream out;
    s.set_schedule_sink(&out);
    s.run();
    CHECK(out.str().rfind("interval_index,pgt_id,job_index,start_slot,end_slot,resources\n", 0) == 0);
}

TEST_CASE("bad simulation configs are rejected") {
    SimConfig c = small_config(Mode::dummy);
    c.sessions.lambda_hz = 0.0;
    CHECK_THROWS_AS(Simulation(c, 1), DomainError);
    c = small_config(Mode::dummy);
    c.duration_s = 0.0;
    CHECK_THROWS_AS(Simulation(c, 1), DomainError);
}

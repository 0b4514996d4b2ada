#include "qnsched/core.hpp"

#include "doctest.h"

using namespace qnsched;

TEST_CASE("seconds_to_slots rounds to the nearest slot") {
    CHECK(seconds_to_slots(300.0, 100e-6) == 3'000'000);
    CHECK(seconds_to_slots(0.0, 100e-6) == 0);
    CHECK(seconds_to_slots(0.01, 100e-6) == 100);
    CHECK(seconds_to_slots(0.1, 100e-6) == 1000);
    CHECK(seconds_to_slots(2100.0, 100e-6) == 21'000'000);
    CHECK(seconds_to_slots(0.00015, 100e-6) == 2);  // exact half rounds up
    CHECK(seconds_to_slots(0.000149, 100e-6) == 1);
    CHECK(seconds_to_slots(345600.0, 100e-6) == 3'456'000'000LL);
}

TEST_CASE("seconds_to_slots rejects bad input") {
    CHECK_THROWS_AS(seconds_to_slots(-1.0, 100e-6), DomainError);
    CHECK_THROWS_AS(seconds_to_slots(1.0, 0.0), DomainError);
    CHECK_THROWS_AS(seconds_to_slots(1.0, -1.0), DomainError);
}

TEST_CASE("slot conversion round-trips on slot multiples") {
    for (Slot s : {Slot{0}, Slot{1}, Slot{2976}, Slot{3'000'000}, Slot{123'456'789}})
        CHECK(seconds_to_slots(slots_to_seconds(s, 100e-6), 100e-6) == s);
}

TEST_CASE("node pairs are unordered") {
    NodePair a(3, 1);
    CHECK(a.first == 1);
    CHECK(a.second == 3);
    CHECK(a == NodePair(1, 3));
    CHECK(a.label() == "1-3");
    CHECK(a.contains(3));
    CHECK_FALSE(a.contains(2));
    CHECK_THROWS_AS(NodePair(2, 2), DomainError);
    CHECK_THROWS_AS(NodePair(-1, 2), DomainError);
}

TEST_CASE("demand validation") {
    Demand d;
    d.id = 1;
    d.nodes = NodePair(0, 1);
    d.options = {PacketOption{0.01, 1, 0.9, 0.1}};
    d.expiry_s = 10.0;
    d.submit_s = 0.0;
    d.n_inst = 5;
    CHECK_NOTHROW(d.validate());

    SUBCASE("no options") {
        d.options.clear();
        CHECK_THROWS_AS(d.validate(), DomainError);
    }
    SUBCASE("expired at submission") {
        d.expiry_s = 0.0;
        CHECK_THROWS_AS(d.validate(), DomainError);
    }
    SUBCASE("zero instances") {
        d.n_inst = 0;
        CHECK_THROWS_AS(d.validate(), DomainError);
    }
    SUBCASE("negative rate") {
        d.options[0].rate_hz = -1.0;
        CHECK_THROWS_AS(d.validate(), DomainError);
    }
    SUBCASE("zero links") {
        d.options[0].links = 0;
        CHECK_THROWS_AS(d.validate(), DomainError);
    }
}

TEST_CASE("a zero requested rate means adaptive") {
    CHECK(PacketOption{0.01, 1, 0.9, 0.0}.adaptive());
    CHECK_FALSE(PacketOption{0.01, 1, 0.9, 0.1}.adaptive());
    CHECK(PacketOption{0.01, 1, 0.9, 0.1}.window_slots(100e-6) == 100);
}

TEST_CASE("config defaults") {
    const ControllerConfig c;
    CHECK(c.p_packet == 0.2);
    CHECK(c.epsilon_service == 1e-5);
    CHECK(c.pga_cap == 1500);
    CHECK(c.utilisation_bound == 0.85);
    CHECK(c.registration_utilisation_bound == 0.8);
    CHECK(c.alpha_c == 0.5);
    CHECK(c.scheduling_interval_s == 300.0);
    CHECK_NOTHROW(c.validate());

    const NetworkConfig n;
    CHECK(n.n_nodes == 6);
    CHECK(n.slot_duration_s == 100e-6);
    CHECK(n.p_gen == 7.5e-5);
    CHECK(n.fidelity == 0.925);
    CHECK_NOTHROW(n.validate());
}

TEST_CASE("config validation") {
    ControllerConfig c;
    c.p_packet = 1.0;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c = {};
    c.utilisation_bound = 0.0;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c = {};
    c.pga_cap = 0;
    CHECK_THROWS_AS(c.validate(), DomainError);

    NetworkConfig n;
    n.n_nodes = 1;
    CHECK_THROWS_AS(n.validate(), DomainError);
    n = {};
    n.p_gen = 1.5;
    CHECK_THROWS_AS(n.validate(), DomainError);
}

TEST_CASE("a pair's task needs both hub links") {
    const auto r = resources_for(NodePair(4, 2));
    REQUIRE(r.size() == 2);
    CHECK(r[0] == link_of(2));
    CHECK(r[1] == link_of(4));
}

TEST_CASE("job limit counts whole periods before expiry") {
    PacketGenerationTask t;
    t.offset = 100;
    t.period = 10;
    t.expiry_slot = 155;
    CHECK(t.job_limit() == 5);
    t.expiry_slot = 100;
    CHECK(t.job_limit() == 0);
    t.expiry_slot = 50;
    CHECK(t.job_limit() == 0);
}

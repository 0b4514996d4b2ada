#include "qnsched/admission.hpp"

#include "support/builders.hpp"

#include "doctest.h"

using namespace qnsched;
using qnsched::testing::make_demand;
using qnsched::testing::make_task;

TEST_CASE("demand queue is FIFO") {
    DemandQueue q;
    q.push_back(make_demand(1, NodePair(0, 1), 0.1, 1.0));
    q.push_back(make_demand(2, NodePair(0, 2), 0.1, 2.0, 5000.0));
    CHECK_THROWS_AS(q.push_back(make_demand(1, NodePair(0, 3), 0.1, 3.0)), DomainError);
    CHECK_THROWS_AS(q.push_back(make_demand(3, NodePair(0, 3), 0.1, 0.5)), DomainError);
    CHECK(q.pop_front().id == 1);
    CHECK(q.front().id == 2);
    CHECK_FALSE(q.contains(1));
    q.push_front(make_demand(1, NodePair(0, 1), 0.1, 1.0));
    CHECK(q.front().id == 1);
    const auto gone = q.purge_expired(2101.0);
    CHECK(gone.size() == 1);
    CHECK(gone[0].id == 1);
    CHECK(q.size() == 1);
}

TEST_CASE("utilisation ledger") {
    UtilisationLedger l;
    const auto a = make_task(1, 7, 10, {0, 1});
    const auto b = make_task(2, 2, 10, {1, 2});
    CHECK(l.fits(a, 0.85));
    l.add(a);
    CHECK(l.at(0) == doctest::Approx(0.7));
    CHECK_FALSE(l.fits(b, 0.85));  // 0.7 + 0.2 on link 1
    CHECK(l.fits(make_task(3, 15, 100, {1}), 0.85));
    l.remove(a);
    CHECK(l.at(1) == 0.0);
    CHECK(l.max_load() == 0.0);
}

TEST_CASE("registration") {
    AdmissionController ac({}, {});
    SUBCASE("plain fixed-rate demand") {
        const auto r = ac.register_demand(make_demand(1, NodePair(0, 1), 0.1));
        CHECK(r.accepted);
        CHECK(r.projected_utilisation == doctest::Approx(0.1488));
        CHECK(ac.queue().size() == 1);
    }
    SUBCASE("too much utilisation") {
        const auto r = ac.register_demand(make_demand(1, NodePair(0, 1), 0.6));
        CHECK_FALSE(r.accepted);
        CHECK(r.reason == "utilisation");
    }
    SUBCASE("more links than a node holds") {
        const auto r = ac.register_demand(make_demand(1, NodePair(0, 1), 0.001, 0.0, 2100.0, 6, 0.1));
        CHECK_FALSE(r.accepted);
        CHECK(r.reason == "insane");
    }
    SUBCASE("node outside the network") {
        const auto r = ac.register_demand(make_demand(1, NodePair(0, 9), 0.1));
        CHECK_FALSE(r.accepted);
        CHECK(r.reason == "insane");
    }
    SUBCASE("duplicate id") {
        CHECK(ac.register_demand(make_demand(1, NodePair(0, 1), 0.1)).accepted);
        CHECK(ac.register_demand(make_demand(1, NodePair(0, 1), 0.1, 1.0)).reason == "duplicate");
    }
    SUBCASE("insane options are dropped, sane ones kept") {
        Demand d = make_demand(1, NodePair(0, 1), 0.1);
        d.options.insert(d.options.begin(), PacketOption{0.0001, 3, 0.9, 0.1});
        CHECK(ac.register_demand(d).accepted);
        CHECK(ac.queue().front().options.size() == 1);
    }
}

TEST_CASE("admission respects the utilisation bound") {
    AdmissionController ac({}, {});
    ac.install(make_task(100, 7, 10, {0, 5}));  // link 0 at 0.7
    // 0.2 Hz gives U = 0.2976, which cannot fit next to 0.7.
    REQUIRE(ac.register_demand(make_demand(1, NodePair(0, 1), 0.2)).accepted);
    REQUIRE(ac.register_demand(make_demand(2, NodePair(2, 3), 0.1, 1.0)).accepted);
    const auto r = ac.admit(300.0);
    CHECK(r.admitted.empty());  // head blocks the queue
    REQUIRE(r.returned_to_head);
    CHECK(*r.returned_to_head == 1);
    CHECK(ac.queue().size() == 2);
    CHECK(ac.queue().front().id == 1);
}

TEST_CASE("admission respects the PGA cap") {
    ControllerConfig c;
    c.pga_cap = 200;
    AdmissionController ac(c, {});
    // 0.1 Hz at 300 s intervals: 150 PGAs per interval.
    REQUIRE(ac.register_demand(make_demand(1, NodePair(0, 1), 0.1)).accepted);
    REQUIRE(ac.register_demand(make_demand(2, NodePair(2, 3), 0.1, 1.0)).accepted);
    const auto r = ac.admit(300.0);
    CHECK(r.admitted.size() == 1);
    CHECK(ac.projected_pga_count() == 150);
    CHECK(ac.queue().size() == 1);
}

TEST_CASE("terminations take effect at the next admission") {
    AdmissionController ac({}, {});
    REQUIRE(ac.register_demand(make_demand(1, NodePair(0, 1), 0.1)).accepted);
    ac.admit(0.0);
    CHECK(ac.active().size() == 1);
    ac.handle_termination(1);
    CHECK(ac.active().size() == 1);
    ac.handle_termination(42);  // unknown ids are ignored
    ac.admit(300.0);
    CHECK(ac.active().empty());
    CHECK(ac.ledger().max_load() == 0.0);
}

TEST_CASE("expired queued demands are purged and expired tasks removed") {
    AdmissionController ac({}, {});
    REQUIRE(ac.register_demand(make_demand(1, NodePair(0, 1), 0.1, 0.0, 200.0)).accepted);
    REQUIRE(ac.register_demand(make_demand(2, NodePair(2, 3), 0.1, 0.0, 600.0)).accepted);
    auto r = ac.admit(300.0);
    CHECK(r.purged.size() == 1);
    CHECK(r.admitted.size() == 1);
    r = ac.admit(600.0);
    CHECK(r.expired_pgts == std::vector<PgtId>{2});
    CHECK(ac.active().empty());
}

TEST_CASE("adaptive demands that waited too long are dropped") {
    AdmissionController ac({}, {});
    // 850 attempts of 0.2976 s cannot fit in 300 s at U < 0.8.
    REQUIRE(ac.register_demand(make_demand(1, NodePair(0, 1), 0.0, 0.0, 1000.0)).accepted);
    const auto r = ac.admit(900.0);
    CHECK(r.dropped.size() == 1);
    CHECK(ac.queue().empty());
}

TEST_CASE("ledger stays within the bound over random admissions") {
    AdmissionController ac({}, {});
    DemandId id = 1;
    double t = 0.0;
    for (int round = 0; round < 20; ++round) {
        for (int i = 0; i < 6; ++i) {
            const int a = (round + i) % 6;
            const int b = (round + 2 * i + 1) % 6;
            if (a == b) continue;
            ac.register_demand(make_demand(id++, NodePair(a, b), i % 2 ? 0.1 : 0.2, t, t + 2100.0));
            t += 1.0;
        }
        ac.admit(300.0 * (round + 1));
        for (const auto& [r, u] : ac.ledger().loads()) CHECK(u <= 0.85 + 1e-9);
        CHECK(ac.projected_pga_count() <= 1500);
        if (!ac.active().empty() && round % 3 == 0) ac.handle_termination(ac.active().front().id);
    }
}

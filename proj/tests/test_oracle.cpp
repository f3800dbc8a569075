#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "intercore/errors.hpp"
#include "intercore/oracle.hpp"
#include "random_rts.hpp"
#include "test_util.hpp"

using namespace intercore;

namespace {

RtsSpec example_rts() { return rts_from_json(testutil::fixture("example1/rts.json")); }

EventSpec example_events(const std::string& ex) {
    return events_from_json(testutil::fixture(ex + "/events.json"));
}

}  // namespace

TEST_CASE("digitized_explore: a bounded location yields horizon+1 states") {
    Network n;
    TimedAutomaton a;
    a.name = "A";
    a.clocks = {"x"};
    a.locations.push_back(Location{"l", {ClockAtom{"x", "", CmpOp::Le, 5}}, false, true});
    n.automata.push_back(a);
    DigitizedGraph g = digitized_explore(n, 10);
    CHECK(g.nodes.size() == 6);  // x = 0..5, then the invariant blocks delay
}

TEST_CASE("digitized_explore refuses open constraints") {
    Network n;
    TimedAutomaton a;
    a.name = "A";
    a.clocks = {"x"};
    a.locations.push_back(Location{"l", {ClockAtom{"x", "", CmpOp::Lt, 5}}, false, true});
    n.automata.push_back(a);
    CHECK_THROWS_AS((void)digitized_explore(n, 10), ModelError);
}

TEST_CASE("oracle on N_c2: tau4 terminates at every instant of [30,40]") {
    RtsSpec r = example_rts();
    Network n = build_core_network(r, "c2");
    DigitizedGraph g = digitized_explore(n, 40);
    const std::uint32_t a = g.automaton_index.at("TA_tau4");
    const std::uint32_t end = g.location_index[a].at("end");
    std::set<std::int64_t> times;
    for (const auto& node : g.nodes)
        if (node.locations[a] == end) times.insert(node.time);
    std::set<std::int64_t> expected;
    for (std::int64_t t = 30; t <= 40; ++t) expected.insert(t);
    CHECK(times == expected);
}

TEST_CASE("oracle WCRTs for the example system") {
    RtsSpec r = example_rts();
    auto c2 = oracle_wcrt(r, "c2", 40);
    CHECK(c2.at("tau3") == 18);
    CHECK(c2.at("tau4") == 40);
    auto c1 = oracle_wcrt(r, "c1", 60);
    CHECK(c1.at("tau1") == 10);
    CHECK(c1.at("tau2") == 20);
}

TEST_CASE("oracle_intervals matches the paper values") {
    RtsSpec r = example_rts();
    SUBCASE("example 1, c2") {
        Network n = build_core_network(r, "c2");
        IvTable iv = oracle_intervals(n, r, example_events("example1"), "c2", 40);
        CHECK(iv.segments[0].per_period[0].to_string() == "{[2,4]}");
        CHECK(iv.segments[0].per_period[1].to_string() == "{[22,26],[32,38]}");
    }
    SUBCASE("example 2, c2") {
        Network n = build_core_network(r, "c2");
        IvTable iv = oracle_intervals(n, r, example_events("example2"), "c2", 40);
        CHECK(iv.segments[0].per_period[0].to_string() == "{[0,1]}");
        CHECK(iv.segments[0].per_period[1].to_string() == "{[20,23],[30,35]}");
    }
    SUBCASE("example 3, c1") {
        Network n = build_core_network(r, "c1");
        IvTable iv = oracle_intervals(n, r, example_events("example3"), "c1", 60);
        CHECK(iv.segments[0].per_period[0].to_string() == "{[7,12]}");
        CHECK(iv.segments[0].per_period[1].to_string() == "{[30,33]}");
        CHECK(iv.segments[1].per_period[0].to_string() == "{[9,13]}");
        CHECK(iv.segments[1].per_period[1].to_string() == "{[32,34]}");
    }
}

TEST_CASE("oracle behavior repeats after the hyperperiod") {
    RtsSpec r = example_rts();
    Network n = build_core_network(r, "c2");
    DigitizedGraph g = digitized_explore(n, 80);
    auto inst = window_instants(g, "TA_tau3", "s5", 2, 4);
    std::set<std::int64_t> first, second;
    for (std::int64_t t : inst) {
        if (t < 40) first.insert(t);
        if (t >= 40 && t < 80) second.insert(t - 40);
    }
    CHECK(first == second);
}

TEST_CASE("oracle bound on a requirement that never completes") {
    RtsSpec r = example_rts();
    EventSpec e = example_events("example1");
    e.events.push_back("never");
    std::vector<Network> parts;
    for (const std::string& core : event_cores(r, e))
        parts.push_back(abstraction_network(r, e, core, compute_exact_intervals(r, e, core)));
    Network a = compose_abstract_network(parts);
    Requirement req{RequirementKind::SimpleMax, {"e1", "never"}, BoundMode::Max};
    CHECK(!oracle_bound(a, req, 240).satisfied);
}

TEST_CASE("digitization agreement on random closed networks") {
    std::mt19937 rng(4242);
    std::uniform_int_distribution<int> constant(0, 10);
    std::uniform_int_distribution<int> coin(0, 1);
    for (int round = 0; round < 40; ++round) {
        Network n;
        n.automata.push_back(build_ref_ta(12));
        TimedAutomaton a;
        a.name = "A";
        a.clocks = {"x"};
        for (int l = 0; l < 3; ++l) {
            Location loc;
            loc.name = "l" + std::to_string(l);
            loc.initial = l == 0;
            if (coin(rng)) {
                const int inv = 4 + constant(rng) / 2;
                loc.invariant.push_back(ClockAtom{"x", "", CmpOp::Le, inv});
            }
            a.locations.push_back(loc);
        }
        for (int l = 0; l < 3; ++l) {
            Edge e;
            e.from = "l" + std::to_string(l);
            e.to = "l" + std::to_string((l + 1) % 3);
            const int g1 = constant(rng) / 2;
            const int g2 = g1 + constant(rng) / 2;
            e.clock_guard.push_back(ClockAtom{"x", "", CmpOp::Ge, g1});
            e.clock_guard.push_back(ClockAtom{"x", "", CmpOp::Le, g2});
            if (coin(rng)) e.resets = {"x"};
            a.edges.push_back(e);
        }
        n.automata.push_back(a);

        ExploreOptions opts;
        opts.query_clocks = {{"Ref", "x"}};
        opts.query_clock_cap = 13;
        ZoneGraph zg = build_zone_graph(n, opts);
        ExploreOptions no_sub = opts;
        no_sub.subsumption = false;
        ZoneGraph zg2 = build_zone_graph(n, no_sub);

        DigitizedGraph dg = digitized_explore(n, 12);
        const std::uint32_t ai = dg.automaton_index.at("A");
        for (int l = 0; l < 3; ++l) {
            StateFormula f;
            f.locations.push_back({"A", "l" + std::to_string(l)});
            auto sym = query_bounds(zg, f, {"Ref", "x"});
            CHECK(sym == query_bounds(zg2, f, {"Ref", "x"}));

            std::set<std::int64_t> oracle_times;
            const std::uint32_t li = dg.location_index[ai].at("l" + std::to_string(l));
            for (const auto& node : dg.nodes)
                if (node.locations[ai] == li) oracle_times.insert(node.time);
            auto pts = sym.integer_points();
            CHECK(std::set<std::int64_t>(pts.begin(), pts.end()) == oracle_times);
        }
    }
}

TEST_CASE("random schedulable instances: oracle equals symbolic (smoke-sized)") {
    std::mt19937 rng(777);
    int done = 0, attempts = 0;
    while (done < 12 && attempts < 400) {
        ++attempts;
        auto inst = testutil::random_instance(rng);
        if (!inst) continue;
        const RtsSpec& r = inst->rts;

        bool schedulable = true;
        for (const std::string core : {"c1", "c2"}) {
            auto rep = check_schedulability(r, core, 2'000'000);
            auto ora = oracle_wcrt(r, core, hyperperiod(r, core));
            for (const auto& entry : rep.tasks) {
                CHECK(entry.wcrt == ora.at(entry.task));
                if (!entry.ok) schedulable = false;
            }
        }
        if (!schedulable) continue;

        const std::int64_t L = std::lcm(hyperperiod(r, "c1"), hyperperiod(r, "c2"));
        std::vector<Network> parts;
        for (const std::string core : {"c1", "c2"}) {
            IvTable sym = compute_exact_intervals(r, inst->events, core);
            IvTable ora = oracle_intervals(build_core_network(r, core), r, inst->events, core,
                                           hyperperiod(r, core));
            std::string why;
            const bool agree = testutil::iv_tables_agree(sym, ora, &why);
            INFO("attempt ", attempts, " core ", core, ": ", why);
            REQUIRE(agree);
            parts.push_back(abstraction_network(r, inst->events, core, sym));
        }

        Network a = compose_abstract_network(parts);
        BoundOptions bopts;
        bopts.observer_cap = 4 * L + 1;
        for (const Requirement& req : inst->requirements) {
            auto sym = compute_bound(a, req, bopts);
            auto ora = oracle_bound(a, req, 6 * L);
            INFO("attempt ", attempts, " kind ", int(req.kind), " mode ", int(req.mode));
            CHECK(sym.satisfied == ora.satisfied);
            if (sym.satisfied && ora.satisfied) CHECK(sym.value == ora.value);
        }
        ++done;
    }
    CHECK(done >= 12);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "intercore/errors.hpp"
#include "intercore/explorer.hpp"

using namespace intercore;

namespace {

Location loc(const std::string& name, bool initial = false, bool committed = false) {
    return Location{name, {}, committed, initial};
}

Location loc_inv(const std::string& name, const std::string& clock, CmpOp op, std::int64_t b,
                 bool initial = false) {
    return Location{name, {ClockAtom{clock, "", op, b}}, false, initial};
}

Edge edge(const std::string& from, const std::string& to) {
    Edge e;
    e.from = from;
    e.to = to;
    return e;
}

}  // namespace

TEST_CASE("initial state: invariant-free location delay-closes") {
    Network n;
    TimedAutomaton a;
    a.name = "A";
    a.clocks = {"x"};
    a.locations = {loc("l", true)};
    n.automata.push_back(a);
    SymbolicState s = initial_state(n);
    CHECK(s.zone.interval_of(1).lower == Bound::le(0));
    CHECK(s.zone.interval_of(1).upper.is_infinity());
}

TEST_CASE("initial state: invariant bounds the delay") {
    Network n;
    TimedAutomaton a;
    a.name = "A";
    a.clocks = {"x"};
    a.locations = {loc_inv("l", "x", CmpOp::Le, 5, true)};
    n.automata.push_back(a);
    SymbolicState s = initial_state(n);
    CHECK(s.zone.interval_of(1).upper == Bound::le(5));
}

TEST_CASE("initial state: committed location forbids delay") {
    Network n;
    TimedAutomaton a;
    a.name = "A";
    a.clocks = {"x"};
    a.locations = {loc("l", true, true)};
    n.automata.push_back(a);
    SymbolicState s = initial_state(n);
    CHECK(s.zone.interval_of(1).upper == Bound::le(0));
}

TEST_CASE("successors: no outgoing edges yields empty list") {
    Network n;
    TimedAutomaton a;
    a.name = "A";
    a.clocks = {"x"};
    a.locations = {loc("l", true)};
    n.automata.push_back(a);
    CHECK(successors(initial_state(n), n).empty());
}

TEST_CASE("self-loop with reset reaches a fixed point in <= 2 states") {
    Network n;
    TimedAutomaton a;
    a.name = "A";
    a.clocks = {"x"};
    a.locations = {loc_inv("l", "x", CmpOp::Le, 3, true)};
    Edge e = edge("l", "l");
    e.clock_guard = {ClockAtom{"x", "", CmpOp::Ge, 1}};
    e.resets = {"x"};
    a.edges.push_back(e);
    n.automata.push_back(a);
    ZoneGraph g = build_zone_graph(n);
    CHECK(g.state_count() <= 2);
}

TEST_CASE("handshake pairs one emitter with exactly one receiver") {
    Network n;
    n.channels.push_back(Channel{"h", ChannelKind::Handshake, 0, ""});
    TimedAutomaton em;
    em.name = "E";
    em.clocks = {};
    em.locations = {loc("e0", true), loc("e1")};
    Edge ee = edge("e0", "e1");
    ee.sync = SyncDir::Emit;
    ee.channel = "h";
    em.edges.push_back(ee);
    TimedAutomaton r1;
    r1.name = "R1";
    r1.clocks = {};
    r1.locations = {loc("r0", true), loc("r1")};
    Edge re = edge("r0", "r1");
    re.sync = SyncDir::Receive;
    re.channel = "h";
    r1.edges.push_back(re);
    TimedAutomaton r2 = r1;
    r2.name = "R2";
    n.automata = {em, r1, r2};

    auto succ = successors(initial_state(n), n);
    REQUIRE(succ.size() == 2);  // E+R1 and E+R2, never both receivers
    for (const auto& s : succ) {
        const bool r1_moved = s.locations[1] == 1;
        const bool r2_moved = s.locations[2] == 1;
        CHECK(s.locations[0] == 1);
        CHECK(r1_moved != r2_moved);
    }

    SUBCASE("emitter with no receiver blocks") {
        Network alone;
        alone.channels = n.channels;
        alone.automata = {em};
        CHECK(successors(initial_state(alone), alone).empty());
    }
}

TEST_CASE("broadcast must-synchronize with per-receiver choices") {
    Network n;
    n.channels.push_back(Channel{"b", ChannelKind::Broadcast, 0, ""});
    n.variables.push_back(VarDecl::scalar("flag", 0, 1, 0));

    TimedAutomaton em;
    em.name = "E";
    em.locations = {loc("e0", true), loc("e1")};
    Edge ee = edge("e0", "e1");
    ee.sync = SyncDir::Emit;
    ee.channel = "b";
    em.edges.push_back(ee);

    TimedAutomaton r1;  // two enabled receive edges -> one successor per choice
    r1.name = "R1";
    r1.locations = {loc("r0", true), loc("ra"), loc("rb")};
    for (const char* tgt : {"ra", "rb"}) {
        Edge re = edge("r0", tgt);
        re.sync = SyncDir::Receive;
        re.channel = "b";
        r1.edges.push_back(re);
    }

    TimedAutomaton r2;  // one enabled edge -> must move
    r2.name = "R2";
    r2.locations = {loc("s0", true), loc("s1")};
    Edge r2e = edge("s0", "s1");
    r2e.sync = SyncDir::Receive;
    r2e.channel = "b";
    r2.edges.push_back(r2e);

    TimedAutomaton r3;  // discrete guard false -> bystander
    r3.name = "R3";
    r3.locations = {loc("t0", true), loc("t1")};
    Edge r3e = edge("t0", "t1");
    r3e.sync = SyncDir::Receive;
    r3e.channel = "b";
    r3e.discrete_guard = {DiscreteAtom{Term::var("flag"), CmpOp::Eq, Term::lit(1)}};
    r3.edges.push_back(r3e);

    n.automata = {em, r1, r2, r3};
    auto succ = successors(initial_state(n), n);
    REQUIRE(succ.size() == 2);
    for (const auto& s : succ) {
        CHECK(s.locations[0] == 1);
        CHECK(s.locations[1] != 0);  // R1 moved (either edge)
        CHECK(s.locations[2] == 1);  // R2 moved
        CHECK(s.locations[3] == 0);  // R3 stayed
    }

    SUBCASE("broadcast emitter proceeds alone without receivers") {
        Network alone;
        alone.channels = n.channels;
        alone.variables = n.variables;
        alone.automata = {em};
        CHECK(successors(initial_state(alone), alone).size() == 1);
    }
}

TEST_CASE("committed locations restrict transitions and forbid delay") {
    Network n;
    TimedAutomaton c;
    c.name = "C";
    c.clocks = {"x"};
    c.locations = {loc("c0", true, true), loc("c1")};
    c.edges.push_back(edge("c0", "c1"));
    TimedAutomaton o;
    o.name = "O";
    o.clocks = {"y"};
    o.locations = {loc("o0", true), loc("o1")};
    o.edges.push_back(edge("o0", "o1"));
    n.automata = {c, o};

    SymbolicState s0 = initial_state(n);
    CHECK(s0.zone.interval_of(1).upper == Bound::le(0));  // no initial delay
    auto succ = successors(s0, n);
    REQUIRE(succ.size() == 1);  // only the committed automaton's edge
    CHECK(succ[0].locations[0] == 1);
    CHECK(succ[0].locations[1] == 0);
    // After leaving the committed location, delay is allowed again.
    CHECK(succ[0].zone.interval_of(1).upper.is_infinity());
}

TEST_CASE("channel priority applies within groups only") {
    Network n;
    n.channels.push_back(Channel{"hi", ChannelKind::Broadcast, 1, "g"});
    n.channels.push_back(Channel{"lo", ChannelKind::Broadcast, 0, "g"});
    n.channels.push_back(Channel{"other", ChannelKind::Broadcast, 0, ""});
    TimedAutomaton a;
    a.name = "A";
    a.clocks = {"x"};
    a.locations = {loc("l", true), loc("via_hi"), loc("via_lo"), loc("via_other")};
    Edge hi = edge("l", "via_hi");
    hi.sync = SyncDir::Emit;
    hi.channel = "hi";
    Edge lo = edge("l", "via_lo");
    lo.sync = SyncDir::Emit;
    lo.channel = "lo";
    Edge other = edge("l", "via_other");
    other.sync = SyncDir::Emit;
    other.channel = "other";
    a.edges = {hi, lo, other};
    n.automata.push_back(a);

    SUBCASE("higher priority suppresses lower in the same group") {
        auto succ = successors(initial_state(n), n);
        REQUIRE(succ.size() == 2);  // hi and other; lo suppressed
        CHECK(succ[0].locations[0] == 1);
        CHECK(succ[1].locations[0] == 3);
    }
    SUBCASE("disabled high-priority transition does not suppress") {
        n.automata[0].edges[0].clock_guard = {ClockAtom{"x", "", CmpOp::Ge, 1}};
        n.automata[0].locations[0].invariant = {ClockAtom{"x", "", CmpOp::Lt, 1}};
        auto succ = successors(initial_state(n), n);
        REQUIRE(succ.size() == 2);  // lo and other
        CHECK(succ[0].locations[0] == 2);
        CHECK(succ[1].locations[0] == 3);
    }
}

TEST_CASE("timelock automaton bounds exploration") {
    // One clock, invariant x <= 10, a task automaton cycling every 2.
    Network n;
    TimedAutomaton ref;
    ref.name = "Ref";
    ref.clocks = {"x"};
    ref.locations = {loc_inv("hper", "x", CmpOp::Le, 10, true)};
    TimedAutomaton t;
    t.name = "T";
    t.clocks = {"y"};
    t.locations = {loc_inv("w", "y", CmpOp::Le, 2, true)};
    Edge e = edge("w", "w");
    e.clock_guard = {ClockAtom{"y", "", CmpOp::Eq, 2}};
    e.resets = {"y"};
    t.edges.push_back(e);
    n.automata = {ref, t};

    ExploreOptions opts;
    opts.query_clocks = {{"Ref", "x"}};
    ZoneGraph g = build_zone_graph(n, opts);
    CHECK(g.state_count() == 6);  // y-offset windows 0..10 in steps of 2

    StateFormula anywhere;
    auto sup = query_extremum(g, anywhere, {"Ref", "x"}, ExtremumMode::Sup);
    CHECK(sup.satisfied);
    CHECK(sup.value == 10);

    StateFormula late;
    late.clocks.push_back({{"Ref", "x"}, CmpOp::Ge, 4});
    auto inf = query_extremum(g, late, {"Ref", "x"}, ExtremumMode::Inf);
    CHECK(inf.satisfied);
    CHECK(inf.value == 4);

    auto all = query_bounds(g, anywhere, {"Ref", "x"});
    CHECK(all.to_string() == "{[0,10]}");

    StateFormula never;
    never.clocks.push_back({{"Ref", "x"}, CmpOp::Ge, 11});
    CHECK(!query_reachable(g, never));
    CHECK(!query_extremum(g, never, {"Ref", "x"}, ExtremumMode::Sup).satisfied);
    CHECK(query_bounds(g, never, {"Ref", "x"}).empty());
}

TEST_CASE("querying an unflagged clock is a usage error") {
    Network n;
    TimedAutomaton a;
    a.name = "A";
    a.clocks = {"x"};
    a.locations = {loc_inv("l", "x", CmpOp::Le, 3, true)};
    n.automata.push_back(a);
    ZoneGraph g = build_zone_graph(n);
    StateFormula f;
    CHECK_THROWS_AS((void)query_extremum(g, f, {"A", "x"}, ExtremumMode::Sup), UsageError);
}

TEST_CASE("state budget surfaces as a resource error") {
    Network n;
    TimedAutomaton a;
    a.name = "A";
    a.clocks = {"x"};
    for (int i = 0; i < 10; ++i) a.locations.push_back(loc("l" + std::to_string(i), i == 0));
    for (int i = 0; i + 1 < 10; ++i)
        a.edges.push_back(edge("l" + std::to_string(i), "l" + std::to_string(i + 1)));
    n.automata.push_back(a);
    ExploreOptions opts;
    opts.state_budget = 3;
    CHECK_THROWS_AS((void)build_zone_graph(n, opts), ResourceError);
}

TEST_CASE("discrete updates: queue overflow is a model error") {
    Network n;
    n.variables.push_back(VarDecl::queue("Q", 1));
    TimedAutomaton a;
    a.name = "A";
    a.locations = {loc("l", true)};
    Edge e = edge("l", "l");
    e.updates.push_back(Update::queue_add("Q", 1, 1));
    a.edges.push_back(e);
    n.automata.push_back(a);
    CHECK_THROWS_AS((void)build_zone_graph(n), ModelError);
}

TEST_CASE("subsumption on/off yields identical query answers") {
    // Nondeterministic resets create overlapping zones.
    Network n;
    TimedAutomaton a;
    a.name = "A";
    a.clocks = {"x", "y"};
    a.locations = {loc_inv("l", "x", CmpOp::Le, 6, true), loc("m", false)};
    a.locations[1].invariant = {ClockAtom{"x", "", CmpOp::Le, 6}};
    Edge e1 = edge("l", "m");
    e1.clock_guard = {ClockAtom{"x", "", CmpOp::Ge, 1}};
    e1.resets = {"y"};
    Edge e2 = edge("l", "m");
    e2.clock_guard = {ClockAtom{"x", "", CmpOp::Ge, 3}};
    Edge e3 = edge("m", "l");
    e3.clock_guard = {ClockAtom{"y", "", CmpOp::Ge, 1}};
    a.edges = {e1, e2, e3};
    n.automata.push_back(a);

    StateFormula at_m;
    at_m.locations.push_back({"A", "m"});

    ExploreOptions with;
    with.query_clocks = {{"A", "y"}};
    ExploreOptions without = with;
    without.subsumption = false;

    ZoneGraph g1 = build_zone_graph(n, with);
    ZoneGraph g2 = build_zone_graph(n, without);
    CHECK(query_bounds(g1, at_m, {"A", "y"}) == query_bounds(g2, at_m, {"A", "y"}));
    CHECK(query_extremum(g1, at_m, {"A", "y"}, ExtremumMode::Sup).value ==
          query_extremum(g2, at_m, {"A", "y"}, ExtremumMode::Sup).value);
    CHECK(g2.state_count() >= g1.state_count());
}

TEST_CASE("bounds minimum and maximum coincide with inf and sup") {
    Network n;
    TimedAutomaton ref;
    ref.name = "Ref";
    ref.clocks = {"x"};
    ref.locations = {loc_inv("hper", "x", CmpOp::Le, 20, true)};
    TimedAutomaton t;
    t.name = "T";
    t.clocks = {"y"};
    t.locations = {loc_inv("a", "y", CmpOp::Le, 7, true), loc_inv("b", "y", CmpOp::Le, 20)};
    Edge go = edge("a", "b");
    go.clock_guard = {ClockAtom{"y", "", CmpOp::Ge, 3}};
    t.edges.push_back(go);
    n.automata = {ref, t};

    ExploreOptions opts;
    opts.query_clocks = {{"Ref", "x"}};
    ZoneGraph g = build_zone_graph(n, opts);
    StateFormula at_b;
    at_b.locations.push_back({"T", "b"});
    auto ivs = query_bounds(g, at_b, {"Ref", "x"});
    REQUIRE(!ivs.empty());
    CHECK(ivs.min() == query_extremum(g, at_b, {"Ref", "x"}, ExtremumMode::Inf).value);
    CHECK(ivs.max() == query_extremum(g, at_b, {"Ref", "x"}, ExtremumMode::Sup).value);
    CHECK(ivs.to_string() == "{[3,20]}");
}

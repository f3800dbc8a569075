#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "intercore/automata.hpp"

using namespace intercore;

namespace {

TimedAutomaton tiny_automaton(const std::string& name) {
    TimedAutomaton a;
    a.name = name;
    a.clocks = {"x"};
    a.locations.push_back(Location{"idle", {}, false, true});
    a.locations.push_back(Location{"busy", {ClockAtom{"x", "", CmpOp::Le, 5}}, false, false});
    Edge e;
    e.from = "idle";
    e.to = "busy";
    e.resets = {"x"};
    a.edges.push_back(e);
    return a;
}

Network tiny_network(const std::string& name) {
    Network n;
    n.automata.push_back(tiny_automaton(name));
    return n;
}

}  // namespace

TEST_CASE("validate: well-formed network has no diagnostics") {
    CHECK(validate_network(tiny_network("A")).empty());
}

TEST_CASE("validate: edge to undeclared location") {
    Network n = tiny_network("A");
    n.automata[0].edges[0].to = "nowhere";
    auto diags = validate_network(n);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].path == "automata[0].edges[0].to");
}

TEST_CASE("validate: two initial locations") {
    Network n = tiny_network("A");
    n.automata[0].locations[1].initial = true;
    auto diags = validate_network(n);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].message.find("exactly one initial") != std::string::npos);
}

TEST_CASE("validate: reference checks") {
    Network n = tiny_network("A");
    SUBCASE("undeclared channel") {
        n.automata[0].edges[0].sync = SyncDir::Emit;
        n.automata[0].edges[0].channel = "ghost";
        CHECK(validate_network(n).size() == 1);
    }
    SUBCASE("unknown reset clock") {
        n.automata[0].edges[0].resets = {"zz"};
        CHECK(validate_network(n).size() == 1);
    }
    SUBCASE("broadcast receiver with clock guard is rejected") {
        n.channels.push_back(Channel{"b", ChannelKind::Broadcast, 0, ""});
        n.automata[0].edges[0].sync = SyncDir::Receive;
        n.automata[0].edges[0].channel = "b";
        n.automata[0].edges[0].clock_guard = {ClockAtom{"x", "", CmpOp::Ge, 1}};
        CHECK(validate_network(n).size() == 1);
    }
    SUBCASE("queue bounds") {
        n.variables.push_back(VarDecl::queue("Q", 0));
        CHECK(validate_network(n).size() == 1);
    }
    SUBCASE("scalar init out of range") {
        n.variables.push_back(VarDecl::scalar("v", 0, 1, 7));
        CHECK(validate_network(n).size() == 1);
    }
}

TEST_CASE("compose: identity and unions") {
    Network a = tiny_network("A");
    Network b = tiny_network("B");
    Network c = tiny_network("C");
    a.channels.push_back(Channel{"e1", ChannelKind::Broadcast, 0, ""});
    b.channels.push_back(Channel{"e1", ChannelKind::Broadcast, 0, ""});

    Network single = compose({a});
    CHECK(single.automata.size() == 1);

    Network ab_c = compose({compose({a, b}), c});
    Network abc = compose({a, b, c});
    CHECK(ab_c.automata.size() == 3);
    CHECK(network_to_json(ab_c) == network_to_json(abc));
    CHECK(ab_c.channels.size() == 1);  // shared channel declared once

    CHECK(validate_network(abc).empty());
}

TEST_CASE("compose: clashes are errors") {
    Network a = tiny_network("A");
    CHECK_THROWS_AS(compose({a, a}), std::invalid_argument);

    Network b = tiny_network("B");
    a.channels.push_back(Channel{"e", ChannelKind::Broadcast, 0, ""});
    b.channels.push_back(Channel{"e", ChannelKind::Handshake, 0, ""});
    CHECK_THROWS_AS(compose({a, b}), std::invalid_argument);
}

TEST_CASE("json round trip is byte-stable") {
    Network n = tiny_network("A");
    n.channels.push_back(Channel{"go", ChannelKind::Handshake, 1, "grp"});
    n.variables.push_back(VarDecl::scalar("running", 0, 1, 0));
    n.variables.push_back(VarDecl::queue("Q", 3));
    Edge& e = n.automata[0].edges[0];
    e.sync = SyncDir::Receive;
    e.channel = "go";
    e.clock_guard.push_back(ClockAtom{"x", "", CmpOp::Eq, 3});
    e.discrete_guard.push_back(
        DiscreteAtom{Term::var("running"), CmpOp::Eq, Term::lit(0)});
    e.discrete_guard.push_back(
        DiscreteAtom{Term::queue(Term::Kind::QueueHeadPr, "Q"), CmpOp::Lt,
                     Term::queue(Term::Kind::QueueSecondPr, "Q")});
    e.updates.push_back(Update::assign("running", Term::lit(1)));
    e.updates.push_back(Update::queue_add("Q", 1, 2));
    e.updates.push_back(Update::queue_op(Update::Kind::QueueResort, "Q"));

    const std::string once = network_to_json(n);
    Network parsed = network_from_json(once);
    const std::string twice = network_to_json(parsed);
    CHECK(once == twice);
    CHECK(validate_network(parsed).empty());
}

#include "intercore/bounds.hpp"

#include <set>

#include <json.hpp>

#include "intercore/errors.hpp"

namespace intercore {

using ordered_json = nlohmann::ordered_json;

std::vector<Diagnostic> validate_requirement(const Requirement& req, const EventSpec& e) {
    std::vector<Diagnostic> out;
    auto err = [&out](std::string path, std::string msg) {
        out.push_back(Diagnostic{std::move(path), std::move(msg)});
    };
    std::set<std::string> declared(e.events.begin(), e.events.end());
    for (std::size_t i = 0; i < req.events.size(); ++i) {
        if (!declared.count(req.events[i]))
            err("events[" + std::to_string(i) + "]", "undeclared event '" + req.events[i] + "'");
    }
    if (req.kind == RequirementKind::SimpleMax) {
        if (req.events.size() != 2) err("events", "simple-max takes exactly two events");
        if (req.mode != BoundMode::Max)
            err("mode", "the simple observer starts measuring at the earliest chain start and is "
                        "not suitable for minimal bounds");
    } else {
        if (req.events.size() != 3) err("events", "ff/lf take exactly three events");
        std::set<std::string> uniq(req.events.begin(), req.events.end());
        if (uniq.size() != req.events.size()) err("events", "ff/lf events must be distinct");
    }
    return out;
}

Requirement requirement_from_json(const std::string& text) {
    ordered_json root;
    try {
        root = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw InputError(std::string("req.json: ") + e.what());
    }
    Requirement req;
    const std::string kind = root.at("kind").get<std::string>();
    if (kind == "simple-max") {
        req.kind = RequirementKind::SimpleMax;
    } else if (kind == "ff") {
        req.kind = RequirementKind::FirstToFirst;
    } else if (kind == "lf") {
        req.kind = RequirementKind::LastToFirst;
    } else {
        throw InputError("req.json: unknown kind '" + kind + "'");
    }
    req.events = root.at("events").get<std::vector<std::string>>();
    const std::string mode = root.value("mode", "max");
    if (mode == "max") {
        req.mode = BoundMode::Max;
    } else if (mode == "min") {
        req.mode = BoundMode::Min;
    } else {
        throw InputError("req.json: unknown mode '" + mode + "'");
    }
    return req;
}

namespace {

Edge recv_edge(const std::string& from, const std::string& to, const std::string& event,
               bool reset_x = false) {
    Edge e;
    e.from = from;
    e.to = to;
    e.sync = SyncDir::Receive;
    e.channel = event;
    if (reset_x) e.resets = {"x"};
    return e;
}

}  // namespace

TimedAutomaton build_observer(const Requirement& req) {
    TimedAutomaton obs;
    obs.name = "Obs";
    obs.clocks = {"x"};
    if (req.kind == RequirementKind::SimpleMax) {
        const std::string& ea = req.events[0];
        const std::string& eb = req.events[1];
        obs.locations.push_back(Location{"idle", {}, false, true});
        obs.locations.push_back(Location{"recv", {}, false, false});
        obs.edges.push_back(recv_edge("idle", "recv", ea, /*reset_x=*/true));
        obs.edges.push_back(recv_edge("recv", "idle", eb));
        return obs;
    }
    const std::string& w = req.events[0];
    const std::string& r = req.events[1];
    const std::string& w2 = req.events[2];
    obs.locations.push_back(Location{"await_w_1", {}, false, true});
    obs.locations.push_back(Location{"await_r_1", {}, false, false});
    obs.locations.push_back(Location{"await_w_2", {}, false, false});
    obs.locations.push_back(Location{"recv", {}, true, false});
    obs.edges.push_back(recv_edge("await_w_1", "await_r_1", w, /*reset_x=*/true));
    if (req.kind == RequirementKind::LastToFirst) {
        // Overwriting w while waiting for r restarts the measurement.
        obs.edges.push_back(recv_edge("await_r_1", "await_r_1", w, /*reset_x=*/true));
    }
    obs.edges.push_back(recv_edge("await_r_1", "await_w_2", r));
    // w occurrences while waiting for w2: either ignored or adopted as the
    // new chain start.
    obs.edges.push_back(recv_edge("await_w_2", "await_w_2", w));
    obs.edges.push_back(recv_edge("await_w_2", "await_r_1", w, /*reset_x=*/true));
    obs.edges.push_back(recv_edge("await_w_2", "recv", w2));
    Edge restart;
    restart.from = "recv";
    restart.to = "await_w_1";
    obs.edges.push_back(restart);
    return obs;
}

BoundResult compute_bound(const Network& abstract_network, const Requirement& req,
                          const BoundOptions& opts) {
    Network obs_net;
    std::set<std::string> used(req.events.begin(), req.events.end());
    for (const std::string& ev : used)
        obs_net.channels.push_back(Channel{ev, ChannelKind::Broadcast, 0, ""});
    obs_net.automata.push_back(build_observer(req));

    const Network verification = compose({abstract_network, obs_net});

    ExploreOptions eopts;
    eopts.state_budget = opts.state_budget;
    eopts.query_clocks = {{"Obs", "x"}};
    eopts.query_clock_cap = opts.observer_cap;
    ZoneGraph g = build_zone_graph(verification, eopts);

    StateFormula at_recv;
    at_recv.locations.push_back({"Obs", "recv"});
    const auto res = query_extremum(g, at_recv, {"Obs", "x"},
                                    req.mode == BoundMode::Max ? ExtremumMode::Sup
                                                               : ExtremumMode::Inf);
    BoundResult out;
    out.satisfied = res.satisfied;
    out.value = res.value;
    out.stats = g.stats();
    return out;
}

}  // namespace intercore

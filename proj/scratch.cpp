#include <fstream>
#include <iostream>
#include <sstream>

#include "intercore/abstraction.hpp"
#include "intercore/bounds.hpp"
#include "intercore/explorer.hpp"
#include "intercore/rts.hpp"

using namespace intercore;

static std::string slurp(const std::string& p) {
    std::ifstream f(p);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

int main() {
    RtsSpec r = rts_from_json(slurp("fixtures/example1/rts.json"));
    auto diags = validate_rts(r);
    for (auto& d : diags) std::cout << "DIAG " << d.path << ": " << d.message << "\n";
    std::cout << "hp c1=" << hyperperiod(r, "c1") << " c2=" << hyperperiod(r, "c2") << "\n";

    for (const std::string core : {"c1", "c2"}) {
        auto rep = check_schedulability(r, core);
        std::cout << core << " schedulable=" << rep.schedulable
                  << " states=" << rep.stats.states_stored << "\n";
        for (auto& e : rep.tasks)
            std::cout << "  WCRT " << e.task << " = " << e.wcrt << " / P=" << e.period << "\n";
    }

    // Scenario queries on N_c2 || Ref(40)
    {
        Network n = compose({build_core_network(r, "c2"), ref_network(40)});
        ExploreOptions opts;
        opts.query_clocks = {{"Ref", "x"}};
        opts.query_clock_cap = 41;
        ZoneGraph g = build_zone_graph(n, opts);
        std::cout << "N_c2||Ref states=" << g.state_count() << "\n";
        StateFormula s6exit;
        s6exit.locations.push_back({"TA_tau4", "s6"});
        s6exit.locations.push_back({"Ref", "hper"});
        s6exit.clocks.push_back({{"TA_tau4", "y"}, CmpOp::Ge, 16});
        s6exit.clocks.push_back({{"TA_tau4", "y"}, CmpOp::Le, 18});
        std::cout << "s6 completion window: " << query_bounds(g, s6exit, {"Ref", "x"}).to_string()
                  << "\n";
        StateFormula t4end;
        t4end.locations.push_back({"TA_tau4", "end"});
        std::cout << "tau4 termination: " << query_bounds(g, t4end, {"Ref", "x"}).to_string()
                  << "\n";
        StateFormula t3end2;
        t3end2.locations.push_back({"TA_tau3", "end"});
        t3end2.clocks.push_back({{"Ref", "x"}, CmpOp::Ge, 20});
        t3end2.clocks.push_back({{"Ref", "x"}, CmpOp::Le, 40});
        std::cout << "tau3 2nd completion: " << query_bounds(g, t3end2, {"Ref", "x"}).to_string()
                  << "\n";
        StateFormula phi51;
        phi51.locations.push_back({"TA_tau3", "s5"});
        phi51.locations.push_back({"Ref", "hper"});
        phi51.clocks.push_back({{"TA_tau3", "y"}, CmpOp::Ge, 2});
        phi51.clocks.push_back({{"TA_tau3", "y"}, CmpOp::Le, 4});
        std::cout << "phi_s5_e1 global: " << query_bounds(g, phi51, {"Ref", "x"}).to_string()
                  << "\n";
        StateFormula late;
        late.locations.push_back({"TA_tau3", "end"});
        late.clocks.push_back({{"TA_tau3", "x"}, CmpOp::Gt, 20});
        std::cout << "tau3 end with x>20 reachable: " << query_reachable(g, late) << "\n";
    }
    {
        Network n = compose({build_core_network(r, "c1"), ref_network(60)});
        ExploreOptions opts;
        opts.query_clocks = {{"Ref", "x"}};
        opts.query_clock_cap = 61;
        ZoneGraph g = build_zone_graph(n, opts);
        std::cout << "N_c1||Ref states=" << g.state_count() << "\n";
        StateFormula phi;
        phi.locations.push_back({"TA_tau1", "s1"});
        phi.locations.push_back({"Ref", "hper"});
        phi.clocks.push_back({{"TA_tau1", "y"}, CmpOp::Ge, 2});
        phi.clocks.push_back({{"TA_tau1", "y"}, CmpOp::Le, 3});
        std::cout << "phi_s1_e2 global: " << query_bounds(g, phi, {"Ref", "x"}).to_string() << "\n";
    }

    // Example 1/2 intervals via the module API.
    for (const char* ex : {"example1", "example2", "example3"}) {
        EventSpec es = events_from_json(slurp(std::string("fixtures/") + ex + "/events.json"));
        for (auto& d : validate_event_spec(r, es)) {
            std::cout << ex << " "
                      << (d.severity == EventDiagnostic::Severity::Error ? "ERROR " : "WARN ")
                      << d.path << ": " << d.message << "\n";
        }
        for (const std::string& core : event_cores(r, es)) {
            IvTable iv = compute_exact_intervals(r, es, core);
            for (auto& s : iv.segments) {
                std::cout << ex << " " << core << " " << s.segment << " (" << s.first_event
                          << "): global=" << s.global.to_string();
                for (std::size_t k = 0; k < s.per_period.size(); ++k)
                    std::cout << " Iv" << k + 1 << "=" << s.per_period[k].to_string();
                std::cout << "\n";
            }
        }
    }
    // Abstractions + bounds.
    {
        EventSpec es1 = events_from_json(slurp("fixtures/example1/events.json"));
        std::vector<Network> parts, coarse_parts;
        for (const std::string& core : event_cores(r, es1)) {
            IvTable iv = compute_exact_intervals(r, es1, core);
            parts.push_back(abstraction_network(r, es1, core, iv));
            coarse_parts.push_back(abstraction_network(r, es1, core, coarsened(iv)));
        }
        Network a = compose_abstract_network(parts);
        for (auto& d : validate_network(a)) std::cout << "ANET DIAG " << d.path << " " << d.message << "\n";
        Requirement req = requirement_from_json(slurp("fixtures/example1/req_simple_max.json"));
        BoundOptions bopts;
        bopts.observer_cap = 2 * 120 + 1;
        auto exact = compute_bound(a, req, bopts);
        auto coarse = compute_bound(compose_abstract_network(coarse_parts), req, bopts);
        std::cout << "example1 exact bound = " << exact.value << " (states " << exact.stats.states_stored
                  << "), coarse = " << coarse.value << "\n";
        std::cout << "A(N_c2) exact:\n" << network_to_json(parts[1]) << "\n";
    }
    {
        EventSpec es2 = events_from_json(slurp("fixtures/example2/events.json"));
        IvTable iv = compute_exact_intervals(r, es2, "c2");
        const Task* tau3 = producing_task(r, es2, "c2");
        TimedAutomaton a = generate_abstraction_general(*tau3, iv, es2);
        std::cout << "Fig7 A(N_c2) example2:\n";
        for (auto& l : a.locations) {
            std::cout << "  loc " << l.name << (l.committed ? " (C)" : "") << (l.initial ? " (init)" : "")
                      << " inv:";
            for (auto& at : l.invariant)
                std::cout << " " << at.clock << to_string(at.op) << at.bound;
            std::cout << "\n";
        }
        for (auto& e : a.edges) {
            std::cout << "  edge " << e.from << "->" << e.to;
            if (e.sync == SyncDir::Emit) std::cout << " " << e.channel << "!";
            std::cout << " guard:";
            for (auto& at : e.clock_guard) std::cout << " " << at.clock << to_string(at.op) << at.bound;
            if (!e.resets.empty()) std::cout << " reset:" << e.resets[0];
            std::cout << "\n";
        }
    }
    {
        EventSpec es3 = events_from_json(slurp("fixtures/example3/events.json"));
        IvTable iv = compute_exact_intervals(r, es3, "c1");
        const Task* tau2 = producing_task(r, es3, "c1");
        TimedAutomaton a = generate_abstraction_general(*tau2, iv, es3);
        std::cout << "Fig8 A(N_c1) example3: locations:";
        for (auto& l : a.locations) std::cout << " " << l.name;
        std::cout << "\n";
        for (auto& e : a.edges) {
            std::cout << "  edge " << e.from << "->" << e.to;
            if (e.sync == SyncDir::Emit) std::cout << " " << e.channel << "!";
            std::cout << " guard:";
            for (auto& at : e.clock_guard) std::cout << " " << at.clock << to_string(at.op) << at.bound;
            std::cout << "\n";
        }
    }
    return 0;
}

#include <fstream>
#include <iostream>
#include <sstream>

#include "intercore/abstraction.hpp"
#include "intercore/bounds.hpp"
#include "intercore/oracle.hpp"
#include "intercore/rts.hpp"

using namespace intercore;

static std::string slurp(const std::string& p) {
    std::ifstream f(p);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

static std::string fmt(const std::vector<std::int64_t>& v) {
    std::ostringstream os;
    os << "{";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    os << "}";
    return os.str();
}

int main() {
    RtsSpec r = rts_from_json(slurp("fixtures/example1/rts.json"));

    // Oracle WCRTs (ground truth for criterion 6).
    for (const std::string core : {"c1", "c2"}) {
        auto w = oracle_wcrt(r, core, hyperperiod(r, core));
        std::cout << "oracle WCRT " << core << ":";
        for (auto& [t, v] : w) std::cout << " " << t << "=" << v;
        std::cout << "\n";
    }

    // Oracle intervals vs symbolic for each example.
    for (const char* ex : {"example1", "example2", "example3"}) {
        EventSpec es = events_from_json(slurp(std::string("fixtures/") + ex + "/events.json"));
        for (const std::string& core : event_cores(r, es)) {
            Network nc = build_core_network(r, core);
            IvTable sym = compute_exact_intervals(r, es, core);
            IvTable ora = oracle_intervals(nc, r, es, core, hyperperiod(r, core));
            for (std::size_t i = 0; i < sym.segments.size(); ++i) {
                bool equal = sym.segments[i].per_period.size() == ora.segments[i].per_period.size();
                for (std::size_t k = 0; equal && k < sym.segments[i].per_period.size(); ++k)
                    equal = sym.segments[i].per_period[k].integer_points() ==
                            ora.segments[i].per_period[k].integer_points();
                std::cout << ex << " " << core << " " << sym.segments[i].segment
                          << " sym=" << sym.segments[i].global.to_string()
                          << " ora=" << ora.segments[i].global.to_string()
                          << (equal ? "  EQUAL" : "  MISMATCH") << "\n";
            }
        }
    }

    // Oracle bound vs symbolic bound for Example 1 (18 exact / 23 coarse).
    {
        EventSpec es = events_from_json(slurp("fixtures/example1/events.json"));
        Requirement req = requirement_from_json(slurp("fixtures/example1/req_simple_max.json"));
        std::vector<Network> parts, coarse_parts;
        for (const std::string& core : event_cores(r, es)) {
            IvTable iv = compute_exact_intervals(r, es, core);
            parts.push_back(abstraction_network(r, es, core, iv));
            coarse_parts.push_back(abstraction_network(r, es, core, coarsened(iv)));
        }
        Network a = compose_abstract_network(parts);
        Network ca = compose_abstract_network(coarse_parts);
        auto ob = oracle_bound(a, req, 4 * 120);
        auto cb = oracle_bound(ca, req, 4 * 120);
        std::cout << "oracle bound exact=" << ob.value << " coarse=" << cb.value << "\n";

        // Per-core exactness at integer granularity: emissions of e1 in
        // A(N_c2) vs window instants in N_c2.
        Network nc2 = build_core_network(r, "c2");
        DigitizedGraph gc2 = digitized_explore(compose({nc2, ref_network(40)}), 40);
        DigitizedGraph ga = digitized_explore(parts[1], 40);
        auto inst_n = window_instants(gc2, "TA_tau3", "s5", 2, 4);
        auto inst_a = emission_instants(ga, "e1");
        std::cout << "e1 instants N_c2=" << fmt(inst_n) << " A(N_c2)=" << fmt(inst_a)
                  << (inst_n == inst_a ? "  EQUAL" : "  MISMATCH") << "\n";
    }

    // Example 2 pair timing (consecutive e3 -> e1).
    {
        EventSpec es = events_from_json(slurp("fixtures/example2/events.json"));
        IvTable iv = compute_exact_intervals(r, es, "c2");
        Network a = abstraction_network(r, es, "c2", iv);
        Network nc2 = build_core_network(r, "c2");
        DigitizedGraph gc2 = digitized_explore(compose({nc2, ref_network(40)}), 40);
        DigitizedGraph ga = digitized_explore(a, 40);
        auto pairs_n = window_pairs(gc2, "TA_tau3", "s5", 0, 1, 2, 4);
        auto pairs_a = emission_pairs(ga, "e3", "e1");
        std::cout << "pairs N=" << pairs_n.size() << " A=" << pairs_a.size()
                  << (pairs_n == pairs_a ? "  EQUAL" : "  MISMATCH") << "\n";
        if (pairs_n != pairs_a) {
            for (auto& p : pairs_n)
                if (!pairs_a.count(p)) std::cout << "  only-N (" << p.first << "," << p.second << ")\n";
            for (auto& p : pairs_a)
                if (!pairs_n.count(p)) std::cout << "  only-A (" << p.first << "," << p.second << ")\n";
        }
        auto e3_n = window_instants(gc2, "TA_tau3", "s5", 0, 1);
        auto e3_a = emission_instants(ga, "e3");
        std::cout << "e3 instants N=" << fmt(e3_n) << " A=" << fmt(e3_a)
                  << (e3_n == e3_a ? "  EQUAL" : "  MISMATCH") << "\n";
    }
    return 0;
}

#ifndef INTERCORE_TESTS_STRESS_FIXTURE_HPP
#define INTERCORE_TESTS_STRESS_FIXTURE_HPP

// Synthetic scalability fixture: two cores, nine periodic tasks, about one
// hundred segments, nanosecond-resolution constants (hyperperiod 1e9 on the
// big core). Utilizations and segment lengths are chosen so the partition is
// schedulable under limited preemption: every non-preemptible segment is
// short relative to the shortest period sharing its core.

#include <cstdint>
#include <string>
#include <vector>

#include "intercore/abstraction.hpp"
#include "intercore/rts.hpp"

namespace testutil {

inline intercore::Task stress_task(const std::string& name, const std::string& core,
                                   std::int64_t period, std::int64_t priority, int nsegs,
                                   std::int64_t seg_wcet, int window_pct = 3) {
    intercore::Task t;
    t.name = name;
    t.affinity = core;
    t.period = period;
    t.priority = priority;
    for (int i = 0; i < nsegs; ++i) {
        intercore::Segment s;
        s.name = name + "_s" + std::to_string(i);
        // Slightly uneven nanosecond values with a bcet..wcet window.
        s.wcet = seg_wcet + 13 * (i % 7);
        s.bcet = s.wcet - (s.wcet * window_pct) / 100 - (i % 3 == 0 ? 11 : 0);
        if (s.bcet <= 0) s.bcet = 1;
        t.segments.push_back(s);
        if (i == 0) {
            t.fsm.transitions.emplace_back("act", s.name);
        } else {
            t.fsm.transitions.emplace_back(t.segments[std::size_t(i) - 1].name, s.name);
        }
    }
    t.fsm.transitions.emplace_back(t.segments.back().name, "end");
    return t;
}

inline intercore::RtsSpec stress_rts() {
    using namespace intercore;
    RtsSpec r;
    r.time_unit = "ns";
    r.cores = {"c1", "c2"};
    // c1: hp = lcm(6.25e6, 2.5e6, 1e6) = 2.5e7 ns. Wide execution windows.
    r.tasks.push_back(stress_task("angle", "c1", 6'250'000, 0, 9, 100'000, 40));
    r.tasks.push_back(stress_task("t1", "c1", 1'000'000, 2, 4, 30'000, 30));
    r.tasks.push_back(stress_task("t2b", "c1", 2'500'000, 1, 6, 50'000, 30));
    // c2: hp = 1e9 ns.
    r.tasks.push_back(stress_task("t2", "c2", 2'000'000, 5, 4, 50'000));
    r.tasks.push_back(stress_task("t5", "c2", 5'000'000, 4, 6, 100'000));
    r.tasks.push_back(stress_task("t20", "c2", 20'000'000, 3, 30, 100'000));
    r.tasks.push_back(stress_task("t50", "c2", 50'000'000, 2, 10, 200'000));
    r.tasks.push_back(stress_task("t100", "c2", 100'000'000, 1, 25, 200'000));
    r.tasks.push_back(stress_task("t1000", "c2", 1'000'000'000, 0, 5, 900'000));
    return r;
}

// One label-write chain across the cores: angle's last segment writes, t50's
// mid segment reads at its start and writes at its end.
inline intercore::EventSpec stress_events(const intercore::RtsSpec& r) {
    using namespace intercore;
    EventSpec e;
    e.events = {"w1", "r1", "w2"};
    const Task* angle = nullptr;
    const Task* t50 = nullptr;
    for (const Task& t : r.tasks) {
        if (t.name == "angle") angle = &t;
        if (t.name == "t50") t50 = &t;
    }
    const Segment& ws = angle->segments.back();
    Producer w;
    w.task = "angle";
    w.segment = ws.name;
    w.emits = {{"w1", ws.bcet, ws.wcet}};
    e.producers.push_back(w);
    const Segment& rs = t50->segments[4];
    Producer rw;
    rw.task = "t50";
    rw.segment = rs.name;
    rw.emits = {{"r1", 0, 0}, {"w2", rs.bcet, rs.wcet}};
    e.producers.push_back(rw);
    return e;
}

}  // namespace testutil

#endif

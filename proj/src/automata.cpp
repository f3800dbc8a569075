#include "intercore/automata.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace intercore {

using ordered_json = nlohmann::ordered_json;

std::string to_string(CmpOp op) {
    switch (op) {
        case CmpOp::Eq: return "==";
        case CmpOp::Ne: return "!=";
        case CmpOp::Lt: return "<";
        case CmpOp::Le: return "<=";
        case CmpOp::Gt: return ">";
        case CmpOp::Ge: return ">=";
    }
    return "?";
}

CmpOp cmp_from_string(const std::string& s) {
    if (s == "==") return CmpOp::Eq;
    if (s == "!=") return CmpOp::Ne;
    if (s == "<") return CmpOp::Lt;
    if (s == "<=") return CmpOp::Le;
    if (s == ">") return CmpOp::Gt;
    if (s == ">=") return CmpOp::Ge;
    throw std::invalid_argument("unknown comparison operator: " + s);
}

namespace {

std::string idx_path(const std::string& base, std::size_t i, const std::string& field = "") {
    std::ostringstream os;
    os << base << "[" << i << "]";
    if (!field.empty()) os << "." << field;
    return os.str();
}

}  // namespace

std::vector<Diagnostic> validate_network(const Network& n) {
    std::vector<Diagnostic> out;
    auto err = [&out](std::string path, std::string msg) {
        out.push_back(Diagnostic{std::move(path), std::move(msg)});
    };

    std::map<std::string, const Channel*> channels;
    for (std::size_t i = 0; i < n.channels.size(); ++i) {
        const Channel& c = n.channels[i];
        if (c.name.empty()) err(idx_path("channels", i), "channel without a name");
        if (!channels.emplace(c.name, &c).second)
            err(idx_path("channels", i), "duplicate channel name '" + c.name + "'");
    }

    std::map<std::string, const VarDecl*> vars;
    for (std::size_t i = 0; i < n.variables.size(); ++i) {
        const VarDecl& v = n.variables[i];
        if (!vars.emplace(v.name, &v).second)
            err(idx_path("variables", i), "duplicate variable name '" + v.name + "'");
        if (v.kind == VarDecl::Kind::Int) {
            if (v.min > v.max) err(idx_path("variables", i), "min > max");
            if (v.init < v.min || v.init > v.max)
                err(idx_path("variables", i), "initial value out of bounds");
        } else if (v.capacity <= 0) {
            err(idx_path("variables", i), "queue capacity must be positive");
        }
    }

    auto check_term = [&](const Term& t, const std::string& path) {
        if (t.kind == Term::Kind::Literal) return;
        auto it = vars.find(t.name);
        if (it == vars.end()) {
            err(path, "reference to undeclared variable '" + t.name + "'");
            return;
        }
        const bool wants_queue = t.kind != Term::Kind::Var;
        const bool is_queue = it->second->kind == VarDecl::Kind::Queue;
        if (wants_queue != is_queue) err(path, "variable kind mismatch for '" + t.name + "'");
    };

    std::set<std::string> automaton_names;
    for (std::size_t ai = 0; ai < n.automata.size(); ++ai) {
        const TimedAutomaton& a = n.automata[ai];
        const std::string apath = idx_path("automata", ai);
        if (!automaton_names.insert(a.name).second)
            err(apath, "duplicate automaton name '" + a.name + "'");

        std::set<std::string> clock_names(a.clocks.begin(), a.clocks.end());
        if (clock_names.size() != a.clocks.size()) err(apath + ".clocks", "duplicate clock name");

        std::set<std::string> loc_names;
        std::size_t initial_count = 0;
        for (std::size_t li = 0; li < a.locations.size(); ++li) {
            const Location& l = a.locations[li];
            const std::string lpath = apath + "." + idx_path("locations", li);
            if (!loc_names.insert(l.name).second)
                err(lpath, "duplicate location name '" + l.name + "'");
            if (l.initial) ++initial_count;
            for (const ClockAtom& at : l.invariant) {
                if (!clock_names.count(at.clock))
                    err(lpath + ".invariant", "unknown clock '" + at.clock + "'");
                if (!at.minus_clock.empty() && !clock_names.count(at.minus_clock))
                    err(lpath + ".invariant", "unknown clock '" + at.minus_clock + "'");
            }
        }
        if (initial_count != 1)
            err(apath, "automaton must have exactly one initial location (found " +
                           std::to_string(initial_count) + ")");

        for (std::size_t ei = 0; ei < a.edges.size(); ++ei) {
            const Edge& e = a.edges[ei];
            const std::string epath = apath + "." + idx_path("edges", ei);
            if (!loc_names.count(e.from)) err(epath + ".from", "unknown location '" + e.from + "'");
            if (!loc_names.count(e.to)) err(epath + ".to", "unknown location '" + e.to + "'");
            for (const ClockAtom& at : e.clock_guard) {
                if (!clock_names.count(at.clock))
                    err(epath + ".guard", "unknown clock '" + at.clock + "'");
                if (!at.minus_clock.empty() && !clock_names.count(at.minus_clock))
                    err(epath + ".guard", "unknown clock '" + at.minus_clock + "'");
            }
            for (std::size_t gi = 0; gi < e.discrete_guard.size(); ++gi) {
                check_term(e.discrete_guard[gi].lhs, epath + ".guard");
                check_term(e.discrete_guard[gi].rhs, epath + ".guard");
            }
            if (e.sync == SyncDir::Silent) {
                if (!e.channel.empty()) err(epath + ".sync", "silent edge names a channel");
            } else {
                auto it = channels.find(e.channel);
                if (it == channels.end()) {
                    err(epath + ".sync", "undeclared channel '" + e.channel + "'");
                } else if (e.sync == SyncDir::Receive &&
                           it->second->kind == ChannelKind::Broadcast && !e.clock_guard.empty()) {
                    // Zone-level must-synchronize needs crisp receiver sets.
                    err(epath + ".guard", "clock guard on a broadcast receiving edge");
                }
            }
            for (const std::string& r : e.resets) {
                if (!clock_names.count(r)) err(epath + ".resets", "unknown clock '" + r + "'");
            }
            for (const Update& u : e.updates) {
                auto it = vars.find(u.target);
                if (it == vars.end()) {
                    err(epath + ".updates", "undeclared variable '" + u.target + "'");
                    continue;
                }
                const bool target_is_queue = it->second->kind == VarDecl::Kind::Queue;
                if (u.kind == Update::Kind::Assign) {
                    if (target_is_queue) err(epath + ".updates", "assignment to queue '" + u.target + "'");
                    check_term(u.value, epath + ".updates");
                } else if (!target_is_queue) {
                    err(epath + ".updates", "queue operation on scalar '" + u.target + "'");
                }
            }
        }
    }
    return out;
}

Network compose(const std::vector<Network>& parts) {
    Network out;
    std::map<std::string, Channel> channels;
    std::vector<std::string> channel_order;
    std::set<std::string> automaton_names;
    std::set<std::string> var_names;

    for (const Network& p : parts) {
        for (const TimedAutomaton& a : p.automata) {
            if (!automaton_names.insert(a.name).second)
                throw std::invalid_argument("compose: duplicate automaton '" + a.name + "'");
            out.automata.push_back(a);
        }
        for (const Channel& c : p.channels) {
            auto it = channels.find(c.name);
            if (it == channels.end()) {
                channels.emplace(c.name, c);
                channel_order.push_back(c.name);
            } else if (it->second.kind != c.kind || it->second.priority != c.priority ||
                       it->second.group != c.group) {
                throw std::invalid_argument("compose: shared channel '" + c.name +
                                            "' disagrees on kind or priority");
            }
        }
        for (const VarDecl& v : p.variables) {
            if (!var_names.insert(v.name).second)
                throw std::invalid_argument("compose: duplicate variable '" + v.name + "'");
            out.variables.push_back(v);
        }
    }
    for (const std::string& name : channel_order) out.channels.push_back(channels.at(name));
    return out;
}

// ── JSON ────────────────────────────────────────────────────────────────────

namespace {

ordered_json atom_to_json(const ClockAtom& a) {
    ordered_json j;
    j["clock"] = a.clock;
    if (!a.minus_clock.empty()) j["minus"] = a.minus_clock;
    j["op"] = to_string(a.op);
    j["bound"] = a.bound;
    return j;
}

ClockAtom atom_from_json(const ordered_json& j) {
    ClockAtom a;
    a.clock = j.at("clock").get<std::string>();
    if (j.contains("minus")) a.minus_clock = j.at("minus").get<std::string>();
    a.op = cmp_from_string(j.at("op").get<std::string>());
    a.bound = j.at("bound").get<std::int64_t>();
    return a;
}

ordered_json term_to_json(const Term& t) {
    switch (t.kind) {
        case Term::Kind::Literal: return t.literal;
        case Term::Kind::Var: return ordered_json{{"var", t.name}};
        case Term::Kind::QueueHeadId: return ordered_json{{"queue", t.name}, {"field", "head_id"}};
        case Term::Kind::QueueHeadPr: return ordered_json{{"queue", t.name}, {"field", "head_pr"}};
        case Term::Kind::QueueSecondPr:
            return ordered_json{{"queue", t.name}, {"field", "second_pr"}};
        case Term::Kind::QueueSize: return ordered_json{{"queue", t.name}, {"field", "size"}};
    }
    return 0;
}

Term term_from_json(const ordered_json& j) {
    if (j.is_number_integer()) return Term::lit(j.get<std::int64_t>());
    if (j.contains("var")) return Term::var(j.at("var").get<std::string>());
    const std::string q = j.at("queue").get<std::string>();
    const std::string f = j.at("field").get<std::string>();
    if (f == "head_id") return Term::queue(Term::Kind::QueueHeadId, q);
    if (f == "head_pr") return Term::queue(Term::Kind::QueueHeadPr, q);
    if (f == "second_pr") return Term::queue(Term::Kind::QueueSecondPr, q);
    if (f == "size") return Term::queue(Term::Kind::QueueSize, q);
    throw std::invalid_argument("unknown queue field: " + f);
}

ordered_json update_to_json(const Update& u) {
    ordered_json j;
    switch (u.kind) {
        case Update::Kind::Assign:
            j["set"] = u.target;
            j["to"] = term_to_json(u.value);
            break;
        case Update::Kind::QueueAdd:
            j["queue"] = u.target;
            j["op"] = "add";
            j["id"] = u.id;
            j["pr"] = u.pr;
            break;
        case Update::Kind::QueueDequeue:
            j["queue"] = u.target;
            j["op"] = "dequeue";
            break;
        case Update::Kind::QueueResort:
            j["queue"] = u.target;
            j["op"] = "resort";
            break;
        case Update::Kind::QueueSortBehindHead:
            j["queue"] = u.target;
            j["op"] = "sort_behind_head";
            break;
    }
    return j;
}

Update update_from_json(const ordered_json& j) {
    if (j.contains("set")) return Update::assign(j.at("set").get<std::string>(), term_from_json(j.at("to")));
    const std::string q = j.at("queue").get<std::string>();
    const std::string op = j.at("op").get<std::string>();
    if (op == "add") {
        return Update::queue_add(q, j.at("id").get<std::int64_t>(), j.at("pr").get<std::int64_t>());
    }
    if (op == "dequeue") return Update::queue_op(Update::Kind::QueueDequeue, q);
    if (op == "resort") return Update::queue_op(Update::Kind::QueueResort, q);
    if (op == "sort_behind_head") return Update::queue_op(Update::Kind::QueueSortBehindHead, q);
    throw std::invalid_argument("unknown queue op: " + op);
}

}  // namespace

std::string network_to_json(const Network& n) {
    ordered_json root;
    root["format"] = "ta-network";
    root["version"] = 1;

    ordered_json channels = ordered_json::array();
    for (const Channel& c : n.channels) {
        ordered_json j;
        j["name"] = c.name;
        j["kind"] = c.kind == ChannelKind::Handshake ? "handshake" : "broadcast";
        j["priority"] = c.priority;
        if (!c.group.empty()) j["group"] = c.group;
        channels.push_back(j);
    }
    root["channels"] = channels;

    ordered_json variables = ordered_json::array();
    for (const VarDecl& v : n.variables) {
        ordered_json j;
        j["name"] = v.name;
        if (v.kind == VarDecl::Kind::Int) {
            j["kind"] = "int";
            j["min"] = v.min;
            j["max"] = v.max;
            j["init"] = v.init;
        } else {
            j["kind"] = "queue";
            j["capacity"] = v.capacity;
        }
        variables.push_back(j);
    }
    root["variables"] = variables;

    ordered_json automata = ordered_json::array();
    for (const TimedAutomaton& a : n.automata) {
        ordered_json ja;
        ja["name"] = a.name;
        ja["clocks"] = a.clocks;
        ordered_json locs = ordered_json::array();
        for (const Location& l : a.locations) {
            ordered_json jl;
            jl["name"] = l.name;
            if (l.initial) jl["initial"] = true;
            if (l.committed) jl["committed"] = true;
            ordered_json inv = ordered_json::array();
            for (const ClockAtom& at : l.invariant) inv.push_back(atom_to_json(at));
            jl["invariant"] = inv;
            locs.push_back(jl);
        }
        ja["locations"] = locs;
        ordered_json edges = ordered_json::array();
        for (const Edge& e : a.edges) {
            ordered_json je;
            je["from"] = e.from;
            je["to"] = e.to;
            ordered_json guard;
            ordered_json clocks = ordered_json::array();
            for (const ClockAtom& at : e.clock_guard) clocks.push_back(atom_to_json(at));
            guard["clocks"] = clocks;
            ordered_json discrete = ordered_json::array();
            for (const DiscreteAtom& d : e.discrete_guard) {
                ordered_json jd;
                jd["lhs"] = term_to_json(d.lhs);
                jd["op"] = to_string(d.op);
                jd["rhs"] = term_to_json(d.rhs);
                discrete.push_back(jd);
            }
            guard["discrete"] = discrete;
            je["guard"] = guard;
            if (e.sync != SyncDir::Silent) {
                ordered_json js;
                js["channel"] = e.channel;
                js["dir"] = e.sync == SyncDir::Emit ? "emit" : "recv";
                je["sync"] = js;
            }
            je["resets"] = e.resets;
            ordered_json updates = ordered_json::array();
            for (const Update& u : e.updates) updates.push_back(update_to_json(u));
            je["updates"] = updates;
            edges.push_back(je);
        }
        ja["edges"] = edges;
        automata.push_back(ja);
    }
    root["automata"] = automata;
    return root.dump(2) + "\n";
}

Network network_from_json(const std::string& text) {
    const ordered_json root = ordered_json::parse(text);
    if (root.value("format", "") != "ta-network")
        throw std::invalid_argument("not a ta-network document");
    Network n;
    for (const auto& j : root.at("channels")) {
        Channel c;
        c.name = j.at("name").get<std::string>();
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "handshake") {
            c.kind = ChannelKind::Handshake;
        } else if (kind == "broadcast") {
            c.kind = ChannelKind::Broadcast;
        } else {
            throw std::invalid_argument("unknown channel kind: " + kind);
        }
        c.priority = j.value("priority", 0);
        c.group = j.value("group", "");
        n.channels.push_back(c);
    }
    for (const auto& j : root.at("variables")) {
        VarDecl v;
        v.name = j.at("name").get<std::string>();
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "int") {
            v.kind = VarDecl::Kind::Int;
            v.min = j.at("min").get<std::int64_t>();
            v.max = j.at("max").get<std::int64_t>();
            v.init = j.at("init").get<std::int64_t>();
        } else if (kind == "queue") {
            v.kind = VarDecl::Kind::Queue;
            v.capacity = j.at("capacity").get<std::int64_t>();
        } else {
            throw std::invalid_argument("unknown variable kind: " + kind);
        }
        n.variables.push_back(v);
    }
    for (const auto& ja : root.at("automata")) {
        TimedAutomaton a;
        a.name = ja.at("name").get<std::string>();
        a.clocks = ja.at("clocks").get<std::vector<std::string>>();
        for (const auto& jl : ja.at("locations")) {
            Location l;
            l.name = jl.at("name").get<std::string>();
            l.initial = jl.value("initial", false);
            l.committed = jl.value("committed", false);
            for (const auto& at : jl.at("invariant")) l.invariant.push_back(atom_from_json(at));
            a.locations.push_back(l);
        }
        for (const auto& je : ja.at("edges")) {
            Edge e;
            e.from = je.at("from").get<std::string>();
            e.to = je.at("to").get<std::string>();
            for (const auto& at : je.at("guard").at("clocks"))
                e.clock_guard.push_back(atom_from_json(at));
            for (const auto& jd : je.at("guard").at("discrete")) {
                DiscreteAtom d;
                d.lhs = term_from_json(jd.at("lhs"));
                d.op = cmp_from_string(jd.at("op").get<std::string>());
                d.rhs = term_from_json(jd.at("rhs"));
                e.discrete_guard.push_back(d);
            }
            if (je.contains("sync")) {
                e.channel = je.at("sync").at("channel").get<std::string>();
                const std::string dir = je.at("sync").at("dir").get<std::string>();
                e.sync = dir == "emit" ? SyncDir::Emit : SyncDir::Receive;
            }
            e.resets = je.at("resets").get<std::vector<std::string>>();
            for (const auto& ju : je.at("updates")) e.updates.push_back(update_from_json(ju));
            a.edges.push_back(e);
        }
        n.automata.push_back(a);
    }
    return n;
}

}  // namespace intercore

#include "intercore/interval_set.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace intercore {

void IntervalSet::add(std::int64_t lb, std::int64_t rb) {
    assert(lb <= rb);
    // First interval that could merge with [lb, rb]: closures intersect or touch.
    auto it = std::lower_bound(intervals_.begin(), intervals_.end(), lb,
                               [](const Interval& iv, std::int64_t v) { return iv.rb < v; });
    if (it == intervals_.end() || rb < it->lb) {
        intervals_.insert(it, Interval{lb, rb});
        return;
    }
    it->lb = std::min(it->lb, lb);
    it->rb = std::max(it->rb, rb);
    auto next = it + 1;
    while (next != intervals_.end() && next->lb <= it->rb) {
        it->rb = std::max(it->rb, next->rb);
        next = intervals_.erase(next);
    }
}

bool IntervalSet::contains(std::int64_t v) const {
    auto it = std::lower_bound(intervals_.begin(), intervals_.end(), v,
                               [](const Interval& iv, std::int64_t x) { return iv.rb < x; });
    return it != intervals_.end() && it->lb <= v;
}

IntervalSet IntervalSet::clamped(std::int64_t lo, std::int64_t hi) const {
    IntervalSet out;
    for (const Interval& iv : intervals_) {
        const std::int64_t l = std::max(iv.lb, lo);
        const std::int64_t r = std::min(iv.rb, hi);
        if (l <= r) out.add(l, r);
    }
    return out;
}

std::vector<std::int64_t> IntervalSet::integer_points() const {
    std::vector<std::int64_t> out;
    for (const Interval& iv : intervals_)
        for (std::int64_t v = iv.lb; v <= iv.rb; ++v) out.push_back(v);
    return out;
}

std::string IntervalSet::to_string() const {
    std::ostringstream os;
    os << "{";
    for (std::size_t i = 0; i < intervals_.size(); ++i) {
        if (i) os << ",";
        os << "[" << intervals_[i].lb << "," << intervals_[i].rb << "]";
    }
    os << "}";
    return os.str();
}

}  // namespace intercore

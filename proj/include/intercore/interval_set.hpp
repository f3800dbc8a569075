#ifndef INTERCORE_INTERVAL_SET_HPP
#define INTERCORE_INTERVAL_SET_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace intercore {

struct Interval {
    std::int64_t lb = 0;
    std::int64_t rb = 0;
    bool operator==(const Interval&) const = default;
};

// Ordered union of disjoint closed integer intervals, maximally merged:
// touching intervals like [2,4] and [4,7] collapse to [2,7], while open gaps
// such as ]26,32[ keep their neighbours separate.
class IntervalSet {
public:
    IntervalSet() = default;

    void add(std::int64_t lb, std::int64_t rb);
    void add(const Interval& iv) { add(iv.lb, iv.rb); }

    bool empty() const { return intervals_.empty(); }
    std::size_t size() const { return intervals_.size(); }
    const std::vector<Interval>& intervals() const { return intervals_; }

    std::int64_t min() const { return intervals_.front().lb; }
    std::int64_t max() const { return intervals_.back().rb; }

    bool contains(std::int64_t v) const;
    // Intersection with a closed window (used for per-period grouping).
    IntervalSet clamped(std::int64_t lo, std::int64_t hi) const;
    // All integers covered, in order.
    std::vector<std::int64_t> integer_points() const;

    bool operator==(const IntervalSet&) const = default;
    std::string to_string() const;  // {[2,4],[22,26]}

private:
    std::vector<Interval> intervals_;
};

}  // namespace intercore

#endif  // INTERCORE_INTERVAL_SET_HPP

#ifndef INTERCORE_DBM_HPP
#define INTERCORE_DBM_HPP

#include <cstdint>
#include <cstddef>
#include <string>
#include <vector>

namespace intercore {

// Index into the clock vector of a zone. Index 0 is the reference clock x0,
// which is constant zero; real clocks start at 1.
using ClockIndex = std::uint32_t;
inline constexpr ClockIndex kRefClock = 0;

// ── Bound ───────────────────────────────────────────────────────────────────
// One entry of a difference bound matrix: the constraint x_i - x_j ≺ value,
// with ≺ either < (strict) or <= (weak). The value kInfValue encodes the
// absence of a constraint. Values are 64-bit so nanosecond-scale constants
// (>= 2e9) survive bound addition during closure.

struct Bound {
    // Leaves headroom so closure sums never overflow.
    static constexpr std::int64_t kInfValue = INT64_C(1) << 60;

    std::int64_t value = 0;
    bool strict = false;  // true encodes <, false encodes <=

    static constexpr Bound infinity() { return Bound{kInfValue, true}; }
    static constexpr Bound le(std::int64_t v) { return Bound{v, false}; }
    static constexpr Bound lt(std::int64_t v) { return Bound{v, true}; }

    bool is_infinity() const { return value >= kInfValue; }

    bool operator==(const Bound& o) const {
        if (is_infinity() && o.is_infinity()) return true;
        return value == o.value && strict == o.strict;
    }
};

// Ordering of bounds as constraints: a <= b iff a is at least as tight as b.
// (v, <) is strictly tighter than (v, <=).
bool bound_le(const Bound& a, const Bound& b);
bool bound_lt(const Bound& a, const Bound& b);
// Saturating addition: anything plus infinity is infinity; strictness ORs.
Bound bound_add(const Bound& a, const Bound& b);
Bound bound_min(const Bound& a, const Bound& b);
std::string to_string(const Bound& b);

// ── ClockConstraint ─────────────────────────────────────────────────────────
// Atomic constraint x_i - x_j ≺ c. Single-clock constraints use the reference
// clock: x <= 4 is (x, 0, <=4) and x >= 3 is (0, x, <=-3).

struct ClockConstraint {
    ClockIndex i = 0;
    ClockIndex j = 0;
    Bound bound;

    static ClockConstraint upper(ClockIndex x, std::int64_t v, bool strict = false) {
        return {x, kRefClock, Bound{v, strict}};
    }
    static ClockConstraint lower(ClockIndex x, std::int64_t v, bool strict = false) {
        return {kRefClock, x, Bound{-v, strict}};
    }
};

// ── ClockInterval ───────────────────────────────────────────────────────────
// Projection of a zone onto one clock: lower.value <= x <= upper.value, with
// per-end strictness. upper may be infinite.

struct ClockInterval {
    Bound lower;  // x >= lower.value (or > when strict)
    Bound upper;  // x <= upper.value (or < when strict)
};

// ── Dbm ─────────────────────────────────────────────────────────────────────
// Canonical difference bound matrix over clock_count clocks plus the
// reference clock. Entries are stored raw as value*2 | weak-bit so that the
// native integer order coincides with bound tightness. Canonical (all-pairs
// tightest) form is maintained by every operation; emptiness is a value, not
// an error. Instances are immutable from the caller's perspective:
// operations return new values, so sharing across concurrent query workers
// is safe.

class Dbm {
public:
    // The zero zone: every clock equal to 0.
    explicit Dbm(std::size_t clock_count);
    Dbm() : Dbm(0) {}
    static Dbm zero(std::size_t clock_count) { return Dbm(clock_count); }
    // The full non-negative orthant (every clock unbounded above).
    static Dbm universe(std::size_t clock_count);

    std::size_t dim() const { return dim_; }                  // clock_count + 1
    std::size_t clock_count() const { return dim_ - 1; }
    bool is_empty() const { return empty_; }

    Bound at(ClockIndex i, ClockIndex j) const;

    // Raw entry assignment for building test zones; call canonicalize() after.
    void set(ClockIndex i, ClockIndex j, const Bound& b);

    // All-pairs shortest path closure. Returns false and marks the zone empty
    // when a diagonal entry becomes negative.
    bool canonicalize();

    // Intersection with atomic constraints; results canonical, maybe empty.
    Dbm constrain(const ClockConstraint& c) const;
    Dbm constrained_all(const std::vector<ClockConstraint>& cs) const;

    // Delay closure: removes upper bounds on all clocks (future operator).
    Dbm up() const;

    // Sets clock x to zero.
    Dbm reset(ClockIndex x) const;

    // Classic max-constant widening (ExtraM). max_const[i] is the largest
    // constant compared against clock i; entries beyond it are relaxed so
    // exploration reaches a fixed point. Index 0 is ignored.
    Dbm extrapolated(const std::vector<std::int64_t>& max_const) const;

    // Zone containment: true iff other is a subset of this zone.
    bool includes(const Dbm& other) const;

    // Projection onto a single clock.
    ClockInterval interval_of(ClockIndex x) const;

    bool operator==(const Dbm& o) const;
    std::size_t hash() const;
    std::string to_string() const;

private:
    std::size_t dim_;
    bool empty_ = false;
    std::vector<std::int64_t> raw_;

    std::int64_t raw_at(std::size_t i, std::size_t j) const { return raw_[i * dim_ + j]; }
    // Incremental tightening with x_i - x_j ≺ raw; keeps canonical form.
    // Returns false when the zone becomes empty.
    bool tighten(ClockIndex i, ClockIndex j, std::int64_t raw);
};

}  // namespace intercore

#endif  // INTERCORE_DBM_HPP

#include "intercore/dbm.hpp"

#include <cassert>
#include <sstream>
#include <stdexcept>

namespace intercore {

namespace {

// raw = value*2 | weak-bit, so raw integer order == bound tightness order.
constexpr std::int64_t kRawInf = (Bound::kInfValue << 1) | 1;
constexpr std::int64_t kRawLeZero = 1;  // (0, <=)

constexpr std::int64_t encode(const Bound& b) {
    if (b.value >= Bound::kInfValue) return kRawInf;
    return (b.value << 1) | (b.strict ? 0 : 1);
}

constexpr Bound decode(std::int64_t raw) {
    if (raw >= kRawInf) return Bound::infinity();
    return Bound{raw >> 1, (raw & 1) == 0};
}

constexpr std::int64_t raw_add(std::int64_t a, std::int64_t b) {
    if (a >= kRawInf || b >= kRawInf) return kRawInf;
    return ((a >> 1) + (b >> 1)) << 1 | (a & b & 1);
}

}  // namespace

bool bound_le(const Bound& a, const Bound& b) { return encode(a) <= encode(b); }
bool bound_lt(const Bound& a, const Bound& b) { return encode(a) < encode(b); }
Bound bound_add(const Bound& a, const Bound& b) { return decode(raw_add(encode(a), encode(b))); }
Bound bound_min(const Bound& a, const Bound& b) { return bound_le(a, b) ? a : b; }

std::string to_string(const Bound& b) {
    if (b.is_infinity()) return "inf";
    std::ostringstream os;
    os << (b.strict ? "<" : "<=") << b.value;
    return os.str();
}

Dbm::Dbm(std::size_t clock_count) : dim_(clock_count + 1) {
    raw_.assign(dim_ * dim_, kRawLeZero);
}

Dbm Dbm::universe(std::size_t clock_count) {
    Dbm u(clock_count);
    for (std::size_t i = 1; i < u.dim_; ++i)
        for (std::size_t j = 0; j < u.dim_; ++j)
            if (i != j) u.raw_[i * u.dim_ + j] = kRawInf;
    return u;
}

Bound Dbm::at(ClockIndex i, ClockIndex j) const { return decode(raw_[i * dim_ + j]); }

void Dbm::set(ClockIndex i, ClockIndex j, const Bound& b) { raw_[i * dim_ + j] = encode(b); }

bool Dbm::canonicalize() {
    if (empty_) return false;
    const std::size_t n = dim_;
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k) continue;
            const std::int64_t ik = raw_[i * n + k];
            if (ik >= kRawInf) continue;
            const std::int64_t* rk = &raw_[k * n];
            std::int64_t* ri = &raw_[i * n];
            for (std::size_t j = 0; j < n; ++j) {
                const std::int64_t via = raw_add(ik, rk[j]);
                if (via < ri[j]) ri[j] = via;
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (raw_[i * n + i] < kRawLeZero) {
            empty_ = true;
            return false;
        }
        raw_[i * n + i] = kRawLeZero;
    }
    // Clocks are non-negative: x0 - xi <= 0 always holds.
    for (std::size_t i = 1; i < n; ++i) {
        if (raw_[i] > kRawLeZero) raw_[i] = kRawLeZero;
    }
    return true;
}

bool Dbm::tighten(ClockIndex i, ClockIndex j, std::int64_t raw) {
    const std::size_t n = dim_;
    if (raw >= raw_[i * n + j]) return true;  // no-op, already tighter
    if (raw_add(raw, raw_[j * n + i]) < kRawLeZero) {
        empty_ = true;
        return false;
    }
    raw_[i * n + j] = raw;
    // Any path that improves must use the tightened edge: k -> i -> j -> l.
    for (std::size_t k = 0; k < n; ++k) {
        const std::int64_t ki = raw_add(raw_[k * n + i], raw);
        if (ki >= kRawInf) continue;
        const std::int64_t* rj = &raw_[j * n];
        std::int64_t* rk = &raw_[k * n];
        for (std::size_t l = 0; l < n; ++l) {
            const std::int64_t via = raw_add(ki, rj[l]);
            if (via < rk[l]) rk[l] = via;
        }
    }
    return true;
}

Dbm Dbm::constrain(const ClockConstraint& c) const {
    if (c.i >= dim_ || c.j >= dim_)
        throw std::out_of_range("Dbm::constrain: unknown clock index");
    Dbm r = *this;
    if (!r.empty_) r.tighten(c.i, c.j, encode(c.bound));
    return r;
}

Dbm Dbm::constrained_all(const std::vector<ClockConstraint>& cs) const {
    Dbm r = *this;
    for (const ClockConstraint& c : cs) {
        if (c.i >= dim_ || c.j >= dim_)
            throw std::out_of_range("Dbm::constrain: unknown clock index");
        if (r.empty_) break;
        r.tighten(c.i, c.j, encode(c.bound));
    }
    return r;
}

Dbm Dbm::up() const {
    assert(!empty_);
    Dbm r = *this;
    // Canonical form is preserved: paths into column 0 all become infinite.
    for (std::size_t i = 1; i < dim_; ++i) r.raw_[i * dim_] = kRawInf;
    return r;
}

Dbm Dbm::reset(ClockIndex x) const {
    assert(!empty_);
    if (x == kRefClock || x >= dim_) throw std::out_of_range("Dbm::reset: unknown clock");
    Dbm r = *this;
    // x := 0 means x behaves like the reference clock: copy x0's row and
    // column (from the unmodified source) to drop the stale relations of x.
    for (std::size_t j = 0; j < dim_; ++j) {
        r.raw_[x * dim_ + j] = raw_[j];
        r.raw_[j * dim_ + x] = raw_[j * dim_];
    }
    r.raw_[x * dim_ + x] = kRawLeZero;
    r.raw_[x * dim_] = kRawLeZero;
    r.raw_[x] = kRawLeZero;
    return r;
}

Dbm Dbm::extrapolated(const std::vector<std::int64_t>& max_const) const {
    assert(max_const.size() >= dim_);
    if (empty_) return *this;
    Dbm r = *this;
    bool changed = false;
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = 0; j < dim_; ++j) {
            if (i == j) continue;
            const std::int64_t raw = r.raw_[i * dim_ + j];
            if (raw >= kRawInf) continue;
            const std::int64_t v = raw >> 1;
            if (i != 0 && v > max_const[i]) {
                r.raw_[i * dim_ + j] = kRawInf;
                changed = true;
            } else if (j != 0 && v < -max_const[j]) {
                r.raw_[i * dim_ + j] = (-max_const[j]) << 1;  // strict
                changed = true;
            }
        }
    }
    if (changed) r.canonicalize();
    return r;
}

bool Dbm::includes(const Dbm& other) const {
    if (dim_ != other.dim_) throw std::invalid_argument("Dbm::includes: dimension mismatch");
    if (other.empty_) return true;
    if (empty_) return false;
    for (std::size_t k = 0; k < dim_ * dim_; ++k) {
        if (other.raw_[k] > raw_[k]) return false;
    }
    return true;
}

ClockInterval Dbm::interval_of(ClockIndex x) const {
    assert(!empty_);
    if (x == kRefClock || x >= dim_) throw std::out_of_range("Dbm::interval_of: unknown clock");
    const Bound lo = decode(raw_[x]);  // x0 - x <= c encodes x >= -c
    return ClockInterval{Bound{-lo.value, lo.strict}, decode(raw_[x * dim_])};
}

bool Dbm::operator==(const Dbm& o) const {
    if (dim_ != o.dim_) return false;
    if (empty_ || o.empty_) return empty_ == o.empty_;
    return raw_ == o.raw_;
}

std::size_t Dbm::hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::uint64_t v) {
        h ^= v;
        h *= 1099511628211ULL;
    };
    mix(empty_ ? 1 : 0);
    for (std::int64_t r : raw_) mix(static_cast<std::uint64_t>(r));
    return static_cast<std::size_t>(h);
}

std::string Dbm::to_string() const {
    if (empty_) return "(empty)";
    std::ostringstream os;
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = 0; j < dim_; ++j) {
            os << intercore::to_string(decode(raw_[i * dim_ + j]));
            os << (j + 1 == dim_ ? "\n" : "  ");
        }
    }
    return os.str();
}

}  // namespace intercore

#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

namespace linksense {

/// Simulated time in seconds. Continuous, never decreases within a run.
using SimTime = double;

/// Raised when an operation would break the deterministic event order,
/// e.g. scheduling an event in the simulated past.
class SchedulingError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

enum class CancelOutcome {
    Cancelled,      ///< event will not fire (idempotent on repeat)
    AlreadyFired,   ///< event was already dispatched
};

/// Deterministic discrete-event queue. Events dispatch in strict
/// (fire_at, insertion seq) lexicographic order, so ties at the same
/// timestamp resolve by scheduling order. Handlers may schedule further
/// events during dispatch; those are honored within the same run_until
/// if they fall inside the horizon.
template <typename Payload>
class EventQueue {
    enum class State : std::uint8_t { Pending, Cancelled, Fired };

    struct Record {
        SimTime fire_at;
        std::uint64_t seq;
        State state;
        Payload payload;
    };
    using RecordPtr = std::shared_ptr<Record>;

    struct Later {
        bool operator()(const RecordPtr& a, const RecordPtr& b) const {
            return std::tie(a->fire_at, a->seq) > std::tie(b->fire_at, b->seq);
        }
    };

public:
    class Handle {
    public:
        Handle() = default;
        bool valid() const { return static_cast<bool>(rec_); }

    private:
        friend class EventQueue;
        explicit Handle(RecordPtr rec) : rec_(std::move(rec)) {}
        RecordPtr rec_;
    };

    SimTime now() const { return now_; }
    std::size_t pending() const { return live_; }
    bool empty() const { return live_ == 0; }

    Handle schedule(SimTime fire_at, Payload payload) {
        if (!(fire_at >= now_) || !std::isfinite(fire_at)) {
            throw SchedulingError("schedule at t=" + std::to_string(fire_at) +
                                  " violates now=" + std::to_string(now_));
        }
        auto rec = std::make_shared<Record>(
            Record{fire_at, next_seq_++, State::Pending, std::move(payload)});
        heap_.push(rec);
        ++live_;
        return Handle(rec);
    }

    CancelOutcome cancel(const Handle& h) {
        if (!h.rec_ || h.rec_->state == State::Fired) return CancelOutcome::AlreadyFired;
        if (h.rec_->state == State::Pending) {
            h.rec_->state = State::Cancelled;
            --live_;
        }
        return CancelOutcome::Cancelled;
    }

    /// Dispatches every non-cancelled event with fire_at <= t_end, in order,
    /// then advances now to t_end. Returns the number dispatched.
    template <typename Dispatch>
    std::size_t run_until(SimTime t_end, Dispatch&& dispatch) {
        if (!(t_end >= now_)) {
            throw SchedulingError("run_until into the past");
        }
        std::size_t count = 0;
        while (!heap_.empty() && heap_.top()->fire_at <= t_end) {
            RecordPtr rec = heap_.top();
            heap_.pop();
            if (rec->state == State::Cancelled) continue;
            rec->state = State::Fired;
            --live_;
            now_ = rec->fire_at;
            ++count;
            dispatch(now_, std::move(rec->payload));
        }
        now_ = t_end;
        return count;
    }

private:
    std::priority_queue<RecordPtr, std::vector<RecordPtr>, Later> heap_;
    SimTime now_ = 0.0;
    std::uint64_t next_seq_ = 0;
    std::size_t live_ = 0;
};

constexpr std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (char c : s) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seeded pseudo-random stream (mt19937_64 core, draws synthesized from
/// raw bits so sequences are bit-identical across platforms). Substreams
/// are derived from (root seed, purpose tag, id); consuming one stream
/// never perturbs another, which keeps channel realizations identical
/// across algorithm variants run under the same seed.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), gen_(seed) {}

    RngStream substream(std::string_view purpose, std::uint64_t id = 0) const {
        std::uint64_t k = splitmix64(seed_ ^ fnv1a64(purpose));
        return RngStream(splitmix64(k ^ (0x9e3779b97f4a7c15ULL * (id + 1))));
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Box-Muller; consumes exactly two uniforms per call.
    double normal(double mean, double sigma) {
        double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
        double u2 = uniform();
        constexpr double two_pi = 6.283185307179586476925286766559;
        return mean + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
};

/// Order-sensitive FNV-1a accumulator over trace lines; equal hashes over
/// two runs certify identical event traces.
class TraceHasher {
public:
    void add(std::string_view line) {
        hash_ = fnv1a64(line, hash_);
        hash_ = fnv1a64("\n", hash_);
    }
    std::uint64_t value() const { return hash_; }

private:
    std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

}  // namespace linksense

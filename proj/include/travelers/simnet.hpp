#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "travelers/rng.hpp"
#include "travelers/types.hpp"

namespace travelers::simnet {

/// Single-threaded discrete-event loop. Events fire in (due, sequence)
/// order; the sequence counter makes same-instant ordering deterministic
/// (FIFO among equal due times). Scheduling in the past is a logic error.
class Simulator {
public:
    using Action = std::function<void()>;

    Tick now() const { return now_; }
    std::size_t pending() const { return queue_.size(); }

    std::uint64_t schedule(Tick due, Action action);

    /// Drains the queue. Each action may schedule further events at or
    /// after the current instant.
    void run();

    /// Processes events with due <= horizon, leaving later ones queued.
    void run_until(Tick horizon);

private:
    struct Event {
        Tick due;
        std::uint64_t seq;
        Action action;
    };
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            return a.due != b.due ? a.due > b.due : a.seq > b.seq;
        }
    };

    void fire_next();

    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    Tick now_ = 0;
    std::uint64_t next_seq_ = 0;
};

/// Per-node clock offsets, fixed for the whole run: local(i, T) = T + off(i)
/// with |off(i)| <= delta_clock. Two honest readings of one instant can
/// therefore disagree by at most 2*delta_clock.
class ClockModel {
public:
    ClockModel(const KeyedRng& rng, std::uint32_t n, Tick delta_clock);

    Tick offset(NodeId node) const;
    Tick read(NodeId node, Tick true_time) const;
    Tick skew_bound() const { return delta_clock_; }

private:
    std::vector<Tick> offsets_;
    Tick delta_clock_;
};

/// Link-delay policy. Honest legs draw uniformly from [min_delay, delta_net]
/// keyed by (from, to, leg key), so any single draw can be replayed in
/// isolation. Legs between two colluding nodes take zero time (the
/// adversary runs its members in one place); the adversary may also
/// substitute any value in [0, delta_net] on legs it controls, which
/// callers apply via choose().
class NetModel {
public:
    NetModel(const KeyedRng& rng, Tick delta_net, Tick min_delay = 1);

    /// Marks the colluding subset; vector indexed by NodeId.
    void set_colluding(std::vector<bool> colluding);

    bool colluding(NodeId node) const;

    /// Deterministic honest delay for this leg (0 when both ends collude
    /// or the leg is a node talking to itself).
    Tick delay(NodeId from, NodeId to, std::initializer_list<std::uint64_t> leg_key) const;

    /// Clamps an adversary-chosen delay to the enforced [0, delta_net] bound.
    Tick choose(Tick wanted) const;

    Tick max_delay() const { return delta_net_; }
    Tick min_delay() const { return min_delay_; }

private:
    const KeyedRng* rng_;
    Tick delta_net_;
    Tick min_delay_;
    std::vector<bool> colluding_;
};

/// Message/byte accounting, split by payload vs overhead so complexity
/// reports can isolate the lambda-proportional part.
struct TrafficMeter {
    std::uint64_t messages = 0;
    std::uint64_t payload_bytes = 0;
    std::uint64_t overhead_bytes = 0;

    void count(std::uint64_t msgs, std::uint64_t payload, std::uint64_t overhead) {
        messages += msgs;
        payload_bytes += payload;
        overhead_bytes += overhead;
    }
    std::uint64_t total_bytes() const { return payload_bytes + overhead_bytes; }
};

}  // namespace travelers::simnet

#include "travelers/simnet.hpp"

#include <cassert>
#include <stdexcept>
#include <utility>

namespace travelers::simnet {

std::uint64_t Simulator::schedule(Tick due, Action action) {
    if (due < now_) throw std::logic_error("schedule: due time already passed");
    const std::uint64_t seq = next_seq_++;
    queue_.push(Event{due, seq, std::move(action)});
    return seq;
}

void Simulator::fire_next() {
    // priority_queue::top is const; the action is moved out via const_cast,
    // safe because the element is popped before the action runs.
    Event& ev = const_cast<Event&>(queue_.top());
    now_ = ev.due;
    Action action = std::move(ev.action);
    queue_.pop();
    action();
}

void Simulator::run() {
    while (!queue_.empty()) fire_next();
}

void Simulator::run_until(Tick horizon) {
    while (!queue_.empty() && queue_.top().due <= horizon) fire_next();
    if (now_ < horizon) now_ = horizon;
}

ClockModel::ClockModel(const KeyedRng& rng, std::uint32_t n, Tick delta_clock)
    : delta_clock_(delta_clock) {
    if (delta_clock < 0) throw std::invalid_argument("clock: delta_clock must be >= 0");
    offsets_.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        offsets_.push_back(delta_clock == 0
                               ? 0
                               : rng.uniform_in(Stream::Offsets, {i}, -delta_clock, delta_clock));
    }
}

Tick ClockModel::offset(NodeId node) const {
    if (node >= offsets_.size()) throw std::out_of_range("clock: unknown node");
    return offsets_[node];
}

Tick ClockModel::read(NodeId node, Tick true_time) const {
    const Tick off = offset(node);
    assert(off >= -delta_clock_ && off <= delta_clock_);
    return true_time + off;
}

NetModel::NetModel(const KeyedRng& rng, Tick delta_net, Tick min_delay)
    : rng_(&rng), delta_net_(delta_net), min_delay_(min_delay) {
    if (delta_net < 1) throw std::invalid_argument("net: delta_net must be >= 1");
    if (min_delay < 0 || min_delay > delta_net)
        throw std::invalid_argument("net: min_delay must lie in [0, delta_net]");
}

void NetModel::set_colluding(std::vector<bool> colluding) {
    colluding_ = std::move(colluding);
}

bool NetModel::colluding(NodeId node) const {
    return node < colluding_.size() && colluding_[node];
}

Tick NetModel::delay(NodeId from, NodeId to,
                     std::initializer_list<std::uint64_t> leg_key) const {
    if (from == to) return 0;  // local hand-off
    if (colluding(from) && colluding(to)) return 0;
    // Fold (from, to) in front of the caller's leg key without allocating.
    std::uint64_t parts[18];
    std::size_t count = 0;
    parts[count++] = from;
    parts[count++] = to;
    for (std::uint64_t part : leg_key) {
        if (count >= sizeof parts / sizeof parts[0]) throw std::invalid_argument("delay: key too long");
        parts[count++] = part;
    }
    const Tick d = rng_->uniform_in(Stream::Delays, parts, count, min_delay_, delta_net_);
    assert(d >= min_delay_ && d <= delta_net_);
    return d;
}

Tick NetModel::choose(Tick wanted) const {
    if (wanted < 0) return 0;
    if (wanted > delta_net_) return delta_net_;
    return wanted;
}

}  // namespace travelers::simnet

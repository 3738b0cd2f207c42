#include "travelers/routing.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

#include "travelers/digest.hpp"

namespace travelers::routing {

namespace {

using adversary::AdversaryState;
using adversary::Tactic;
using adversary::TacticKind;

// Leg discriminators for keyed delay draws; every network leg of a
// traversal is a pure function of (tx, path, leg, indices), which is what
// makes counterfactual replay exact.
enum Leg : std::uint64_t {
    kLegSubmit = 1,
    kLegOut = 2,
    kLegBack = 3,
    kLegDeliver = 4,
    kLegEntry = 5,
    kLegHop = 6,
    kLegDeliverLast = 7,
};

struct Arrival {
    Tick at = 0;        // true arrival time at the collection point
    Tick reading;       // signer's embedded local reading
    NodeId signer;
    std::uint32_t slot; // tie-break and replay index
};

struct Resolution {
    bool formed = false;
    Tick crossing_at = 0;  // true time the t-th signature arrived
    Tick ts = 0;           // approval timestamp per rule
    std::vector<NodeId> signers;
};

void sort_arrivals(std::vector<Arrival>& arrivals) {
    std::sort(arrivals.begin(), arrivals.end(), [](const Arrival& a, const Arrival& b) {
        return a.at != b.at ? a.at < b.at : a.slot < b.slot;
    });
}

Resolution resolve(std::vector<Arrival> arrivals, std::uint32_t t, ApprovalRule rule) {
    Resolution res;
    if (arrivals.size() < t) return res;
    sort_arrivals(arrivals);
    res.formed = true;
    res.crossing_at = arrivals[t - 1].at;
    switch (rule) {
        case ApprovalRule::ThresholdSigner:
            res.ts = arrivals[t - 1].reading;
            break;
        case ApprovalRule::MaxSigner: {
            Tick mx = arrivals[0].reading;
            for (std::uint32_t i = 1; i < t; ++i) mx = std::max(mx, arrivals[i].reading);
            res.ts = mx;
            break;
        }
        case ApprovalRule::MedianSigner: {
            std::vector<Tick> readings;
            readings.reserve(t);
            for (std::uint32_t i = 0; i < t; ++i) readings.push_back(arrivals[i].reading);
            auto mid = readings.begin() + (t - 1) / 2;
            std::nth_element(readings.begin(), mid, readings.end());
            res.ts = *mid;
            break;
        }
    }
    res.signers.reserve(t);
    for (std::uint32_t i = 0; i < t; ++i) res.signers.push_back(arrivals[i].signer);
    return res;
}

/// First t corrupted members of a hub, in slot order.
std::vector<NodeId> corrupted_signers(const HubSpec& hub, const AdversaryState& adv,
                                      std::uint32_t t) {
    std::vector<NodeId> out;
    for (NodeId v : hub.members) {
        if (adv.is_corrupted(v)) {
            out.push_back(v);
            if (out.size() == t) break;
        }
    }
    return out;
}

class Run {
public:
    Run(const TraversalContext& ctx, const Transaction& tx, const PathSpec& path,
        Tick submit, bool apply_tactics, bool force_cooperative)
        : ctx_(ctx),
          tx_(tx),
          path_(path),
          submit_(submit),
          apply_tactics_(apply_tactics),
          force_coop_(force_cooperative),
          p_(*ctx.params),
          tx64_(digest_low64(tx.id)) {}

    TraversalOutcome go() {
        resolve_tactic();
        const NodeId initiator = path_.hubs[0].members[0];
        const NodeId client = p_.n;
        const Tick t_init =
            submit_ + ctx_.net->delay(client, initiator, {tx64_, path_.path_id, kLegSubmit});
        count(1, tx_.payload_len, 0);
        note_contact(initiator, t_init);

        if (tactic_.kind == TacticKind::Forge) {
            forge(t_init);
        } else if (ctx_.mode == TraversalMode::Iterative) {
            iterative(t_init);
        } else {
            recursive(t_init);
        }

        if (!tx_.hidden) {
            out_.reveal.reveal_time = submit_;
            out_.reveal.adversary_knowledge_time = out_.first_corrupted_contact;
        }
        out_.reveal.tx = tx_.id;
        out_.applied_tactic = tactic_.kind;
        if (out_.completed) {
            out_.cert.tx = tx_.id;
            out_.cert.path_id = path_.path_id;
            out_.cert.locked_ts = locked_timestamp(out_.cert, k());
        }
        return out_;
    }

private:
    std::uint32_t k() const { return static_cast<std::uint32_t>(path_.hubs.size()); }
    std::uint32_t q(std::uint32_t j) const {
        return static_cast<std::uint32_t>(path_.hubs[j].members.size());
    }
    NodeId sink() const { return p_.n + 1; }

    void count(std::uint64_t msgs, std::uint64_t payload, std::uint64_t overhead) {
        out_.messages += msgs;
        out_.payload_bytes += payload;
        out_.overhead_bytes += overhead;
    }

    void note_contact(NodeId node, Tick at) {
        if (ctx_.adv->is_corrupted(node))
            out_.first_corrupted_contact = std::min(out_.first_corrupted_contact, at);
    }

    bool reveals_plaintext(std::uint32_t hub_index) const {
        if (!tx_.hidden) return false;
        const auto& idx = ctx_.reveal.decrypt_hub_indices;
        if (ctx_.reveal.layered)
            return hub_index == *std::max_element(idx.begin(), idx.end());
        return std::find(idx.begin(), idx.end(), hub_index) != idx.end();
    }

    bool decrypt_position(std::uint32_t hub_index) const {
        if (!tx_.hidden) return false;
        const auto& idx = ctx_.reveal.decrypt_hub_indices;
        return std::find(idx.begin(), idx.end(), hub_index) != idx.end();
    }

    void note_reveal(std::uint32_t hub_index, NodeId member, Tick at) {
        if (!reveals_plaintext(hub_index)) return;
        out_.reveal.reveal_time = std::min(out_.reveal.reveal_time, at);
        if (ctx_.adv->is_corrupted(member))
            out_.reveal.adversary_knowledge_time =
                std::min(out_.reveal.adversary_knowledge_time, at);
    }

    /// Whether this member signs at this hub. Honest members always do.
    /// Corrupted members never sign at an impasse hub (signing there would
    /// surrender the adversary's veto for no gain) and are otherwise
    /// truthful when cooperative. The counterfactual run forces full
    /// honesty everywhere.
    bool responds(NodeId member, HubType type) const {
        if (!ctx_.adv->is_corrupted(member)) return true;
        if (force_coop_) return true;
        if (type == HubType::Impasse) return false;
        return ctx_.adv->cooperative;
    }

    void resolve_tactic() {
        tactic_ = apply_tactics_ ? ctx_.adv->tactic_for(tx_.id, path_.path_id) : Tactic{};
        switch (tactic_.kind) {
            case TacticKind::None:
                break;
            case TacticKind::Delay: {
                auto anchor = adversary::last_controlled_hub(path_, *ctx_.adv, p_.t);
                if (anchor && adversary::tactic_feasible(path_, *ctx_.adv, p_.t, tactic_.kind))
                    delay_anchor_ = *anchor;
                else
                    tactic_ = Tactic{};
                break;
            }
            case TacticKind::AdvanceReuse: {
                const std::uint32_t x = adversary::corrupted_suffix(path_, *ctx_.adv, p_.t);
                if (x >= 1 && x < k()) {
                    covered_from_ = k() - x;
                    covered_to_ = k();
                } else {
                    tactic_ = Tactic{};
                }
                break;
            }
            case TacticKind::AdvanceChain: {
                auto s = adversary::corrupted_chain_start(path_, *ctx_.adv, p_.t);
                if (s) {
                    covered_from_ = *s;
                    covered_to_ = *s;
                    while (covered_to_ < k() &&
                           ctx_.adv->hub_type(path_.hubs[covered_to_], p_.t) ==
                               HubType::Corrupted)
                        ++covered_to_;
                } else {
                    tactic_ = Tactic{};
                }
                break;
            }
            case TacticKind::Forge:
                if (adversary::classify_path(path_, *ctx_.adv, p_.t) !=
                    adversary::PathClass::Corrupted)
                    tactic_ = Tactic{};
                break;
        }
    }

    void forge(Tick t_init) {
        const NodeId initiator = path_.hubs[0].members[0];
        Tick contact = kNever;
        if (ctx_.adv->is_corrupted(initiator)) {
            contact = t_init;
        } else {
            // The initiator honestly dispatches hub 0; the collective
            // hijacks the traversal at its first sighting.
            const auto& hub = path_.hubs[0];
            count(q(0), decrypt_position(0) ? std::uint64_t(q(0)) * tx_.payload_len : 0,
                  std::uint64_t(q(0)) * p_.lambda_bytes);
            for (std::uint32_t m = 0; m < q(0); ++m) {
                const NodeId member = hub.members[m];
                const Tick at = t_init + ctx_.net->delay(initiator, member,
                                                         {tx64_, path_.path_id, kLegOut, 0, m});
                note_contact(member, at);
                note_reveal(0, member, at);
                if (ctx_.adv->is_corrupted(member)) contact = std::min(contact, at);
            }
        }
        assert(contact != kNever);  // a corrupted path has corrupted members in hub 0
        out_.completed = true;
        out_.cert.approvals.clear();
        for (std::uint32_t j = 0; j < k(); ++j) {
            out_.cert.approvals.push_back(
                HubApproval{j, tactic_.amount, corrupted_signers(path_.hubs[j], *ctx_.adv, p_.t)});
        }
        out_.completion_time = contact;
        out_.delivery_time = contact + ctx_.net->min_delay();
        count(1, tx_.payload_len, std::uint64_t(k()) * p_.lambda_bytes);
        out_.kind = TimestampKind::Arbitrary;
    }

    void iterative(Tick t_init) {
        const NodeId initiator = path_.hubs[0].members[0];
        Tick dispatch = t_init;
        std::uint32_t j = 0;
        while (j < k()) {
            if (tactic_covers(j)) {
                dispatch = covered_round_trip(initiator, dispatch, j);
                j = covered_to_;
                continue;
            }
            const auto& hub = path_.hubs[j];
            const HubType type = ctx_.adv->hub_type(hub, p_.t);
            count(q(j), decrypt_position(j) ? std::uint64_t(q(j)) * tx_.payload_len : 0,
                  std::uint64_t(q(j)) * p_.lambda_bytes);

            std::vector<Arrival> arrivals;
            std::vector<Arrival> held;  // delay anchor: withheld corrupted signatures
            const bool anchored = tactic_.kind == TacticKind::Delay && j == delay_anchor_;
            for (std::uint32_t m = 0; m < q(j); ++m) {
                const NodeId member = hub.members[m];
                const Tick at = dispatch + ctx_.net->delay(initiator, member,
                                                           {tx64_, path_.path_id, kLegOut, j, m});
                note_contact(member, at);
                note_reveal(j, member, at);
                const Tick back = at + ctx_.net->delay(member, initiator,
                                                       {tx64_, path_.path_id, kLegBack, j, m});
                const Arrival arr{back, ctx_.clock->read(member, at), member, m};
                if (anchored && ctx_.adv->is_corrupted(member))
                    held.push_back(arr);  // truthful version, used for the counterfactual
                else if (responds(member, type))
                    arrivals.push_back(arr);
            }

            Resolution res;
            if (anchored) {
                // What the hub would have stamped had everyone been
                // truthful; the withheld signatures re-enter `amount`
                // ticks later, all claiming that reading plus the shift.
                std::vector<Arrival> truthful = arrivals;
                truthful.insert(truthful.end(), held.begin(), held.end());
                const Resolution would = resolve(std::move(truthful), p_.t, ctx_.rule);
                assert(would.formed);
                for (const Arrival& h : held) {
                    arrivals.push_back(Arrival{would.crossing_at + tactic_.amount,
                                               would.ts + tactic_.amount, h.signer, h.slot});
                }
                res = resolve(std::move(arrivals), p_.t, ctx_.rule);
                count(q(j), 0, std::uint64_t(q(j)) * p_.lambda_bytes);  // all reply, some late
            } else {
                count(arrivals.size(), 0, arrivals.size() * p_.lambda_bytes);
                res = resolve(std::move(arrivals), p_.t, ctx_.rule);
            }
            if (!res.formed) {
                out_.completed = false;
                out_.stalled_at_hub = j;
                return;
            }
            out_.cert.approvals.push_back(HubApproval{j, res.ts, std::move(res.signers)});
            dispatch = res.crossing_at;
            ++j;
        }
        out_.completed = true;
        out_.completion_time = dispatch;
        out_.delivery_time =
            dispatch + ctx_.net->delay(initiator, sink(), {tx64_, path_.path_id, kLegDeliver});
        count(1, tx_.payload_len, std::uint64_t(k()) * p_.lambda_bytes);
    }

    bool tactic_covers(std::uint32_t j) const {
        return (tactic_.kind == TacticKind::AdvanceReuse ||
                tactic_.kind == TacticKind::AdvanceChain) &&
               j == covered_from_;
    }

    /// Advance tactics: the initiator dispatches the first covered hub
    /// normally, the first corrupted member reached answers with
    /// ready-made approvals for the whole covered stretch in one reply.
    Tick covered_round_trip(NodeId initiator, Tick dispatch, std::uint32_t j) {
        const auto& hub = path_.hubs[j];
        count(q(j), decrypt_position(j) ? std::uint64_t(q(j)) * tx_.payload_len : 0,
              std::uint64_t(q(j)) * p_.lambda_bytes);
        Tick contact = kNever;
        std::uint32_t contact_slot = 0;
        for (std::uint32_t m = 0; m < q(j); ++m) {
            const NodeId member = hub.members[m];
            const Tick at = dispatch + ctx_.net->delay(initiator, member,
                                                       {tx64_, path_.path_id, kLegOut, j, m});
            note_contact(member, at);
            note_reveal(j, member, at);
            if (ctx_.adv->is_corrupted(member) && at < contact) {
                contact = at;
                contact_slot = m;
            }
        }
        assert(contact != kNever);  // covered hubs are corrupted-controlled
        const NodeId speaker = hub.members[contact_slot];
        const Tick entry_reading = ctx_.clock->read(speaker, contact);
        for (std::uint32_t h = covered_from_; h < covered_to_; ++h) {
            const Tick ts = tactic_.kind == TacticKind::AdvanceReuse
                                ? out_.cert.approvals.back().timestamp
                                : entry_reading;
            out_.cert.approvals.push_back(
                HubApproval{h, ts, corrupted_signers(path_.hubs[h], *ctx_.adv, p_.t)});
        }
        const Tick back = contact + ctx_.net->delay(speaker, initiator,
                                                    {tx64_, path_.path_id, kLegBack, j, contact_slot});
        count(1, 0, std::uint64_t(covered_to_ - covered_from_) * p_.lambda_bytes);
        return back;
    }

    void recursive(Tick t_init) {
        const NodeId initiator = path_.hubs[0].members[0];
        struct Member {
            bool signed_ = false;
            Tick sign_time = 0;
            Tick reading = 0;
            std::vector<HubApproval> view;  // approvals for hubs before this one
        };
        std::vector<std::vector<Member>> state(k());

        // Entry: the initiator fans the payload out to its own hub.
        state[0].resize(q(0));
        const HubType type0 = ctx_.adv->hub_type(path_.hubs[0], p_.t);
        count(q(0), std::uint64_t(q(0)) * tx_.payload_len,
              std::uint64_t(q(0)) * p_.lambda_bytes);
        for (std::uint32_t m = 0; m < q(0); ++m) {
            const NodeId member = path_.hubs[0].members[m];
            const Tick at = t_init + ctx_.net->delay(initiator, member,
                                                     {tx64_, path_.path_id, kLegEntry, m});
            note_contact(member, at);
            note_reveal(0, member, at);
            if (!responds(member, type0)) continue;
            state[0][m] = Member{true, at, ctx_.clock->read(member, at), {}};
        }

        // Hops: members of hub j broadcast to every member of hub j+1.
        for (std::uint32_t j = 0; j + 1 < k(); ++j) {
            const auto& next = path_.hubs[j + 1];
            const HubType next_type = ctx_.adv->hub_type(next, p_.t);
            state[j + 1].resize(q(j + 1));
            std::uint64_t senders = 0;
            for (std::uint32_t m = 0; m < q(j); ++m) senders += state[j][m].signed_ ? 1 : 0;
            count(senders * q(j + 1), senders * q(j + 1) * tx_.payload_len,
                  senders * q(j + 1) * (std::uint64_t(j) + 1) * p_.lambda_bytes);
            for (std::uint32_t r = 0; r < q(j + 1); ++r) {
                const NodeId receiver = next.members[r];
                std::vector<Arrival> arrivals;
                std::vector<const Member*> source(q(j), nullptr);
                for (std::uint32_t m = 0; m < q(j); ++m) {
                    const Member& s = state[j][m];
                    if (!s.signed_) continue;
                    const Tick at = s.sign_time +
                                    ctx_.net->delay(path_.hubs[j].members[m], receiver,
                                                    {tx64_, path_.path_id, kLegHop, j, m, r});
                    note_contact(receiver, at);
                    arrivals.push_back(Arrival{at, s.reading, path_.hubs[j].members[m], m});
                    source[m] = &s;
                }
                Resolution res = resolve(arrivals, p_.t, ctx_.rule);
                if (!res.formed) continue;  // this receiver never crosses
                // Adopt the prefix carried by the threshold-crossing sender.
                sort_arrivals(arrivals);
                const Member& crosser = *source[arrivals[p_.t - 1].slot];
                note_reveal(j + 1, receiver, res.crossing_at);
                if (!responds(receiver, next_type)) continue;
                Member& me = state[j + 1][r];
                me.signed_ = true;
                me.sign_time = res.crossing_at;
                me.reading = ctx_.clock->read(receiver, res.crossing_at);
                me.view = crosser.view;
                me.view.push_back(HubApproval{j, res.ts, std::move(res.signers)});
            }
        }

        // Delivery: last-hub members hand their views to the sequencer,
        // which assembles the certificate at the t-th valid delivery.
        std::vector<Arrival> deliveries;
        std::vector<const Member*> source(q(k() - 1), nullptr);
        for (std::uint32_t m = 0; m < q(k() - 1); ++m) {
            const Member& s = state[k() - 1][m];
            if (!s.signed_) continue;
            const Tick at = s.sign_time +
                            ctx_.net->delay(path_.hubs[k() - 1].members[m], sink(),
                                            {tx64_, path_.path_id, kLegDeliverLast, m});
            deliveries.push_back(Arrival{at, s.reading, path_.hubs[k() - 1].members[m], m});
            source[m] = &s;
            count(1, tx_.payload_len, std::uint64_t(k()) * p_.lambda_bytes);
        }
        Resolution res = resolve(deliveries, p_.t, ctx_.rule);
        if (!res.formed) {
            out_.completed = false;
            out_.stalled_at_hub = k() - 1;
            for (std::uint32_t j = 0; j < k(); ++j) {
                std::uint32_t signed_count = 0;
                for (const Member& m : state[j]) signed_count += m.signed_ ? 1 : 0;
                if (signed_count < p_.t) {
                    out_.stalled_at_hub = j;
                    break;
                }
            }
            return;
        }
        sort_arrivals(deliveries);
        const Member& crosser = *source[deliveries[p_.t - 1].slot];
        out_.completed = true;
        out_.cert.approvals = crosser.view;
        out_.cert.approvals.push_back(HubApproval{k() - 1, res.ts, std::move(res.signers)});
        Tick last_sign = 0;
        for (std::uint32_t i = 0; i < p_.t; ++i)
            last_sign = std::max(last_sign, source[deliveries[i].slot]->sign_time);
        out_.completion_time = last_sign;
        out_.delivery_time = res.crossing_at;
    }

    const TraversalContext& ctx_;
    const Transaction& tx_;
    const PathSpec& path_;
    const Tick submit_;
    const bool apply_tactics_;
    const bool force_coop_;
    const SystemParams& p_;
    const std::uint64_t tx64_;

    Tactic tactic_{};
    std::uint32_t delay_anchor_ = 0;
    std::uint32_t covered_from_ = 0;
    std::uint32_t covered_to_ = 0;

    TraversalOutcome out_;
};

bool path_has_corrupted_member(const PathSpec& path, const AdversaryState& adv) {
    for (const auto& hub : path.hubs)
        for (NodeId v : hub.members)
            if (adv.is_corrupted(v)) return true;
    return false;
}

}  // namespace

TraversalOutcome traverse(const TraversalContext& ctx, const Transaction& tx,
                          const PathSpec& path, Tick submit_time) {
    if (!ctx.params || !ctx.clock || !ctx.net || !ctx.adv)
        throw std::invalid_argument("traverse: incomplete context");
    if (path.hubs.empty()) throw std::invalid_argument("traverse: empty path");
    if (tx.hidden && ctx.reveal.decrypt_hub_indices.empty())
        throw std::invalid_argument("traverse: hidden payload needs a decryption hub");
    for (std::uint32_t idx : ctx.reveal.decrypt_hub_indices)
        if (idx >= path.hubs.size())
            throw std::invalid_argument("traverse: decryption hub index out of range");
    const Tactic scheduled = ctx.adv->tactic_for(tx.id, path.path_id);
    if (ctx.mode == TraversalMode::Recursive && scheduled.kind != TacticKind::None)
        throw std::invalid_argument("traverse: tactics are modeled for iterative traversal");

    TraversalOutcome real = Run(ctx, tx, path, submit_time, true, false).go();
    if (!real.completed) return real;

    const bool may_diverge = real.applied_tactic != TacticKind::None ||
                             (!ctx.adv->cooperative && path_has_corrupted_member(path, *ctx.adv));
    if (may_diverge) {
        const TraversalOutcome honest = Run(ctx, tx, path, submit_time, false, true).go();
        assert(honest.completed);  // full honesty always completes
        real.counterfactual_locked = honest.cert.locked_ts;
        if (real.applied_tactic != TacticKind::Forge)
            real.kind = label_timestamp(real.cert.locked_ts, honest.cert.locked_ts);
    } else {
        real.kind = TimestampKind::True;  // behavior was honest by construction
        real.counterfactual_locked = real.cert.locked_ts;
    }
    return real;
}

bool verify_certificate(const Certificate& cert, const assignment::BlockRandomness& rand,
                        const SystemParams& params,
                        const assignment::DecryptionSet* decryption) {
    if (cert.approvals.size() != params.k) return false;
    const PathSpec path = assignment::derive_path(cert.path_id, rand, params, decryption);
    for (std::uint32_t j = 0; j < params.k; ++j) {
        const HubApproval& ap = cert.approvals[j];
        if (ap.hub_index != j) return false;
        if (ap.signers.size() < params.t) return false;
        std::vector<NodeId> sorted = ap.signers;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return false;
        const auto& members = path.hubs[j].members;
        for (NodeId v : ap.signers) {
            if (std::find(members.begin(), members.end(), v) == members.end()) return false;
        }
    }
    return true;
}

TimestampKind label_timestamp(Tick locked, Tick counterfactual) {
    if (locked < counterfactual) return TimestampKind::Advanced;
    if (locked > counterfactual) return TimestampKind::Delayed;
    return TimestampKind::True;
}

TrafficModel expected_iterative_traffic(const SystemParams& params, std::uint64_t payload_len,
                                        bool hidden, std::uint32_t decrypt_hub_count) {
    TrafficModel m;
    const std::uint64_t q = params.q, k = params.k, lam = params.lambda_bytes;
    m.messages = 2 + 2 * k * q;
    m.payload_bytes = 2 * payload_len + (hidden ? decrypt_hub_count * q * payload_len : 0);
    m.overhead_bytes = 2 * k * q * lam + k * lam;
    return m;
}

TrafficModel expected_recursive_traffic(const SystemParams& params, std::uint64_t payload_len) {
    TrafficModel m;
    const std::uint64_t q = params.q, k = params.k, lam = params.lambda_bytes;
    const std::uint64_t protocol_msgs = q + (k - 1) * q * q + q;
    m.messages = 1 + protocol_msgs;
    m.payload_bytes = payload_len * (1 + protocol_msgs);
    std::uint64_t hop_overhead = 0;
    for (std::uint64_t j = 0; j + 1 < k; ++j) hop_overhead += q * q * (j + 1) * lam;
    m.overhead_bytes = q * lam + hop_overhead + q * k * lam;
    return m;
}

}  // namespace travelers::routing

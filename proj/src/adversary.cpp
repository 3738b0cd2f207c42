#include "travelers/adversary.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace travelers::adversary {

const char* to_string(TacticKind k) {
    switch (k) {
        case TacticKind::None: return "none";
        case TacticKind::Delay: return "delay";
        case TacticKind::AdvanceReuse: return "advance-reuse";
        case TacticKind::AdvanceChain: return "advance-chain";
        case TacticKind::Forge: return "forge";
    }
    return "?";
}

const char* to_string(PathClass c) {
    switch (c) {
        case PathClass::Regular: return "regular";
        case PathClass::Mixed: return "mixed";
        case PathClass::Corrupted: return "corrupted";
        case PathClass::ContainsImpasse: return "contains-impasse";
    }
    return "?";
}

std::uint32_t AdversaryState::corrupted_in(const HubSpec& hub) const {
    std::uint32_t c = 0;
    for (NodeId v : hub.members) c += is_corrupted(v) ? 1 : 0;
    return c;
}

std::uint32_t AdversaryState::honest_in(const HubSpec& hub) const {
    return static_cast<std::uint32_t>(hub.members.size()) - corrupted_in(hub);
}

HubType AdversaryState::hub_type(const HubSpec& hub, std::uint32_t t) const {
    const std::uint32_t c = corrupted_in(hub);
    return classify_hub(static_cast<std::uint32_t>(hub.members.size()) - c, c, t);
}

Tactic AdversaryState::tactic_for(const Digest& tx, std::uint64_t path_id) const {
    auto it = schedule.find({tx, path_id});
    return it == schedule.end() ? Tactic{} : it->second;
}

void AdversaryState::assign(const Digest& tx, std::uint64_t path_id, Tactic tactic) {
    schedule[{tx, path_id}] = tactic;
}

std::uint32_t AdversaryState::corrupted_count() const {
    return static_cast<std::uint32_t>(std::count(corrupted.begin(), corrupted.end(), true));
}

AdversaryState corrupt(const KeyedRng& rng, std::uint32_t n, std::uint32_t f) {
    if (f > n) throw std::invalid_argument("corrupt: f cannot exceed n");
    AdversaryState adv;
    adv.corrupted.assign(n, false);
    // Partial Fisher-Yates: the first f entries of a keyed shuffle.
    std::vector<NodeId> ids(n);
    std::iota(ids.begin(), ids.end(), 0u);
    for (std::uint32_t i = 0; i < f; ++i) {
        const auto j =
            i + static_cast<std::uint32_t>(rng.uniform(Stream::Corruption, {i}, n - i));
        std::swap(ids[i], ids[j]);
        adv.corrupted[ids[i]] = true;
    }
    return adv;
}

PathClass classify_path(const PathSpec& path, const AdversaryState& adv, std::uint32_t t) {
    bool all_regular = true, all_corrupted = true, any_impasse = false;
    for (const auto& hub : path.hubs) {
        switch (adv.hub_type(hub, t)) {
            case HubType::Regular: all_corrupted = false; break;
            case HubType::Corrupted: all_regular = false; break;
            case HubType::Impasse:
                all_regular = all_corrupted = false;
                any_impasse = true;
                break;
            case HubType::Both: break;  // unreachable with t > q/2; counts as both
        }
    }
    if (all_corrupted) return PathClass::Corrupted;
    if (all_regular) return PathClass::Regular;
    if (any_impasse) return PathClass::ContainsImpasse;
    return PathClass::Mixed;
}

std::optional<std::uint32_t> last_weak_hub(const PathSpec& path, const AdversaryState& adv,
                                           std::uint32_t t) {
    std::optional<std::uint32_t> found;
    for (std::uint32_t j = 0; j < path.hubs.size(); ++j) {
        if (adv.honest_in(path.hubs[j]) < t) found = j;
    }
    return found;
}

std::optional<std::uint32_t> last_controlled_hub(const PathSpec& path,
                                                 const AdversaryState& adv, std::uint32_t t) {
    std::optional<std::uint32_t> found;
    for (std::uint32_t j = 0; j < path.hubs.size(); ++j) {
        if (adv.corrupted_in(path.hubs[j]) >= t) found = j;
    }
    return found;
}

std::uint32_t corrupted_suffix(const PathSpec& path, const AdversaryState& adv,
                               std::uint32_t t) {
    std::uint32_t x = 0;
    for (auto it = path.hubs.rbegin(); it != path.hubs.rend(); ++it) {
        if (adv.hub_type(*it, t) != HubType::Corrupted) break;
        ++x;
    }
    return x;
}

std::optional<std::uint32_t> corrupted_chain_start(const PathSpec& path,
                                                   const AdversaryState& adv,
                                                   std::uint32_t t) {
    std::uint32_t run = 0;
    for (std::uint32_t j = 0; j < path.hubs.size(); ++j) {
        if (adv.hub_type(path.hubs[j], t) == HubType::Corrupted) {
            if (++run == 2) return j - 1;
        } else {
            run = 0;
        }
    }
    return std::nullopt;
}

bool tactic_feasible(const PathSpec& path, const AdversaryState& adv, std::uint32_t t,
                     TacticKind kind) {
    switch (kind) {
        case TacticKind::None: return true;
        case TacticKind::Delay: return last_weak_hub(path, adv, t).has_value();
        case TacticKind::AdvanceReuse:
            // Reuse needs an honest approval to restamp, so the corrupted
            // suffix must not swallow the whole path.
            return corrupted_suffix(path, adv, t) >= 1 &&
                   corrupted_suffix(path, adv, t) < path.hubs.size();
        case TacticKind::AdvanceChain:
            return corrupted_chain_start(path, adv, t).has_value();
        case TacticKind::Forge:
            return classify_path(path, adv, t) == PathClass::Corrupted;
    }
    return false;
}

Tactic TacticPolicy::pick(const PathSpec& path, const AdversaryState& adv,
                          std::uint32_t t) const {
    if (forge && tactic_feasible(path, adv, t, TacticKind::Forge))
        return {TacticKind::Forge, forge_timestamp};
    if (advance_reuse && tactic_feasible(path, adv, t, TacticKind::AdvanceReuse))
        return {TacticKind::AdvanceReuse, 0};
    if (advance_chain && tactic_feasible(path, adv, t, TacticKind::AdvanceChain))
        return {TacticKind::AdvanceChain, 0};
    if (delay && tactic_feasible(path, adv, t, TacticKind::Delay))
        return {TacticKind::Delay, delay_amount};
    return {};
}

double ConstantProductPool::swap_base_for_quote(double amount) {
    if (amount <= 0.0 || base <= 0.0 || quote <= 0.0)
        throw std::invalid_argument("pool: positive reserves and amount required");
    const double k = base * quote;
    const double new_base = base + amount;
    const double out = quote - k / new_base;
    base = new_base;
    quote -= out;
    return out;
}

double ConstantProductPool::swap_quote_for_base(double amount) {
    if (amount <= 0.0 || base <= 0.0 || quote <= 0.0)
        throw std::invalid_argument("pool: positive reserves and amount required");
    const double k = base * quote;
    const double new_quote = quote + amount;
    const double out = base - k / new_quote;
    quote = new_quote;
    base -= out;
    return out;
}

SandwichPlan plan_sandwich(const Transaction& victim, Tick knowledge_time,
                           Tick victim_canonical, Tick required_lead,
                           std::uint32_t attacker_client, std::uint64_t sequence_base) {
    SandwichPlan plan;
    plan.victim = victim.id;
    plan.knowledge_time = knowledge_time;
    plan.victim_canonical = victim_canonical;
    plan.lead = victim_canonical - knowledge_time;
    plan.feasible = plan.lead > required_lead;
    if (plan.feasible) {
        // Submit at the instant of knowledge; the back-run simply needs to
        // land after the victim, so it trails by the full lead.
        plan.front = make_transaction(attacker_client, sequence_base, victim.payload_len,
                                      knowledge_time);
        plan.back = make_transaction(attacker_client, sequence_base + 1, victim.payload_len,
                                     victim_canonical);
    }
    return plan;
}

SandwichOutcome score_sandwich(const SandwichPlan& plan,
                               const std::map<Digest, std::size_t>& ledger_position,
                               ConstantProductPool pool, double victim_amount,
                               double attack_amount) {
    SandwichOutcome out;
    if (!plan.feasible) return out;
    auto victim = ledger_position.find(plan.victim);
    auto front = ledger_position.find(plan.front.id);
    auto back = ledger_position.find(plan.back.id);
    if (victim == ledger_position.end() || front == ledger_position.end() ||
        back == ledger_position.end())
        return out;
    out.bracketed = front->second < victim->second && victim->second < back->second;
    if (!out.bracketed) return out;
    // Front-run buys base with quote, victim buys (pushing price further up),
    // back-run sells the acquired base at the inflated price.
    const double got_base = pool.swap_quote_for_base(attack_amount);
    pool.swap_quote_for_base(victim_amount);
    const double got_quote = pool.swap_base_for_quote(got_base);
    out.profit_quote = got_quote - attack_amount;
    return out;
}

}  // namespace travelers::adversary

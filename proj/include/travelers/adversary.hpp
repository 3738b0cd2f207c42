#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "travelers/rng.hpp"
#include "travelers/types.hpp"

namespace travelers::adversary {

/// Timestamp-manipulation tactics, gated by hub power along the path.
///
/// Delay        needs a hub where honest members alone cannot approve;
///              corrupted signatures arrive late, pushing that hub's
///              approval (and everything after it) `amount` ticks later.
/// AdvanceReuse needs the last x >= 1 hubs corrupted; they instantly
///              restamp the last honest hub's approval reading.
/// AdvanceChain needs >= 2 consecutive corrupted hubs; the chain approves
///              in one round trip at the chain-entry reading.
/// Forge        needs every hub corrupted; the certificate is fabricated
///              outright with a chosen timestamp.
enum class TacticKind { None, Delay, AdvanceReuse, AdvanceChain, Forge };

const char* to_string(TacticKind k);

struct Tactic {
    TacticKind kind = TacticKind::None;
    Tick amount = 0;  // Delay: added ticks; Forge: the fabricated timestamp
};

/// Whole-path power classification.
enum class PathClass { Regular, Mixed, Corrupted, ContainsImpasse };

const char* to_string(PathClass c);

struct AdversaryState {
    std::vector<bool> corrupted;  // indexed by NodeId
    /// Corrupted members behave honestly wherever no tactic directs them;
    /// turning this off makes them silent instead (liveness stress).
    bool cooperative = true;
    std::map<std::pair<Digest, std::uint64_t>, Tactic> schedule;

    bool is_corrupted(NodeId node) const {
        return node < corrupted.size() && corrupted[node];
    }
    std::uint32_t corrupted_in(const HubSpec& hub) const;
    std::uint32_t honest_in(const HubSpec& hub) const;
    HubType hub_type(const HubSpec& hub, std::uint32_t t) const;

    Tactic tactic_for(const Digest& tx, std::uint64_t path_id) const;
    void assign(const Digest& tx, std::uint64_t path_id, Tactic tactic);

    std::uint32_t corrupted_count() const;
};

/// Uniformly random f-subset of [0, n), drawn from the corruption stream.
AdversaryState corrupt(const KeyedRng& rng, std::uint32_t n, std::uint32_t f);

PathClass classify_path(const PathSpec& path, const AdversaryState& adv, std::uint32_t t);

/// Index of the last hub whose honest members cannot reach t by
/// themselves (the feasibility test for Delay), or nullopt.
std::optional<std::uint32_t> last_weak_hub(const PathSpec& path, const AdversaryState& adv,
                                           std::uint32_t t);

/// Index of the last hub whose corrupted members alone reach t — the hub
/// where Delay is actually anchored (at an impasse hub the withheld
/// signatures could never be replaced, so the traversal would just
/// stall), or nullopt.
std::optional<std::uint32_t> last_controlled_hub(const PathSpec& path,
                                                 const AdversaryState& adv, std::uint32_t t);

/// Length x of the maximal all-corrupted suffix (the lever for
/// AdvanceReuse); 0 when the last hub is not corrupted.
std::uint32_t corrupted_suffix(const PathSpec& path, const AdversaryState& adv, std::uint32_t t);

/// First index of the leftmost run of >= 2 consecutive corrupted hubs
/// (the lever for AdvanceChain), or nullopt.
std::optional<std::uint32_t> corrupted_chain_start(const PathSpec& path,
                                                   const AdversaryState& adv, std::uint32_t t);

/// Whether the tactic's power precondition holds on this path.
bool tactic_feasible(const PathSpec& path, const AdversaryState& adv, std::uint32_t t,
                     TacticKind kind);

/// Per-run tactic policy: which tactics are enabled and their parameters.
/// pick() returns the first enabled tactic, in fixed priority order
/// Forge > AdvanceReuse > AdvanceChain > Delay, that is feasible on the
/// path; None otherwise.
struct TacticPolicy {
    bool forge = false;
    bool advance_reuse = false;
    bool advance_chain = false;
    bool delay = false;
    Tick delay_amount = 100;
    Tick forge_timestamp = 0;

    Tactic pick(const PathSpec& path, const AdversaryState& adv, std::uint32_t t) const;
};

/// Constant-product market for scoring sandwich attacks: the pool holds
/// (base, quote) reserves and swaps preserve base*quote.
struct ConstantProductPool {
    double base = 0.0;
    double quote = 0.0;

    /// Sells `amount` base into the pool; returns quote received.
    double swap_base_for_quote(double amount);
    /// Sells `amount` quote into the pool; returns base received.
    double swap_quote_for_base(double amount);
    /// Quote-per-base marginal price.
    double price() const { return quote / base; }
};

/// Attack script for one victim: a front-run placed before the victim and
/// a back-run after it. Feasibility is decided by lead time: the
/// adversary must learn the payload `required_lead` ticks before the
/// victim's canonical timestamp to get its front-run stamped earlier.
struct SandwichPlan {
    Digest victim{};
    Tick knowledge_time = 0;     // earliest true time the payload was readable
    Tick victim_canonical = 0;   // canonical timestamp the victim received
    Tick lead = 0;               // victim_canonical - knowledge_time
    bool feasible = false;
    Transaction front;           // valid when feasible
    Transaction back;
};

SandwichPlan plan_sandwich(const Transaction& victim, Tick knowledge_time,
                           Tick victim_canonical, Tick required_lead,
                           std::uint32_t attacker_client, std::uint64_t sequence_base);

/// Post-hoc outcome: did front and back bracket the victim in the final
/// order, and what did the bracket earn on the pool.
struct SandwichOutcome {
    bool bracketed = false;
    double profit_quote = 0.0;
};

/// ledger_position: committed rank by tx id; absent entries mean the tx
/// never committed (attack fails).
SandwichOutcome score_sandwich(const SandwichPlan& plan,
                               const std::map<Digest, std::size_t>& ledger_position,
                               ConstantProductPool pool, double victim_amount,
                               double attack_amount);

}  // namespace travelers::adversary

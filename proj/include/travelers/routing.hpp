#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "travelers/adversary.hpp"
#include "travelers/assignment.hpp"
#include "travelers/simnet.hpp"
#include "travelers/types.hpp"

namespace travelers::routing {

constexpr Tick kNever = std::numeric_limits<Tick>::max();

/// Iterative: the initiator (member 0 of hub 0) round-trips with each hub
/// in turn, collecting the aggregate. Recursive: hub j members broadcast
/// directly to hub j+1 (q^2 messages per hop) and the last hub delivers.
enum class TraversalMode { Iterative, Recursive };

/// Whose local reading stamps a hub approval, computed over the first t
/// arrivals: the threshold-crossing (t-th) signer's reading, the maximum,
/// or the lower median.
enum class ApprovalRule { ThresholdSigner, MaxSigner, MedianSigner };

/// Which path positions can reveal a hidden payload. With layering the
/// payload is onion-wrapped so plaintext appears only at the last listed
/// position; otherwise any listed hub yields plaintext on its own.
struct RevealPolicy {
    std::vector<std::uint32_t> decrypt_hub_indices;
    bool layered = false;
};

/// When the payload became readable: by anyone (reveal_time) and by the
/// adversary (earliest corrupted sighting, kNever if none). For plaintext
/// transactions the adversary learns at its first contact with any
/// traversal message.
struct RevealRecord {
    Digest tx{};
    Tick reveal_time = kNever;
    Tick adversary_knowledge_time = kNever;
};

struct TraversalContext {
    const SystemParams* params = nullptr;
    const simnet::ClockModel* clock = nullptr;
    const simnet::NetModel* net = nullptr;
    const adversary::AdversaryState* adv = nullptr;
    TraversalMode mode = TraversalMode::Iterative;
    ApprovalRule rule = ApprovalRule::ThresholdSigner;
    RevealPolicy reveal;
};

struct TraversalOutcome {
    bool completed = false;
    std::uint32_t stalled_at_hub = 0;  // meaningful when !completed
    Certificate cert;                  // meaningful when completed
    Tick completion_time = 0;          // true time the certificate existed
    Tick delivery_time = 0;            // true time it reached the sequencer
    TimestampKind kind = TimestampKind::True;
    Tick counterfactual_locked = 0;    // locked ts of the honest replay
    adversary::TacticKind applied_tactic = adversary::TacticKind::None;
    RevealRecord reveal;
    Tick first_corrupted_contact = kNever;  // digest-level contact
    std::uint64_t messages = 0;
    std::uint64_t payload_bytes = 0;
    std::uint64_t overhead_bytes = 0;
};

/// Simulates one transaction along one path and labels the resulting
/// timestamp against its honest counterfactual (same keyed delay draws,
/// tactics disabled). Pure function of its arguments.
///
/// Scheduled tactics are honored in iterative mode; recursive runs with a
/// scheduled tactic throw std::invalid_argument. An infeasible scheduled
/// tactic is rejected and the traversal proceeds honestly.
TraversalOutcome traverse(const TraversalContext& ctx, const Transaction& tx,
                          const PathSpec& path, Tick submit_time);

/// Membership-recomputing certificate check: k approvals in path order,
/// each with >= t distinct signers that verify against the assignment.
bool verify_certificate(const Certificate& cert, const assignment::BlockRandomness& rand,
                        const SystemParams& params,
                        const assignment::DecryptionSet* decryption = nullptr);

/// Ground-truth label from the locked timestamp vs its honest
/// counterfactual (equal -> True; earlier -> Advanced; later -> Delayed).
TimestampKind label_timestamp(Tick locked, Tick counterfactual);

/// Closed-form per-traversal traffic for honest, stall-free runs; the
/// traversal asserts these exactly, and complexity reports reuse them.
struct TrafficModel {
    std::uint64_t messages = 0;
    std::uint64_t payload_bytes = 0;
    std::uint64_t overhead_bytes = 0;
};

/// 1 submit + per hub q digests out and q signatures back + 1 delivery;
/// payload travels on the submit and delivery legs only, plus a
/// ciphertext copy to each member of every decryption hub when hidden.
TrafficModel expected_iterative_traffic(const SystemParams& params, std::uint64_t payload_len,
                                        bool hidden, std::uint32_t decrypt_hub_count);

/// 1 submit + q entry + (k-1) hops of q^2 + q deliveries; every protocol
/// message carries the payload plus one aggregate per traversed hub.
TrafficModel expected_recursive_traffic(const SystemParams& params, std::uint64_t payload_len);

}  // namespace travelers::routing

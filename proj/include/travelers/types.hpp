#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace travelers {

/// Simulation time: signed 64-bit count of nanosecond-granularity ticks.
/// Integer ticks keep timestamp comparisons exact when sorting the ledger.
using Tick = std::int64_t;

/// Node identity: index in [0, n).
using NodeId = std::uint32_t;

/// 256-bit content digest.
using Digest = std::array<std::uint8_t, 32>;

std::string to_hex(const Digest& d);

/// Size/sample parameters shared by analysis and simulation.
///
/// n        total node count
/// f        corrupted node count (default floor(n/3))
/// q        hub size (nodes per hub)
/// t        approval threshold (signatures needed to pass a hub)
/// k        path length in hubs
/// c        error exponent, epsilon = n^-c
/// tau      boosting exponent (default c+1)
/// delta_net    network latency bound (ticks)
/// delta_clock  per-node clock skew bound (ticks)
/// kappa    per-transaction censorship probability
/// lambda_bytes signature/hash size in bytes
/// paths_per_block  admissible path count per block (default n)
struct SystemParams {
    std::uint32_t n = 0;
    std::uint32_t f = 0;
    std::uint32_t q = 1;
    std::uint32_t t = 1;
    std::uint32_t k = 1;
    double c = 1.0;
    double tau = 2.0;
    Tick delta_net = 10;
    Tick delta_clock = 0;
    double kappa = 0.0;
    std::uint32_t lambda_bytes = 32;
    std::uint64_t paths_per_block = 0;

    static SystemParams with_defaults(std::uint32_t n);

    /// Throws std::invalid_argument on violated invariants. With
    /// strict_bft the standard n >= 3f+1 assumption is enforced; turning
    /// it off allows stress configurations such as f = n/3 exactly.
    void validate(bool strict_bft = true) const;
};

struct Transaction {
    Digest id{};
    std::uint64_t payload_len = 0;
    Tick submit_time = 0;
    std::uint32_t client = 0;
    bool hidden = false;
};

/// Deterministic synthetic transaction; the id is a digest of the
/// identifying fields (payload content never influences the protocol).
Transaction make_transaction(std::uint32_t client, std::uint64_t sequence,
                             std::uint64_t payload_len, Tick submit_time,
                             bool hidden = false);

struct HubSpec {
    std::vector<NodeId> members;  // q distinct nodes, slot order preserved
    std::uint32_t hub_index = 0;  // position j within the path
};

struct PathSpec {
    std::uint64_t path_id = 0;
    std::vector<HubSpec> hubs;  // exactly k
    std::uint64_t block = 0;
};

struct HubApproval {
    std::uint32_t hub_index = 0;
    Tick timestamp = 0;              // local reading that crossed the threshold
    std::vector<NodeId> signers;     // distinct ids, |signers| >= t
};

struct Certificate {
    Digest tx{};
    std::uint64_t path_id = 0;
    std::vector<HubApproval> approvals;  // hubs 0..k-1 in order
    Tick locked_ts = 0;                  // max over approval timestamps
};

/// Ground-truth label for how a locked timestamp relates to its honest
/// counterfactual. Maintained by the simulator only; the ordering rule
/// never sees it.
enum class TimestampKind { True, Advanced, Delayed, Arbitrary };

const char* to_string(TimestampKind k);

/// Hub classes by which side can clear the approval threshold alone.
enum class HubType { Regular, Impasse, Both, Corrupted };

const char* to_string(HubType t);

/// Total over all (honest, malicious, t) triples. With t > q/2 the Both
/// outcome is unreachable; SystemParams::validate enforces that.
HubType classify_hub(std::uint32_t honest_count, std::uint32_t malicious_count,
                     std::uint32_t t);

struct IncompleteCertificateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Max over the approval timestamps. Throws IncompleteCertificateError if
/// approvals are missing or out of order; pass expected_k to require a
/// specific path length.
Tick locked_timestamp(const Certificate& cert, std::uint32_t expected_k = 0);

}  // namespace travelers

#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "travelers/consensus.hpp"
#include "travelers/types.hpp"

namespace travelers::ordering {

/// One committed transaction's place in the ledger: the minimum effective
/// timestamp over its committed certificates, the path that produced it,
/// and the transaction digest as the deterministic tie-break.
struct CanonicalEntry {
    Digest tx{};
    Tick canonical_ts = 0;
    std::uint64_t source_path = 0;
};

/// Minimum rule for a single transaction over its committed
/// (effective timestamp, path id) pairs; throws std::invalid_argument on
/// an empty list. Ties between paths resolve to the lowest path id.
CanonicalEntry canonical_timestamp(const Digest& tx,
                                   const std::vector<std::pair<Tick, std::uint64_t>>& committed);

/// One entry per transaction across the whole committed chain.
std::vector<CanonicalEntry> canonical_entries(const std::vector<consensus::Block>& chain);

/// Sorts by (canonical_ts, tx digest) ascending and drops exact duplicate
/// entries; the result is invariant under input permutation.
std::vector<CanonicalEntry> total_order(std::vector<CanonicalEntry> entries);

/// Simulator ground truth for one transaction, gathered at traversal time.
struct GroundTruth {
    Tick true_ts = 0;         // locked timestamp of the honest counterfactual
    bool has_regular_cert = false;  // >= 1 regular-path certificate was delivered
    bool forged = false;            // >= 1 committed certificate fabricated outright
};

struct Violation {
    Digest should_precede{};  // true-time leader of the pair
    Digest committed_first{};
    Tick separation = 0;      // true-time gap, always above the threshold
};

/// Verdict of the received-order fairness property: every committed pair
/// whose true timestamps are separated by more than 4k*delta_net +
/// 2*delta_clock must appear in true-time order.
struct FairnessVerdict {
    Tick threshold = 0;
    std::uint64_t pairs_checked = 0;      // pairs meeting the separation premise
    std::uint64_t violation_count = 0;
    std::uint64_t forge_excluded_pairs = 0;  // premise pairs voided by forgery
    std::vector<Violation> violations;       // capped sample
};

/// Checks the ledger against ground truth. Only transactions covered by a
/// regular-path certificate are eligible (the property is conditioned on
/// honest-majority paths existing); pairs involving a forged certificate
/// are excluded and tallied separately. Runs in O(N log N).
FairnessVerdict check_fairness(const std::vector<CanonicalEntry>& ledger,
                               const std::map<Digest, GroundTruth>& truth,
                               const SystemParams& params, std::size_t max_listed = 32);

/// The separation beyond which true-time order must be preserved.
Tick fairness_threshold(const SystemParams& params);

}  // namespace travelers::ordering

#pragma once

#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "travelers/assignment.hpp"
#include "travelers/rng.hpp"
#include "travelers/types.hpp"

namespace travelers::consensus {

/// How the consensus layer may drop certificates before commitment.
///
/// LeaderlessCR        commits every accepted certificate (drop rate 0).
/// ProbabilisticKappa  drops each transaction's certificates together with
///                     probability kappa (or each certificate independently
///                     with per_certificate set).
/// LeaderCensor        drops exactly the (tx, path) certificates named in
///                     targets -- the selective-removal attack.
enum class CensorshipMode { LeaderlessCR, ProbabilisticKappa, LeaderCensor };

const char* to_string(CensorshipMode m);

struct CensorshipModel {
    CensorshipMode mode = CensorshipMode::LeaderlessCR;
    double kappa = 0.0;
    bool per_certificate = false;
    std::set<std::pair<Digest, std::uint64_t>> targets;
};

/// A certificate as handed over by the last hub, together with the
/// simulator's ground-truth annotations. The annotations ride along for
/// audit and fairness checking only; commitment decisions never read them.
struct Delivered {
    Certificate cert;
    Tick delivery_time = 0;
    TimestampKind kind = TimestampKind::True;
    bool regular_path = false;
};

/// A committed certificate: the effective timestamp is the locked one
/// clamped to the block's admissible window; the raw value is retained.
struct CommittedCertificate {
    Certificate cert;
    Tick delivery_time = 0;
    Tick raw_locked = 0;
    Tick effective_ts = 0;
    bool late_placed = false;
    TimestampKind kind = TimestampKind::True;
    bool regular_path = false;
};

struct Block {
    std::uint64_t number = 0;
    Tick close_time = 0;
    Tick min_ts = 0;  // admissible floor, carried from the previous block
    Tick max_ts = 0;  // largest effective timestamp committed here
    std::vector<CommittedCertificate> certs;
};

enum class CollectResult { Accepted, Rejected, Duplicate };

/// Timestamps arriving below the open window's floor are placed as early
/// as the boundary admits; anything inside the window is untouched.
Tick place_late_timestamp(Tick locked_ts, Tick window_min);

/// Single logical sequencer over the simulated network. Consensus
/// internals (leader election, view change) are intentionally abstracted
/// away; the interface is what a replicated backend would present.
///
/// Certificates pass a membership verification gate on arrival and are
/// deduplicated by (tx, path). form_block closes the current collection
/// window on the configured cadence; committed blocks are append-only.
class Sequencer {
public:
    Sequencer(const SystemParams& params, const assignment::BlockRandomness& rand,
              CensorshipModel model, const KeyedRng& rng,
              const assignment::DecryptionSet* decryption = nullptr);

    CollectResult collect(const Delivered& delivered);

    /// Commits everything queued (minus censorship) as the next block.
    const Block& form_block(Tick close_time);

    const std::vector<Block>& chain() const { return chain_; }
    std::size_t queued() const { return queue_.size(); }

    std::uint64_t accepted() const { return accepted_; }
    std::uint64_t rejected() const { return rejected_; }
    std::uint64_t duplicates() const { return duplicates_; }
    std::uint64_t censored() const { return censored_; }

private:
    bool censors(const Delivered& d) const;

    SystemParams params_;
    assignment::BlockRandomness rand_;
    CensorshipModel model_;
    const KeyedRng* rng_;
    const assignment::DecryptionSet* decryption_;

    std::set<std::pair<Digest, std::uint64_t>> seen_;
    std::vector<Delivered> queue_;
    std::vector<Block> chain_;
    Tick boundary_;

    std::uint64_t accepted_ = 0;
    std::uint64_t rejected_ = 0;
    std::uint64_t duplicates_ = 0;
    std::uint64_t censored_ = 0;
};

}  // namespace travelers::consensus

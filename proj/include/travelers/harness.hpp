#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "travelers/consensus.hpp"
#include "travelers/ordering.hpp"
#include "travelers/routing.hpp"
#include "travelers/types.hpp"

namespace travelers::harness {

/// Synthetic client workload: T transactions on a fixed submission
/// cadence, each shipped over paths_per_tx independently chosen paths.
struct WorkloadConfig {
    std::uint64_t transactions = 0;
    Tick arrival_interval = 5;
    std::uint64_t payload_len = 250;
    double hidden_fraction = 0.0;
    std::uint64_t paths_per_tx = 1;
};

/// Which manipulation tactics the (statically corrupted, cooperative)
/// collective may schedule; each feasible path picks the strongest one.
struct AdversaryConfig {
    bool cooperative = true;
    bool delay = false;
    bool advance_reuse = false;
    bool advance_chain = false;
    bool forge = false;
    Tick delay_amount = 100;
    Tick forge_timestamp = 0;
};

/// Everything needed to reproduce a run bit-exactly: a report is a pure
/// function of this struct (including the seed).
struct ExperimentConfig {
    SystemParams params = SystemParams::with_defaults(16);
    WorkloadConfig workload;
    AdversaryConfig adversary;
    routing::TraversalMode mode = routing::TraversalMode::Iterative;
    routing::ApprovalRule rule = routing::ApprovalRule::ThresholdSigner;
    routing::RevealPolicy reveal;  // applies to hidden transactions
    consensus::CensorshipMode censorship = consensus::CensorshipMode::LeaderlessCR;
    bool censor_per_certificate = false;
    /// With LeaderCensor: every stride-th transaction becomes a victim and
    /// all of its truthfully-stamped certificates are named for removal.
    std::uint64_t censor_victim_stride = 0;
    Tick block_interval = 0;  // 0 commits a single block per trial
    Tick min_delay = 1;
    std::uint64_t trials = 1;
    std::uint64_t seed = 1;
    bool strict_bft = true;

    void validate() const;  // throws std::invalid_argument
};

/// Key-value config file: one `key = value` per line, `#` comments.
/// Unknown keys are rejected. See config_schema() for the key list.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);
const char* config_schema();

/// Wilson score interval for a binomial proportion (z defaults to the
/// 99% two-sided quantile).
struct WilsonInterval {
    double low = 0.0;
    double high = 0.0;
};
WilsonInterval wilson(std::uint64_t hits, std::uint64_t trials, double z = 2.576);

/// Per-trial seed derivation: documented split so that serial and
/// parallel execution aggregate identically.
std::uint64_t trial_seed(std::uint64_t root_seed, std::uint64_t trial_index);

struct TrialMetrics {
    std::uint64_t trial = 0;
    std::uint64_t seed = 0;

    std::uint64_t transactions = 0;
    std::uint64_t traversals = 0;
    std::uint64_t completed = 0;
    std::uint64_t stalled = 0;

    std::uint64_t paths_regular = 0;
    std::uint64_t paths_mixed = 0;
    std::uint64_t paths_corrupted = 0;
    std::uint64_t paths_impasse = 0;

    std::uint64_t committed_certs = 0;
    std::uint64_t censored_certs = 0;
    std::uint64_t committed_txs = 0;
    std::uint64_t blocks = 0;

    std::uint64_t committed_true = 0;
    std::uint64_t committed_advanced = 0;
    std::uint64_t committed_delayed = 0;
    std::uint64_t committed_arbitrary = 0;

    std::uint64_t pairs_checked = 0;
    std::uint64_t violations = 0;
    std::uint64_t forge_excluded_pairs = 0;
    /// Transactions where a truthful timestamp was committed yet the
    /// canonical timestamp exceeded a committed delayed one (must be 0).
    std::uint64_t min_rule_counterexamples = 0;

    std::uint64_t messages = 0;
    std::uint64_t payload_bytes = 0;
    std::uint64_t overhead_bytes = 0;

    Tick latency_p50 = 0;
    Tick latency_p90 = 0;
    Tick latency_max = 0;
};

struct RunReport {
    ExperimentConfig config;
    std::vector<TrialMetrics> trials;

    // Aggregates over all trials.
    std::uint64_t total_transactions = 0;
    std::uint64_t total_committed_txs = 0;
    double commit_rate = 0.0;
    WilsonInterval commit_rate_ci;
    std::uint64_t total_pairs_checked = 0;
    std::uint64_t total_violations = 0;
    std::uint64_t total_forge_excluded = 0;
    std::uint64_t total_min_rule_counterexamples = 0;
    double mean_bytes_per_tx = 0.0;
    double mean_messages_per_tx = 0.0;
    Tick latency_p50_mean = 0;
    Tick latency_max = 0;
};

/// Executes config.trials independent trials (worker threads, per-trial
/// seeds) and aggregates. Optional sink receives one JSON line per
/// simulation event (submission, delivery, block, ledger entry).
RunReport run(const ExperimentConfig& config, std::ostream* trace = nullptr);

/// Empirical path-class probabilities under fresh corruption draws.
/// Per trial: draw an f-subset, derive a block's paths, scan
/// paths_scanned of them for a fully corrupted one, and check whether a
/// client trying tries_per_client paths finds a regular one.
struct CorruptionStats {
    std::uint64_t trials = 0;
    std::uint64_t paths_scanned = 0;
    std::uint64_t tries_per_client = 0;
    std::uint64_t corrupted_hits = 0;   // trials with >= 1 corrupted path
    std::uint64_t regular_hits = 0;     // trials where the client succeeded
    double corrupted_freq = 0.0;
    double regular_freq = 0.0;
    WilsonInterval corrupted_ci;
    WilsonInterval regular_ci;
};
CorruptionStats monte_carlo_corruption(const SystemParams& params, std::uint64_t trials,
                                       std::uint64_t seed, std::uint64_t tries_per_client,
                                       std::uint64_t paths_scanned);

/// Measured versus closed-form per-transaction traffic across a size
/// sweep, plus a linear fit of overhead bytes against log2(n).
struct ComplexityPoint {
    std::uint32_t n = 0;
    std::uint32_t q = 0;
    std::uint32_t k = 0;
    double measured_messages = 0.0;
    double measured_payload = 0.0;
    double measured_overhead = 0.0;
    std::uint64_t predicted_messages = 0;
    std::uint64_t predicted_payload = 0;
    std::uint64_t predicted_overhead = 0;
    bool exact_match = false;
};
struct ComplexitySweep {
    std::vector<ComplexityPoint> points;
    double r_squared = 0.0;  // overhead ~ a + b*log2(n)
};
ComplexitySweep complexity_sweep(const std::vector<std::uint32_t>& sizes,
                                 routing::TraversalMode mode, std::uint64_t payload_len,
                                 std::uint64_t seed);

/// Report emission: JSON carries full detail, CSV one row per trial.
void write_report_json(const RunReport& report, std::ostream& out);
void write_report_csv(const RunReport& report, std::ostream& out);
void write_corruption_json(const CorruptionStats& stats, std::ostream& out);
void write_complexity_csv(const ComplexitySweep& sweep, std::ostream& out);

/// Hex digest of the canonical JSON serialization; golden-report checks
/// compare this across runs and platforms.
std::string report_digest(const RunReport& report);

}  // namespace travelers::harness

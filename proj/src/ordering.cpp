#include "travelers/ordering.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace travelers::ordering {

namespace {

/// Fenwick tree counting points by rank; supports prefix sums.
class BitCounter {
public:
    explicit BitCounter(std::size_t n) : tree_(n + 1, 0) {}
    void add(std::size_t rank) {
        for (std::size_t i = rank + 1; i < tree_.size(); i += i & (~i + 1)) ++tree_[i];
    }
    std::uint64_t prefix(std::size_t count) const {  // ranks [0, count)
        std::uint64_t s = 0;
        for (std::size_t i = count; i > 0; i -= i & (~i + 1)) s += tree_[i];
        return s;
    }

private:
    std::vector<std::uint64_t> tree_;
};

/// Number of ordered pairs (a, b) over `values` with a + threshold < b.
std::uint64_t premise_pairs(std::vector<Tick> values, Tick threshold) {
    std::sort(values.begin(), values.end());
    std::uint64_t pairs = 0;
    for (const Tick b : values) {
        // a < b - threshold  <=>  a + threshold < b (no overflow in range)
        const auto it = std::lower_bound(values.begin(), values.end(), b - threshold);
        pairs += static_cast<std::uint64_t>(it - values.begin());
    }
    return pairs;
}

}  // namespace

CanonicalEntry canonical_timestamp(const Digest& tx,
                                   const std::vector<std::pair<Tick, std::uint64_t>>& committed) {
    if (committed.empty())
        throw std::invalid_argument("canonical_timestamp: no committed certificates");
    CanonicalEntry entry;
    entry.tx = tx;
    entry.canonical_ts = committed.front().first;
    entry.source_path = committed.front().second;
    for (const auto& [ts, path] : committed) {
        if (ts < entry.canonical_ts ||
            (ts == entry.canonical_ts && path < entry.source_path)) {
            entry.canonical_ts = ts;
            entry.source_path = path;
        }
    }
    return entry;
}

std::vector<CanonicalEntry> canonical_entries(const std::vector<consensus::Block>& chain) {
    std::map<Digest, std::vector<std::pair<Tick, std::uint64_t>>> by_tx;
    for (const auto& block : chain)
        for (const auto& c : block.certs)
            by_tx[c.cert.tx].emplace_back(c.effective_ts, c.cert.path_id);
    std::vector<CanonicalEntry> entries;
    entries.reserve(by_tx.size());
    for (const auto& [tx, certs] : by_tx) entries.push_back(canonical_timestamp(tx, certs));
    return entries;
}

std::vector<CanonicalEntry> total_order(std::vector<CanonicalEntry> entries) {
    std::sort(entries.begin(), entries.end(), [](const CanonicalEntry& a, const CanonicalEntry& b) {
        if (a.canonical_ts != b.canonical_ts) return a.canonical_ts < b.canonical_ts;
        return a.tx < b.tx;
    });
    entries.erase(std::unique(entries.begin(), entries.end(),
                              [](const CanonicalEntry& a, const CanonicalEntry& b) {
                                  return a.tx == b.tx && a.canonical_ts == b.canonical_ts &&
                                         a.source_path == b.source_path;
                              }),
                  entries.end());
    return entries;
}

Tick fairness_threshold(const SystemParams& params) {
    return 4 * static_cast<Tick>(params.k) * params.delta_net + 2 * params.delta_clock;
}

FairnessVerdict check_fairness(const std::vector<CanonicalEntry>& ledger,
                               const std::map<Digest, GroundTruth>& truth,
                               const SystemParams& params, std::size_t max_listed) {
    FairnessVerdict verdict;
    verdict.threshold = fairness_threshold(params);

    // Eligible transactions in ledger order, with their true timestamps.
    struct Row {
        Digest tx;
        Tick true_ts;
    };
    std::vector<Row> eligible;           // regular-path backed, not forged
    std::vector<Tick> eligible_true;
    std::vector<Tick> widened_true;      // eligible plus forged, for exclusion tally
    for (const auto& entry : ledger) {
        const auto it = truth.find(entry.tx);
        if (it == truth.end()) continue;
        const GroundTruth& g = it->second;
        if (g.forged) {
            widened_true.push_back(g.true_ts);
        } else if (g.has_regular_cert) {
            eligible.push_back(Row{entry.tx, g.true_ts});
            eligible_true.push_back(g.true_ts);
            widened_true.push_back(g.true_ts);
        }
    }

    verdict.pairs_checked = premise_pairs(eligible_true, verdict.threshold);
    verdict.forge_excluded_pairs =
        premise_pairs(widened_true, verdict.threshold) - verdict.pairs_checked;

    // Violations: sweep in commit order; a transaction is violated by any
    // earlier-committed transaction whose true timestamp exceeds its own
    // by more than the threshold.
    std::vector<Tick> ranks = eligible_true;
    std::sort(ranks.begin(), ranks.end());
    ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());
    BitCounter seen(ranks.size());
    std::uint64_t processed = 0;
    Tick max_true_seen = 0;
    Digest max_true_tx{};
    for (const Row& row : eligible) {
        // Count earlier-committed entries with true_ts > row.true_ts + threshold.
        const Tick bound = row.true_ts + verdict.threshold;
        const auto upper =
            static_cast<std::size_t>(std::upper_bound(ranks.begin(), ranks.end(), bound) -
                                     ranks.begin());
        const std::uint64_t offenders = processed - seen.prefix(upper);
        verdict.violation_count += offenders;
        if (offenders > 0 && verdict.violations.size() < max_listed) {
            verdict.violations.push_back(
                Violation{row.tx, max_true_tx, max_true_seen - row.true_ts});
        }
        const auto rank =
            static_cast<std::size_t>(std::lower_bound(ranks.begin(), ranks.end(), row.true_ts) -
                                     ranks.begin());
        seen.add(rank);
        ++processed;
        if (processed == 1 || row.true_ts > max_true_seen) {
            max_true_seen = row.true_ts;
            max_true_tx = row.tx;
        }
    }
    return verdict;
}

}  // namespace travelers::ordering

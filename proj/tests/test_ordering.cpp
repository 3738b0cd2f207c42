#include "travelers/ordering.hpp"

#include <algorithm>
#include <random>

#include "doctest.h"

using namespace travelers;
using namespace travelers::ordering;

namespace {

Digest digest_of(std::uint8_t b) {
    Digest d{};
    d[0] = b;
    return d;
}

CanonicalEntry entry_of(std::uint8_t b, Tick ts, std::uint64_t path = 0) {
    return CanonicalEntry{digest_of(b), ts, path};
}

SystemParams fairness_params(std::uint32_t k, Tick delta_net, Tick delta_clock) {
    SystemParams p = SystemParams::with_defaults(30);
    p.f = 0;
    p.k = k;
    p.delta_net = delta_net;
    p.delta_clock = delta_clock;
    return p;
}

}  // namespace

TEST_CASE("canonical timestamp is the minimum over committed certificates") {
    const auto tx = digest_of(1);
    const auto e = canonical_timestamp(tx, {{5, 10}, {3, 11}, {9, 12}});
    CHECK(e.canonical_ts == 3);
    CHECK(e.source_path == 11);
    CHECK(e.tx == tx);

    const auto single = canonical_timestamp(tx, {{7, 4}});
    CHECK(single.canonical_ts == 7);
    CHECK(single.source_path == 4);

    // A delayed duplicate cannot displace the earlier true timestamp.
    const auto filtered = canonical_timestamp(tx, {{7, 1}, {20, 2}});
    CHECK(filtered.canonical_ts == 7);

    // Equal timestamps resolve to the lowest path id.
    const auto tied = canonical_timestamp(tx, {{5, 9}, {5, 2}, {6, 1}});
    CHECK(tied.source_path == 2);

    CHECK_THROWS_AS(canonical_timestamp(tx, {}), std::invalid_argument);
}

TEST_CASE("canonical entries group certificates across blocks") {
    consensus::Block b0, b1;
    b0.number = 0;
    b1.number = 1;
    auto put = [](consensus::Block& b, const Digest& tx, Tick eff, std::uint64_t path) {
        consensus::CommittedCertificate c;
        c.cert.tx = tx;
        c.cert.path_id = path;
        c.effective_ts = eff;
        b.certs.push_back(c);
    };
    put(b0, digest_of(1), 50, 7);
    put(b1, digest_of(1), 30, 8);  // later block, earlier effective ts
    put(b0, digest_of(2), 40, 9);

    const auto entries = canonical_entries({b0, b1});
    REQUIRE(entries.size() == 2);
    const auto& one = entries[0].tx == digest_of(1) ? entries[0] : entries[1];
    const auto& two = entries[0].tx == digest_of(2) ? entries[0] : entries[1];
    CHECK(one.canonical_ts == 30);
    CHECK(one.source_path == 8);
    CHECK(two.canonical_ts == 40);
}

TEST_CASE("total order sorts by timestamp with digest tie-break") {
    CHECK(total_order({}).empty());

    auto ordered = total_order({entry_of(5, 100), entry_of(3, 100), entry_of(9, 50)});
    REQUIRE(ordered.size() == 3);
    CHECK(ordered[0].tx == digest_of(9));   // earliest timestamp first
    CHECK(ordered[1].tx == digest_of(3));   // tie: lower digest first
    CHECK(ordered[2].tx == digest_of(5));

    SUBCASE("permutation invariance") {
        std::vector<CanonicalEntry> base;
        for (std::uint8_t i = 0; i < 64; ++i)
            base.push_back(entry_of(i, 1000 - (i % 7) * 10, i));
        const auto want = total_order(base);
        std::mt19937 gen(1234);
        for (int round = 0; round < 1000; ++round) {
            auto shuffled = base;
            std::shuffle(shuffled.begin(), shuffled.end(), gen);
            const auto got = total_order(shuffled);
            REQUIRE(got.size() == want.size());
            bool same = true;
            for (std::size_t i = 0; i < got.size(); ++i)
                same = same && got[i].tx == want[i].tx &&
                       got[i].canonical_ts == want[i].canonical_ts;
            CHECK(same);
        }
    }
    SUBCASE("duplication invariance") {
        std::vector<CanonicalEntry> doubled = {entry_of(1, 5), entry_of(2, 6), entry_of(1, 5)};
        const auto got = total_order(doubled);
        CHECK(got.size() == 2);
    }
}

TEST_CASE("fairness threshold formula") {
    CHECK(fairness_threshold(fairness_params(2, 10, 1)) == 82);
    CHECK(fairness_threshold(fairness_params(1, 10, 0)) == 40);
    CHECK(fairness_threshold(fairness_params(3, 7, 2)) == 88);
}

TEST_CASE("a truth-ordered ledger has no violations") {
    const auto p = fairness_params(2, 10, 1);  // threshold 82
    std::vector<CanonicalEntry> ledger;
    std::map<Digest, GroundTruth> truth;
    for (std::uint8_t i = 0; i < 100; ++i) {
        ledger.push_back(entry_of(i, 1000 + i * 100));
        truth[digest_of(i)] = GroundTruth{1000 + Tick(i) * 100, true, false};
    }
    const auto verdict = check_fairness(ledger, truth, p);
    CHECK(verdict.threshold == 82);
    CHECK(verdict.violation_count == 0);
    CHECK(verdict.violations.empty());
    CHECK(verdict.pairs_checked == 100 * 99 / 2);  // every gap exceeds 82
    CHECK(verdict.forge_excluded_pairs == 0);
}

TEST_CASE("misordered commitments are counted pair by pair") {
    const auto p = fairness_params(2, 10, 1);  // threshold 82
    // True times i*100; ledger order swaps transactions 3 and 7.
    const std::vector<std::uint8_t> commit_order = {0, 1, 2, 7, 4, 5, 6, 3, 8, 9};
    std::vector<CanonicalEntry> ledger;
    std::map<Digest, GroundTruth> truth;
    for (std::size_t pos = 0; pos < commit_order.size(); ++pos) {
        const std::uint8_t id = commit_order[pos];
        ledger.push_back(entry_of(id, Tick(pos)));  // canonical order as committed
        truth[digest_of(id)] = GroundTruth{Tick(id) * 100, true, false};
    }
    const auto verdict = check_fairness(ledger, truth, p);
    // tx7 jumped ahead of 4, 5, 6, 3 and tx3 fell behind 4, 5, 6.
    CHECK(verdict.violation_count == 7);
    CHECK(verdict.pairs_checked == 45);  // all pairs separated by >= 100
    REQUIRE_FALSE(verdict.violations.empty());
    for (const auto& v : verdict.violations) {
        CHECK(v.separation > 82);
        CHECK(v.should_precede != v.committed_first);
    }

    SUBCASE("forged participants are excluded and tallied") {
        truth[digest_of(7)] = GroundTruth{700, false, true};
        const auto excl = check_fairness(ledger, truth, p);
        CHECK(excl.violation_count == 3);          // only tx3's remaining pairs
        CHECK(excl.forge_excluded_pairs == 9);     // 7 pairs below, 2 above
        CHECK(excl.pairs_checked == 45 - 9);
    }
    SUBCASE("transactions without a regular certificate are out of scope") {
        truth[digest_of(7)] = GroundTruth{700, false, false};
        const auto scoped = check_fairness(ledger, truth, p);
        CHECK(scoped.violation_count == 3);
        CHECK(scoped.forge_excluded_pairs == 0);
        CHECK(scoped.pairs_checked == 45 - 9);  // premise pairs with tx7 dropped
    }
}

TEST_CASE("separation at exactly the threshold is not checked") {
    const auto p = fairness_params(1, 10, 0);  // threshold 40
    std::vector<CanonicalEntry> ledger = {entry_of(2, 0), entry_of(1, 1)};
    std::map<Digest, GroundTruth> truth;
    truth[digest_of(1)] = GroundTruth{100, true, false};
    truth[digest_of(2)] = GroundTruth{140, true, false};  // exactly 40 later
    const auto verdict = check_fairness(ledger, truth, p);
    CHECK(verdict.pairs_checked == 0);
    CHECK(verdict.violation_count == 0);

    // One tick beyond the threshold arms the check.
    truth[digest_of(2)] = GroundTruth{141, true, false};
    const auto armed = check_fairness(ledger, truth, p);
    CHECK(armed.pairs_checked == 1);
    CHECK(armed.violation_count == 1);
    REQUIRE(armed.violations.size() == 1);
    CHECK(armed.violations[0].should_precede == digest_of(1));
    CHECK(armed.violations[0].committed_first == digest_of(2));
    CHECK(armed.violations[0].separation == 41);
}

TEST_CASE("ledger entries missing from the truth table are skipped") {
    const auto p = fairness_params(2, 10, 1);
    std::vector<CanonicalEntry> ledger = {entry_of(1, 10), entry_of(2, 20)};
    std::map<Digest, GroundTruth> truth;
    truth[digest_of(1)] = GroundTruth{0, true, false};
    const auto verdict = check_fairness(ledger, truth, p);
    CHECK(verdict.pairs_checked == 0);
    CHECK(verdict.violation_count == 0);
}

TEST_CASE("violation listing is capped but counting is exact") {
    const auto p = fairness_params(1, 1, 0);  // threshold 4
    std::vector<CanonicalEntry> ledger;
    std::map<Digest, GroundTruth> truth;
    // Committed in exact reverse of true order; every pair violates.
    const int n = 40;
    for (int i = 0; i < n; ++i) {
        const auto id = static_cast<std::uint8_t>(i);
        ledger.push_back(entry_of(id, Tick(i)));
        truth[digest_of(id)] = GroundTruth{Tick((n - i) * 10), true, false};
    }
    const auto verdict = check_fairness(ledger, truth, p, 5);
    CHECK(verdict.violation_count == n * (n - 1) / 2);
    CHECK(verdict.violations.size() == 5);
}

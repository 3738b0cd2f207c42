#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "travelers/harness.hpp"
#include "travelers/routing.hpp"
#include "travelers/rng.hpp"

using namespace travelers;
using namespace travelers::harness;

namespace {

ExperimentConfig from_string(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

// Small mixed-adversary shape used by several run() tests.
const char* kSmallWorld = R"(
    n = 40
    q = 6
    t = 4
    k = 2
    delta_clock = 1
    transactions = 60
    arrival_interval = 5
    paths_per_tx = 2
    trials = 3
    seed = 7
)";

}  // namespace

TEST_CASE("config parsing applies defaults, overrides, and comments") {
    ExperimentConfig cfg = from_string(
        "# experiment\n"
        "n = 40   # size resets f and paths_per_block\n"
        "q = 6\n"
        "t = 4\n"
        "k = 2\n"
        "transactions = 10\n");
    CHECK(cfg.params.n == 40);
    CHECK(cfg.params.f == 13);
    CHECK(cfg.params.paths_per_block == 40);
    CHECK(cfg.params.q == 6);
    CHECK(cfg.params.t == 4);
    CHECK(cfg.workload.transactions == 10);
    CHECK(cfg.workload.payload_len == 250);
    CHECK(cfg.mode == routing::TraversalMode::Iterative);
    CHECK(cfg.rule == routing::ApprovalRule::ThresholdSigner);
    CHECK(cfg.censorship == consensus::CensorshipMode::LeaderlessCR);
    CHECK(cfg.trials == 1);
    CHECK(cfg.seed == 1);
    CHECK(cfg.strict_bft);

    SUBCASE("explicit f wins over the n-derived default regardless of order") {
        ExperimentConfig zero = from_string("f = 0\nn = 40\nq = 6\nt = 4\nk = 2\n");
        CHECK(zero.params.f == 0);
    }
}

TEST_CASE("config parsing covers every key") {
    ExperimentConfig cfg = from_string(R"(
        n = 60
        f = 10
        q = 5
        t = 4
        k = 3
        c = 1.5
        tau = 2.5
        delta_net = 20
        delta_clock = 2
        kappa = 0.25
        lambda = 48
        paths_per_block = 30
        transactions = 100
        arrival_interval = 3
        payload_len = 128
        hidden_fraction = 0.5
        paths_per_tx = 4
        mode = recursive
        rule = median
        decrypt_hubs = 1, 2
        layered = true
        cooperative = false
        delay = true
        advance_reuse = true
        advance_chain = true
        forge = true
        delay_amount = 55
        forge_timestamp = -5
        censorship = probabilistic-kappa
        censor_per_certificate = true
        block_interval = 500
        min_delay = 2
        trials = 9
        seed = 42
        strict_bft = true
    )");
    CHECK(cfg.params.f == 10);
    CHECK(cfg.params.c == doctest::Approx(1.5));
    CHECK(cfg.params.tau == doctest::Approx(2.5));
    CHECK(cfg.params.delta_net == 20);
    CHECK(cfg.params.delta_clock == 2);
    CHECK(cfg.params.kappa == doctest::Approx(0.25));
    CHECK(cfg.params.lambda_bytes == 48);
    CHECK(cfg.params.paths_per_block == 30);
    CHECK(cfg.workload.arrival_interval == 3);
    CHECK(cfg.workload.payload_len == 128);
    CHECK(cfg.workload.hidden_fraction == doctest::Approx(0.5));
    CHECK(cfg.workload.paths_per_tx == 4);
    CHECK(cfg.mode == routing::TraversalMode::Recursive);
    CHECK(cfg.rule == routing::ApprovalRule::MedianSigner);
    CHECK(cfg.reveal.decrypt_hub_indices == std::vector<std::uint32_t>{1, 2});
    CHECK(cfg.reveal.layered);
    CHECK_FALSE(cfg.adversary.cooperative);
    CHECK(cfg.adversary.delay);
    CHECK(cfg.adversary.advance_reuse);
    CHECK(cfg.adversary.advance_chain);
    CHECK(cfg.adversary.forge);
    CHECK(cfg.adversary.delay_amount == 55);
    CHECK(cfg.adversary.forge_timestamp == -5);
    CHECK(cfg.censorship == consensus::CensorshipMode::ProbabilisticKappa);
    CHECK(cfg.censor_per_certificate);
    CHECK(cfg.block_interval == 500);
    CHECK(cfg.min_delay == 2);
    CHECK(cfg.trials == 9);
    CHECK(cfg.seed == 42);
}

TEST_CASE("config rejects malformed input") {
    CHECK_THROWS_AS(from_string("bogus_key = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(from_string("n 40\n"), std::invalid_argument);
    CHECK_THROWS_AS(from_string("n =\n"), std::invalid_argument);
    CHECK_THROWS_AS(from_string("n = 40\nn = 50\n"), std::invalid_argument);
    CHECK_THROWS_AS(from_string("layered = maybe\n"), std::invalid_argument);
    CHECK_THROWS_AS(from_string("k = two\n"), std::invalid_argument);
    CHECK_THROWS_AS(from_string("kappa = 0.5x\n"), std::invalid_argument);
    CHECK_THROWS_AS(from_string("mode = sideways\n"), std::invalid_argument);
    CHECK_THROWS_AS(from_string("rule = coin\n"), std::invalid_argument);
    CHECK_THROWS_AS(from_string("censorship = none\n"), std::invalid_argument);
    CHECK_THROWS_AS(from_string("paths_per_tx = 0\n"), std::invalid_argument);
    CHECK_THROWS_AS(from_string("trials = 0\n"), std::invalid_argument);
    CHECK_THROWS_AS(from_string("kappa = 1.5\n"), std::invalid_argument);
    // q > n/t constraints come from the shared parameter validation
    CHECK_THROWS_AS(from_string("n = 4\nq = 6\nt = 4\n"), std::invalid_argument);
    // censorship plumbing must be wired consistently
    CHECK_THROWS_AS(from_string("censorship = leader-censor\n"), std::invalid_argument);
    CHECK_THROWS_AS(from_string("censor_victim_stride = 2\n"), std::invalid_argument);
    // hidden payloads need in-range decrypt positions
    CHECK_THROWS_AS(from_string("k = 2\nhidden_fraction = 0.5\ndecrypt_hubs = 5\n"),
                    std::invalid_argument);
    CHECK_THROWS_AS(from_string("min_delay = 99\n"), std::invalid_argument);
    CHECK_THROWS_AS(from_string("n = 30\nf = 12\nq = 3\nt = 2\n"), std::invalid_argument);
    CHECK_NOTHROW(from_string("n = 30\nf = 12\nq = 3\nt = 2\nstrict_bft = false\n"));
}

TEST_CASE("config schema documents every accepted key") {
    const std::string schema = config_schema();
    for (const char* key :
         {"n",  "f", "q", "t", "k", "c", "tau", "delta_net", "delta_clock", "kappa", "lambda",
          "paths_per_block", "transactions", "arrival_interval", "payload_len",
          "hidden_fraction", "paths_per_tx", "mode", "rule", "decrypt_hubs", "layered",
          "cooperative", "delay", "advance_reuse", "advance_chain", "forge", "delay_amount",
          "forge_timestamp", "censorship", "censor_per_certificate", "censor_victim_stride",
          "block_interval", "min_delay", "trials", "seed", "strict_bft"})
        CHECK_MESSAGE(schema.find(key) != std::string::npos, "schema missing ", key);
}

TEST_CASE("wilson intervals match the score formula") {
    WilsonInterval even = wilson(50, 100);
    CHECK(even.low == doctest::Approx(0.37527187431174236).epsilon(1e-9));
    CHECK(even.high == doctest::Approx(0.6247281256882576).epsilon(1e-9));

    WilsonInterval high = wilson(95, 100);
    CHECK(high.low == doctest::Approx(0.860841619969121).epsilon(1e-9));
    CHECK(high.high == doctest::Approx(0.9831528008151379).epsilon(1e-9));

    SUBCASE("bounds are clamped and ordered") {
        WilsonInterval zero = wilson(0, 1000);
        CHECK(zero.low == 0.0);
        CHECK(zero.high > 0.0);
        WilsonInterval all = wilson(1000, 1000);
        CHECK(all.high == 1.0);
        CHECK(all.low < 1.0);
        WilsonInterval empty = wilson(0, 0);
        CHECK(empty.low == 0.0);
        CHECK(empty.high == 1.0);
    }
    SUBCASE("intervals shrink with more trials") {
        WilsonInterval small = wilson(50, 100);
        WilsonInterval large = wilson(5000, 10000);
        CHECK(large.high - large.low < small.high - small.low);
    }
}

TEST_CASE("trial seeds derive from the root via the documented split") {
    const KeyedRng root(99);
    for (std::uint64_t i = 0; i < 64; ++i)
        CHECK(trial_seed(99, i) == root.draw(Stream::Trials, {i}));
    CHECK(trial_seed(99, 0) != trial_seed(99, 1));
    CHECK(trial_seed(99, 0) != trial_seed(100, 0));
}

TEST_CASE("run: empty workload commits an empty ledger with zero violations") {
    ExperimentConfig cfg = from_string("n = 12\nf = 3\nq = 3\nt = 2\nk = 2\ntransactions = 0\n");
    RunReport report = run(cfg);
    REQUIRE(report.trials.size() == 1);
    const TrialMetrics& t = report.trials[0];
    CHECK(t.traversals == 0);
    CHECK(t.committed_txs == 0);
    CHECK(t.committed_certs == 0);
    CHECK(t.violations == 0);
    CHECK(t.pairs_checked == 0);
    CHECK(t.blocks == 1);
    CHECK(report.total_transactions == 0);
    CHECK(report.commit_rate == 0.0);
}

TEST_CASE("run: identical configs reproduce the report bit for bit") {
    ExperimentConfig cfg = from_string(kSmallWorld);
    cfg.adversary.delay = true;
    cfg.adversary.advance_reuse = true;

    RunReport first = run(cfg);
    RunReport second = run(cfg);
    CHECK(report_digest(first) == report_digest(second));

    std::ostringstream a, b;
    write_report_json(first, a);
    write_report_json(second, b);
    CHECK(a.str() == b.str());

    for (std::uint64_t i = 0; i < cfg.trials; ++i)
        CHECK(first.trials[i].seed == trial_seed(cfg.seed, i));

    ExperimentConfig reseeded = cfg;
    reseeded.seed = 8;
    RunReport third = run(reseeded);
    CHECK(third.trials[0].seed != first.trials[0].seed);
}

TEST_CASE("run: metrics are internally consistent and fair under manipulation") {
    ExperimentConfig cfg = from_string(kSmallWorld);
    cfg.adversary.delay = true;
    cfg.adversary.advance_reuse = true;
    cfg.adversary.advance_chain = true;

    RunReport report = run(cfg);
    REQUIRE(report.trials.size() == 3);
    for (const TrialMetrics& t : report.trials) {
        CHECK(t.transactions == 60);
        CHECK(t.traversals == 120);
        CHECK(t.paths_regular + t.paths_mixed + t.paths_corrupted + t.paths_impasse ==
              t.traversals);
        CHECK(t.completed + t.stalled == t.traversals);
        CHECK(t.committed_certs <= t.completed);
        CHECK(t.committed_true + t.committed_advanced + t.committed_delayed +
                  t.committed_arbitrary ==
              t.committed_certs);
        CHECK(t.committed_txs <= t.transactions);
        CHECK(t.censored_certs == 0);
        CHECK(t.latency_p50 <= t.latency_p90);
        CHECK(t.latency_p90 <= t.latency_max);
        CHECK(t.messages > 0);
        // timestamp control without forgery cannot break the separation bound
        CHECK(t.violations == 0);
        CHECK(t.min_rule_counterexamples == 0);
        CHECK(t.completed > 0);
        CHECK(t.committed_txs > 0);
    }
    CHECK(report.total_transactions == 180);
    CHECK(report.commit_rate ==
          doctest::Approx(double(report.total_committed_txs) / 180.0));
    CHECK(report.commit_rate_ci.low <= report.commit_rate);
    CHECK(report.commit_rate_ci.high >= report.commit_rate);
}

TEST_CASE("run: probabilistic censorship extremes") {
    ExperimentConfig cfg = from_string(kSmallWorld);
    cfg.censorship = consensus::CensorshipMode::ProbabilisticKappa;
    cfg.trials = 1;

    SUBCASE("kappa = 1 drops everything") {
        cfg.params.kappa = 1.0;
        RunReport report = run(cfg);
        CHECK(report.trials[0].committed_certs == 0);
        CHECK(report.trials[0].committed_txs == 0);
        CHECK(report.trials[0].censored_certs == report.trials[0].completed);
    }
    SUBCASE("kappa = 0 drops nothing") {
        cfg.params.kappa = 0.0;
        RunReport report = run(cfg);
        CHECK(report.trials[0].censored_certs == 0);
        CHECK(report.trials[0].committed_certs == report.trials[0].completed);
    }
}

TEST_CASE("run: leader censorship strips victims' truthful certificates") {
    ExperimentConfig cfg = from_string(kSmallWorld);
    cfg.adversary.delay = true;  // delayed certificates survive the filter
    cfg.censorship = consensus::CensorshipMode::LeaderCensor;
    cfg.trials = 1;

    SUBCASE("stride 1 victimizes every transaction") {
        cfg.censor_victim_stride = 1;
        RunReport report = run(cfg);
        CHECK(report.trials[0].committed_true == 0);
        CHECK(report.trials[0].censored_certs > 0);
    }
    SUBCASE("stride 2 spares the odd transactions") {
        cfg.censor_victim_stride = 2;
        RunReport report = run(cfg);
        CHECK(report.trials[0].committed_true > 0);
        CHECK(report.trials[0].censored_certs > 0);
    }
}

TEST_CASE("run: hidden payloads ship ciphertext to the decryption hub") {
    ExperimentConfig plain = from_string(
        "n = 12\nf = 0\nq = 3\nt = 2\nk = 2\ntransactions = 10\npayload_len = 64\n");
    ExperimentConfig hidden = plain;
    hidden.workload.hidden_fraction = 1.0;

    RunReport p = run(plain);
    RunReport h = run(hidden);
    CHECK(p.trials[0].completed == 10);
    CHECK(h.trials[0].completed == 10);
    // default decryption position is the last hub: one ciphertext copy per member
    CHECK(h.trials[0].payload_bytes ==
          p.trials[0].payload_bytes + 10ull * plain.params.q * 64ull);
    CHECK(h.trials[0].overhead_bytes == p.trials[0].overhead_bytes);
}

TEST_CASE("run: traffic accounting matches the per-traversal counting formulas") {
    // iterative operating point: payload 250, lambda 32, k = 2, q = 20
    ExperimentConfig cfg = from_string(
        "n = 84\nf = 0\nq = 20\nt = 14\nk = 2\nlambda = 32\n"
        "transactions = 2\npayload_len = 250\npaths_per_tx = 8\n");
    RunReport report = run(cfg);
    const TrialMetrics& t = report.trials[0];
    CHECK(t.traversals == 16);
    CHECK(t.messages == 16ull * (2 + 2 * 2 * 20));
    CHECK(t.payload_bytes == 16ull * 500);
    CHECK(t.overhead_bytes == 16ull * (2 * 2 * 20 * 32 + 2 * 32));

    SUBCASE("recursive mode pays q^2 messages per hop") {
        SystemParams p;
        p.n = 84;
        p.q = 20;
        p.t = 14;
        p.k = 3;
        const auto three = routing::expected_recursive_traffic(p, 250);
        p.k = 2;
        const auto two = routing::expected_recursive_traffic(p, 250);
        CHECK(three.messages - two.messages == 20 * 20);
    }
}

TEST_CASE("run: trace emits one parseable JSON line per event") {
    ExperimentConfig cfg =
        from_string("n = 12\nf = 0\nq = 3\nt = 2\nk = 2\ntransactions = 6\n");
    std::ostringstream trace;
    RunReport report = run(cfg, &trace);

    std::istringstream lines(trace.str());
    std::string line;
    std::size_t submits = 0, delivers = 0, blocks = 0, ledger = 0;
    while (std::getline(lines, line)) {
        const nlohmann::json j = nlohmann::json::parse(line);
        const std::string event = j.at("event").get<std::string>();
        if (event == "submit") ++submits;
        else if (event == "deliver") ++delivers;
        else if (event == "block") ++blocks;
        else if (event == "ledger") ++ledger;
        CHECK(j.contains("trial"));
    }
    CHECK(submits == 6);
    CHECK(delivers == report.trials[0].completed);
    CHECK(blocks == report.trials[0].blocks);
    CHECK(ledger == report.trials[0].committed_txs);
}

TEST_CASE("monte carlo: zero corruption never yields a corrupted path") {
    SystemParams p = SystemParams::with_defaults(30);
    p.f = 0;
    p.q = 3;
    p.t = 2;
    p.k = 2;
    CorruptionStats stats = monte_carlo_corruption(p, 1000, 5, 5, 20);
    CHECK(stats.corrupted_hits == 0);
    CHECK(stats.corrupted_freq == 0.0);
    CHECK(stats.regular_hits == 1000);
    CHECK(stats.regular_freq == 1.0);
    CHECK(stats.regular_ci.high == 1.0);
}

TEST_CASE("monte carlo: singleton frequencies match the closed forms") {
    SystemParams p = SystemParams::with_defaults(20);
    p.f = 10;
    p.q = 1;
    p.t = 1;
    p.k = 2;
    p.paths_per_block = 20;
    // per path: regular (1/2)^2, corrupted (1/2)^2
    CorruptionStats stats = monte_carlo_corruption(p, 4000, 11, 1, 1);
    CHECK(stats.regular_freq == doctest::Approx(0.25).epsilon(0.10));
    CHECK(stats.corrupted_freq == doctest::Approx(0.25).epsilon(0.10));
    CHECK(stats.regular_ci.low <= 0.25);
    CHECK(stats.regular_ci.high >= 0.25);
    CHECK(stats.corrupted_ci.low <= 0.25);
    CHECK(stats.corrupted_ci.high >= 0.25);

    SUBCASE("one-hub single-node paths are regular xor corrupted") {
        SystemParams tiny = SystemParams::with_defaults(2);
        tiny.f = 1;
        tiny.q = 1;
        tiny.t = 1;
        tiny.k = 1;
        CorruptionStats flip = monte_carlo_corruption(tiny, 1000, 3, 1, 1);
        CHECK(flip.corrupted_hits + flip.regular_hits == 1000);
    }
}

TEST_CASE("monte carlo: trial floor is enforced") {
    SystemParams p = SystemParams::with_defaults(20);
    p.q = 1;
    p.t = 1;
    p.k = 1;
    CHECK_THROWS_AS(monte_carlo_corruption(p, 999, 1, 1, 1), std::invalid_argument);
}

TEST_CASE("complexity sweep: measurements equal the formulas and scale with log n") {
    ComplexitySweep iter = complexity_sweep({64, 128, 256, 512},
                                            routing::TraversalMode::Iterative, 250, 21);
    REQUIRE(iter.points.size() == 4);
    for (const ComplexityPoint& pt : iter.points) {
        CHECK(pt.exact_match);
        CHECK(pt.measured_messages == double(pt.predicted_messages));
        CHECK(pt.measured_overhead == double(pt.predicted_overhead));
    }
    CHECK(iter.points[0].q == 18);
    CHECK(iter.points[1].q == 21);
    CHECK(iter.points[2].q == 24);
    CHECK(iter.points[3].q == 27);
    CHECK(iter.r_squared >= 0.99);

    // doubling n grows non-payload bytes by at most log(2n)/log(n) (+5%)
    for (std::size_t i = 0; i + 1 < iter.points.size(); ++i) {
        const double ratio =
            iter.points[i + 1].measured_overhead / iter.points[i].measured_overhead;
        const double n = double(iter.points[i].n);
        CHECK(ratio <= std::log2(2.0 * n) / std::log2(n) + 0.05);
    }

    ComplexitySweep rec =
        complexity_sweep({64, 128}, routing::TraversalMode::Recursive, 250, 22);
    for (const ComplexityPoint& pt : rec.points) CHECK(pt.exact_match);
}

TEST_CASE("report writers emit parseable JSON and CSV") {
    ExperimentConfig cfg = from_string(kSmallWorld);
    cfg.trials = 2;
    RunReport report = run(cfg);

    std::ostringstream js;
    write_report_json(report, js);
    const nlohmann::json j = nlohmann::json::parse(js.str());
    CHECK(j.at("config").at("n").get<std::uint32_t>() == 40);
    CHECK(j.at("trials").size() == 2);
    CHECK(j.at("aggregate").contains("commit_rate_ci_low"));

    std::ostringstream cs;
    write_report_csv(report, cs);
    std::istringstream lines(cs.str());
    std::string line;
    std::size_t rows = 0;
    while (std::getline(lines, line)) ++rows;
    CHECK(rows == 3);  // header + 2 trials

    std::ostringstream mj;
    SystemParams p = SystemParams::with_defaults(20);
    p.q = 1;
    p.t = 1;
    p.k = 1;
    write_corruption_json(monte_carlo_corruption(p, 1000, 1, 1, 1), mj);
    CHECK(nlohmann::json::parse(mj.str()).contains("corrupted_freq"));

    std::ostringstream cc;
    write_complexity_csv(
        complexity_sweep({64}, routing::TraversalMode::Iterative, 250, 1), cc);
    CHECK(cc.str().find("exact_match") != std::string::npos);

    SUBCASE("digest reacts to any report change") {
        const std::string base = report_digest(report);
        CHECK(base.size() == 64);
        RunReport tweaked = report;
        tweaked.trials[0].violations += 1;
        CHECK(report_digest(tweaked) != base);
    }
}

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"
#include "travelers/adversary.hpp"
#include "travelers/assignment.hpp"
#include "travelers/digest.hpp"
#include "travelers/harness.hpp"
#include "travelers/ordering.hpp"
#include "travelers/routing.hpp"
#include "travelers/simnet.hpp"

namespace travelers::harness {

namespace {

using nlohmann::json;

Tick percentile(std::vector<Tick>& sorted, double frac) {
    if (sorted.empty()) return 0;
    auto idx = static_cast<std::size_t>(frac * static_cast<double>(sorted.size() - 1));
    return sorted[idx];
}

void trace_line(std::ostream* trace, const json& j) {
    if (trace) *trace << j.dump() << '\n';
}

struct DeliveredRecord {
    consensus::Delivered d;
    std::uint64_t tx_index = 0;
};

TrialMetrics run_trial(const ExperimentConfig& cfg, std::uint64_t index, std::ostream* trace) {
    const SystemParams& p = cfg.params;
    const std::uint64_t tseed = trial_seed(cfg.seed, index);

    TrialMetrics m;
    m.trial = index;
    m.seed = tseed;
    m.transactions = cfg.workload.transactions;

    KeyedRng rng(tseed);
    simnet::ClockModel clock(rng, p.n, p.delta_clock);
    simnet::NetModel net(rng, p.delta_net, cfg.min_delay);
    adversary::AdversaryState adv = adversary::corrupt(rng, p.n, p.f);
    adv.cooperative = cfg.adversary.cooperative;
    net.set_colluding(adv.corrupted);

    const assignment::BlockRandomness rand = assignment::make_randomness(0, tseed);

    routing::RevealPolicy reveal = cfg.reveal;
    if (reveal.decrypt_hub_indices.empty()) reveal.decrypt_hub_indices = {p.k - 1};

    routing::TraversalContext ctx;
    ctx.params = &p;
    ctx.clock = &clock;
    ctx.net = &net;
    ctx.adv = &adv;
    ctx.mode = cfg.mode;
    ctx.rule = cfg.rule;
    ctx.reveal = reveal;

    adversary::TacticPolicy policy;
    policy.forge = cfg.adversary.forge;
    policy.advance_reuse = cfg.adversary.advance_reuse;
    policy.advance_chain = cfg.adversary.advance_chain;
    policy.delay = cfg.adversary.delay;
    policy.delay_amount = cfg.adversary.delay_amount;
    policy.forge_timestamp = cfg.adversary.forge_timestamp;
    const bool tactics_enabled =
        policy.forge || policy.advance_reuse || policy.advance_chain || policy.delay;

    const std::uint64_t budget = p.paths_per_block ? p.paths_per_block : p.n;
    const std::uint64_t tries = std::min<std::uint64_t>(cfg.workload.paths_per_tx, budget);

    std::map<std::uint64_t, PathSpec> path_cache;
    auto get_path = [&](std::uint64_t id) -> const PathSpec& {
        auto it = path_cache.find(id);
        if (it == path_cache.end())
            it = path_cache.emplace(id, assignment::derive_path(id, rand, p)).first;
        return it->second;
    };

    struct TruthAccum {
        Tick regular_min = routing::kNever;
        Tick any_min = routing::kNever;
        bool regular_delivered = false;
    };

    std::vector<DeliveredRecord> delivered;
    std::map<Digest, ordering::GroundTruth> truth;
    std::map<Digest, TruthAccum> accum;
    std::vector<Tick> latencies;
    std::vector<Transaction> txs;
    txs.reserve(cfg.workload.transactions);

    for (std::uint64_t i = 0; i < cfg.workload.transactions; ++i) {
        const Tick at = static_cast<Tick>(i) * cfg.workload.arrival_interval;
        const bool hidden = cfg.workload.hidden_fraction > 0.0 &&
                            rng.unit(Stream::Workload, {0x68au, i}) < cfg.workload.hidden_fraction;
        Transaction tx = make_transaction(static_cast<std::uint32_t>(i % 16), i,
                                          cfg.workload.payload_len, at, hidden);
        txs.push_back(tx);
        trace_line(trace, json{{"event", "submit"},
                               {"trial", index},
                               {"tick", at},
                               {"tx", to_hex(tx.id)},
                               {"hidden", hidden}});

        std::vector<std::uint64_t> ids;
        if (tries >= budget) {
            for (std::uint64_t id = 0; id < budget; ++id) ids.push_back(id);
        } else {
            std::uint64_t attempt = 0;
            const std::uint64_t tx64 = digest_low64(tx.id);
            while (ids.size() < tries) {
                std::uint64_t id = rng.uniform(Stream::Paths, {tx64, attempt++}, budget);
                if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
            }
        }

        auto& acc = accum[tx.id];
        for (std::uint64_t id : ids) {
            const PathSpec& path = get_path(id);
            const adversary::PathClass cls = adversary::classify_path(path, adv, p.t);
            switch (cls) {
                case adversary::PathClass::Regular: ++m.paths_regular; break;
                case adversary::PathClass::Mixed: ++m.paths_mixed; break;
                case adversary::PathClass::Corrupted: ++m.paths_corrupted; break;
                case adversary::PathClass::ContainsImpasse: ++m.paths_impasse; break;
            }
            if (tactics_enabled) {
                const adversary::Tactic tactic = policy.pick(path, adv, p.t);
                if (tactic.kind != adversary::TacticKind::None) adv.assign(tx.id, id, tactic);
            }

            const routing::TraversalOutcome out = routing::traverse(ctx, tx, path, at);
            ++m.traversals;
            m.messages += out.messages;
            m.payload_bytes += out.payload_bytes;
            m.overhead_bytes += out.overhead_bytes;
            if (!out.completed) {
                ++m.stalled;
                continue;
            }
            ++m.completed;
            latencies.push_back(out.delivery_time - at);
            acc.any_min = std::min(acc.any_min, out.counterfactual_locked);
            if (cls == adversary::PathClass::Regular) {
                acc.regular_min = std::min(acc.regular_min, out.counterfactual_locked);
                acc.regular_delivered = true;
            }

            DeliveredRecord rec;
            rec.d.cert = out.cert;
            rec.d.delivery_time = out.delivery_time;
            rec.d.kind = out.kind;
            rec.d.regular_path = cls == adversary::PathClass::Regular;
            rec.tx_index = i;
            delivered.push_back(std::move(rec));
        }
    }

    for (const auto& [tx, acc] : accum) {
        if (acc.any_min == routing::kNever) continue;  // nothing completed
        ordering::GroundTruth gt;
        gt.true_ts = acc.regular_min != routing::kNever ? acc.regular_min : acc.any_min;
        // Eligibility keys on delivery, not commitment, so a consensus layer
        // that drops truthful certificates cannot silence the check.
        gt.has_regular_cert = acc.regular_delivered;
        truth.emplace(tx, gt);
    }

    consensus::CensorshipModel model;
    model.mode = cfg.censorship;
    model.kappa = p.kappa;
    model.per_certificate = cfg.censor_per_certificate;
    if (cfg.censorship == consensus::CensorshipMode::LeaderCensor) {
        for (const DeliveredRecord& rec : delivered)
            if (rec.tx_index % cfg.censor_victim_stride == 0 &&
                rec.d.kind == TimestampKind::True)
                model.targets.insert({rec.d.cert.tx, rec.d.cert.path_id});
    }

    consensus::Sequencer seq(p, rand, std::move(model), rng);
    simnet::Simulator sim;
    Tick max_delivery = 0;
    for (const DeliveredRecord& rec : delivered)
        max_delivery = std::max(max_delivery, rec.d.delivery_time);

    for (std::size_t di = 0; di < delivered.size(); ++di) {
        const DeliveredRecord& rec = delivered[di];
        sim.schedule(rec.d.delivery_time, [&seq, &rec, trace, index] {
            seq.collect(rec.d);
            trace_line(trace, json{{"event", "deliver"},
                                   {"trial", index},
                                   {"tick", rec.d.delivery_time},
                                   {"tx", to_hex(rec.d.cert.tx)},
                                   {"path", rec.d.cert.path_id},
                                   {"locked_ts", rec.d.cert.locked_ts},
                                   {"kind", to_string(rec.d.kind)}});
        });
    }
    auto close_block = [&seq, trace, index](Tick at) {
        const consensus::Block& b = seq.form_block(at);
        trace_line(trace, json{{"event", "block"},
                               {"trial", index},
                               {"tick", at},
                               {"number", b.number},
                               {"certificates", b.certs.size()},
                               {"min_ts", b.min_ts},
                               {"max_ts", b.max_ts}});
    };
    if (cfg.block_interval > 0)
        for (Tick b = cfg.block_interval; b <= max_delivery; b += cfg.block_interval)
            sim.schedule(b, [&close_block, b] { close_block(b); });
    const Tick final_close = max_delivery + 1;
    sim.schedule(final_close, [&close_block, final_close] { close_block(final_close); });
    sim.run();

    struct MinRule {
        Tick canonical = routing::kNever;
        Tick delayed_min = routing::kNever;
        bool has_true = false;
    };
    std::map<Digest, MinRule> minrule;

    for (const consensus::Block& block : seq.chain()) {
        for (const consensus::CommittedCertificate& cc : block.certs) {
            ++m.committed_certs;
            switch (cc.kind) {
                case TimestampKind::True: ++m.committed_true; break;
                case TimestampKind::Advanced: ++m.committed_advanced; break;
                case TimestampKind::Delayed: ++m.committed_delayed; break;
                case TimestampKind::Arbitrary: ++m.committed_arbitrary; break;
            }
            if (cc.kind == TimestampKind::Arbitrary) {
                auto it = truth.find(cc.cert.tx);
                if (it != truth.end()) it->second.forged = true;
            }
            auto& mr = minrule[cc.cert.tx];
            mr.canonical = std::min(mr.canonical, cc.effective_ts);
            if (cc.kind == TimestampKind::True) mr.has_true = true;
            if (cc.kind == TimestampKind::Delayed)
                mr.delayed_min = std::min(mr.delayed_min, cc.effective_ts);
        }
    }
    m.censored_certs = seq.censored();
    m.blocks = seq.chain().size();
    for (const auto& [tx, mr] : minrule)
        if (mr.has_true && mr.delayed_min < mr.canonical) ++m.min_rule_counterexamples;

    const std::vector<ordering::CanonicalEntry> ledger =
        ordering::total_order(ordering::canonical_entries(seq.chain()));
    m.committed_txs = ledger.size();
    for (const ordering::CanonicalEntry& e : ledger)
        trace_line(trace, json{{"event", "ledger"},
                               {"trial", index},
                               {"tx", to_hex(e.tx)},
                               {"canonical_ts", e.canonical_ts},
                               {"path", e.source_path}});

    const ordering::FairnessVerdict verdict = ordering::check_fairness(ledger, truth, p);
    m.pairs_checked = verdict.pairs_checked;
    m.violations = verdict.violation_count;
    m.forge_excluded_pairs = verdict.forge_excluded_pairs;

    std::sort(latencies.begin(), latencies.end());
    m.latency_p50 = percentile(latencies, 0.5);
    m.latency_p90 = percentile(latencies, 0.9);
    m.latency_max = latencies.empty() ? 0 : latencies.back();
    return m;
}

void aggregate(RunReport& report) {
    for (const TrialMetrics& t : report.trials) {
        report.total_transactions += t.transactions;
        report.total_committed_txs += t.committed_txs;
        report.total_pairs_checked += t.pairs_checked;
        report.total_violations += t.violations;
        report.total_forge_excluded += t.forge_excluded_pairs;
        report.total_min_rule_counterexamples += t.min_rule_counterexamples;
        report.latency_max = std::max(report.latency_max, t.latency_max);
    }
    if (report.total_transactions > 0) {
        report.commit_rate = static_cast<double>(report.total_committed_txs) /
                             static_cast<double>(report.total_transactions);
        std::uint64_t bytes = 0, msgs = 0;
        for (const TrialMetrics& t : report.trials) {
            bytes += t.payload_bytes + t.overhead_bytes;
            msgs += t.messages;
        }
        report.mean_bytes_per_tx =
            static_cast<double>(bytes) / static_cast<double>(report.total_transactions);
        report.mean_messages_per_tx =
            static_cast<double>(msgs) / static_cast<double>(report.total_transactions);
    }
    report.commit_rate_ci = wilson(report.total_committed_txs, report.total_transactions);
    if (!report.trials.empty()) {
        double p50_sum = 0.0;
        for (const TrialMetrics& t : report.trials) p50_sum += static_cast<double>(t.latency_p50);
        report.latency_p50_mean =
            static_cast<Tick>(p50_sum / static_cast<double>(report.trials.size()));
    }
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t root_seed, std::uint64_t trial_index) {
    return KeyedRng(root_seed).draw(Stream::Trials, {trial_index});
}

WilsonInterval wilson(std::uint64_t hits, std::uint64_t trials, double z) {
    if (trials == 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double ph = static_cast<double>(hits) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (ph + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(ph * (1.0 - ph) / n + z2 / (4.0 * n * n)) / denom;
    WilsonInterval ci{std::max(0.0, center - half), std::min(1.0, center + half)};
    if (hits == 0) ci.low = 0.0;          // exact bounds at the extremes
    if (hits == trials) ci.high = 1.0;
    return ci;
}

RunReport run(const ExperimentConfig& config, std::ostream* trace) {
    config.validate();
    RunReport report;
    report.config = config;
    report.trials.resize(config.trials);

    const unsigned hw = std::thread::hardware_concurrency();
    const bool serial = trace != nullptr || config.trials <= 1 || hw <= 1;
    if (serial) {
        for (std::uint64_t i = 0; i < config.trials; ++i)
            report.trials[i] = run_trial(config, i, trace);
    } else {
        const unsigned workers =
            static_cast<unsigned>(std::min<std::uint64_t>(hw, config.trials));
        std::atomic<std::uint64_t> next{0};
        std::mutex fail_mutex;
        std::exception_ptr failure;
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::uint64_t i = next.fetch_add(1);
                    if (i >= config.trials) return;
                    try {
                        report.trials[i] = run_trial(config, i, nullptr);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(fail_mutex);
                        if (!failure) failure = std::current_exception();
                        return;
                    }
                }
            });
        }
        for (std::thread& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
    }

    aggregate(report);
    return report;
}

namespace {

/// Scans a path hub by hub, exiting as soon as the sought class is ruled
/// out; the Monte Carlo loops below live on this early exit.
bool path_is(std::uint64_t path_id, const assignment::BlockRandomness& rand,
             const SystemParams& p, const adversary::AdversaryState& adv, HubType want) {
    for (std::uint32_t j = 0; j < p.k; ++j) {
        const std::vector<NodeId> members = assignment::derive_hub(path_id, j, rand, p.n, p.q);
        std::uint32_t mal = 0;
        for (NodeId node : members) mal += adv.is_corrupted(node) ? 1u : 0u;
        if (classify_hub(p.q - mal, mal, p.t) != want) return false;
    }
    return true;
}

}  // namespace

CorruptionStats monte_carlo_corruption(const SystemParams& params, std::uint64_t trials,
                                       std::uint64_t seed, std::uint64_t tries_per_client,
                                       std::uint64_t paths_scanned) {
    params.validate(false);
    if (trials < 1000)
        throw std::invalid_argument("monte_carlo_corruption: needs >= 1000 trials");

    CorruptionStats stats;
    stats.trials = trials;
    stats.paths_scanned = paths_scanned;
    stats.tries_per_client = tries_per_client;

    for (std::uint64_t i = 0; i < trials; ++i) {
        const std::uint64_t tseed = trial_seed(seed, i);
        KeyedRng rng(tseed);
        const adversary::AdversaryState adv = adversary::corrupt(rng, params.n, params.f);
        const assignment::BlockRandomness rand = assignment::make_randomness(i, tseed);

        for (std::uint64_t id = 0; id < paths_scanned; ++id)
            if (path_is(id, rand, params, adv, HubType::Corrupted)) {
                ++stats.corrupted_hits;
                break;
            }
        for (std::uint64_t id = 0; id < tries_per_client; ++id)
            if (path_is(id, rand, params, adv, HubType::Regular)) {
                ++stats.regular_hits;
                break;
            }
    }

    const double n = static_cast<double>(trials);
    stats.corrupted_freq = static_cast<double>(stats.corrupted_hits) / n;
    stats.regular_freq = static_cast<double>(stats.regular_hits) / n;
    stats.corrupted_ci = wilson(stats.corrupted_hits, trials);
    stats.regular_ci = wilson(stats.regular_hits, trials);
    return stats;
}

namespace {

double fit_r_squared(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    if (n < 2) return 1.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double dn = static_cast<double>(n);
    const double denom = dn * sxx - sx * sx;
    if (denom == 0.0) return 1.0;
    const double b = (dn * sxy - sx * sy) / denom;
    const double a = (sy - b * sx) / dn;
    double ss_res = 0, ss_tot = 0;
    const double mean = sy / dn;
    for (std::size_t i = 0; i < n; ++i) {
        const double fit = a + b * xs[i];
        ss_res += (ys[i] - fit) * (ys[i] - fit);
        ss_tot += (ys[i] - mean) * (ys[i] - mean);
    }
    if (ss_tot == 0.0) return 1.0;
    return 1.0 - ss_res / ss_tot;
}

}  // namespace

ComplexitySweep complexity_sweep(const std::vector<std::uint32_t>& sizes,
                                 routing::TraversalMode mode, std::uint64_t payload_len,
                                 std::uint64_t seed) {
    ComplexitySweep sweep;
    std::vector<double> xs, ys;
    constexpr std::uint64_t kSamples = 8;

    for (std::uint32_t n : sizes) {
        SystemParams p = SystemParams::with_defaults(n);
        p.f = 0;  // cost accounting wants stall-free traversals
        p.q = static_cast<std::uint32_t>(std::ceil(3.0 * std::log2(static_cast<double>(n))));
        p.t = (2 * p.q + 2) / 3;
        p.k = 2;
        p.validate();

        const std::uint64_t tseed = trial_seed(seed, n);
        KeyedRng rng(tseed);
        simnet::ClockModel clock(rng, p.n, p.delta_clock);
        simnet::NetModel net(rng, p.delta_net, 1);
        adversary::AdversaryState adv = adversary::corrupt(rng, p.n, 0);
        net.set_colluding(adv.corrupted);
        const assignment::BlockRandomness rand = assignment::make_randomness(0, tseed);

        routing::TraversalContext ctx;
        ctx.params = &p;
        ctx.clock = &clock;
        ctx.net = &net;
        ctx.adv = &adv;
        ctx.mode = mode;

        std::uint64_t messages = 0, payload = 0, overhead = 0;
        for (std::uint64_t i = 0; i < kSamples; ++i) {
            const Transaction tx = make_transaction(static_cast<std::uint32_t>(i), i,
                                                    payload_len, static_cast<Tick>(i) * 7);
            const PathSpec path = assignment::derive_path(i, rand, p);
            const routing::TraversalOutcome out =
                routing::traverse(ctx, tx, path, tx.submit_time);
            if (!out.completed)
                throw std::logic_error("complexity_sweep: honest traversal stalled");
            messages += out.messages;
            payload += out.payload_bytes;
            overhead += out.overhead_bytes;
        }

        const routing::TrafficModel expected =
            mode == routing::TraversalMode::Iterative
                ? routing::expected_iterative_traffic(p, payload_len, false, 0)
                : routing::expected_recursive_traffic(p, payload_len);

        ComplexityPoint point;
        point.n = n;
        point.q = p.q;
        point.k = p.k;
        point.measured_messages = static_cast<double>(messages) / kSamples;
        point.measured_payload = static_cast<double>(payload) / kSamples;
        point.measured_overhead = static_cast<double>(overhead) / kSamples;
        point.predicted_messages = expected.messages;
        point.predicted_payload = expected.payload_bytes;
        point.predicted_overhead = expected.overhead_bytes;
        point.exact_match = messages == kSamples * expected.messages &&
                            payload == kSamples * expected.payload_bytes &&
                            overhead == kSamples * expected.overhead_bytes;
        sweep.points.push_back(point);

        xs.push_back(std::log2(static_cast<double>(n)));
        ys.push_back(point.measured_overhead);
    }

    sweep.r_squared = fit_r_squared(xs, ys);
    return sweep;
}

}  // namespace travelers::harness

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "travelers/acceptance.hpp"
#include "travelers/adversary.hpp"
#include "travelers/analysis.hpp"
#include "travelers/harness.hpp"
#include "travelers/routing.hpp"
#include "travelers/simnet.hpp"

namespace travelers::acceptance {

namespace {

using harness::CorruptionStats;
using harness::ExperimentConfig;
using harness::RunReport;

class Timer {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double v, int precision = 4) {
    std::ostringstream o;
    o << std::setprecision(precision) << v;
    return o.str();
}

void emit(std::ostream* progress, const CriterionResult& r) {
    if (!progress) return;
    *progress << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << " ["
              << fmt(r.seconds, 3) << "s]\n";
    progress->flush();
}

/// Boosted singleton plan: the closed form pins (k, success), and the
/// empirical success over the planned retry budget must bracket the
/// analytic value at the realized corruption ratio.
CriterionResult singleton_boosting_plan() {
    Timer timer;
    CriterionResult r;
    r.name = "singleton-boosting-plan";

    const auto plan = analysis::singleton_plan(200, 1.2, 2.0 / 3.0, 1.0 / 3.0, 200);
    bool ok = plan.k == 11;
    ok = ok && plan.success >= 0.566 && plan.success <= 0.586;

    SystemParams p = SystemParams::with_defaults(200);
    p.q = 1;
    p.t = 1;
    p.k = plan.k;
    p.c = 1.2;
    p.paths_per_block = 200;
    const CorruptionStats stats =
        harness::monte_carlo_corruption(p, 100000, 0x51AC6B01ull, plan.L, 0);

    const double ph_realized = 1.0 - static_cast<double>(p.f) / p.n;
    const double analytic =
        analysis::success_probability(std::pow(ph_realized, plan.k), plan.L);
    ok = ok && stats.regular_ci.low <= analytic && analytic <= stats.regular_ci.high;

    r.passed = ok;
    r.detail = "k=" + std::to_string(plan.k) + " L=" + std::to_string(plan.L) +
               " success=" + fmt(plan.success) + " mc=" + fmt(stats.regular_freq) + " ci=[" +
               fmt(stats.regular_ci.low) + "," + fmt(stats.regular_ci.high) +
               "] analytic=" + fmt(analytic);
    r.seconds = timer.seconds();
    return r;
}

/// Non-singleton hubs: exact per-hub tail replaces the 1/2 approximation;
/// the empirical eight-try success must match the exact analytic value.
CriterionResult hub_threshold_success() {
    Timer timer;
    CriterionResult r;
    r.name = "hub-threshold-success";

    const double direct = analysis::success_probability(0.25, 8);
    bool ok = std::abs(direct - 0.89989) <= 1e-4;

    const double ph_exact = analysis::binomial_pass_prob(18, 12, 2.0 / 3.0);
    const double analytic = analysis::success_probability(ph_exact * ph_exact, 8);

    SystemParams p = SystemParams::with_defaults(180);
    p.q = 18;
    p.t = 12;
    p.k = 2;
    const CorruptionStats stats = harness::monte_carlo_corruption(p, 100000, 0x51AC6B02ull, 8, 0);
    ok = ok && std::abs(stats.regular_freq - analytic) <= 0.02;

    r.passed = ok;
    r.detail = "closed-form=" + fmt(direct, 6) + " exact-tail=" + fmt(ph_exact) +
               " analytic=" + fmt(analytic) + " mc=" + fmt(stats.regular_freq);
    r.seconds = timer.seconds();
    return r;
}

/// Fully corrupted paths must stay below the n^-c budget: the empirical
/// frequency's entire confidence interval sits under the target.
CriterionResult corrupted_path_epsilon() {
    Timer timer;
    CriterionResult r;
    r.name = "corrupted-path-epsilon";

    SystemParams p = SystemParams::with_defaults(200);
    p.q = 1;
    p.t = 1;
    p.k = 11;
    p.c = 1.2;
    p.tau = 2.2;
    p.paths_per_block = 200;
    const CorruptionStats stats =
        harness::monte_carlo_corruption(p, 100000, 0x51AC6B03ull, 0, 200);

    const double epsilon = std::pow(200.0, -1.2);
    const double analytic_union = 200.0 * std::pow(1.0 / 3.0, 11);
    const bool ok = stats.corrupted_ci.high <= epsilon;

    r.passed = ok;
    r.detail = "freq=" + fmt(stats.corrupted_freq) + " ci-high=" +
               fmt(stats.corrupted_ci.high) + " target=" + fmt(epsilon) +
               " union-bound=" + fmt(analytic_union);
    r.seconds = timer.seconds();
    return r;
}

ExperimentConfig manipulation_config() {
    ExperimentConfig cfg;
    cfg.params = SystemParams::with_defaults(40);
    cfg.params.q = 6;
    cfg.params.t = 4;
    cfg.params.k = 2;
    cfg.params.delta_net = 10;
    cfg.params.delta_clock = 1;
    cfg.workload.transactions = 10000;
    cfg.workload.arrival_interval = 5;
    cfg.workload.payload_len = 250;
    cfg.workload.paths_per_tx = 2;
    cfg.adversary.delay = true;
    cfg.adversary.advance_reuse = true;
    cfg.adversary.advance_chain = true;
    cfg.adversary.delay_amount = 100;
    cfg.trials = 50;
    cfg.seed = 0x51AC6B04ull;
    return cfg;
}

/// Timestamp manipulation without forgery: across 50 seeded runs of 10^4
/// transactions, no committed pair separated by more than the bound may
/// appear out of true-time order.
CriterionResult fairness_bounded_manipulation(const RunReport& report) {
    Timer timer;
    CriterionResult r;
    r.name = "fairness-bounded-manipulation";

    std::uint64_t manipulated = 0;
    for (const auto& t : report.trials) manipulated += t.committed_advanced + t.committed_delayed;

    r.passed = report.total_violations == 0 && report.total_pairs_checked > 0 &&
               manipulated > 0 && report.total_committed_txs > 0;
    r.detail = "violations=" + std::to_string(report.total_violations) +
               " pairs=" + std::to_string(report.total_pairs_checked) +
               " manipulated-certs=" + std::to_string(manipulated) +
               " committed=" + std::to_string(report.total_committed_txs);
    r.seconds = timer.seconds();
    return r;
}

/// Canonical timestamps take the earliest committed value: wherever a
/// truthful certificate committed, no committed delayed certificate may
/// undercut the canonical choice.
CriterionResult canonical_earliest_timestamp(const RunReport& report) {
    Timer timer;
    CriterionResult r;
    r.name = "canonical-earliest-timestamp";

    std::uint64_t truthful = 0, delayed = 0;
    for (const auto& t : report.trials) {
        truthful += t.committed_true;
        delayed += t.committed_delayed;
    }
    r.passed =
        report.total_min_rule_counterexamples == 0 && truthful > 0 && delayed > 0;
    r.detail = "counterexamples=" + std::to_string(report.total_min_rule_counterexamples) +
               " truthful-certs=" + std::to_string(truthful) +
               " delayed-certs=" + std::to_string(delayed);
    r.seconds = timer.seconds();
    return r;
}

/// A leader that strips victims' truthful certificates forces ordering
/// violations; the leaderless collector on the same workload has none.
CriterionResult selective_censorship_detection() {
    Timer timer;
    CriterionResult r;
    r.name = "selective-censorship-detection";

    ExperimentConfig cfg;
    cfg.params = SystemParams::with_defaults(40);
    cfg.params.q = 6;
    cfg.params.t = 4;
    cfg.params.k = 2;
    cfg.params.delta_net = 10;
    cfg.params.delta_clock = 1;
    cfg.workload.transactions = 2000;
    cfg.workload.arrival_interval = 5;
    cfg.workload.paths_per_tx = 2;
    cfg.adversary.delay = true;
    cfg.adversary.delay_amount = 200;  // well beyond the separation bound
    cfg.trials = 5;
    cfg.seed = 0x51AC6B06ull;

    const RunReport leaderless = harness::run(cfg);

    // Strip truthful certificates from every other transaction: victims
    // commit far late while bystanders commit on time, so the ledger
    // reorders them past the separation bound.
    cfg.censorship = consensus::CensorshipMode::LeaderCensor;
    cfg.censor_victim_stride = 2;
    const RunReport censored = harness::run(cfg);

    std::uint64_t censored_certs = 0;
    for (const auto& t : censored.trials) censored_certs += t.censored_certs;

    r.passed = leaderless.total_violations == 0 && censored.total_violations > 0 &&
               censored_certs > 0;
    r.detail = "leaderless-violations=" + std::to_string(leaderless.total_violations) +
               " censoring-violations=" + std::to_string(censored.total_violations) +
               " stripped-certs=" + std::to_string(censored_certs);
    r.seconds = timer.seconds();
    return r;
}

/// The exact corrupted-hub tail never exceeds its large-deviation bound,
/// and hub size 20 already pushes the bound under 1/100.
CriterionResult threshold_tail_bounds() {
    Timer timer;
    CriterionResult r;
    r.name = "threshold-tail-bounds";

    bool ok = true;
    double min_gap = 1.0;
    for (std::uint32_t q = 6; q <= 60; ++q) {
        const std::uint32_t t = (2 * q + 2) / 3;  // ceil(2q/3)
        const double exact = analysis::binomial_pass_prob(q, t, 1.0 / 3.0);
        const double bound = analysis::chernoff_pd_bound(q, 2.0 / 3.0, 1.0 / 3.0);
        ok = ok && exact <= bound;
        min_gap = std::min(min_gap, bound - exact);
    }
    const double bound_at_20 = analysis::chernoff_pd_bound(20, 2.0 / 3.0, 1.0 / 3.0);
    ok = ok && bound_at_20 <= 0.01;

    r.passed = ok;
    r.detail = "q=6..60 exact<=bound, min-gap=" + fmt(min_gap) +
               " bound(q=20)=" + fmt(bound_at_20);
    r.seconds = timer.seconds();
    return r;
}

/// Measured traffic equals the counting formulas at every sweep point and
/// the non-payload bytes stay on the log-size line.
CriterionResult traffic_scaling() {
    Timer timer;
    CriterionResult r;
    r.name = "traffic-scaling";

    const auto iter = harness::complexity_sweep({64, 128, 256, 512},
                                                routing::TraversalMode::Iterative, 250,
                                                0x51AC6B08ull);
    const auto rec = harness::complexity_sweep({64, 128, 256, 512},
                                               routing::TraversalMode::Recursive, 250,
                                               0x51AC6B09ull);
    bool ok = iter.r_squared >= 0.99;
    for (const auto& pt : iter.points) ok = ok && pt.exact_match;
    for (const auto& pt : rec.points) ok = ok && pt.exact_match;

    double worst_ratio_slack = 1.0;
    for (std::size_t i = 0; i + 1 < iter.points.size(); ++i) {
        const double ratio =
            iter.points[i + 1].measured_overhead / iter.points[i].measured_overhead;
        const double allowed =
            std::log2(2.0 * iter.points[i].n) / std::log2(double(iter.points[i].n)) + 0.05;
        ok = ok && ratio <= allowed;
        worst_ratio_slack = std::min(worst_ratio_slack, allowed - ratio);
    }

    r.passed = ok;
    r.detail = "exact-points=" + std::to_string(iter.points.size() + rec.points.size()) +
               " r2=" + fmt(iter.r_squared, 6) + " doubling-slack=" + fmt(worst_ratio_slack);
    r.seconds = timer.seconds();
    return r;
}

/// Payload hiding with a terminal decryption hub leaves the adversary no
/// front-running lead; plaintext submission through a corrupted first hub
/// leaves plenty.
CriterionResult payload_hiding_traps() {
    Timer timer;
    CriterionResult r;
    r.name = "payload-hiding-traps";

    SystemParams p = SystemParams::with_defaults(40);
    p.f = 1;
    p.q = 3;
    p.t = 2;
    p.k = 4;
    p.delta_net = 10;
    p.delta_clock = 1;
    const Tick required_lead = 2 * p.delta_net;

    auto build_path = [&](std::uint64_t id) {
        PathSpec path;
        path.path_id = id;
        for (std::uint32_t j = 0; j < p.k; ++j) {
            HubSpec hub;
            hub.hub_index = j;
            for (std::uint32_t s = 0; s < p.q; ++s) hub.members.push_back(j * p.q + s);
            path.hubs.push_back(hub);
        }
        return path;
    };

    auto run_victims = [&](NodeId corrupted_node, bool hidden, std::uint64_t seed,
                           std::uint64_t& feasible, std::uint64_t& completed) {
        KeyedRng rng(seed);
        simnet::ClockModel clock(rng, p.n, p.delta_clock);
        simnet::NetModel net(rng, p.delta_net, 1);
        adversary::AdversaryState adv;
        adv.corrupted.assign(p.n, false);
        adv.corrupted[corrupted_node] = true;
        net.set_colluding(adv.corrupted);

        routing::TraversalContext ctx;
        ctx.params = &p;
        ctx.clock = &clock;
        ctx.net = &net;
        ctx.adv = &adv;
        ctx.reveal.decrypt_hub_indices = {p.k - 1};

        const PathSpec path = build_path(0);
        for (std::uint64_t v = 0; v < 1000; ++v) {
            const Transaction tx = make_transaction(5, v, 200, Tick(v) * 7, hidden);
            const auto out = routing::traverse(ctx, tx, path, tx.submit_time);
            if (!out.completed) continue;
            ++completed;
            const Tick knowledge = out.reveal.adversary_knowledge_time;
            if (knowledge == routing::kNever) continue;
            const auto plan = adversary::plan_sandwich(tx, knowledge, out.cert.locked_ts,
                                                       required_lead, 39, 1000000 + 2 * v);
            if (plan.feasible) ++feasible;
        }
    };

    // hidden payload, decryption confined to the final hub, earlier hubs clean
    std::uint64_t hidden_feasible = 0, hidden_completed = 0;
    run_victims(p.k * p.q - 1, true, 0x51AC6B0Aull, hidden_feasible, hidden_completed);

    // plaintext payload visible to a corrupted member of the first hub
    std::uint64_t plain_feasible = 0, plain_completed = 0;
    run_victims(1, false, 0x51AC6B0Bull, plain_feasible, plain_completed);

    r.passed = hidden_completed == 1000 && hidden_feasible == 0 && plain_completed == 1000 &&
               plain_feasible > 0;
    r.detail = "hidden-feasible=" + std::to_string(hidden_feasible) + "/1000" +
               " plaintext-feasible=" + std::to_string(plain_feasible) + "/1000";
    r.seconds = timer.seconds();
    return r;
}

}  // namespace

bool all_passed(const std::vector<CriterionResult>& results) {
    for (const CriterionResult& r : results)
        if (!r.passed) return false;
    return !results.empty();
}

std::vector<CriterionResult> run_all(std::ostream* progress) {
    std::vector<CriterionResult> results;
    auto record = [&](CriterionResult r) {
        emit(progress, r);
        results.push_back(std::move(r));
    };

    record(singleton_boosting_plan());
    record(hub_threshold_success());
    record(corrupted_path_epsilon());

    {
        Timer shared;
        const RunReport manipulation = harness::run(manipulation_config());
        const double setup = shared.seconds();
        CriterionResult fair = fairness_bounded_manipulation(manipulation);
        fair.seconds += setup;
        record(std::move(fair));
        record(canonical_earliest_timestamp(manipulation));
    }

    record(selective_censorship_detection());
    record(threshold_tail_bounds());
    record(traffic_scaling());
    record(payload_hiding_traps());
    return results;
}

}  // namespace travelers::acceptance

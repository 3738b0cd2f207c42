#include <ostream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "travelers/digest.hpp"
#include "travelers/harness.hpp"

namespace travelers::harness {

namespace {

using nlohmann::json;

const char* mode_name(routing::TraversalMode m) {
    return m == routing::TraversalMode::Iterative ? "iterative" : "recursive";
}

const char* rule_name(routing::ApprovalRule r) {
    switch (r) {
        case routing::ApprovalRule::ThresholdSigner: return "threshold";
        case routing::ApprovalRule::MaxSigner: return "max";
        case routing::ApprovalRule::MedianSigner: return "median";
    }
    return "threshold";
}

json config_json(const ExperimentConfig& cfg) {
    return json{{"n", cfg.params.n},
                {"f", cfg.params.f},
                {"q", cfg.params.q},
                {"t", cfg.params.t},
                {"k", cfg.params.k},
                {"c", cfg.params.c},
                {"tau", cfg.params.tau},
                {"delta_net", cfg.params.delta_net},
                {"delta_clock", cfg.params.delta_clock},
                {"kappa", cfg.params.kappa},
                {"lambda", cfg.params.lambda_bytes},
                {"paths_per_block", cfg.params.paths_per_block},
                {"transactions", cfg.workload.transactions},
                {"arrival_interval", cfg.workload.arrival_interval},
                {"payload_len", cfg.workload.payload_len},
                {"hidden_fraction", cfg.workload.hidden_fraction},
                {"paths_per_tx", cfg.workload.paths_per_tx},
                {"mode", mode_name(cfg.mode)},
                {"rule", rule_name(cfg.rule)},
                {"decrypt_hubs", cfg.reveal.decrypt_hub_indices},
                {"layered", cfg.reveal.layered},
                {"cooperative", cfg.adversary.cooperative},
                {"delay", cfg.adversary.delay},
                {"advance_reuse", cfg.adversary.advance_reuse},
                {"advance_chain", cfg.adversary.advance_chain},
                {"forge", cfg.adversary.forge},
                {"delay_amount", cfg.adversary.delay_amount},
                {"forge_timestamp", cfg.adversary.forge_timestamp},
                {"censorship", consensus::to_string(cfg.censorship)},
                {"censor_per_certificate", cfg.censor_per_certificate},
                {"censor_victim_stride", cfg.censor_victim_stride},
                {"block_interval", cfg.block_interval},
                {"min_delay", cfg.min_delay},
                {"trials", cfg.trials},
                {"seed", cfg.seed},
                {"strict_bft", cfg.strict_bft}};
}

json trial_json(const TrialMetrics& t) {
    return json{{"trial", t.trial},
                {"seed", t.seed},
                {"transactions", t.transactions},
                {"traversals", t.traversals},
                {"completed", t.completed},
                {"stalled", t.stalled},
                {"paths_regular", t.paths_regular},
                {"paths_mixed", t.paths_mixed},
                {"paths_corrupted", t.paths_corrupted},
                {"paths_impasse", t.paths_impasse},
                {"committed_certs", t.committed_certs},
                {"censored_certs", t.censored_certs},
                {"committed_txs", t.committed_txs},
                {"blocks", t.blocks},
                {"committed_true", t.committed_true},
                {"committed_advanced", t.committed_advanced},
                {"committed_delayed", t.committed_delayed},
                {"committed_arbitrary", t.committed_arbitrary},
                {"pairs_checked", t.pairs_checked},
                {"violations", t.violations},
                {"forge_excluded_pairs", t.forge_excluded_pairs},
                {"min_rule_counterexamples", t.min_rule_counterexamples},
                {"messages", t.messages},
                {"payload_bytes", t.payload_bytes},
                {"overhead_bytes", t.overhead_bytes},
                {"latency_p50", t.latency_p50},
                {"latency_p90", t.latency_p90},
                {"latency_max", t.latency_max}};
}

json report_json(const RunReport& r) {
    json trials = json::array();
    for (const TrialMetrics& t : r.trials) trials.push_back(trial_json(t));
    return json{{"config", config_json(r.config)},
                {"aggregate",
                 json{{"total_transactions", r.total_transactions},
                      {"total_committed_txs", r.total_committed_txs},
                      {"commit_rate", r.commit_rate},
                      {"commit_rate_ci_low", r.commit_rate_ci.low},
                      {"commit_rate_ci_high", r.commit_rate_ci.high},
                      {"total_pairs_checked", r.total_pairs_checked},
                      {"total_violations", r.total_violations},
                      {"total_forge_excluded", r.total_forge_excluded},
                      {"total_min_rule_counterexamples", r.total_min_rule_counterexamples},
                      {"mean_bytes_per_tx", r.mean_bytes_per_tx},
                      {"mean_messages_per_tx", r.mean_messages_per_tx},
                      {"latency_p50_mean", r.latency_p50_mean},
                      {"latency_max", r.latency_max}}},
                {"trials", trials}};
}

}  // namespace

void write_report_json(const RunReport& report, std::ostream& out) {
    out << report_json(report).dump(2) << '\n';
}

void write_report_csv(const RunReport& report, std::ostream& out) {
    out << "trial,seed,transactions,traversals,completed,stalled,"
           "paths_regular,paths_mixed,paths_corrupted,paths_impasse,"
           "committed_certs,censored_certs,committed_txs,blocks,"
           "committed_true,committed_advanced,committed_delayed,committed_arbitrary,"
           "pairs_checked,violations,forge_excluded_pairs,min_rule_counterexamples,"
           "messages,payload_bytes,overhead_bytes,latency_p50,latency_p90,latency_max\n";
    for (const TrialMetrics& t : report.trials) {
        out << t.trial << ',' << t.seed << ',' << t.transactions << ',' << t.traversals << ','
            << t.completed << ',' << t.stalled << ',' << t.paths_regular << ',' << t.paths_mixed
            << ',' << t.paths_corrupted << ',' << t.paths_impasse << ',' << t.committed_certs
            << ',' << t.censored_certs << ',' << t.committed_txs << ',' << t.blocks << ','
            << t.committed_true << ',' << t.committed_advanced << ',' << t.committed_delayed
            << ',' << t.committed_arbitrary << ',' << t.pairs_checked << ',' << t.violations
            << ',' << t.forge_excluded_pairs << ',' << t.min_rule_counterexamples << ','
            << t.messages << ',' << t.payload_bytes << ',' << t.overhead_bytes << ','
            << t.latency_p50 << ',' << t.latency_p90 << ',' << t.latency_max << '\n';
    }
}

void write_corruption_json(const CorruptionStats& stats, std::ostream& out) {
    json j{{"trials", stats.trials},
           {"paths_scanned", stats.paths_scanned},
           {"tries_per_client", stats.tries_per_client},
           {"corrupted_hits", stats.corrupted_hits},
           {"regular_hits", stats.regular_hits},
           {"corrupted_freq", stats.corrupted_freq},
           {"regular_freq", stats.regular_freq},
           {"corrupted_ci_low", stats.corrupted_ci.low},
           {"corrupted_ci_high", stats.corrupted_ci.high},
           {"regular_ci_low", stats.regular_ci.low},
           {"regular_ci_high", stats.regular_ci.high}};
    out << j.dump(2) << '\n';
}

void write_complexity_csv(const ComplexitySweep& sweep, std::ostream& out) {
    out << "n,q,k,measured_messages,measured_payload,measured_overhead,"
           "predicted_messages,predicted_payload,predicted_overhead,exact_match,r_squared\n";
    for (const ComplexityPoint& p : sweep.points) {
        out << p.n << ',' << p.q << ',' << p.k << ',' << p.measured_messages << ','
            << p.measured_payload << ',' << p.measured_overhead << ',' << p.predicted_messages
            << ',' << p.predicted_payload << ',' << p.predicted_overhead << ','
            << (p.exact_match ? 1 : 0) << ',' << sweep.r_squared << '\n';
    }
}

std::string report_digest(const RunReport& report) {
    const std::string body = report_json(report).dump();
    return to_hex(sha256(reinterpret_cast<const std::uint8_t*>(body.data()), body.size()));
}

}  // namespace travelers::harness

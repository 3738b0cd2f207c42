#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "travelers/acceptance.hpp"
#include "travelers/analysis.hpp"
#include "travelers/assignment.hpp"
#include "travelers/harness.hpp"

namespace {

using nlohmann::json;
using namespace travelers;

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

std::string trimmed(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string num(double v) { return json(v).dump(); }

json params_json(const SystemParams& p) {
    return json{{"n", p.n},
                {"f", p.f},
                {"q", p.q},
                {"t", p.t},
                {"k", p.k},
                {"c", p.c},
                {"tau", p.tau},
                {"delta_net", p.delta_net},
                {"delta_clock", p.delta_clock},
                {"kappa", p.kappa},
                {"lambda", p.lambda_bytes},
                {"paths_per_block", p.paths_per_block}};
}

// ---------------------------------------------------------------- plan ----

int cmd_plan(const std::string& config_path, const std::string& out_base) {
    const harness::ExperimentConfig cfg = harness::load_config(config_path);
    const SystemParams& p = cfg.params;
    const double p_honest = 1.0 - static_cast<double>(p.f) / p.n;
    const double p_corrupt = static_cast<double>(p.f) / p.n;

    json plan;
    if (p.q == 1) {
        const auto sp = analysis::singleton_plan(p.n, p.c, p_honest, p_corrupt, p.paths_per_block);
        plan = json{{"kind", "singleton"},
                    {"rho", sp.rho},
                    {"tau", sp.tau},
                    {"k", sp.k},
                    {"g_h", sp.g_h},
                    {"g_d", sp.g_d},
                    {"L", sp.L},
                    {"success", sp.success},
                    {"adversary_union_bound", sp.adversary_union_bound},
                    {"epsilon_target", sp.epsilon_target}};
    } else {
        const auto hp = analysis::hub_plan(p.q, p.t, p.k, cfg.workload.paths_per_tx, p_honest,
                                           p_corrupt, p.paths_per_block);
        plan = json{{"kind", "hub"},
                    {"q", hp.q},
                    {"t", hp.t},
                    {"k", hp.k},
                    {"p_h_exact", hp.p_h_exact},
                    {"p_d_exact", hp.p_d_exact},
                    {"p_d_chernoff", hp.p_d_chernoff},
                    {"g_h", hp.g_h},
                    {"g_d", hp.g_d},
                    {"L", hp.L},
                    {"success", hp.success},
                    {"epsilon_bound", hp.epsilon_bound}};
    }

    const auto rows = analysis::complexity_estimates(p.n, cfg.workload.transactions,
                                                     cfg.workload.payload_len, p.lambda_bytes, p.c);
    json complexity = json::array();
    for (const auto& row : rows)
        complexity.push_back(json{{"protocol", row.protocol},
                                  {"submission_bytes_per_tx", row.submission_per_tx},
                                  {"total_bytes", row.total}});

    const json doc{{"params", params_json(p)}, {"plan", plan}, {"complexity", complexity}};
    if (out_base.empty()) {
        std::cout << doc.dump(2) << "\n";
        return 0;
    }
    open_out(out_base + ".json") << doc.dump(2) << "\n";
    auto csv = open_out(out_base + ".csv");
    csv << "protocol,submission_bytes_per_tx,total_bytes\n";
    for (const auto& row : rows)
        csv << row.protocol << "," << num(row.submission_per_tx) << "," << num(row.total) << "\n";
    std::cout << "wrote " << out_base << ".json and " << out_base << ".csv\n";
    return 0;
}

// ------------------------------------------------------------ topology ----

int cmd_topology(const std::string& config_path, std::optional<std::uint64_t> seed,
                 std::uint64_t count, const std::string& out_base) {
    const harness::ExperimentConfig cfg = harness::load_config(config_path);
    const SystemParams& p = cfg.params;
    const std::uint64_t used_seed = seed.value_or(cfg.seed);
    const assignment::BlockRandomness rand = assignment::make_randomness(0, used_seed);

    std::uint64_t limit = p.paths_per_block;
    if (count > 0 && count < limit) limit = count;

    json paths = json::array();
    std::ostringstream csv_rows;
    for (std::uint64_t id = 0; id < limit; ++id) {
        const PathSpec path = assignment::derive_path(id, rand, p);
        json hubs = json::array();
        for (const HubSpec& hub : path.hubs) {
            hubs.push_back(json{{"hub_index", hub.hub_index}, {"members", hub.members}});
            for (std::size_t slot = 0; slot < hub.members.size(); ++slot)
                csv_rows << id << "," << hub.hub_index << "," << slot << ","
                         << hub.members[slot] << "\n";
        }
        paths.push_back(json{{"path_id", id}, {"hubs", hubs}});
    }

    const json doc{{"block", 0},      {"seed", used_seed},
                   {"n", p.n},        {"q", p.q},
                   {"k", p.k},        {"paths_per_block", p.paths_per_block},
                   {"paths", paths}};
    if (out_base.empty()) {
        std::cout << doc.dump(2) << "\n";
        return 0;
    }
    open_out(out_base + ".json") << doc.dump(2) << "\n";
    auto csv = open_out(out_base + ".csv");
    csv << "path_id,hub_index,slot,node\n" << csv_rows.str();
    std::cout << "wrote " << limit << " paths to " << out_base << ".json and " << out_base
              << ".csv\n";
    return 0;
}

// ----------------------------------------------------------------- run ----

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            std::optional<std::uint64_t> trials, const std::string& out_base,
            const std::string& trace_path) {
    harness::ExperimentConfig cfg = harness::load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (trials) cfg.trials = *trials;

    std::ofstream trace;
    std::ostream* trace_out = nullptr;
    if (!trace_path.empty()) {
        trace = open_out(trace_path);
        trace_out = &trace;
    }

    const harness::RunReport report = harness::run(cfg, trace_out);
    if (out_base.empty()) {
        harness::write_report_json(report, std::cout);
        return 0;
    }
    auto js = open_out(out_base + ".json");
    harness::write_report_json(report, js);
    auto csv = open_out(out_base + ".csv");
    harness::write_report_csv(report, csv);
    std::cout << "trials=" << report.trials.size() << " transactions=" << report.total_transactions
              << " committed=" << report.total_committed_txs
              << " commit_rate=" << num(report.commit_rate)
              << " violations=" << report.total_violations
              << " digest=" << harness::report_digest(report) << "\n";
    return 0;
}

// --------------------------------------------------------------- sweep ----

struct VarySpec {
    std::string key;
    std::vector<std::string> values;
};

VarySpec parse_vary(const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw std::runtime_error("--vary wants key=v1,v2,...: " + spec);
    VarySpec v;
    v.key = trimmed(spec.substr(0, eq));
    std::string rest = spec.substr(eq + 1);
    std::istringstream in(rest);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trimmed(item);
        if (!item.empty()) v.values.push_back(item);
    }
    if (v.key.empty() || v.values.empty())
        throw std::runtime_error("--vary wants key=v1,v2,...: " + spec);
    return v;
}

/// Drops every config line that assigns one of the given keys so the
/// override appended afterwards is the single definition the parser sees.
std::string strip_keys(const std::string& text, const std::set<std::string>& keys) {
    std::istringstream in(text);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        const std::string code = line.substr(0, line.find('#'));
        const auto eq = code.find('=');
        if (eq != std::string::npos && keys.count(trimmed(code.substr(0, eq)))) continue;
        out << line << '\n';
    }
    return out.str();
}

int cmd_sweep(const std::string& config_path, const std::vector<std::string>& vary_specs,
              std::optional<std::uint64_t> seed, std::optional<std::uint64_t> trials,
              const std::string& out_base) {
    const std::string base_text = slurp(config_path);

    std::vector<VarySpec> vary;
    std::set<std::string> keys;
    for (const auto& s : vary_specs) {
        VarySpec v = parse_vary(s);
        if (!keys.insert(v.key).second) throw std::runtime_error("--vary repeats key " + v.key);
        vary.push_back(std::move(v));
    }
    std::vector<std::pair<std::string, std::string>> fixed;
    if (seed) fixed.emplace_back("seed", std::to_string(*seed));
    if (trials) fixed.emplace_back("trials", std::to_string(*trials));
    for (const auto& [key, value] : fixed) keys.insert(key);

    std::uint64_t combos = 1;
    for (const auto& v : vary) combos *= v.values.size();

    const std::string stripped = strip_keys(base_text, keys);
    std::ostringstream csv;
    for (const auto& v : vary) csv << v.key << ",";
    csv << "transactions,committed_txs,commit_rate,ci_low,ci_high,pairs_checked,violations,"
           "forge_excluded,min_rule_counterexamples,mean_bytes_per_tx,mean_messages_per_tx,"
           "latency_p50_mean,latency_max,digest\n";
    json runs = json::array();

    std::vector<std::size_t> index(vary.size(), 0);
    for (std::uint64_t combo = 0; combo < combos; ++combo) {
        std::ostringstream text;
        text << stripped;
        json overrides;
        for (std::size_t i = 0; i < vary.size(); ++i) {
            text << vary[i].key << " = " << vary[i].values[index[i]] << "\n";
            overrides[vary[i].key] = vary[i].values[index[i]];
        }
        for (const auto& [key, value] : fixed) {
            text << key << " = " << value << "\n";
            overrides[key] = value;
        }

        std::istringstream in(text.str());
        const harness::ExperimentConfig cfg = harness::parse_config(in);
        const harness::RunReport report = harness::run(cfg);

        std::cerr << "[" << combo + 1 << "/" << combos << "]";
        for (std::size_t i = 0; i < vary.size(); ++i)
            std::cerr << " " << vary[i].key << "=" << vary[i].values[index[i]];
        std::cerr << " commit_rate=" << num(report.commit_rate)
                  << " violations=" << report.total_violations << "\n";

        for (std::size_t i = 0; i < vary.size(); ++i) csv << vary[i].values[index[i]] << ",";
        csv << report.total_transactions << "," << report.total_committed_txs << ","
            << num(report.commit_rate) << "," << num(report.commit_rate_ci.low) << ","
            << num(report.commit_rate_ci.high) << "," << report.total_pairs_checked << ","
            << report.total_violations << "," << report.total_forge_excluded << ","
            << report.total_min_rule_counterexamples << "," << num(report.mean_bytes_per_tx)
            << "," << num(report.mean_messages_per_tx) << "," << num(report.latency_p50_mean)
            << "," << report.latency_max << "," << harness::report_digest(report) << "\n";

        std::ostringstream rep;
        harness::write_report_json(report, rep);
        runs.push_back(json{{"overrides", overrides}, {"report", json::parse(rep.str())}});

        for (std::size_t i = vary.size(); i-- > 0;) {
            if (++index[i] < vary[i].values.size()) break;
            index[i] = 0;
        }
    }

    if (out_base.empty()) {
        std::cout << csv.str();
        return 0;
    }
    open_out(out_base + ".csv") << csv.str();
    open_out(out_base + ".json") << json{{"runs", runs}}.dump(2) << "\n";
    std::cout << "wrote " << combos << " runs to " << out_base << ".json and " << out_base
              << ".csv\n";
    return 0;
}

// -------------------------------------------------------------- verify ----

int cmd_verify() {
    const auto results = acceptance::run_all(&std::cout);
    std::size_t passed = 0;
    for (const auto& r : results) passed += r.passed ? 1 : 0;
    std::cout << passed << "/" << results.size() << " criteria passed\n";
    return acceptance::all_passed(results) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic simulator and analysis toolkit for probabilistic fair ordering"};
    app.require_subcommand(1);
    app.add_flag_callback(
        "--config-schema",
        [] {
            std::cout << harness::config_schema();
            std::exit(0);
        },
        "print the experiment config file schema and exit");

    std::string config_path, out_base, trace_path;
    std::optional<std::uint64_t> seed, trials;
    std::uint64_t count = 0;
    std::vector<std::string> vary_specs;

    auto* plan = app.add_subcommand("plan", "evaluate the closed-form operating-point plan");
    plan->add_option("--config", config_path, "experiment config file")
        ->required()
        ->check(CLI::ExistingFile);
    plan->add_option("--out", out_base, "output base path (writes <base>.json and <base>.csv)");

    auto* topology = app.add_subcommand("topology", "dump the per-block path table");
    topology->add_option("--config", config_path, "experiment config file")
        ->required()
        ->check(CLI::ExistingFile);
    topology->add_option("--seed", seed, "block randomness seed (default: config seed)");
    topology->add_option("--count", count, "limit to the first N paths (0 = all)");
    topology->add_option("--out", out_base, "output base path (writes <base>.json and <base>.csv)");

    auto* run = app.add_subcommand("run", "run one experiment and write its report");
    run->add_option("--config", config_path, "experiment config file")
        ->required()
        ->check(CLI::ExistingFile);
    run->add_option("--seed", seed, "override the config seed");
    run->add_option("--trials", trials, "override the config trial count");
    run->add_option("--out", out_base,
                    "output base path (writes <base>.json and <base>.csv; default: JSON to stdout)");
    run->add_option("--trace", trace_path, "write a JSONL event trace to this file");

    auto* sweep = app.add_subcommand("sweep", "run a grid of experiments over config overrides");
    sweep->add_option("--config", config_path, "base experiment config file")
        ->required()
        ->check(CLI::ExistingFile);
    sweep
        ->add_option("--vary", vary_specs,
                     "key=v1,v2,... config override grid (repeatable; cartesian product)")
        ->required();
    sweep->add_option("--seed", seed, "fix the seed across all grid points");
    sweep->add_option("--trials", trials, "fix the trial count across all grid points");
    sweep->add_option("--out", out_base,
                      "output base path (writes <base>.json and <base>.csv; default: CSV to stdout)");

    auto* verify =
        app.add_subcommand("verify", "run the acceptance checklist and report pass/fail");
    (void)verify;

    CLI11_PARSE(app, argc, argv);

    try {
        if (*plan) return cmd_plan(config_path, out_base);
        if (*topology) return cmd_topology(config_path, seed, count, out_base);
        if (*run) return cmd_run(config_path, seed, trials, out_base, trace_path);
        if (*sweep) return cmd_sweep(config_path, vary_specs, seed, trials, out_base);
        if (*verify) return cmd_verify();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

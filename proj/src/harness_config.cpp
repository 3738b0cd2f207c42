#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "travelers/harness.hpp"

namespace travelers::harness {

namespace {

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw std::invalid_argument("config: " + key + " expects a boolean, got '" + value + "'");
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        unsigned long long v = std::stoull(value, &used, 0);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: " + key + " expects an unsigned integer, got '" +
                                    value + "'");
    }
}

Tick parse_tick(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        long long v = std::stoll(value, &used, 0);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: " + key + " expects an integer, got '" + value + "'");
    }
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: " + key + " expects a number, got '" + value + "'");
    }
}

std::vector<std::uint32_t> parse_u32_list(const std::string& key, const std::string& value) {
    std::vector<std::uint32_t> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(static_cast<std::uint32_t>(parse_u64(key, item)));
    }
    return out;
}

routing::TraversalMode parse_mode(const std::string& value) {
    if (value == "iterative") return routing::TraversalMode::Iterative;
    if (value == "recursive") return routing::TraversalMode::Recursive;
    throw std::invalid_argument("config: mode must be iterative|recursive, got '" + value + "'");
}

routing::ApprovalRule parse_rule(const std::string& value) {
    if (value == "threshold") return routing::ApprovalRule::ThresholdSigner;
    if (value == "max") return routing::ApprovalRule::MaxSigner;
    if (value == "median") return routing::ApprovalRule::MedianSigner;
    throw std::invalid_argument("config: rule must be threshold|max|median, got '" + value + "'");
}

consensus::CensorshipMode parse_censorship(const std::string& value) {
    if (value == "leaderless-cr") return consensus::CensorshipMode::LeaderlessCR;
    if (value == "probabilistic-kappa") return consensus::CensorshipMode::ProbabilisticKappa;
    if (value == "leader-censor") return consensus::CensorshipMode::LeaderCensor;
    throw std::invalid_argument(
        "config: censorship must be leaderless-cr|probabilistic-kappa|leader-censor, got '" +
        value + "'");
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " is not 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " has an empty key or value");
        if (!kv.emplace(key, value).second)
            throw std::invalid_argument("config: duplicate key '" + key + "'");
    }

    ExperimentConfig cfg;
    // Size first: n resets the dependent defaults (f, paths_per_block)
    // before the remaining keys override them.
    if (auto it = kv.find("n"); it != kv.end())
        cfg.params = SystemParams::with_defaults(
            static_cast<std::uint32_t>(parse_u64("n", it->second)));

    for (const auto& [key, value] : kv) {
        if (key == "n") {
            // handled above
        } else if (key == "f") {
            cfg.params.f = static_cast<std::uint32_t>(parse_u64(key, value));
        } else if (key == "q") {
            cfg.params.q = static_cast<std::uint32_t>(parse_u64(key, value));
        } else if (key == "t") {
            cfg.params.t = static_cast<std::uint32_t>(parse_u64(key, value));
        } else if (key == "k") {
            cfg.params.k = static_cast<std::uint32_t>(parse_u64(key, value));
        } else if (key == "c") {
            cfg.params.c = parse_double(key, value);
        } else if (key == "tau") {
            cfg.params.tau = parse_double(key, value);
        } else if (key == "delta_net") {
            cfg.params.delta_net = parse_tick(key, value);
        } else if (key == "delta_clock") {
            cfg.params.delta_clock = parse_tick(key, value);
        } else if (key == "kappa") {
            cfg.params.kappa = parse_double(key, value);
        } else if (key == "lambda") {
            cfg.params.lambda_bytes = static_cast<std::uint32_t>(parse_u64(key, value));
        } else if (key == "paths_per_block") {
            cfg.params.paths_per_block = parse_u64(key, value);
        } else if (key == "transactions") {
            cfg.workload.transactions = parse_u64(key, value);
        } else if (key == "arrival_interval") {
            cfg.workload.arrival_interval = parse_tick(key, value);
        } else if (key == "payload_len") {
            cfg.workload.payload_len = parse_u64(key, value);
        } else if (key == "hidden_fraction") {
            cfg.workload.hidden_fraction = parse_double(key, value);
        } else if (key == "paths_per_tx") {
            cfg.workload.paths_per_tx = parse_u64(key, value);
        } else if (key == "mode") {
            cfg.mode = parse_mode(value);
        } else if (key == "rule") {
            cfg.rule = parse_rule(value);
        } else if (key == "decrypt_hubs") {
            cfg.reveal.decrypt_hub_indices = parse_u32_list(key, value);
        } else if (key == "layered") {
            cfg.reveal.layered = parse_bool(key, value);
        } else if (key == "cooperative") {
            cfg.adversary.cooperative = parse_bool(key, value);
        } else if (key == "delay") {
            cfg.adversary.delay = parse_bool(key, value);
        } else if (key == "advance_reuse") {
            cfg.adversary.advance_reuse = parse_bool(key, value);
        } else if (key == "advance_chain") {
            cfg.adversary.advance_chain = parse_bool(key, value);
        } else if (key == "forge") {
            cfg.adversary.forge = parse_bool(key, value);
        } else if (key == "delay_amount") {
            cfg.adversary.delay_amount = parse_tick(key, value);
        } else if (key == "forge_timestamp") {
            cfg.adversary.forge_timestamp = parse_tick(key, value);
        } else if (key == "censorship") {
            cfg.censorship = parse_censorship(value);
        } else if (key == "censor_per_certificate") {
            cfg.censor_per_certificate = parse_bool(key, value);
        } else if (key == "censor_victim_stride") {
            cfg.censor_victim_stride = parse_u64(key, value);
        } else if (key == "block_interval") {
            cfg.block_interval = parse_tick(key, value);
        } else if (key == "min_delay") {
            cfg.min_delay = parse_tick(key, value);
        } else if (key == "trials") {
            cfg.trials = parse_u64(key, value);
        } else if (key == "seed") {
            cfg.seed = parse_u64(key, value);
        } else if (key == "strict_bft") {
            cfg.strict_bft = parse_bool(key, value);
        } else {
            throw std::invalid_argument("config: unknown key '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
    return parse_config(in);
}

void ExperimentConfig::validate() const {
    params.validate(strict_bft);
    if (workload.arrival_interval < 0)
        throw std::invalid_argument("config: arrival_interval must be >= 0");
    if (workload.hidden_fraction < 0.0 || workload.hidden_fraction > 1.0)
        throw std::invalid_argument("config: hidden_fraction in [0,1]");
    if (workload.paths_per_tx == 0)
        throw std::invalid_argument("config: paths_per_tx must be >= 1");
    if (workload.hidden_fraction > 0.0) {
        for (std::uint32_t idx : reveal.decrypt_hub_indices)
            if (idx >= params.k)
                throw std::invalid_argument("config: decrypt hub index out of range");
    }
    if (min_delay < 0 || min_delay > params.delta_net)
        throw std::invalid_argument("config: min_delay in [0, delta_net]");
    if (block_interval < 0) throw std::invalid_argument("config: block_interval must be >= 0");
    if (trials == 0) throw std::invalid_argument("config: trials must be >= 1");
    if (censor_victim_stride != 0 && censorship != consensus::CensorshipMode::LeaderCensor)
        throw std::invalid_argument("config: censor_victim_stride needs censorship=leader-censor");
    if (censorship == consensus::CensorshipMode::LeaderCensor && censor_victim_stride == 0)
        throw std::invalid_argument("config: leader-censor needs censor_victim_stride >= 1");
}

const char* config_schema() {
    return R"(# Experiment config: one `key = value` per line, `#` starts a comment.
# Unknown keys are rejected. All keys are optional; defaults in brackets.
#
# System size and protocol shape
#   n                 total node count (also resets f = n/3, paths_per_block = n) [16]
#   f                 corrupted node count [n/3]
#   q                 hub size [1]
#   t                 per-hub approval threshold, must satisfy 2t > q [1]
#   k                 path length in hubs [1]
#   c                 error exponent (epsilon = n^-c) [1.0]
#   tau               boosting exponent [2.0]
#   delta_net         network delay bound in ticks [10]
#   delta_clock       per-node clock skew bound in ticks [0]
#   kappa             per-transaction censorship probability [0.0]
#   lambda            signature/digest size in bytes [32]
#   paths_per_block   admissible paths per block [n]
#
# Workload
#   transactions      number of submitted transactions [0]
#   arrival_interval  ticks between consecutive submissions [5]
#   payload_len       payload bytes per transaction [250]
#   hidden_fraction   fraction of transactions with encrypted payloads [0.0]
#   paths_per_tx      distinct paths each client tries [1]
#
# Traversal
#   mode              iterative | recursive [iterative]
#   rule              threshold | max | median approval stamping [threshold]
#   decrypt_hubs      comma-separated hub positions able to decrypt [k-1]
#   layered           onion-wrap so only the last listed hub decrypts [false]
#
# Adversary (statically corrupted f nodes)
#   cooperative       corrupted nodes follow the protocol when unscripted [true]
#   delay             enable the signature-withholding delay tactic [false]
#   advance_reuse     enable timestamp reuse by a corrupted suffix [false]
#   advance_chain     enable chain stamping by consecutive corrupted hubs [false]
#   forge             enable certificate fabrication on owned paths [false]
#   delay_amount      ticks added by the delay tactic [100]
#   forge_timestamp   timestamp written into fabricated certificates [0]
#
# Consensus
#   censorship            leaderless-cr | probabilistic-kappa | leader-censor [leaderless-cr]
#   censor_per_certificate  drop certificates independently instead of per tx [false]
#   censor_victim_stride    with leader-censor: every stride-th tx is targeted [0]
#   block_interval          block close cadence in ticks, 0 = one block per trial [0]
#
# Run control
#   min_delay         lower bound for honest link delays [1]
#   trials            independent trials (per-trial derived seeds) [1]
#   seed              root seed [1]
#   strict_bft        enforce n >= 3f+1 [true]
)";
}

}  // namespace travelers::harness

#include "travelers/types.hpp"

#include "travelers/digest.hpp"

namespace travelers {

std::string to_hex(const Digest& d) {
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(64);
    for (std::uint8_t b : d) {
        out.push_back(hex[b >> 4]);
        out.push_back(hex[b & 0xf]);
    }
    return out;
}

SystemParams SystemParams::with_defaults(std::uint32_t n) {
    SystemParams p;
    p.n = n;
    p.f = n / 3;
    p.paths_per_block = n;
    return p;
}

void SystemParams::validate(bool strict_bft) const {
    if (n == 0) throw std::invalid_argument("params: n must be positive");
    if (q == 0) throw std::invalid_argument("params: q must be >= 1");
    if (q > n) throw std::invalid_argument("params: q cannot exceed n");
    if (t == 0 || t > q) throw std::invalid_argument("params: t must be in [1, q]");
    if (2 * t <= q) throw std::invalid_argument("params: t > q/2 required (precludes Both hubs)");
    if (k == 0) throw std::invalid_argument("params: k must be >= 1");
    if (kappa < 0.0 || kappa > 1.0) throw std::invalid_argument("params: kappa in [0,1]");
    if (f >= n && n > 0 && f != 0) throw std::invalid_argument("params: f must be < n");
    if (strict_bft && n < 3ull * f + 1)
        throw std::invalid_argument("params: n >= 3f+1 violated (set strict_bft=false to stress)");
}

Transaction make_transaction(std::uint32_t client, std::uint64_t sequence,
                             std::uint64_t payload_len, Tick submit_time, bool hidden) {
    if (payload_len == 0) throw std::invalid_argument("transaction: payload_len must be positive");
    Transaction tx;
    tx.id = TupleHasher("travelers/tx/v1")
                .add_u64(client)
                .add_u64(sequence)
                .add_u64(payload_len)
                .finalize();
    tx.payload_len = payload_len;
    tx.submit_time = submit_time;
    tx.client = client;
    tx.hidden = hidden;
    return tx;
}

const char* to_string(TimestampKind k) {
    switch (k) {
        case TimestampKind::True: return "true";
        case TimestampKind::Advanced: return "advanced";
        case TimestampKind::Delayed: return "delayed";
        case TimestampKind::Arbitrary: return "arbitrary";
    }
    return "?";
}

const char* to_string(HubType t) {
    switch (t) {
        case HubType::Regular: return "regular";
        case HubType::Impasse: return "impasse";
        case HubType::Both: return "both";
        case HubType::Corrupted: return "corrupted";
    }
    return "?";
}

HubType classify_hub(std::uint32_t honest_count, std::uint32_t malicious_count,
                     std::uint32_t t) {
    const bool honest_pass = honest_count >= t;
    const bool malicious_pass = malicious_count >= t;
    if (honest_pass && malicious_pass) return HubType::Both;
    if (honest_pass) return HubType::Regular;
    if (malicious_pass) return HubType::Corrupted;
    return HubType::Impasse;
}

Tick locked_timestamp(const Certificate& cert, std::uint32_t expected_k) {
    if (cert.approvals.empty())
        throw IncompleteCertificateError("certificate has no approvals");
    if (expected_k != 0 && cert.approvals.size() != expected_k)
        throw IncompleteCertificateError("certificate is missing approvals");
    Tick max_ts = cert.approvals.front().timestamp;
    for (std::size_t j = 0; j < cert.approvals.size(); ++j) {
        if (cert.approvals[j].hub_index != j)
            throw IncompleteCertificateError("approvals out of order");
        if (cert.approvals[j].timestamp > max_ts) max_ts = cert.approvals[j].timestamp;
    }
    return max_ts;
}

}  // namespace travelers

#include "travelers/assignment.hpp"

#include <algorithm>
#include <stdexcept>

#include "travelers/digest.hpp"

namespace travelers::assignment {

namespace {

constexpr std::uint64_t kZeroSlotSalt = 0x5eedu;  // retry base when member_index == 0
constexpr std::uint32_t kMaxHashAttempts = 4096;

Digest member_digest(std::uint64_t path_id, std::uint32_t hub_index, std::uint64_t multiplier,
                     const BlockRandomness& rand) {
    TupleHasher h("travelers/hub-member/v1");
    h.add_u64(path_id);
    h.add_u64(hub_index);
    h.add_u64(multiplier);
    h.add_u64(rand.block);
    h.add_digest(rand.seed);
    return h.finalize();
}

}  // namespace

BlockRandomness make_randomness(std::uint64_t block, std::uint64_t seed_value) {
    TupleHasher h("travelers/block-seed/v1");
    h.add_u64(block);
    h.add_u64(seed_value);
    return BlockRandomness{block, h.finalize()};
}

NodeId hub_member(std::uint64_t path_id, std::uint32_t hub_index, std::uint32_t member_index,
                  const BlockRandomness& rand, std::uint32_t n,
                  const std::vector<NodeId>& taken) {
    if (n == 0) throw std::invalid_argument("hub_member: n must be positive");
    if (taken.size() >= n) throw std::invalid_argument("hub_member: hub larger than node set");

    auto is_taken = [&](NodeId v) {
        return std::find(taken.begin(), taken.end(), v) != taken.end();
    };

    // Attempt 1 hashes the slot index itself; attempt i >= 2 hashes i*base
    // so successive probes stay distinct even for slot 0.
    const std::uint64_t base = member_index == 0 ? kZeroSlotSalt : member_index;
    std::uint64_t multiplier = member_index;
    for (std::uint32_t attempt = 1; attempt <= kMaxHashAttempts; ++attempt) {
        if (attempt >= 2) multiplier = static_cast<std::uint64_t>(attempt) * base;
        const Digest d = member_digest(path_id, hub_index, multiplier, rand);
        const auto candidate = static_cast<NodeId>(digest_mod(d, n));
        if (!is_taken(candidate)) return candidate;
    }

    // Deterministic fallback: linear probe from the last hashed candidate.
    // Unreachable in practice (q << n); kept so derivation always terminates.
    const Digest d = member_digest(path_id, hub_index, multiplier, rand);
    auto candidate = static_cast<NodeId>(digest_mod(d, n));
    for (std::uint32_t step = 0; step < n; ++step) {
        candidate = static_cast<NodeId>((candidate + 1) % n);
        if (!is_taken(candidate)) return candidate;
    }
    throw std::logic_error("hub_member: no free node");
}

std::vector<NodeId> derive_hub(std::uint64_t path_id, std::uint32_t hub_index,
                               const BlockRandomness& rand, std::uint32_t n, std::uint32_t q) {
    std::vector<NodeId> members;
    members.reserve(q);
    for (std::uint32_t m = 0; m < q; ++m) {
        members.push_back(hub_member(path_id, hub_index, m, rand, n, members));
    }
    return members;
}

PathSpec derive_path(std::uint64_t path_id, const BlockRandomness& rand,
                     const SystemParams& params, const DecryptionSet* decryption) {
    PathSpec path;
    path.path_id = path_id;
    path.block = rand.block;
    path.hubs.reserve(params.k);
    for (std::uint32_t j = 0; j < params.k; ++j) {
        path.hubs.push_back(HubSpec{derive_hub(path_id, j, rand, params.n, params.q), j});
    }
    if (decryption != nullptr && !decryption->hubs.empty()) {
        TupleHasher h("travelers/decryption-hub/v1");
        h.add_u64(path_id);
        h.add_u64(rand.block);
        h.add_digest(rand.seed);
        const auto pick = digest_mod(h.finalize(), decryption->hubs.size());
        path.hubs.back().members = decryption->hubs[static_cast<std::size_t>(pick)];
    }
    return path;
}

std::vector<PathSpec> enumerate_paths(const BlockRandomness& rand, const SystemParams& params,
                                      const DecryptionSet* decryption) {
    std::vector<PathSpec> paths;
    const std::uint64_t count = params.paths_per_block;
    paths.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        paths.push_back(derive_path(i, rand, params, decryption));
    }
    return paths;
}

bool verify_membership(NodeId node, std::uint64_t path_id, std::uint32_t hub_index,
                       const BlockRandomness& rand, const SystemParams& params,
                       const DecryptionSet* decryption) {
    if (hub_index >= params.k) return false;
    const PathSpec path = derive_path(path_id, rand, params, decryption);
    const auto& members = path.hubs[hub_index].members;
    return std::find(members.begin(), members.end(), node) != members.end();
}

}  // namespace travelers::assignment

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "travelers/types.hpp"

namespace travelers::assignment {

/// Per-block public randomness; identical on every node.
struct BlockRandomness {
    std::uint64_t block = 0;
    Digest seed{};
};

BlockRandomness make_randomness(std::uint64_t block, std::uint64_t seed_value);

/// Optional small-hub decryption set. When configured, the last hub of
/// every path is replaced by one of these hubs (selected by digest), so
/// each path ends in a hub capable of revealing encrypted payloads.
struct DecryptionSet {
    std::vector<std::vector<NodeId>> hubs;
};

/// Member m of hub j on path path_id, derived from the public randomness.
///
/// Derivation: SHA-256 of the length-prefixed tuple
///   ("travelers/hub-member/v1", path_id, j, multiplier, block, seed)
/// reduced mod n, where the first attempt uses multiplier = m and attempt
/// i >= 2 uses multiplier = i*m (m = 0 multiplies degenerately and is
/// mapped to a fixed nonzero salt on retries). Attempts repeat until the
/// candidate differs from every already-selected member of the same hub,
/// which is why the q members of a hub are derived in slot order.
NodeId hub_member(std::uint64_t path_id, std::uint32_t hub_index, std::uint32_t member_index,
                  const BlockRandomness& rand, std::uint32_t n,
                  const std::vector<NodeId>& taken);

/// All q distinct members of hub j on a path.
std::vector<NodeId> derive_hub(std::uint64_t path_id, std::uint32_t hub_index,
                               const BlockRandomness& rand, std::uint32_t n, std::uint32_t q);

/// Full path of k hubs. Hubs are sampled independently, so distinct hubs
/// of one path may overlap in membership.
PathSpec derive_path(std::uint64_t path_id, const BlockRandomness& rand,
                     const SystemParams& params,
                     const DecryptionSet* decryption = nullptr);

/// The complete per-block path table, ordered by path_id.
std::vector<PathSpec> enumerate_paths(const BlockRandomness& rand, const SystemParams& params,
                                      const DecryptionSet* decryption = nullptr);

/// True iff recomputation places the node in that hub.
bool verify_membership(NodeId node, std::uint64_t path_id, std::uint32_t hub_index,
                       const BlockRandomness& rand, const SystemParams& params,
                       const DecryptionSet* decryption = nullptr);

}  // namespace travelers::assignment

#include "travelers/consensus.hpp"

#include <algorithm>
#include <limits>

#include "travelers/digest.hpp"
#include "travelers/routing.hpp"

namespace travelers::consensus {

namespace {
// Resolution of the censorship coin; 2^53 keeps the quantisation error of
// kappa far below anything the acceptance tolerances can see.
constexpr std::uint64_t kCoinRange = 1ull << 53;
}  // namespace

const char* to_string(CensorshipMode m) {
    switch (m) {
        case CensorshipMode::LeaderlessCR: return "leaderless-cr";
        case CensorshipMode::ProbabilisticKappa: return "probabilistic-kappa";
        case CensorshipMode::LeaderCensor: return "leader-censor";
    }
    return "?";
}

Tick place_late_timestamp(Tick locked_ts, Tick window_min) {
    return std::max(locked_ts, window_min);
}

Sequencer::Sequencer(const SystemParams& params, const assignment::BlockRandomness& rand,
                     CensorshipModel model, const KeyedRng& rng,
                     const assignment::DecryptionSet* decryption)
    : params_(params),
      rand_(rand),
      model_(std::move(model)),
      rng_(&rng),
      decryption_(decryption),
      boundary_(std::numeric_limits<Tick>::min()) {}

CollectResult Sequencer::collect(const Delivered& delivered) {
    if (!routing::verify_certificate(delivered.cert, rand_, params_, decryption_)) {
        ++rejected_;
        return CollectResult::Rejected;
    }
    const auto key = std::make_pair(delivered.cert.tx, delivered.cert.path_id);
    if (!seen_.insert(key).second) {
        ++duplicates_;
        return CollectResult::Duplicate;
    }
    ++accepted_;
    queue_.push_back(delivered);
    return CollectResult::Accepted;
}

bool Sequencer::censors(const Delivered& d) const {
    switch (model_.mode) {
        case CensorshipMode::LeaderlessCR:
            return false;
        case CensorshipMode::ProbabilisticKappa: {
            if (model_.kappa <= 0.0) return false;
            if (model_.kappa >= 1.0) return true;
            const auto threshold = static_cast<std::uint64_t>(model_.kappa * kCoinRange);
            const std::uint64_t tx64 = digest_low64(d.cert.tx);
            const std::uint64_t coin =
                model_.per_certificate
                    ? rng_->uniform(Stream::Censorship, {tx64, d.cert.path_id}, kCoinRange)
                    : rng_->uniform(Stream::Censorship, {tx64}, kCoinRange);
            return coin < threshold;
        }
        case CensorshipMode::LeaderCensor:
            return model_.targets.count({d.cert.tx, d.cert.path_id}) > 0;
    }
    return false;
}

const Block& Sequencer::form_block(Tick close_time) {
    Block block;
    block.number = chain_.size();
    block.close_time = close_time;
    block.min_ts = boundary_;
    block.max_ts = boundary_;
    for (const Delivered& d : queue_) {
        if (censors(d)) {
            ++censored_;
            continue;
        }
        CommittedCertificate c;
        c.cert = d.cert;
        c.delivery_time = d.delivery_time;
        c.raw_locked = d.cert.locked_ts;
        c.effective_ts = place_late_timestamp(d.cert.locked_ts, block.min_ts);
        c.late_placed = c.effective_ts != c.raw_locked;
        c.kind = d.kind;
        c.regular_path = d.regular_path;
        block.max_ts = std::max(block.max_ts, c.effective_ts);
        block.certs.push_back(std::move(c));
    }
    queue_.clear();
    boundary_ = block.max_ts;
    chain_.push_back(std::move(block));
    return chain_.back();
}

}  // namespace travelers::consensus

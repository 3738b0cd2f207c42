#include "travelers/digest.hpp"

#include <openssl/evp.h>

#include <cstring>
#include <memory>
#include <stdexcept>

namespace travelers {

namespace {

struct CtxDeleter {
    void operator()(EVP_MD_CTX* c) const { EVP_MD_CTX_free(c); }
};

EVP_MD_CTX* thread_ctx() {
    thread_local std::unique_ptr<EVP_MD_CTX, CtxDeleter> ctx(EVP_MD_CTX_new());
    return ctx.get();
}

void put_u32_le(std::vector<std::uint8_t>& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

}  // namespace

Digest sha256(const std::uint8_t* data, std::size_t len) {
    Digest out{};
    unsigned int out_len = 32;
    EVP_MD_CTX* ctx = thread_ctx();
    if (EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx, data, len) != 1 ||
        EVP_DigestFinal_ex(ctx, out.data(), &out_len) != 1) {
        throw std::runtime_error("sha256 failed");
    }
    return out;
}

TupleHasher::TupleHasher(std::string_view tag) {
    buf_.reserve(96);
    put_u32_le(buf_, static_cast<std::uint32_t>(tag.size()));
    buf_.insert(buf_.end(), tag.begin(), tag.end());
}

TupleHasher& TupleHasher::add_u64(std::uint64_t v) {
    put_u32_le(buf_, 8);
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    return *this;
}

TupleHasher& TupleHasher::add_bytes(const std::uint8_t* data, std::size_t len) {
    put_u32_le(buf_, static_cast<std::uint32_t>(len));
    buf_.insert(buf_.end(), data, data + len);
    return *this;
}

TupleHasher& TupleHasher::add_digest(const Digest& d) {
    return add_bytes(d.data(), d.size());
}

Digest TupleHasher::finalize() const {
    return sha256(buf_.data(), buf_.size());
}

std::uint64_t digest_mod(const Digest& d, std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("digest_mod: n must be positive");
    std::uint64_t r = 0;
    for (std::uint8_t byte : d) {
        // r < n <= 2^64-1; use 128-bit intermediate to avoid overflow
        unsigned __int128 acc = static_cast<unsigned __int128>(r) * 256 + byte;
        r = static_cast<std::uint64_t>(acc % n);
    }
    return r;
}

}  // namespace travelers

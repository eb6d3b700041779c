#pragma once

#include <openssl/rand.h>

#include <memory>
#include <optional>

#include "vault/bytes.hpp"
#include "vault/error.hpp"
#include "vault/hash.hpp"

namespace vault {

class Rng {
public:
    virtual ~Rng() = default;
    virtual void fill(std::uint8_t* out, std::size_t len) = 0;

    Bytes bytes(std::size_t n) {
        Bytes out(n);
        if (n > 0) fill(out.data(), n);
        return out;
    }

    Hash32 bytes32() {
        Hash32 out;
        fill(out.data(), out.size());
        return out;
    }
};

class SystemRng final : public Rng {
public:
    void fill(std::uint8_t* out, std::size_t len) override {
        if (len == 0) return;
        if (RAND_bytes(out, static_cast<int>(len)) != 1)
            raise(Errc::internal, "entropy source failure");
    }
};

// Deterministic HMAC-SHA256 counter stream for tests and reproducible fixtures.
// Not an entropy source: output is a pure function of the seed.
class SeededRng final : public Rng {
public:
    explicit SeededRng(ByteView seed) : key_(sha256(seed)), counter_(0), avail_(0) {
        if (seed.empty()) raise(Errc::malformed_input, "empty rng seed");
    }

    void fill(std::uint8_t* out, std::size_t len) override {
        while (len > 0) {
            if (avail_ == 0) refill();
            std::size_t take = std::min<std::size_t>(avail_, len);
            std::memcpy(out, block_.data() + (block_.size() - avail_), take);
            avail_ -= take;
            out += take;
            len -= take;
        }
    }

private:
    void refill() {
        Bytes msg(8);
        for (int i = 0; i < 8; ++i) msg[i] = static_cast<std::uint8_t>(counter_ >> (56 - 8 * i));
        ++counter_;
        block_ = hmac_sha256(key_, msg);
        avail_ = block_.size();
    }

    Hash32 key_;
    Hash32 block_{};
    std::uint64_t counter_;
    std::size_t avail_;
};

inline std::unique_ptr<Rng> make_rng(const std::optional<Bytes>& seed = std::nullopt) {
    if (seed) return std::make_unique<SeededRng>(*seed);
    return std::make_unique<SystemRng>();
}

}  // namespace vault

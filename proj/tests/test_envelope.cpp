#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "vault/crypto/envelope.hpp"
#include "vault/rng.hpp"

using namespace vault;
using namespace vault::crypto;

TEST_CASE("data keys are 32 bytes, distinct, and reproducible under seed") {
    SystemRng sys;
    auto k1 = gen_data_key(sys);
    auto k2 = gen_data_key(sys);
    CHECK(k1.key.size() == 32);
    CHECK(k1.key != k2.key);

    SeededRng a(as_view("dk seed")), b(as_view("dk seed"));
    CHECK(gen_data_key(a).key == gen_data_key(b).key);
}

TEST_CASE("seal/open roundtrip across sizes") {
    SystemRng rng;
    DataKey key = gen_data_key(rng);
    for (std::size_t len : {std::size_t{0}, std::size_t{1}, std::size_t{17},
                            std::size_t{4096}, std::size_t{1 << 20}}) {
        Bytes msg = rng.bytes(len);
        auto ct = seal_bytes(msg, key, rng);
        CHECK(ct.ciphertext.size() == len);  // counter-mode AEAD
        CHECK(open_bytes(ct, key) == msg);
    }
}

TEST_CASE("empty plaintext keeps a valid tag") {
    SystemRng rng;
    DataKey key = gen_data_key(rng);
    auto ct = seal_bytes({}, key, rng);
    CHECK(ct.ciphertext.empty());
    CHECK(open_bytes(ct, key).empty());
}

TEST_CASE("sealing is deterministic under a fixed seed") {
    DataKey key;
    key.key.fill(0x42);
    Bytes msg = to_bytes("same message");
    SeededRng a(as_view("nonce seed")), b(as_view("nonce seed"));
    CHECK(seal_bytes(msg, key, a).serialize() == seal_bytes(msg, key, b).serialize());
}

TEST_CASE("wrong key fails authentication") {
    SystemRng rng;
    DataKey key = gen_data_key(rng);
    DataKey other = gen_data_key(rng);
    auto ct = seal_bytes(to_bytes("secret"), key, rng);
    try {
        open_bytes(ct, other);
        FAIL("expected auth_failure");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::auth_failure);
    }
}

TEST_CASE("every single-bit flip over nonce, ciphertext, and tag is caught") {
    SystemRng rng;
    DataKey key = gen_data_key(rng);
    Bytes msg = to_bytes("integrity matters");
    auto ct = seal_bytes(msg, key, rng);
    Bytes wire = ct.serialize();
    // skip the version byte and the length field: flip only AEAD material
    for (std::size_t byte = 1; byte < wire.size(); ++byte) {
        if (byte >= 13 && byte < 17) continue;
        for (int bit = 0; bit < 8; ++bit) {
            Bytes mutated = wire;
            mutated[byte] ^= static_cast<std::uint8_t>(1 << bit);
            auto parsed = EnvelopeCiphertext::parse(mutated);
            REQUIRE_THROWS_AS(open_bytes(parsed, key), Error);
        }
    }
}

TEST_CASE("unsupported version is reported as such") {
    SystemRng rng;
    DataKey key = gen_data_key(rng);
    auto ct = seal_bytes(to_bytes("v"), key, rng);
    ct.version = 2;
    try {
        open_bytes(ct, key);
        FAIL("expected unsupported_version");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::unsupported_version);
    }
}

TEST_CASE("wire format parses back bit-exact") {
    SystemRng rng;
    DataKey key = gen_data_key(rng);
    for (std::size_t len : {std::size_t{0}, std::size_t{1}, std::size_t{300}}) {
        auto ct = seal_bytes(rng.bytes(len), key, rng);
        Bytes wire = ct.serialize();
        auto parsed = EnvelopeCiphertext::parse(wire);
        CHECK(parsed == ct);
        CHECK(parsed.serialize() == wire);
    }
}

TEST_CASE("truncated or padded wires are rejected") {
    SystemRng rng;
    DataKey key = gen_data_key(rng);
    Bytes wire = seal_bytes(to_bytes("x"), key, rng).serialize();
    CHECK_THROWS_AS(EnvelopeCiphertext::parse(ByteView(wire).subspan(0, wire.size() - 1)), Error);
    Bytes padded = wire;
    padded.push_back(0);
    CHECK_THROWS_AS(EnvelopeCiphertext::parse(padded), Error);
    CHECK_THROWS_AS(EnvelopeCiphertext::parse(Bytes{}), Error);
}

TEST_CASE("nonces never repeat across many seals") {
    SystemRng rng;
    DataKey key = gen_data_key(rng);
    std::set<Bytes> nonces;
    for (int i = 0; i < 2000; ++i) {
        auto ct = seal_bytes(to_bytes("m"), key, rng);
        Bytes nonce(ct.nonce.begin(), ct.nonce.end());
        REQUIRE(nonces.insert(nonce).second);
    }
}

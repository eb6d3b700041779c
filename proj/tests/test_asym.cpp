#include <catch2/catch_amalgamated.hpp>

#include <openssl/core_names.h>
#include <openssl/evp.h>
#include <openssl/param_build.h>
#include <openssl/rsa.h>

#include <filesystem>

#include "vault/crypto/keys.hpp"

using namespace vault;
using namespace vault::crypto;

namespace {

// RSA keygen is the slow part; one key per scheme is shared across cases.
const AsymKeypair& rsa_keypair() {
    static AsymKeypair kp = [] {
        SeededRng rng(as_view("asym-suite rsa keypair seed, 32+ bytes long"));
        return gen_asym_keypair(AsymScheme::rsa3072, rng);
    }();
    return kp;
}

const AsymKeypair& ecc_keypair() {
    static AsymKeypair kp = [] {
        SeededRng rng(as_view("asym-suite ecc keypair seed, 32+ bytes long"));
        return gen_asym_keypair(AsymScheme::ecies_secp256k1, rng);
    }();
    return kp;
}

struct EvpKeyDeleter {
    void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
using EvpKeyPtr = std::unique_ptr<EVP_PKEY, EvpKeyDeleter>;

// Independent decryption path: hand the key material to OpenSSL's own
// RSA-OAEP machinery and let it unpad what our implementation produced.
EvpKeyPtr evp_rsa_from(const RsaKey& key) {
    auto n = bn_from_bytes(key.n);
    auto e = bn_from_bytes(key.e);
    auto d = bn_from_bytes(key.d);
    OSSL_PARAM_BLD* bld = OSSL_PARAM_BLD_new();
    REQUIRE(bld);
    OSSL_PARAM_BLD_push_BN(bld, OSSL_PKEY_PARAM_RSA_N, n.get());
    OSSL_PARAM_BLD_push_BN(bld, OSSL_PKEY_PARAM_RSA_E, e.get());
    OSSL_PARAM_BLD_push_BN(bld, OSSL_PKEY_PARAM_RSA_D, d.get());
    OSSL_PARAM* params = OSSL_PARAM_BLD_to_param(bld);
    OSSL_PARAM_BLD_free(bld);
    REQUIRE(params);

    EVP_PKEY_CTX* ctx = EVP_PKEY_CTX_new_from_name(nullptr, "RSA", nullptr);
    REQUIRE(ctx);
    EVP_PKEY* raw = nullptr;
    REQUIRE(EVP_PKEY_fromdata_init(ctx) == 1);
    REQUIRE(EVP_PKEY_fromdata(ctx, &raw, EVP_PKEY_KEYPAIR, params) == 1);
    EVP_PKEY_CTX_free(ctx);
    OSSL_PARAM_free(params);
    return EvpKeyPtr(raw);
}

}  // namespace

TEST_CASE("seeded EC keypair generation is deterministic") {
    Bytes seed = to_bytes("a deterministic seed of enough length!");
    auto a = gen_asym_keypair(AsymScheme::ecies_secp256k1, std::optional<Bytes>(seed));
    auto b = gen_asym_keypair(AsymScheme::ecies_secp256k1, std::optional<Bytes>(seed));
    CHECK(a.public_key == b.public_key);
    CHECK(a.private_key == b.private_key);
    CHECK(a.public_key.size() == 33);
    CHECK(a.private_key.size() == 32);
}

TEST_CASE("short keypair seeds are rejected") {
    CHECK_THROWS_AS(gen_asym_keypair(AsymScheme::ecies_secp256k1,
                                     std::optional<Bytes>(to_bytes("short"))),
                    Error);
}

TEST_CASE("RSA modulus is exactly 3072 bits") {
    RsaKey key = rsa_decode(rsa_keypair().public_key);
    CHECK(key.n.size() == 384);
    CHECK((key.n[0] & 0x80) != 0);
    CHECK(rsa_decode(rsa_keypair().private_key).has_private());
}

TEST_CASE("wrap/unwrap identity on a 32-byte data key, both schemes") {
    SystemRng rng;
    Bytes payload = rng.bytes(32);
    for (const AsymKeypair* kp : {&rsa_keypair(), &ecc_keypair()}) {
        auto blob = wrap_key(payload, kp->public_key, kp->scheme, rng);
        CHECK(unwrap_key(blob, *kp) == payload);
    }
}

TEST_CASE("wrap/unwrap identity on random payloads") {
    SystemRng rng;
    for (int i = 0; i < 50; ++i) {
        Bytes payload = rng.bytes(1 + i * 6);
        for (const AsymKeypair* kp : {&rsa_keypair(), &ecc_keypair()}) {
            auto blob = wrap_key(payload, kp->public_key, kp->scheme, rng);
            REQUIRE(unwrap_key(blob, *kp) == payload);
        }
    }
}

TEST_CASE("OAEP capacity boundary sits at 318 bytes") {
    SystemRng rng;
    Bytes max_payload = rng.bytes(318);
    auto blob = wrap_key(max_payload, rsa_keypair().public_key, AsymScheme::rsa3072, rng);
    CHECK(unwrap_key(blob, rsa_keypair()) == max_payload);

    try {
        wrap_key(rng.bytes(319), rsa_keypair().public_key, AsymScheme::rsa3072, rng);
        FAIL("expected payload_too_large");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::payload_too_large);
    }

    // probe: every length up to the boundary round-trips
    for (std::size_t len : {std::size_t{0}, std::size_t{1}, std::size_t{317}}) {
        auto b = wrap_key(rng.bytes(len), rsa_keypair().public_key, AsymScheme::rsa3072, rng);
        REQUIRE(unwrap_key(b, rsa_keypair()).size() == len);
    }
}

TEST_CASE("a 70-byte CID string wraps under ECIES") {
    SystemRng rng;
    Bytes cid = to_bytes(std::string("cidv1-") + std::string(64, 'a'));
    auto blob = wrap_key(cid, ecc_keypair().public_key, AsymScheme::ecies_secp256k1, rng);
    CHECK(unwrap_key(blob, ecc_keypair()) == cid);
    CHECK(blob.payload.size() == 33 + 12 + cid.size() + 16);
}

TEST_CASE("scheme mismatch is rejected before any decryption") {
    SystemRng rng;
    auto blob = wrap_key(rng.bytes(16), ecc_keypair().public_key, AsymScheme::ecies_secp256k1,
                         rng);
    try {
        unwrap_key(blob, rsa_keypair());
        FAIL("expected scheme_mismatch");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::scheme_mismatch);
    }
}

TEST_CASE("tampered blobs fail to unwrap") {
    SystemRng rng;
    Bytes payload = rng.bytes(32);
    for (const AsymKeypair* kp : {&rsa_keypair(), &ecc_keypair()}) {
        auto blob = wrap_key(payload, kp->public_key, kp->scheme, rng);
        for (std::size_t pos : {std::size_t{0}, blob.payload.size() / 2,
                                blob.payload.size() - 1}) {
            WrappedBlob mutated = blob;
            mutated.payload[pos] ^= 0x01;
            try {
                Bytes out = unwrap_key(mutated, *kp);
                REQUIRE(out != payload);  // RSA bit flips may unpad by chance; never silently
            } catch (const Error& e) {
                REQUIRE(e.code() == Errc::decrypt_failure);
            }
        }
    }
}

TEST_CASE("malformed public keys are rejected") {
    SystemRng rng;
    Bytes garbage = rng.bytes(33);
    garbage[0] = 0x05;  // invalid compression tag
    CHECK_THROWS_AS(wrap_key(rng.bytes(8), garbage, AsymScheme::ecies_secp256k1, rng), Error);
    CHECK_THROWS_AS(wrap_key(rng.bytes(8), Bytes{0x09, 0x00}, AsymScheme::rsa3072, rng), Error);
}

TEST_CASE("our OAEP interoperates with OpenSSL's") {
    SystemRng rng;
    RsaKey priv = rsa_decode(rsa_keypair().private_key);
    Bytes payload = rng.bytes(48);

    SECTION("we encrypt, OpenSSL decrypts") {
        Bytes ct = rsa_oaep_encrypt(payload, priv, rng);
        auto evp = evp_rsa_from(priv);
        EVP_PKEY_CTX* ctx = EVP_PKEY_CTX_new(evp.get(), nullptr);
        REQUIRE(ctx);
        REQUIRE(EVP_PKEY_decrypt_init(ctx) == 1);
        REQUIRE(EVP_PKEY_CTX_set_rsa_padding(ctx, RSA_PKCS1_OAEP_PADDING) == 1);
        REQUIRE(EVP_PKEY_CTX_set_rsa_oaep_md(ctx, EVP_sha256()) == 1);
        std::size_t out_len = 0;
        REQUIRE(EVP_PKEY_decrypt(ctx, nullptr, &out_len, ct.data(), ct.size()) == 1);
        Bytes out(out_len);
        REQUIRE(EVP_PKEY_decrypt(ctx, out.data(), &out_len, ct.data(), ct.size()) == 1);
        out.resize(out_len);
        EVP_PKEY_CTX_free(ctx);
        CHECK(out == payload);
    }

    SECTION("OpenSSL encrypts, we decrypt") {
        auto evp = evp_rsa_from(priv);
        EVP_PKEY_CTX* ctx = EVP_PKEY_CTX_new(evp.get(), nullptr);
        REQUIRE(ctx);
        REQUIRE(EVP_PKEY_encrypt_init(ctx) == 1);
        REQUIRE(EVP_PKEY_CTX_set_rsa_padding(ctx, RSA_PKCS1_OAEP_PADDING) == 1);
        REQUIRE(EVP_PKEY_CTX_set_rsa_oaep_md(ctx, EVP_sha256()) == 1);
        std::size_t ct_len = 0;
        REQUIRE(EVP_PKEY_encrypt(ctx, nullptr, &ct_len, payload.data(), payload.size()) == 1);
        Bytes ct(ct_len);
        REQUIRE(EVP_PKEY_encrypt(ctx, ct.data(), &ct_len, payload.data(), payload.size()) == 1);
        ct.resize(ct_len);
        EVP_PKEY_CTX_free(ctx);
        CHECK(rsa_oaep_decrypt(ct, priv) == payload);
    }
}

TEST_CASE("key encodings survive the file formats") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "vault-test-keys";
    fs::create_directories(dir);

    for (const AsymKeypair* kp : {&rsa_keypair(), &ecc_keypair()}) {
        auto path = dir / ("kp-" + scheme_name(kp->scheme) + ".json");
        save_keypair_file(path, *kp);
        auto loaded = load_keypair_file(path);
        CHECK(loaded.scheme == kp->scheme);
        CHECK(loaded.public_key == kp->public_key);
        CHECK(loaded.private_key == kp->private_key);

        auto pub_path = dir / ("pk-" + scheme_name(kp->scheme) + ".pub");
        save_public_key_file(pub_path, kp->scheme, kp->public_key);
        auto [scheme, pub] = load_public_key_file(pub_path);
        CHECK(scheme == kp->scheme);
        CHECK(pub == kp->public_key);

        // a keypair file also serves as a public key source
        auto [scheme2, pub2] = load_public_key_file(path);
        CHECK(scheme2 == kp->scheme);
        CHECK(pub2 == kp->public_key);
    }
    fs::remove_all(dir);
}

TEST_CASE("wrapped blob JSON roundtrip") {
    SystemRng rng;
    auto blob = wrap_key(rng.bytes(20), ecc_keypair().public_key, AsymScheme::ecies_secp256k1,
                         rng);
    auto back = WrappedBlob::from_json(blob.to_json());
    CHECK(back == blob);
}

#pragma once

#include <openssl/bn.h>

#include <vector>

#include "vault/bytes.hpp"
#include "vault/crypto/secp256k1.hpp"
#include "vault/error.hpp"
#include "vault/hash.hpp"
#include "vault/rng.hpp"

namespace vault::crypto {

// RSA with OAEP-SHA256 padding. Key generation draws all randomness from the
// injected Rng so seeded runs reproduce the exact same key; the modular
// arithmetic itself is OpenSSL's.

struct RsaKey {
    Bytes n;
    Bytes e;
    Bytes d;  // private half; empty in public-only keys
    Bytes p;
    Bytes q;

    bool has_private() const { return !d.empty(); }
    std::size_t modulus_bytes() const { return n.size(); }
};

namespace rsa_detail {

inline const std::vector<std::uint32_t>& small_primes() {
    static const std::vector<std::uint32_t> primes = [] {
        constexpr std::uint32_t limit = 20000;
        std::vector<bool> composite(limit + 1, false);
        std::vector<std::uint32_t> out;
        for (std::uint32_t i = 2; i <= limit; ++i) {
            if (composite[i]) continue;
            out.push_back(i);
            for (std::uint64_t j = std::uint64_t(i) * i; j <= limit; j += i) composite[j] = true;
        }
        return out;
    }();
    return primes;
}

// Sieve-assisted search: draw a random odd candidate with the top two bits
// set, then walk forward in steps of two, trial-dividing via cached residues
// before running a full primality test. Rejects primes p with p mod e == 1 so
// that e stays invertible mod p-1.
inline BnPtr generate_prime(unsigned bits, std::uint32_t public_exponent, Rng& rng) {
    const auto& primes = small_primes();
    auto ctx = bn_ctx();
    while (true) {
        Bytes candidate_bytes = rng.bytes(bits / 8);
        candidate_bytes[0] |= 0xC0;
        candidate_bytes[bits / 8 - 1] |= 0x01;
        auto base = bn_from_bytes(candidate_bytes);

        std::vector<std::uint32_t> residues(primes.size());
        for (std::size_t i = 0; i < primes.size(); ++i) {
            BN_ULONG r = BN_mod_word(base.get(), primes[i]);
            if (r == static_cast<BN_ULONG>(-1)) raise(Errc::internal, "BN_mod_word failed");
            residues[i] = static_cast<std::uint32_t>(r);
        }
        std::uint32_t e_residue = static_cast<std::uint32_t>(
            BN_mod_word(base.get(), public_exponent));

        constexpr std::uint64_t max_delta = 1u << 20;
        for (std::uint64_t delta = 0; delta < max_delta; delta += 2) {
            bool divisible = false;
            for (std::size_t i = 0; i < primes.size(); ++i) {
                if ((residues[i] + delta) % primes[i] == 0) {
                    divisible = true;
                    break;
                }
            }
            if (divisible) continue;
            if ((e_residue + delta) % public_exponent == 1) continue;

            auto candidate = bn_new();
            if (!BN_copy(candidate.get(), base.get()) ||
                !BN_add_word(candidate.get(), static_cast<BN_ULONG>(delta)))
                raise(Errc::internal, "candidate arithmetic failed");
            if (static_cast<unsigned>(BN_num_bits(candidate.get())) != bits) break;  // overflow: redraw
            int ok = BN_check_prime(candidate.get(), ctx.get(), nullptr);
            if (ok < 0) raise(Errc::internal, "primality test failed");
            if (ok == 1) return BnPtr(candidate.release());
        }
    }
}

inline Bytes mgf1_sha256(ByteView seed, std::size_t length) {
    Bytes mask;
    mask.reserve(length + 32);
    std::uint32_t counter = 0;
    while (mask.size() < length) {
        Bytes block(seed.begin(), seed.end());
        put_u32be(block, counter++);
        Hash32 digest = sha256(block);
        mask.insert(mask.end(), digest.begin(), digest.end());
    }
    mask.resize(length);
    return mask;
}

inline void xor_into(Bytes& dst, ByteView mask) {
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] ^= mask[i];
}

}  // namespace rsa_detail

inline constexpr std::uint32_t rsa_public_exponent = 65537;

inline RsaKey rsa_generate(unsigned modulus_bits, Rng& rng) {
    if (modulus_bits % 16 != 0) raise(Errc::malformed_input, "modulus bits must be even bytes");
    auto ctx = bn_ctx();
    while (true) {
        auto p = rsa_detail::generate_prime(modulus_bits / 2, rsa_public_exponent, rng);
        auto q = rsa_detail::generate_prime(modulus_bits / 2, rsa_public_exponent, rng);
        if (BN_cmp(p.get(), q.get()) == 0) continue;

        auto n = bn_new();
        if (!BN_mul(n.get(), p.get(), q.get(), ctx.get())) raise(Errc::internal, "BN_mul failed");
        if (static_cast<unsigned>(BN_num_bits(n.get())) != modulus_bits) continue;

        auto p1 = bn_new();
        auto q1 = bn_new();
        auto phi = bn_new();
        if (!BN_sub(p1.get(), p.get(), BN_value_one()) ||
            !BN_sub(q1.get(), q.get(), BN_value_one()) ||
            !BN_mul(phi.get(), p1.get(), q1.get(), ctx.get()))
            raise(Errc::internal, "totient arithmetic failed");

        auto e = bn_new();
        if (!BN_set_word(e.get(), rsa_public_exponent)) raise(Errc::internal, "BN_set_word failed");
        auto d = bn_new();
        if (!BN_mod_inverse(d.get(), e.get(), phi.get(), ctx.get())) continue;

        RsaKey key;
        key.n = bn_to_bytes(n.get(), modulus_bits / 8);
        key.e = bn_to_bytes(e.get());
        key.d = bn_to_bytes(d.get());
        key.p = bn_to_bytes(p.get());
        key.q = bn_to_bytes(q.get());
        return key;
    }
}

// OAEP (SHA-256, empty label). Capacity is k - 2*hLen - 2 bytes.
inline std::size_t rsa_oaep_capacity(std::size_t modulus_bytes) {
    return modulus_bytes - 2 * 32 - 2;
}

inline Bytes rsa_oaep_encrypt(ByteView payload, const RsaKey& pub, Rng& rng) {
    const std::size_t k = pub.modulus_bytes();
    if (k < 2 * 32 + 2 + 1) raise(Errc::malformed_public_key, "modulus too small for OAEP");
    if (payload.size() > rsa_oaep_capacity(k))
        raise(Errc::payload_too_large,
              "OAEP payload limited to " + std::to_string(rsa_oaep_capacity(k)) + " bytes");

    Hash32 l_hash = sha256({});
    Bytes db(l_hash.begin(), l_hash.end());
    db.resize(k - 32 - 1, 0);
    db[db.size() - payload.size() - 1] = 0x01;
    std::copy(payload.begin(), payload.end(), db.end() - payload.size());

    Bytes seed = rng.bytes(32);
    rsa_detail::xor_into(db, rsa_detail::mgf1_sha256(seed, db.size()));
    rsa_detail::xor_into(seed, rsa_detail::mgf1_sha256(db, seed.size()));

    Bytes em;
    em.reserve(k);
    em.push_back(0x00);
    append(em, seed);
    append(em, db);

    auto ctx = bn_ctx();
    auto m = bn_from_bytes(em);
    auto n = bn_from_bytes(pub.n);
    auto e = bn_from_bytes(pub.e);
    auto c = bn_new();
    if (!BN_mod_exp(c.get(), m.get(), e.get(), n.get(), ctx.get()))
        raise(Errc::internal, "modular exponentiation failed");
    return bn_to_bytes(c.get(), k);
}

inline Bytes rsa_oaep_decrypt(ByteView ciphertext, const RsaKey& priv) {
    if (!priv.has_private()) raise(Errc::decrypt_failure, "no private exponent");
    const std::size_t k = priv.modulus_bytes();
    if (ciphertext.size() != k) raise(Errc::decrypt_failure, "ciphertext length mismatch");

    auto ctx = bn_ctx();
    auto n = bn_from_bytes(priv.n);
    auto c = bn_from_bytes(ciphertext);
    if (BN_cmp(c.get(), n.get()) >= 0) raise(Errc::decrypt_failure, "ciphertext out of range");

    // CRT: m1 = c^(d mod p-1) mod p, m2 = c^(d mod q-1) mod q.
    auto p = bn_from_bytes(priv.p);
    auto q = bn_from_bytes(priv.q);
    auto d = bn_from_bytes(priv.d);
    auto p1 = bn_new();
    auto q1 = bn_new();
    auto dp = bn_new();
    auto dq = bn_new();
    auto qinv = bn_new();
    if (!BN_sub(p1.get(), p.get(), BN_value_one()) ||
        !BN_sub(q1.get(), q.get(), BN_value_one()) ||
        !BN_mod(dp.get(), d.get(), p1.get(), ctx.get()) ||
        !BN_mod(dq.get(), d.get(), q1.get(), ctx.get()) ||
        !BN_mod_inverse(qinv.get(), q.get(), p.get(), ctx.get()))
        raise(Errc::internal, "CRT parameter derivation failed");

    auto m1 = bn_new();
    auto m2 = bn_new();
    auto h = bn_new();
    auto m = bn_new();
    if (!BN_mod_exp(m1.get(), c.get(), dp.get(), p.get(), ctx.get()) ||
        !BN_mod_exp(m2.get(), c.get(), dq.get(), q.get(), ctx.get()) ||
        !BN_mod_sub(h.get(), m1.get(), m2.get(), p.get(), ctx.get()) ||
        !BN_mod_mul(h.get(), h.get(), qinv.get(), p.get(), ctx.get()) ||
        !BN_mul(m.get(), h.get(), q.get(), ctx.get()) || !BN_add(m.get(), m.get(), m2.get()))
        raise(Errc::internal, "CRT recombination failed");

    Bytes em = bn_to_bytes(m.get(), k);
    if (em[0] != 0x00) raise(Errc::decrypt_failure, "OAEP framing rejected");
    Bytes seed(em.begin() + 1, em.begin() + 33);
    Bytes db(em.begin() + 33, em.end());
    rsa_detail::xor_into(seed, rsa_detail::mgf1_sha256(db, seed.size()));
    rsa_detail::xor_into(db, rsa_detail::mgf1_sha256(seed, db.size()));

    Hash32 l_hash = sha256({});
    if (!std::equal(l_hash.begin(), l_hash.end(), db.begin()))
        raise(Errc::decrypt_failure, "OAEP label hash mismatch");
    std::size_t i = 32;
    while (i < db.size() && db[i] == 0x00) ++i;
    if (i == db.size() || db[i] != 0x01) raise(Errc::decrypt_failure, "OAEP padding rejected");
    return Bytes(db.begin() + i + 1, db.end());
}

// ---- canonical key encodings: tag byte, then u32be-length-prefixed integers ----

namespace rsa_detail {

inline constexpr std::uint8_t public_tag = 0x01;
inline constexpr std::uint8_t private_tag = 0x02;

inline void put_field(Bytes& out, const Bytes& field) {
    put_u32be(out, static_cast<std::uint32_t>(field.size()));
    append(out, field);
}

inline Bytes get_field(ByteView in, std::size_t& at) {
    std::uint32_t len = get_u32be(in, at);
    at += 4;
    if (at + len > in.size()) raise(Errc::malformed_input, "truncated key field");
    Bytes field(in.begin() + at, in.begin() + at + len);
    at += len;
    return field;
}

}  // namespace rsa_detail

inline Bytes rsa_encode_public(const RsaKey& key) {
    Bytes out{rsa_detail::public_tag};
    rsa_detail::put_field(out, key.n);
    rsa_detail::put_field(out, key.e);
    return out;
}

inline Bytes rsa_encode_private(const RsaKey& key) {
    Bytes out{rsa_detail::private_tag};
    rsa_detail::put_field(out, key.n);
    rsa_detail::put_field(out, key.e);
    rsa_detail::put_field(out, key.d);
    rsa_detail::put_field(out, key.p);
    rsa_detail::put_field(out, key.q);
    return out;
}

inline RsaKey rsa_decode(ByteView encoded) {
    if (encoded.empty()) raise(Errc::malformed_public_key, "empty RSA key encoding");
    RsaKey key;
    std::size_t at = 1;
    try {
        key.n = rsa_detail::get_field(encoded, at);
        key.e = rsa_detail::get_field(encoded, at);
        if (encoded[0] == rsa_detail::private_tag) {
            key.d = rsa_detail::get_field(encoded, at);
            key.p = rsa_detail::get_field(encoded, at);
            key.q = rsa_detail::get_field(encoded, at);
        } else if (encoded[0] != rsa_detail::public_tag) {
            raise(Errc::malformed_public_key, "unknown RSA key tag");
        }
    } catch (const Error& err) {
        if (err.code() == Errc::malformed_public_key) throw;
        raise(Errc::malformed_public_key, "truncated RSA key encoding");
    }
    if (at != encoded.size()) raise(Errc::malformed_public_key, "trailing bytes in RSA key");
    if (key.n.empty() || key.n.front() == 0x00)
        raise(Errc::malformed_public_key, "non-canonical RSA modulus");
    return key;
}

}  // namespace vault::crypto

#pragma once

#include "vault/crypto/secp256k1.hpp"
#include "vault/hash.hpp"

namespace vault::crypto {

// ECDSA over secp256k1 with deterministic nonces (RFC 6979, HMAC-SHA256).
// Signatures are raw r||s with s normalized to the lower half order, so the
// same (key, digest) pair always yields identical bytes.

struct EcdsaSignature {
    Hash32 r{};
    Hash32 s{};

    Bytes serialize() const {
        Bytes out(r.begin(), r.end());
        out.insert(out.end(), s.begin(), s.end());
        return out;
    }

    static EcdsaSignature parse(ByteView raw) {
        if (raw.size() != 64) raise(Errc::bad_signature, "signature must be 64 bytes");
        EcdsaSignature sig;
        std::copy(raw.begin(), raw.begin() + 32, sig.r.begin());
        std::copy(raw.begin() + 32, raw.end(), sig.s.begin());
        return sig;
    }
};

namespace detail {

// One HMAC-DRBG step chain from RFC 6979 section 3.2; qlen == hlen == 256 bits,
// so bits2int is the identity and bits2octets reduces mod n.
class Rfc6979Nonce {
public:
    Rfc6979Nonce(const Hash32& private_scalar, const Hash32& digest) {
        auto ctx = bn_ctx();
        auto h = bn_from_bytes(digest);
        auto reduced = bn_new();
        if (!BN_mod(reduced.get(), h.get(), secp::order(), ctx.get()))
            raise(Errc::internal, "BN_mod failed");
        Bytes h_octets = bn_to_bytes(reduced.get(), 32);

        v_.fill(0x01);
        k_.fill(0x00);
        step(0x00, private_scalar, h_octets);
        step(0x01, private_scalar, h_octets);
    }

    Hash32 next() {
        while (true) {
            v_ = hmac_sha256(k_, v_);
            if (secp::is_valid_scalar(v_)) return v_;
            Bytes msg(v_.begin(), v_.end());
            msg.push_back(0x00);
            k_ = hmac_sha256(k_, msg);
            v_ = hmac_sha256(k_, v_);
        }
    }

private:
    void step(std::uint8_t tag, const Hash32& x, const Bytes& h_octets) {
        Bytes msg(v_.begin(), v_.end());
        msg.push_back(tag);
        msg.insert(msg.end(), x.begin(), x.end());
        msg.insert(msg.end(), h_octets.begin(), h_octets.end());
        k_ = hmac_sha256(k_, msg);
        v_ = hmac_sha256(k_, v_);
    }

    Hash32 v_;
    Hash32 k_;
};

}  // namespace detail

inline EcdsaSignature ecdsa_sign(const Hash32& digest, const Hash32& private_scalar) {
    if (!secp::is_valid_scalar(private_scalar))
        raise(Errc::scalar_out_of_range, "private key outside [1, n)");

    auto ctx = bn_ctx();
    const BIGNUM* n = secp::order();
    auto z = bn_new();
    {
        auto h = bn_from_bytes(digest);
        if (!BN_mod(z.get(), h.get(), n, ctx.get())) raise(Errc::internal, "BN_mod failed");
    }
    auto d = bn_from_bytes(private_scalar);
    auto half = bn_new();
    if (!BN_rshift1(half.get(), n)) raise(Errc::internal, "BN_rshift1 failed");

    detail::Rfc6979Nonce nonce(private_scalar, digest);
    while (true) {
        Hash32 k_bytes = nonce.next();
        auto k = bn_from_bytes(k_bytes);

        auto point = secp::point_new();
        if (!EC_POINT_mul(secp::group(), point.get(), k.get(), nullptr, nullptr, ctx.get()))
            raise(Errc::internal, "EC_POINT_mul failed");
        auto rx = bn_new();
        if (!EC_POINT_get_affine_coordinates(secp::group(), point.get(), rx.get(), nullptr,
                                             ctx.get()))
            raise(Errc::internal, "affine conversion failed");
        auto r = bn_new();
        if (!BN_mod(r.get(), rx.get(), n, ctx.get())) raise(Errc::internal, "BN_mod failed");
        if (BN_is_zero(r.get())) continue;

        auto kinv = bn_new();
        if (!BN_mod_inverse(kinv.get(), k.get(), n, ctx.get()))
            raise(Errc::internal, "nonce not invertible");
        auto s = bn_new();
        auto tmp = bn_new();
        if (!BN_mod_mul(tmp.get(), r.get(), d.get(), n, ctx.get()) ||
            !BN_mod_add(tmp.get(), tmp.get(), z.get(), n, ctx.get()) ||
            !BN_mod_mul(s.get(), kinv.get(), tmp.get(), n, ctx.get()))
            raise(Errc::internal, "signature arithmetic failed");
        if (BN_is_zero(s.get())) continue;
        if (BN_cmp(s.get(), half.get()) > 0) {
            if (!BN_sub(s.get(), n, s.get())) raise(Errc::internal, "BN_sub failed");
        }

        EcdsaSignature sig;
        Bytes rb = bn_to_bytes(r.get(), 32);
        Bytes sb = bn_to_bytes(s.get(), 32);
        std::copy(rb.begin(), rb.end(), sig.r.begin());
        std::copy(sb.begin(), sb.end(), sig.s.begin());
        return sig;
    }
}

inline bool ecdsa_verify(const Hash32& digest, const EcdsaSignature& sig,
                         ByteView public_compressed33) {
    auto ctx = bn_ctx();
    const BIGNUM* n = secp::order();
    auto r = bn_from_bytes(sig.r);
    auto s = bn_from_bytes(sig.s);
    if (BN_is_zero(r.get()) || BN_is_zero(s.get()) || BN_cmp(r.get(), n) >= 0 ||
        BN_cmp(s.get(), n) >= 0)
        return false;

    EcPointPtr q;
    try {
        q = secp::decode_point(public_compressed33);
    } catch (const Error&) {
        return false;
    }

    auto z = bn_new();
    {
        auto h = bn_from_bytes(digest);
        if (!BN_mod(z.get(), h.get(), n, ctx.get())) return false;
    }
    auto w = bn_new();
    if (!BN_mod_inverse(w.get(), s.get(), n, ctx.get())) return false;
    auto u1 = bn_new();
    auto u2 = bn_new();
    if (!BN_mod_mul(u1.get(), z.get(), w.get(), n, ctx.get()) ||
        !BN_mod_mul(u2.get(), r.get(), w.get(), n, ctx.get()))
        return false;

    auto point = secp::point_new();
    if (!EC_POINT_mul(secp::group(), point.get(), u1.get(), q.get(), u2.get(), ctx.get()))
        return false;
    if (EC_POINT_is_at_infinity(secp::group(), point.get())) return false;
    auto rx = bn_new();
    if (!EC_POINT_get_affine_coordinates(secp::group(), point.get(), rx.get(), nullptr, ctx.get()))
        return false;
    auto v = bn_new();
    if (!BN_mod(v.get(), rx.get(), n, ctx.get())) return false;
    return BN_cmp(v.get(), r.get()) == 0;
}

}  // namespace vault::crypto

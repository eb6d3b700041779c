#pragma once

#include <openssl/bn.h>
#include <openssl/ec.h>
#include <openssl/obj_mac.h>

#include <memory>

#include "vault/bytes.hpp"
#include "vault/error.hpp"
#include "vault/rng.hpp"

namespace vault::crypto {

struct BnDeleter {
    void operator()(BIGNUM* p) const { BN_clear_free(p); }
};
struct BnCtxDeleter {
    void operator()(BN_CTX* p) const { BN_CTX_free(p); }
};
struct EcPointDeleter {
    const EC_GROUP* group = nullptr;
    void operator()(EC_POINT* p) const { EC_POINT_free(p); }
};

using BnPtr = std::unique_ptr<BIGNUM, BnDeleter>;
using BnCtxPtr = std::unique_ptr<BN_CTX, BnCtxDeleter>;
using EcPointPtr = std::unique_ptr<EC_POINT, EcPointDeleter>;

inline BnPtr bn_new() {
    BnPtr p(BN_new());
    if (!p) raise(Errc::internal, "BN_new failed");
    return p;
}

inline BnPtr bn_from_bytes(ByteView be) {
    BnPtr p(BN_bin2bn(be.data(), static_cast<int>(be.size()), nullptr));
    if (!p) raise(Errc::internal, "BN_bin2bn failed");
    return p;
}

inline Bytes bn_to_bytes(const BIGNUM* v, std::size_t width = 0) {
    std::size_t n = static_cast<std::size_t>(BN_num_bytes(v));
    if (width == 0) width = n;
    if (n > width) raise(Errc::internal, "bignum wider than requested encoding");
    Bytes out(width, 0);
    BN_bn2bin(v, out.data() + (width - n));
    return out;
}

inline BnCtxPtr bn_ctx() {
    BnCtxPtr p(BN_CTX_new());
    if (!p) raise(Errc::internal, "BN_CTX_new failed");
    return p;
}

namespace secp {

inline const EC_GROUP* group() {
    static EC_GROUP* g = [] {
        EC_GROUP* grp = EC_GROUP_new_by_curve_name(NID_secp256k1);
        if (!grp) raise(Errc::internal, "secp256k1 group unavailable");
        return grp;
    }();
    return g;
}

inline const BIGNUM* order() {
    static BIGNUM* n = [] {
        BIGNUM* v = BN_new();
        if (!v || !EC_GROUP_get_order(group(), v, nullptr))
            raise(Errc::internal, "cannot read group order");
        return v;
    }();
    return n;
}

inline EcPointPtr point_new() {
    EcPointPtr p(EC_POINT_new(group()));
    if (!p) raise(Errc::internal, "EC_POINT_new failed");
    return p;
}

inline bool is_valid_scalar(const Hash32& scalar) {
    auto k = bn_from_bytes(scalar);
    return !BN_is_zero(k.get()) && BN_cmp(k.get(), order()) < 0;
}

// Rejection-samples a scalar in [1, n) from the rng.
inline Hash32 random_scalar(Rng& rng) {
    for (int attempt = 0; attempt < 256; ++attempt) {
        Hash32 candidate = rng.bytes32();
        if (is_valid_scalar(candidate)) return candidate;
    }
    raise(Errc::internal, "scalar sampling failed");
}

inline EcPointPtr decode_point(ByteView compressed33) {
    auto ctx = bn_ctx();
    auto p = point_new();
    if (compressed33.size() != 33 ||
        !EC_POINT_oct2point(group(), p.get(), compressed33.data(), compressed33.size(), ctx.get()))
        raise(Errc::malformed_public_key, "not a valid compressed secp256k1 point");
    return p;
}

inline Bytes encode_point(const EC_POINT* p) {
    auto ctx = bn_ctx();
    Bytes out(33);
    if (EC_POINT_point2oct(group(), p, POINT_CONVERSION_COMPRESSED, out.data(), out.size(),
                           ctx.get()) != out.size())
        raise(Errc::internal, "point compression failed");
    return out;
}

// scalar * G, compressed.
inline Bytes pubkey_from_scalar(const Hash32& scalar) {
    if (!is_valid_scalar(scalar)) raise(Errc::scalar_out_of_range, "scalar outside [1, n)");
    auto ctx = bn_ctx();
    auto k = bn_from_bytes(scalar);
    auto p = point_new();
    if (!EC_POINT_mul(group(), p.get(), k.get(), nullptr, nullptr, ctx.get()))
        raise(Errc::internal, "EC_POINT_mul failed");
    return encode_point(p.get());
}

// x coordinate of scalar * P, 32 bytes. Used as the raw ECDH secret.
inline Hash32 ecdh_x(ByteView peer_compressed33, const Hash32& scalar) {
    if (!is_valid_scalar(scalar)) raise(Errc::scalar_out_of_range, "scalar outside [1, n)");
    auto ctx = bn_ctx();
    auto peer = decode_point(peer_compressed33);
    auto k = bn_from_bytes(scalar);
    auto shared = point_new();
    if (!EC_POINT_mul(group(), shared.get(), nullptr, peer.get(), k.get(), ctx.get()))
        raise(Errc::internal, "EC_POINT_mul failed");
    if (EC_POINT_is_at_infinity(group(), shared.get()))
        raise(Errc::malformed_public_key, "shared point at infinity");
    auto x = bn_new();
    auto y = bn_new();
    if (!EC_POINT_get_affine_coordinates(group(), shared.get(), x.get(), y.get(), ctx.get()))
        raise(Errc::internal, "affine conversion failed");
    Bytes xb = bn_to_bytes(x.get(), 32);
    Hash32 out;
    std::copy(xb.begin(), xb.end(), out.begin());
    return out;
}

}  // namespace secp

}  // namespace vault::crypto

#pragma once

#include "vault/crypto/envelope.hpp"
#include "vault/crypto/secp256k1.hpp"
#include "vault/hash.hpp"

namespace vault::crypto {

// ECIES over secp256k1: ephemeral ECDH, x-coordinate through HKDF-SHA256 into
// an AES-256-GCM key. Payload: ephemeral_pub(33, compressed) || nonce(12) ||
// ciphertext || tag(16).

namespace ecies_detail {

inline constexpr char kdf_info[] = "vault/ecies/v1";
inline constexpr std::size_t overhead = 33 + 12 + 16;

// The ephemeral public key salts the KDF: the wire prefix is outside the GCM
// tag, and an x-only ECDH would otherwise accept a sign-flipped point.
inline DataKey derive_key(const Hash32& shared_x, ByteView ephemeral_pub) {
    Bytes okm = hkdf_sha256(shared_x, ephemeral_pub, as_view(kdf_info), 32);
    DataKey dk;
    std::copy(okm.begin(), okm.end(), dk.key.begin());
    return dk;
}

}  // namespace ecies_detail

inline Bytes ecies_encrypt(ByteView payload, ByteView recipient_pub33, Rng& rng) {
    Hash32 ephemeral_priv = secp::random_scalar(rng);
    Bytes ephemeral_pub = secp::pubkey_from_scalar(ephemeral_priv);
    Hash32 shared_x = secp::ecdh_x(recipient_pub33, ephemeral_priv);
    DataKey dk = ecies_detail::derive_key(shared_x, ephemeral_pub);

    EnvelopeCiphertext sealed = seal_bytes(payload, dk, rng);
    Bytes out;
    out.reserve(ecies_detail::overhead + payload.size());
    append(out, ephemeral_pub);
    append(out, sealed.nonce);
    append(out, sealed.ciphertext);
    append(out, sealed.tag);
    return out;
}

inline Bytes ecies_decrypt(ByteView blob, const Hash32& recipient_priv) {
    if (blob.size() < ecies_detail::overhead)
        raise(Errc::decrypt_failure, "ECIES blob too short");
    ByteView ephemeral_pub = blob.subspan(0, 33);
    Hash32 shared_x = secp::ecdh_x(ephemeral_pub, recipient_priv);
    DataKey dk = ecies_detail::derive_key(shared_x, ephemeral_pub);

    EnvelopeCiphertext sealed;
    std::copy(blob.begin() + 33, blob.begin() + 45, sealed.nonce.begin());
    sealed.ciphertext.assign(blob.begin() + 45, blob.end() - 16);
    std::copy(blob.end() - 16, blob.end(), sealed.tag.begin());
    return open_bytes(sealed, dk);
}

}  // namespace vault::crypto

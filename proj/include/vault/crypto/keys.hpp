#pragma once

#include <filesystem>
#include <fstream>
#include <optional>

#include <json.hpp>

#include "vault/crypto/ecies.hpp"
#include "vault/crypto/rsa.hpp"

namespace vault::crypto {

enum class AsymScheme { rsa3072, ecies_secp256k1 };

inline std::string scheme_name(AsymScheme s) {
    return s == AsymScheme::rsa3072 ? "rsa3072" : "ecies-secp256k1";
}

inline AsymScheme parse_scheme(const std::string& name) {
    if (name == "rsa3072" || name == "rsa") return AsymScheme::rsa3072;
    if (name == "ecies-secp256k1" || name == "ecc") return AsymScheme::ecies_secp256k1;
    raise(Errc::malformed_input, "unknown scheme: " + name);
}

// Canonical encodings: RSA keys use the tagged length-prefixed integer layout
// from rsa.hpp; EC keys are a raw 32-byte scalar / 33-byte compressed point.
struct AsymKeypair {
    AsymScheme scheme = AsymScheme::ecies_secp256k1;
    Bytes public_key;
    Bytes private_key;
};

inline constexpr unsigned rsa_modulus_bits = 3072;

inline AsymKeypair gen_asym_keypair(AsymScheme scheme, Rng& rng) {
    AsymKeypair kp;
    kp.scheme = scheme;
    if (scheme == AsymScheme::rsa3072) {
        RsaKey key = rsa_generate(rsa_modulus_bits, rng);
        kp.public_key = rsa_encode_public(key);
        kp.private_key = rsa_encode_private(key);
    } else {
        Hash32 scalar = secp::random_scalar(rng);
        kp.public_key = secp::pubkey_from_scalar(scalar);
        kp.private_key.assign(scalar.begin(), scalar.end());
    }
    return kp;
}

inline AsymKeypair gen_asym_keypair(AsymScheme scheme,
                                    const std::optional<Bytes>& seed = std::nullopt) {
    if (seed && seed->size() < 32)
        raise(Errc::malformed_input, "keypair seed must carry at least 32 bytes");
    auto rng = make_rng(seed);
    return gen_asym_keypair(scheme, *rng);
}

struct WrappedBlob {
    AsymScheme scheme = AsymScheme::ecies_secp256k1;
    Bytes payload;

    nlohmann::json to_json() const {
        return {{"scheme", scheme_name(scheme)}, {"data", base64_encode(payload)}};
    }

    static WrappedBlob from_json(const nlohmann::json& j) {
        WrappedBlob blob;
        blob.scheme = parse_scheme(j.at("scheme").get<std::string>());
        blob.payload = base64_decode(j.at("data").get<std::string>());
        return blob;
    }

    friend bool operator==(const WrappedBlob& a, const WrappedBlob& b) {
        return a.scheme == b.scheme && a.payload == b.payload;
    }
};

inline WrappedBlob wrap_key(ByteView payload, ByteView recipient_pub, AsymScheme scheme,
                            Rng& rng) {
    WrappedBlob blob;
    blob.scheme = scheme;
    if (scheme == AsymScheme::rsa3072) {
        RsaKey pub = rsa_decode(recipient_pub);
        if (pub.has_private()) raise(Errc::malformed_public_key, "expected a public RSA key");
        blob.payload = rsa_oaep_encrypt(payload, pub, rng);
    } else {
        blob.payload = ecies_encrypt(payload, recipient_pub, rng);
    }
    return blob;
}

inline Bytes unwrap_key(const WrappedBlob& blob, const AsymKeypair& recipient) {
    if (blob.scheme != recipient.scheme)
        raise(Errc::scheme_mismatch, "blob wrapped under " + scheme_name(blob.scheme) +
                                         " but key is " + scheme_name(recipient.scheme));
    try {
        if (blob.scheme == AsymScheme::rsa3072) {
            RsaKey priv = rsa_decode(recipient.private_key);
            return rsa_oaep_decrypt(blob.payload, priv);
        }
        if (recipient.private_key.size() != 32)
            raise(Errc::decrypt_failure, "bad EC private key length");
        Hash32 scalar;
        std::copy(recipient.private_key.begin(), recipient.private_key.end(), scalar.begin());
        return ecies_decrypt(blob.payload, scalar);
    } catch (const Error& err) {
        if (err.code() == Errc::decrypt_failure) throw;
        raise(Errc::decrypt_failure, err.what());
    }
}

// ---- key files ----
//
// Keypair file: JSON {scheme, public, private} with base64 key bytes.
// Public key file: one-line scheme header followed by the base64 key, meant
// to be handed to other users for grants.

inline void save_keypair_file(const std::filesystem::path& path, const AsymKeypair& kp) {
    nlohmann::json j{{"scheme", scheme_name(kp.scheme)},
                     {"public", base64_encode(kp.public_key)},
                     {"private", base64_encode(kp.private_key)}};
    std::ofstream out(path);
    if (!out) raise(Errc::storage_failure, "cannot write " + path.string());
    out << j.dump(2) << "\n";
}

inline AsymKeypair load_keypair_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::not_found, "cannot read " + path.string());
    nlohmann::json j;
    try {
        in >> j;
        AsymKeypair kp;
        kp.scheme = parse_scheme(j.at("scheme").get<std::string>());
        kp.public_key = base64_decode(j.at("public").get<std::string>());
        kp.private_key = base64_decode(j.at("private").get<std::string>());
        return kp;
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::malformed_input, path.string() + ": " + e.what());
    }
}

inline void save_public_key_file(const std::filesystem::path& path, AsymScheme scheme,
                                 ByteView public_key) {
    std::ofstream out(path);
    if (!out) raise(Errc::storage_failure, "cannot write " + path.string());
    out << "scheme: " << scheme_name(scheme) << "\n" << base64_encode(public_key) << "\n";
}

inline std::pair<AsymScheme, Bytes> load_public_key_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::not_found, "cannot read " + path.string());
    std::string first;
    std::getline(in, first);
    if (first.rfind("scheme: ", 0) == 0) {
        std::string b64;
        std::getline(in, b64);
        return {parse_scheme(first.substr(8)), base64_decode(b64)};
    }
    // Fall back to a keypair JSON; only the public half is used.
    std::ifstream again(path);
    nlohmann::json j;
    try {
        again >> j;
        return {parse_scheme(j.at("scheme").get<std::string>()),
                base64_decode(j.at("public").get<std::string>())};
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::malformed_input, path.string() + ": not a public key file");
    }
}

}  // namespace vault::crypto

#pragma once

#include <openssl/evp.h>

#include "vault/bytes.hpp"
#include "vault/error.hpp"
#include "vault/rng.hpp"

namespace vault::crypto {

struct DataKey {
    std::array<std::uint8_t, 32> key{};
};

inline DataKey gen_data_key(Rng& rng) {
    DataKey dk;
    rng.fill(dk.key.data(), dk.key.size());
    return dk;
}

// AES-256-GCM under a fresh 96-bit nonce.
// Wire format: version(1) || nonce(12) || u32be ciphertext length || ciphertext || tag(16).
struct EnvelopeCiphertext {
    static constexpr std::uint8_t current_version = 1;

    std::uint8_t version = current_version;
    std::array<std::uint8_t, 12> nonce{};
    Bytes ciphertext;
    std::array<std::uint8_t, 16> tag{};

    Bytes serialize() const {
        Bytes out;
        out.reserve(1 + nonce.size() + 4 + ciphertext.size() + tag.size());
        out.push_back(version);
        append(out, nonce);
        put_u32be(out, static_cast<std::uint32_t>(ciphertext.size()));
        append(out, ciphertext);
        append(out, tag);
        return out;
    }

    static EnvelopeCiphertext parse(ByteView raw) {
        if (raw.size() < 1 + 12 + 4 + 16) raise(Errc::malformed_ciphertext, "envelope too short");
        EnvelopeCiphertext ct;
        ct.version = raw[0];
        std::copy(raw.begin() + 1, raw.begin() + 13, ct.nonce.begin());
        std::uint32_t len = get_u32be(raw, 13);
        if (raw.size() != 1 + 12 + 4 + std::size_t(len) + 16)
            raise(Errc::malformed_ciphertext, "envelope length mismatch");
        ct.ciphertext.assign(raw.begin() + 17, raw.begin() + 17 + len);
        std::copy(raw.end() - 16, raw.end(), ct.tag.begin());
        return ct;
    }

    friend bool operator==(const EnvelopeCiphertext& a, const EnvelopeCiphertext& b) {
        return a.version == b.version && a.nonce == b.nonce && a.ciphertext == b.ciphertext &&
               a.tag == b.tag;
    }
};

namespace detail {

struct CipherCtxDeleter {
    void operator()(EVP_CIPHER_CTX* p) const { EVP_CIPHER_CTX_free(p); }
};
using CipherCtxPtr = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;

inline CipherCtxPtr cipher_ctx() {
    CipherCtxPtr p(EVP_CIPHER_CTX_new());
    if (!p) raise(Errc::internal, "EVP_CIPHER_CTX_new failed");
    return p;
}

}  // namespace detail

inline EnvelopeCiphertext seal_bytes(ByteView plaintext, const DataKey& key, Rng& rng) {
    EnvelopeCiphertext ct;
    rng.fill(ct.nonce.data(), ct.nonce.size());

    auto ctx = detail::cipher_ctx();
    if (EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.key.data(),
                           ct.nonce.data()) != 1)
        raise(Errc::internal, "GCM init failed");
    ct.ciphertext.resize(plaintext.size());
    int out_len = 0;
    if (!plaintext.empty() &&
        EVP_EncryptUpdate(ctx.get(), ct.ciphertext.data(), &out_len, plaintext.data(),
                          static_cast<int>(plaintext.size())) != 1)
        raise(Errc::internal, "GCM encrypt failed");
    int final_len = 0;
    if (EVP_EncryptFinal_ex(ctx.get(), ct.ciphertext.data() + out_len, &final_len) != 1)
        raise(Errc::internal, "GCM finalize failed");
    if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, static_cast<int>(ct.tag.size()),
                            ct.tag.data()) != 1)
        raise(Errc::internal, "GCM tag extraction failed");
    return ct;
}

inline Bytes open_bytes(const EnvelopeCiphertext& ct, const DataKey& key) {
    if (ct.version != EnvelopeCiphertext::current_version)
        raise(Errc::unsupported_version, "envelope version " + std::to_string(ct.version));

    auto ctx = detail::cipher_ctx();
    if (EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.key.data(),
                           ct.nonce.data()) != 1)
        raise(Errc::internal, "GCM init failed");
    Bytes plaintext(ct.ciphertext.size());
    int out_len = 0;
    if (!ct.ciphertext.empty() &&
        EVP_DecryptUpdate(ctx.get(), plaintext.data(), &out_len, ct.ciphertext.data(),
                          static_cast<int>(ct.ciphertext.size())) != 1)
        raise(Errc::auth_failure, "ciphertext rejected");
    Bytes tag(ct.tag.begin(), ct.tag.end());
    if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, static_cast<int>(tag.size()),
                            tag.data()) != 1)
        raise(Errc::internal, "GCM tag set failed");
    int final_len = 0;
    if (EVP_DecryptFinal_ex(ctx.get(), plaintext.data() + out_len, &final_len) != 1)
        raise(Errc::auth_failure, "authentication tag mismatch");
    return plaintext;
}

}  // namespace vault::crypto

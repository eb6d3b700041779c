#pragma once

#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/sha.h>

#include "vault/bytes.hpp"
#include "vault/error.hpp"

namespace vault {

inline Hash32 sha256(ByteView data) {
    Hash32 out;
    SHA256(data.data(), data.size(), out.data());
    return out;
}

inline Hash32 hmac_sha256(ByteView key, ByteView data) {
    Hash32 out;
    unsigned int len = 0;
    if (!HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), data.data(), data.size(),
              out.data(), &len) ||
        len != out.size())
        raise(Errc::internal, "HMAC-SHA256 failed");
    return out;
}

// RFC 5869 extract-then-expand.
inline Bytes hkdf_sha256(ByteView ikm, ByteView salt, ByteView info, std::size_t length) {
    if (length > 255 * 32) raise(Errc::malformed_input, "hkdf output too long");
    Hash32 zero_salt{};
    Hash32 prk = hmac_sha256(salt.empty() ? ByteView(zero_salt) : salt, ikm);

    Bytes okm;
    okm.reserve(length);
    Bytes block;
    std::uint8_t counter = 1;
    while (okm.size() < length) {
        Bytes msg = block;
        append(msg, info);
        msg.push_back(counter++);
        Hash32 t = hmac_sha256(prk, msg);
        block.assign(t.begin(), t.end());
        std::size_t take = std::min<std::size_t>(block.size(), length - okm.size());
        okm.insert(okm.end(), block.begin(), block.begin() + take);
    }
    return okm;
}

}  // namespace vault

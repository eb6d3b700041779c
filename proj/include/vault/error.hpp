#pragma once

#include <stdexcept>
#include <string>

namespace vault {

enum class Errc {
    // small-integer schemes
    not_prime,
    exponent_not_coprime,
    message_out_of_range,
    point_not_on_curve,
    scalar_out_of_range,
    // envelope / key wrapping
    auth_failure,
    unsupported_version,
    malformed_ciphertext,
    payload_too_large,
    malformed_public_key,
    scheme_mismatch,
    decrypt_failure,
    // content-addressed store
    empty_chunk_list,
    storage_failure,
    not_found,
    integrity_failure,
    // ledger
    bad_signature,
    bad_nonce,
    insufficient_balance,
    nothing_to_mine,
    invalid_chain,
    // contracts
    empty_ciphertext,
    description_too_long,
    not_owner,
    bad_window,
    self_grant,
    unknown_file,
    // wallet
    seed_too_short,
    sender_mismatch,
    // application layer
    keypair_mismatch,
    empty_content,
    rejected,
    not_grantee,
    access_expired,
    // general
    malformed_input,
    internal,
};

constexpr const char* errc_name(Errc c) {
    switch (c) {
        case Errc::not_prime: return "not_prime";
        case Errc::exponent_not_coprime: return "exponent_not_coprime";
        case Errc::message_out_of_range: return "message_out_of_range";
        case Errc::point_not_on_curve: return "point_not_on_curve";
        case Errc::scalar_out_of_range: return "scalar_out_of_range";
        case Errc::auth_failure: return "auth_failure";
        case Errc::unsupported_version: return "unsupported_version";
        case Errc::malformed_ciphertext: return "malformed_ciphertext";
        case Errc::payload_too_large: return "payload_too_large";
        case Errc::malformed_public_key: return "malformed_public_key";
        case Errc::scheme_mismatch: return "scheme_mismatch";
        case Errc::decrypt_failure: return "decrypt_failure";
        case Errc::empty_chunk_list: return "empty_chunk_list";
        case Errc::storage_failure: return "storage_failure";
        case Errc::not_found: return "not_found";
        case Errc::integrity_failure: return "integrity_failure";
        case Errc::bad_signature: return "bad_signature";
        case Errc::bad_nonce: return "bad_nonce";
        case Errc::insufficient_balance: return "insufficient_balance";
        case Errc::nothing_to_mine: return "nothing_to_mine";
        case Errc::invalid_chain: return "invalid_chain";
        case Errc::empty_ciphertext: return "empty_ciphertext";
        case Errc::description_too_long: return "description_too_long";
        case Errc::not_owner: return "not_owner";
        case Errc::bad_window: return "bad_window";
        case Errc::self_grant: return "self_grant";
        case Errc::unknown_file: return "unknown_file";
        case Errc::seed_too_short: return "seed_too_short";
        case Errc::sender_mismatch: return "sender_mismatch";
        case Errc::keypair_mismatch: return "keypair_mismatch";
        case Errc::empty_content: return "empty_content";
        case Errc::rejected: return "rejected";
        case Errc::not_grantee: return "not_grantee";
        case Errc::access_expired: return "access_expired";
        case Errc::malformed_input: return "malformed_input";
        case Errc::internal: return "internal";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) {
    throw Error(code, what);
}

}  // namespace vault

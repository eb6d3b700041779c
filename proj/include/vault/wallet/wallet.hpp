#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <json.hpp>

#include "vault/crypto/ecdsa.hpp"
#include "vault/hash.hpp"
#include "vault/ledger/ledger.hpp"

namespace vault::wallet {

using ledger::Address;

struct Wallet {
    Hash32 signing_private{};
    Bytes signing_public;  // 33-byte compressed point
    Address address;
    std::string label;
};

inline constexpr std::size_t min_seed_bytes = 16;

// Derives the signing scalar from the seed via HKDF rejection sampling, so
// the same seed always yields the same address.
inline Wallet create_wallet(ByteView seed, std::string label = {}) {
    if (seed.size() < min_seed_bytes)
        raise(Errc::seed_too_short,
              "wallet seed needs at least " + std::to_string(min_seed_bytes) + " bytes");
    Wallet w;
    for (std::uint32_t counter = 0;; ++counter) {
        std::string info = "vault/wallet/signing-key/" + std::to_string(counter);
        Bytes candidate = hkdf_sha256(seed, {}, as_view(info), 32);
        Hash32 scalar;
        std::copy(candidate.begin(), candidate.end(), scalar.begin());
        if (crypto::secp::is_valid_scalar(scalar)) {
            w.signing_private = scalar;
            break;
        }
    }
    w.signing_public = crypto::secp::pubkey_from_scalar(w.signing_private);
    w.address = ledger::derive_address(w.signing_public);
    w.label = std::move(label);
    return w;
}

// Fills in the sender pubkey, hashes the canonical form, and signs. The
// deterministic nonce keeps repeated signing byte-identical.
inline ledger::Transaction sign_tx(ledger::Transaction tx, const Wallet& w) {
    if (tx.sender != w.address)
        raise(Errc::sender_mismatch, "transaction sender is not this wallet");
    if (!tx.sender_pubkey.empty() && tx.sender_pubkey != w.signing_public)
        raise(Errc::sender_mismatch, "transaction carries a foreign public key");
    tx.sender_pubkey = w.signing_public;
    tx.tx_hash = tx.compute_hash();
    tx.signature = crypto::ecdsa_sign(tx.tx_hash, w.signing_private).serialize();
    return tx;
}

// ---- confirmation gate ----

enum class Decision { approved, rejected };

struct ConfirmationRequest {
    ledger::ContractKind contract = ledger::ContractKind::storage;
    std::string method;
    std::size_t payload_size = 0;
    std::uint64_t fee = 0;
    Address sender;
};

class ConfirmationPolicy {
public:
    virtual ~ConfirmationPolicy() = default;
    virtual Decision decide(const ConfirmationRequest& req) = 0;
};

class AutoApprove final : public ConfirmationPolicy {
public:
    Decision decide(const ConfirmationRequest&) override { return Decision::approved; }
};

class AutoReject final : public ConfirmationPolicy {
public:
    Decision decide(const ConfirmationRequest&) override { return Decision::rejected; }
};

class SpendingCap final : public ConfirmationPolicy {
public:
    explicit SpendingCap(std::uint64_t max_fee) : max_fee_(max_fee) {}
    Decision decide(const ConfirmationRequest& req) override {
        return req.fee <= max_fee_ ? Decision::approved : Decision::rejected;
    }

private:
    std::uint64_t max_fee_;
};

// Renders the fee and sender, then reads y/n. Anything but an explicit yes
// rejects, leaving the ledger untouched.
class InteractivePolicy final : public ConfirmationPolicy {
public:
    InteractivePolicy(std::istream& in, std::ostream& out) : in_(in), out_(out) {}

    Decision decide(const ConfirmationRequest& req) override {
        out_ << ledger::contract_name(req.contract) << "/" << req.method << ", "
             << req.payload_size << " bytes, fee " << req.fee << " from " << req.sender
             << " — approve? [y/N] " << std::flush;
        std::string answer;
        std::getline(in_, answer);
        return (answer == "y" || answer == "Y" || answer == "yes") ? Decision::approved
                                                                   : Decision::rejected;
    }

private:
    std::istream& in_;
    std::ostream& out_;
};

// ---- wallet files (plaintext; see the warning field) ----

inline constexpr char wallet_file_warning[] =
    "UNENCRYPTED SIGNING KEY - do not reuse outside this sandboxed ledger";

inline void save_wallet(const std::filesystem::path& path, const Wallet& w) {
    nlohmann::json j{{"label", w.label},
                     {"private_key", hex_encode(w.signing_private)},
                     {"public_key", hex_encode(w.signing_public)},
                     {"address", w.address},
                     {"warning", wallet_file_warning}};
    std::ofstream out(path);
    if (!out) raise(Errc::storage_failure, "cannot write " + path.string());
    out << j.dump(2) << "\n";
}

inline Wallet load_wallet(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::not_found, "cannot read " + path.string());
    nlohmann::json j;
    try {
        in >> j;
        Wallet w;
        Bytes priv = hex_decode(j.at("private_key").get<std::string>());
        if (priv.size() != 32) raise(Errc::malformed_input, "bad private key length");
        std::copy(priv.begin(), priv.end(), w.signing_private.begin());
        w.signing_public = hex_decode(j.at("public_key").get<std::string>());
        w.address = j.at("address").get<std::string>();
        w.label = j.value("label", std::string{});
        if (crypto::secp::pubkey_from_scalar(w.signing_private) != w.signing_public ||
            ledger::derive_address(w.signing_public) != w.address)
            raise(Errc::malformed_input, "wallet file fields are inconsistent");
        return w;
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::malformed_input, path.string() + ": " + e.what());
    }
}

}  // namespace vault::wallet

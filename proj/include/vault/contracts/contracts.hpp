#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "vault/crypto/keys.hpp"
#include "vault/ledger/ledger.hpp"

namespace vault::contracts {

using json = nlohmann::json;
using ledger::Address;

// Replay-derived state machines for the two contracts. Rows are append-only;
// every query is answered from a snapshot produced by folding the confirmed
// chain, so identical chains always yield identical state.

inline constexpr char storage_contract_name[] = "CriptDStorage";
inline constexpr char permission_contract_name[] = "CriptDPermission";
inline constexpr char upload_method[] = "uploadFile";
inline constexpr char grant_method[] = "grantPermission";
inline constexpr std::size_t max_description_bytes = 1024;

struct FileRecord {
    std::uint64_t file_id = 0;
    Address owner;
    crypto::WrappedBlob enc_cid;       // CID wrapped under the owner's public key
    crypto::WrappedBlob enc_data_key;  // AES key wrapped under the owner's public key
    std::string description;
    std::string file_type;
    std::uint64_t size_bytes = 0;
    std::uint64_t uploaded_at = 0;  // containing block timestamp
};

struct PermissionGrant {
    std::uint64_t grant_id = 0;
    Address granter;
    Address grantee;
    std::uint64_t file_id = 0;
    crypto::WrappedBlob enc_cid_for_grantee;
    crypto::WrappedBlob enc_data_key_for_grantee;
    std::string description;
    std::string file_type;
    std::uint64_t valid_from = 0;
    std::uint64_t valid_until = 0;
};

// Access window is half-open: [valid_from, valid_until).
inline bool check_access(const PermissionGrant& grant, std::uint64_t at_time) {
    return grant.valid_from <= at_time && at_time < grant.valid_until;
}

struct ContractState {
    std::vector<FileRecord> files;
    std::vector<PermissionGrant> grants;

    const FileRecord* find_file(std::uint64_t file_id) const {
        return file_id < files.size() ? &files[file_id] : nullptr;
    }

    const PermissionGrant* find_grant(std::uint64_t grant_id) const {
        return grant_id < grants.size() ? &grants[grant_id] : nullptr;
    }
};

// ---- transaction payload builders ----

inline Bytes storage_upload_payload(const crypto::WrappedBlob& enc_cid,
                                    const crypto::WrappedBlob& enc_data_key,
                                    const std::string& description, const std::string& file_type,
                                    std::uint64_t size_bytes) {
    if (enc_cid.payload.empty() || enc_data_key.payload.empty())
        raise(Errc::empty_ciphertext, "wrapped CID and data key must be non-empty");
    if (description.size() > max_description_bytes)
        raise(Errc::description_too_long,
              "description limited to " + std::to_string(max_description_bytes) + " bytes");
    json j{{"description", description},
           {"enc_cid", enc_cid.to_json()},
           {"enc_data_key", enc_data_key.to_json()},
           {"file_type", file_type},
           {"size_bytes", size_bytes}};
    return to_bytes(j.dump());
}

inline Bytes permission_grant_payload(const ContractState& state, const Address& sender,
                                      std::uint64_t file_id, const Address& grantee,
                                      const crypto::WrappedBlob& enc_cid_for_grantee,
                                      const crypto::WrappedBlob& enc_data_key_for_grantee,
                                      const std::string& description,
                                      const std::string& file_type, std::uint64_t valid_from,
                                      std::uint64_t valid_until) {
    const FileRecord* file = state.find_file(file_id);
    if (!file) raise(Errc::unknown_file, "no file with id " + std::to_string(file_id));
    if (file->owner != sender) raise(Errc::not_owner, "only the owner may grant access");
    if (grantee == sender) raise(Errc::self_grant, "grantee must differ from the owner");
    if (valid_from >= valid_until)
        raise(Errc::bad_window, "validity window must satisfy valid_from < valid_until");
    if (enc_cid_for_grantee.payload.empty() || enc_data_key_for_grantee.payload.empty())
        raise(Errc::empty_ciphertext, "re-wrapped CID and data key must be non-empty");
    if (description.size() > max_description_bytes)
        raise(Errc::description_too_long,
              "description limited to " + std::to_string(max_description_bytes) + " bytes");
    json j{{"description", description},
           {"enc_cid", enc_cid_for_grantee.to_json()},
           {"enc_data_key", enc_data_key_for_grantee.to_json()},
           {"file_id", file_id},
           {"file_type", file_type},
           {"grantee", grantee},
           {"valid_from", valid_from},
           {"valid_until", valid_until}};
    return to_bytes(j.dump());
}

// ---- replay ----

namespace detail {

inline bool apply_upload(ContractState& state, const ledger::Transaction& tx,
                         std::uint64_t block_timestamp, std::string* reason) {
    try {
        json j = json::parse(tx.payload.begin(), tx.payload.end());
        FileRecord rec;
        rec.file_id = state.files.size();
        rec.owner = tx.sender;
        rec.enc_cid = crypto::WrappedBlob::from_json(j.at("enc_cid"));
        rec.enc_data_key = crypto::WrappedBlob::from_json(j.at("enc_data_key"));
        rec.description = j.at("description").get<std::string>();
        rec.file_type = j.at("file_type").get<std::string>();
        rec.size_bytes = j.at("size_bytes").get<std::uint64_t>();
        rec.uploaded_at = block_timestamp;
        if (rec.enc_cid.payload.empty() || rec.enc_data_key.payload.empty()) {
            if (reason) *reason = "empty ciphertext field";
            return false;
        }
        if (rec.description.size() > max_description_bytes) {
            if (reason) *reason = "description too long";
            return false;
        }
        state.files.push_back(std::move(rec));
        return true;
    } catch (const std::exception& e) {
        if (reason) *reason = e.what();
        return false;
    }
}

inline bool apply_grant(ContractState& state, const ledger::Transaction& tx,
                        std::string* reason) {
    try {
        json j = json::parse(tx.payload.begin(), tx.payload.end());
        PermissionGrant g;
        g.grant_id = state.grants.size();
        g.granter = tx.sender;
        g.grantee = j.at("grantee").get<std::string>();
        g.file_id = j.at("file_id").get<std::uint64_t>();
        g.enc_cid_for_grantee = crypto::WrappedBlob::from_json(j.at("enc_cid"));
        g.enc_data_key_for_grantee = crypto::WrappedBlob::from_json(j.at("enc_data_key"));
        g.description = j.at("description").get<std::string>();
        g.file_type = j.at("file_type").get<std::string>();
        g.valid_from = j.at("valid_from").get<std::uint64_t>();
        g.valid_until = j.at("valid_until").get<std::uint64_t>();

        const FileRecord* file = state.find_file(g.file_id);
        if (!file || file->owner != g.granter || g.grantee == g.granter ||
            g.valid_from >= g.valid_until || g.enc_cid_for_grantee.payload.empty() ||
            g.enc_data_key_for_grantee.payload.empty() ||
            g.description.size() > max_description_bytes || !ledger::is_address(g.grantee)) {
            if (reason) *reason = "grant rejected by contract rules";
            return false;
        }
        state.grants.push_back(std::move(g));
        return true;
    } catch (const std::exception& e) {
        if (reason) *reason = e.what();
        return false;
    }
}

}  // namespace detail

// Folds every confirmed contract call in chain order. Calls that violate the
// contract rules are skipped (and reported), never applied partially.
inline ContractState replay_contracts(const std::vector<ledger::Block>& chain,
                                      std::vector<std::string>* skipped = nullptr) {
    ContractState state;
    for (const auto& block : chain) {
        for (const auto& tx : block.txs) {
            std::string reason;
            bool ok = true;
            if (tx.contract == ledger::ContractKind::storage && tx.method == upload_method)
                ok = detail::apply_upload(state, tx, block.timestamp, &reason);
            else if (tx.contract == ledger::ContractKind::permission && tx.method == grant_method)
                ok = detail::apply_grant(state, tx, &reason);
            else if (tx.contract != ledger::ContractKind::transfer)
                ok = (reason = "unknown method " + tx.method, false);
            if (!ok && skipped)
                skipped->push_back("tx " + hex_encode(tx.tx_hash) + ": " + reason);
        }
    }
    return state;
}

inline std::vector<FileRecord> storage_list(const Address& owner, const ContractState& state) {
    std::vector<FileRecord> out;
    for (const auto& rec : state.files)
        if (rec.owner == owner) out.push_back(rec);
    return out;
}

inline std::vector<PermissionGrant> permission_list_for(const Address& grantee,
                                                        const ContractState& state) {
    std::vector<PermissionGrant> out;
    for (const auto& g : state.grants)
        if (g.grantee == grantee) out.push_back(g);
    return out;
}

// ---- ABI export ----

inline json export_abi(ledger::ContractKind kind) {
    auto input = [](const char* name, const char* type) {
        return json{{"name", name}, {"type", type}};
    };
    if (kind == ledger::ContractKind::storage) {
        return {{"contract_name", storage_contract_name},
                {"functions",
                 json::array(
                     {{{"name", upload_method},
                       {"inputs", json::array({input("enc_cid", "bytes"),
                                               input("enc_data_key", "bytes"),
                                               input("description", "string"),
                                               input("file_type", "string"),
                                               input("size_bytes", "uint64")})},
                       {"outputs", json::array({"uint64"})}},
                      {{"name", "getFiles"},
                       {"inputs", json::array({input("owner", "address")})},
                       {"outputs", json::array({"tuple[]"})}}})}};
    }
    if (kind == ledger::ContractKind::permission) {
        return {{"contract_name", permission_contract_name},
                {"functions",
                 json::array(
                     {{{"name", grant_method},
                       {"inputs", json::array({input("file_id", "uint64"),
                                               input("grantee", "address"),
                                               input("enc_cid", "bytes"),
                                               input("enc_data_key", "bytes"),
                                               input("description", "string"),
                                               input("file_type", "string"),
                                               input("valid_from", "uint64"),
                                               input("valid_until", "uint64")})},
                       {"outputs", json::array({"uint64"})}},
                      {{"name", "getGrantsFor"},
                       {"inputs", json::array({input("grantee", "address")})},
                       {"outputs", json::array({"tuple[]"})}},
                      {{"name", "checkAccess"},
                       {"inputs", json::array({input("grant_id", "uint64"),
                                               input("at_time", "uint64")})},
                       {"outputs", json::array({"bool"})}}})}};
    }
    raise(Errc::malformed_input, "no ABI for the transfer pseudo-contract");
}

}  // namespace vault::contracts

#pragma once

#include <ctime>
#include <functional>
#include <optional>

#include "vault/cas/store.hpp"
#include "vault/contracts/contracts.hpp"
#include "vault/crypto/keys.hpp"
#include "vault/ledger/ledger.hpp"
#include "vault/wallet/wallet.hpp"

namespace vault::dapp {

using ledger::Address;

using Clock = std::function<std::uint64_t()>;

inline Clock system_clock() {
    return [] { return static_cast<std::uint64_t>(std::time(nullptr)); };
}

// A logged-in identity: signing wallet plus the session's encryption keypair.
// Plaintext CIDs and data keys exist only inside call frames and view
// objects; nothing here persists them.
struct Session {
    wallet::Wallet wallet;
    crypto::AsymScheme scheme = crypto::AsymScheme::ecies_secp256k1;
    crypto::AsymKeypair enc_keypair;
    Clock clock;

    std::uint64_t now() const { return clock(); }
};

// Fresh keys are generated when none are imported; imported pairs are probed
// with a wrap/unwrap roundtrip before the session is handed out.
inline Session login(wallet::Wallet w, crypto::AsymScheme scheme,
                     std::optional<crypto::AsymKeypair> imported, Rng& rng,
                     Clock clock = system_clock()) {
    Session s;
    s.wallet = std::move(w);
    s.scheme = scheme;
    s.clock = std::move(clock);
    if (imported) {
        if (imported->scheme != scheme)
            raise(Errc::keypair_mismatch, "imported keys are not of the requested scheme");
        s.enc_keypair = std::move(*imported);
    } else {
        s.enc_keypair = crypto::gen_asym_keypair(scheme, rng);
    }

    Bytes probe = rng.bytes(32);
    try {
        auto blob = crypto::wrap_key(probe, s.enc_keypair.public_key, scheme, rng);
        if (crypto::unwrap_key(blob, s.enc_keypair) != probe)
            raise(Errc::keypair_mismatch, "public and private halves disagree");
    } catch (const Error& err) {
        if (err.code() == Errc::keypair_mismatch) throw;
        raise(Errc::keypair_mismatch, std::string("keypair probe failed: ") + err.what());
    }
    return s;
}

struct StoredFileView {
    contracts::FileRecord record;
    std::optional<std::string> cid;  // decrypted in memory; nullopt when locked

    bool locked() const { return !cid.has_value(); }
};

struct SharedFileView {
    contracts::PermissionGrant grant;
    std::optional<std::string> cid;
    bool accessible = false;  // check_access at the session clock
};

namespace detail {

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& err) {
        throw Error(err.code(), std::string(name) + ": " + err.what());
    }
}

inline crypto::DataKey data_key_from_bytes(const Bytes& raw) {
    if (raw.size() != 32) raise(Errc::decrypt_failure, "unwrapped data key is not 32 bytes");
    crypto::DataKey dk;
    std::copy(raw.begin(), raw.end(), dk.key.begin());
    return dk;
}

}  // namespace detail

// Drives the upload/list/fetch/grant flows over a ledger and a local
// content-addressed store. One instance per process; callers serialize
// mutating calls per the ledger's single-writer contract.
class Dapp {
public:
    Dapp(ledger::Ledger& led, cas::Store& store) : ledger_(led), store_(store) {}

    ledger::Ledger& chain() { return ledger_; }
    cas::Store& store() { return store_; }

    contracts::ContractState contract_state() const {
        return contracts::replay_contracts(ledger_.chain());
    }

    // seal -> cas.put -> wrap CID and data key -> uploadFile tx -> confirm -> mine
    std::uint64_t store_file(Session& s, ByteView content, const std::string& description,
                             const std::string& file_type, wallet::ConfirmationPolicy& policy,
                             Rng& rng) {
        if (content.empty()) raise(Errc::empty_content, "refusing to store an empty file");

        crypto::DataKey dk = crypto::gen_data_key(rng);
        auto sealed = detail::stage("seal", [&] { return crypto::seal_bytes(content, dk, rng); });
        std::string cid =
            detail::stage("cas.put", [&] { return store_.put(sealed.serialize()); });

        auto enc_cid = detail::stage("wrap", [&] {
            return crypto::wrap_key(as_view(cid), s.enc_keypair.public_key, s.scheme, rng);
        });
        auto enc_dk = detail::stage("wrap", [&] {
            return crypto::wrap_key(dk.key, s.enc_keypair.public_key, s.scheme, rng);
        });

        Bytes payload = contracts::storage_upload_payload(enc_cid, enc_dk, description,
                                                          file_type, content.size());
        confirm_and_commit(s, ledger::ContractKind::storage, contracts::upload_method, payload,
                           policy);

        auto state = contract_state();
        for (auto it = state.files.rbegin(); it != state.files.rend(); ++it)
            if (it->owner == s.wallet.address && it->enc_cid == enc_cid) return it->file_id;
        raise(Errc::internal, "confirmed upload not found in replayed state");
    }

    std::vector<StoredFileView> list_my_files(const Session& s) const {
        std::vector<StoredFileView> out;
        for (auto& rec : contracts::storage_list(s.wallet.address, contract_state())) {
            StoredFileView view{std::move(rec), std::nullopt};
            try {
                view.cid = to_string(crypto::unwrap_key(view.record.enc_cid, s.enc_keypair));
            } catch (const Error&) {
                // wrong session keys: listed as locked
            }
            out.push_back(std::move(view));
        }
        return out;
    }

    Bytes fetch_file(const Session& s, std::uint64_t file_id) const {
        auto state = contract_state();
        const contracts::FileRecord* rec = state.find_file(file_id);
        if (!rec) raise(Errc::not_found, "no file with id " + std::to_string(file_id));
        if (rec->owner != s.wallet.address)
            raise(Errc::not_owner, "file belongs to " + rec->owner);
        return decrypt_record(s, rec->enc_cid, rec->enc_data_key);
    }

    // unwrap own copies -> re-wrap under the grantee key -> grant tx -> confirm -> mine
    std::uint64_t grant_access(Session& s, std::uint64_t file_id, const Address& grantee,
                               ByteView grantee_pub, std::uint64_t valid_from,
                               std::uint64_t valid_until, const std::string& description,
                               wallet::ConfirmationPolicy& policy, Rng& rng) {
        auto state = contract_state();
        const contracts::FileRecord* rec = state.find_file(file_id);
        if (!rec) raise(Errc::unknown_file, "no file with id " + std::to_string(file_id));
        if (rec->owner != s.wallet.address)
            raise(Errc::not_owner, "only the owner may grant access");
        if (valid_from >= valid_until)
            raise(Errc::bad_window, "validity window must satisfy valid_from < valid_until");

        Bytes cid = detail::stage("unwrap", [&] {
            return crypto::unwrap_key(rec->enc_cid, s.enc_keypair);
        });
        Bytes dk = detail::stage("unwrap", [&] {
            return crypto::unwrap_key(rec->enc_data_key, s.enc_keypair);
        });
        auto enc_cid = detail::stage("rewrap", [&] {
            return crypto::wrap_key(cid, grantee_pub, s.scheme, rng);
        });
        auto enc_dk = detail::stage("rewrap", [&] {
            return crypto::wrap_key(dk, grantee_pub, s.scheme, rng);
        });

        Bytes payload = contracts::permission_grant_payload(
            state, s.wallet.address, file_id, grantee, enc_cid, enc_dk, description,
            rec->file_type, valid_from, valid_until);
        confirm_and_commit(s, ledger::ContractKind::permission, contracts::grant_method, payload,
                           policy);

        auto after = contract_state();
        for (auto it = after.grants.rbegin(); it != after.grants.rend(); ++it)
            if (it->granter == s.wallet.address && it->enc_cid_for_grantee == enc_cid)
                return it->grant_id;
        raise(Errc::internal, "confirmed grant not found in replayed state");
    }

    std::vector<SharedFileView> list_shared(const Session& s) const {
        std::uint64_t now = s.now();
        std::vector<SharedFileView> out;
        for (auto& grant : contracts::permission_list_for(s.wallet.address, contract_state())) {
            SharedFileView view{std::move(grant), std::nullopt, false};
            view.accessible = contracts::check_access(view.grant, now);
            try {
                view.cid = to_string(
                    crypto::unwrap_key(view.grant.enc_cid_for_grantee, s.enc_keypair));
            } catch (const Error&) {
            }
            out.push_back(std::move(view));
        }
        return out;
    }

    // Refuses outside [valid_from, valid_until) before touching any key material.
    Bytes fetch_shared(const Session& s, std::uint64_t grant_id) const {
        auto state = contract_state();
        const contracts::PermissionGrant* grant = state.find_grant(grant_id);
        if (!grant) raise(Errc::not_found, "no grant with id " + std::to_string(grant_id));
        if (grant->grantee != s.wallet.address)
            raise(Errc::not_grantee, "grant names " + grant->grantee);
        if (!contracts::check_access(*grant, s.now()))
            raise(Errc::access_expired, "grant valid over [" + std::to_string(grant->valid_from) +
                                            ", " + std::to_string(grant->valid_until) + ")");
        return decrypt_record(s, grant->enc_cid_for_grantee, grant->enc_data_key_for_grantee);
    }

private:
    Bytes decrypt_record(const Session& s, const crypto::WrappedBlob& enc_cid,
                         const crypto::WrappedBlob& enc_dk) const {
        std::string cid = to_string(detail::stage("unwrap", [&] {
            return crypto::unwrap_key(enc_cid, s.enc_keypair);
        }));
        crypto::DataKey dk = detail::data_key_from_bytes(detail::stage("unwrap", [&] {
            return crypto::unwrap_key(enc_dk, s.enc_keypair);
        }));
        Bytes blob = detail::stage("cas.get", [&] { return store_.get(cid); });
        auto sealed = detail::stage("parse", [&] {
            try {
                return crypto::EnvelopeCiphertext::parse(blob);
            } catch (const Error& err) {
                if (err.code() == Errc::malformed_ciphertext)
                    raise(Errc::integrity_failure, err.what());
                throw;
            }
        });
        return detail::stage("open", [&] { return crypto::open_bytes(sealed, dk); });
    }

    void confirm_and_commit(Session& s, ledger::ContractKind contract, const std::string& method,
                            const Bytes& payload, wallet::ConfirmationPolicy& policy) {
        ledger::Transaction tx;
        tx.nonce = ledger_.next_nonce(s.wallet.address);
        tx.sender = s.wallet.address;
        tx.contract = contract;
        tx.method = method;
        tx.payload = payload;
        tx.gas_price = ledger_.config().gas_price;

        wallet::ConfirmationRequest req{contract, method, payload.size(),
                                        ledger::estimate_fee(tx), s.wallet.address};
        if (policy.decide(req) != wallet::Decision::approved)
            raise(Errc::rejected, "transaction rejected at the confirmation gate");

        auto signed_tx = wallet::sign_tx(tx, s.wallet);
        detail::stage("submit", [&] { return ledger_.submit_tx(signed_tx); });
        Address miner = ledger_.config().miner.empty() ? s.wallet.address : ledger_.config().miner;
        detail::stage("mine", [&] { return ledger_.mine_block(miner, s.now()); });
    }

    ledger::Ledger& ledger_;
    cas::Store& store_;
};

}  // namespace vault::dapp

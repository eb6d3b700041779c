#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "vault/bytes.hpp"
#include "vault/crypto/ecdsa.hpp"
#include "vault/error.hpp"
#include "vault/hash.hpp"

namespace vault::ledger {

using json = nlohmann::json;

// 40 lowercase hex characters: the last 20 bytes of SHA-256 over the
// compressed signing public key.
using Address = std::string;

inline Address derive_address(ByteView public_compressed33) {
    Hash32 digest = sha256(public_compressed33);
    return hex_encode(ByteView(digest).subspan(12));
}

inline bool is_address(const std::string& s) {
    if (s.size() != 40) return false;
    for (char c : s)
        if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
    return true;
}

enum class ContractKind { storage, permission, transfer };

inline std::string contract_name(ContractKind k) {
    switch (k) {
        case ContractKind::storage: return "Storage";
        case ContractKind::permission: return "Permission";
        case ContractKind::transfer: return "Transfer";
    }
    raise(Errc::internal, "bad contract kind");
}

inline ContractKind parse_contract(const std::string& name) {
    if (name == "Storage") return ContractKind::storage;
    if (name == "Permission") return ContractKind::permission;
    if (name == "Transfer") return ContractKind::transfer;
    raise(Errc::malformed_input, "unknown contract: " + name);
}

struct Transaction {
    std::uint64_t nonce = 0;
    Address sender;
    Bytes sender_pubkey;  // compressed point; the address must re-derive from it
    ContractKind contract = ContractKind::storage;
    std::string method;
    Bytes payload;
    std::uint64_t gas_price = 0;
    Bytes signature;  // 64-byte r||s over tx_hash
    Hash32 tx_hash{};

    json signable_json() const {
        return {{"contract", contract_name(contract)},
                {"gas_price", gas_price},
                {"method", method},
                {"nonce", nonce},
                {"payload", base64_encode(payload)},
                {"sender", sender},
                {"sender_pubkey", hex_encode(sender_pubkey)}};
    }

    Hash32 compute_hash() const { return sha256(as_view(signable_json().dump())); }

    json to_json() const {
        json j = signable_json();
        j["signature"] = hex_encode(signature);
        j["tx_hash"] = hex_encode(tx_hash);
        return j;
    }

    static Transaction from_json(const json& j) {
        Transaction tx;
        tx.contract = parse_contract(j.at("contract").get<std::string>());
        tx.gas_price = j.at("gas_price").get<std::uint64_t>();
        tx.method = j.at("method").get<std::string>();
        tx.nonce = j.at("nonce").get<std::uint64_t>();
        tx.payload = base64_decode(j.at("payload").get<std::string>());
        tx.sender = j.at("sender").get<std::string>();
        tx.sender_pubkey = hex_decode(j.at("sender_pubkey").get<std::string>());
        tx.signature = hex_decode(j.at("signature").get<std::string>());
        Bytes h = hex_decode(j.at("tx_hash").get<std::string>());
        if (h.size() != 32) raise(Errc::malformed_input, "tx_hash must be 32 bytes");
        std::copy(h.begin(), h.end(), tx.tx_hash.begin());
        return tx;
    }
};

// fee = gas_price * (21000 + 68 per payload byte)
inline std::uint64_t estimate_fee(const Transaction& tx) {
    return tx.gas_price * (21000 + 68 * static_cast<std::uint64_t>(tx.payload.size()));
}

struct Block {
    std::uint64_t height = 0;
    Hash32 prev_hash{};
    std::uint64_t timestamp = 0;
    Address miner;
    std::uint32_t difficulty = 0;
    std::uint64_t pow_nonce = 0;
    std::vector<Transaction> txs;
    Hash32 block_hash{};

    json hashable_json() const {
        json jtxs = json::array();
        for (const auto& tx : txs) jtxs.push_back(tx.to_json());
        return {{"difficulty", difficulty}, {"height", height},
                {"miner", miner},           {"pow_nonce", pow_nonce},
                {"prev_hash", hex_encode(prev_hash)}, {"timestamp", timestamp},
                {"txs", std::move(jtxs)}};
    }

    Hash32 compute_hash() const { return sha256(as_view(hashable_json().dump())); }

    json to_json() const {
        json j = hashable_json();
        j["block_hash"] = hex_encode(block_hash);
        return j;
    }

    static Block from_json(const json& j) {
        Block b;
        b.difficulty = j.at("difficulty").get<std::uint32_t>();
        b.height = j.at("height").get<std::uint64_t>();
        b.miner = j.at("miner").get<std::string>();
        b.pow_nonce = j.at("pow_nonce").get<std::uint64_t>();
        Bytes prev = hex_decode(j.at("prev_hash").get<std::string>());
        if (prev.size() != 32) raise(Errc::malformed_input, "prev_hash must be 32 bytes");
        std::copy(prev.begin(), prev.end(), b.prev_hash.begin());
        b.timestamp = j.at("timestamp").get<std::uint64_t>();
        for (const auto& jt : j.at("txs")) b.txs.push_back(Transaction::from_json(jt));
        Bytes h = hex_decode(j.at("block_hash").get<std::string>());
        if (h.size() != 32) raise(Errc::malformed_input, "block_hash must be 32 bytes");
        std::copy(h.begin(), h.end(), b.block_hash.begin());
        return b;
    }
};

inline unsigned leading_zero_bits(const Hash32& h) {
    unsigned bits = 0;
    for (std::uint8_t byte : h) {
        if (byte == 0) {
            bits += 8;
            continue;
        }
        for (int shift = 7; shift >= 0 && !(byte >> shift & 1); --shift) ++bits;
        break;
    }
    return bits;
}

struct GenesisConfig {
    std::map<Address, std::uint64_t> allocations;
    std::uint32_t difficulty = 0;
    std::uint64_t block_reward = 2;
    std::uint64_t gas_price = 1;
    bool allow_empty_blocks = false;
    Address miner;

    std::uint64_t genesis_supply() const {
        std::uint64_t total = 0;
        for (const auto& [addr, amount] : allocations) total += amount;
        return total;
    }

    json to_json() const {
        json alloc = json::object();
        for (const auto& [addr, amount] : allocations) alloc[addr] = amount;
        return {{"allocations", std::move(alloc)}, {"allow_empty_blocks", allow_empty_blocks},
                {"block_reward", block_reward},    {"difficulty", difficulty},
                {"gas_price", gas_price},          {"miner", miner}};
    }

    static GenesisConfig from_json(const json& j) {
        GenesisConfig cfg;
        for (const auto& [addr, amount] : j.at("allocations").items())
            cfg.allocations[addr] = amount.get<std::uint64_t>();
        cfg.allow_empty_blocks = j.at("allow_empty_blocks").get<bool>();
        cfg.block_reward = j.at("block_reward").get<std::uint64_t>();
        cfg.difficulty = j.at("difficulty").get<std::uint32_t>();
        cfg.gas_price = j.at("gas_price").get<std::uint64_t>();
        cfg.miner = j.at("miner").get<std::string>();
        return cfg;
    }
};

struct LedgerState {
    std::map<Address, std::uint64_t> balances;
    std::map<Address, std::uint64_t> nonces;  // next expected nonce per sender

    std::uint64_t balance(const Address& a) const {
        auto it = balances.find(a);
        return it == balances.end() ? 0 : it->second;
    }

    std::uint64_t nonce(const Address& a) const {
        auto it = nonces.find(a);
        return it == nonces.end() ? 0 : it->second;
    }

    friend bool operator==(const LedgerState& a, const LedgerState& b) {
        return a.balances == b.balances && a.nonces == b.nonces;
    }
};

namespace detail {

inline bool parse_transfer(const Transaction& tx, Address& to, std::uint64_t& amount) {
    try {
        json j = json::parse(tx.payload.begin(), tx.payload.end());
        to = j.at("to").get<std::string>();
        amount = j.at("amount").get<std::uint64_t>();
        return is_address(to);
    } catch (const json::exception&) {
        return false;
    }
}

// Applies one transaction to the state; returns false (with a reason) instead
// of throwing so verify_chain can report every defect it finds.
inline bool apply_tx(LedgerState& state, const Transaction& tx, const Address& miner,
                     std::string* reason) {
    auto fail = [&](const std::string& why) {
        if (reason) *reason = why;
        return false;
    };
    if (tx.compute_hash() != tx.tx_hash) return fail("tx hash mismatch");
    if (tx.sender_pubkey.size() != 33 || derive_address(tx.sender_pubkey) != tx.sender)
        return fail("sender address does not derive from pubkey");
    crypto::EcdsaSignature sig;
    try {
        sig = crypto::EcdsaSignature::parse(tx.signature);
    } catch (const Error&) {
        return fail("unparseable signature");
    }
    if (!crypto::ecdsa_verify(tx.tx_hash, sig, tx.sender_pubkey))
        return fail("signature does not verify");
    if (tx.nonce != state.nonce(tx.sender)) return fail("nonce gap or replay");

    std::uint64_t fee = estimate_fee(tx);
    std::uint64_t owed = fee;
    Address transfer_to;
    std::uint64_t transfer_amount = 0;
    if (tx.contract == ContractKind::transfer) {
        if (!parse_transfer(tx, transfer_to, transfer_amount))
            return fail("malformed transfer payload");
        owed += transfer_amount;
    }
    if (state.balance(tx.sender) < owed) return fail("sender balance below fee");

    state.balances[tx.sender] -= owed;
    state.balances[miner] += fee;
    if (tx.contract == ContractKind::transfer) state.balances[transfer_to] += transfer_amount;
    state.nonces[tx.sender] = tx.nonce + 1;
    return true;
}

}  // namespace detail

inline bool verify_chain(const std::vector<Block>& chain, const GenesisConfig& config,
                         std::vector<std::string>* reasons = nullptr) {
    auto report = [&](std::uint64_t height, const std::string& why) {
        if (reasons) reasons->push_back("block " + std::to_string(height) + ": " + why);
        return false;
    };

    LedgerState state;
    state.balances = config.allocations;
    Hash32 prev{};
    std::uint64_t prev_timestamp = 0;
    bool ok = true;

    for (std::size_t i = 0; i < chain.size(); ++i) {
        const Block& b = chain[i];
        if (b.height != i) ok = report(b.height, "height out of sequence");
        if (b.prev_hash != prev) ok = report(b.height, "broken parent link");
        if (b.timestamp <= prev_timestamp) ok = report(b.height, "timestamp not increasing");
        if (b.compute_hash() != b.block_hash) ok = report(b.height, "block hash mismatch");
        if (b.difficulty != config.difficulty) ok = report(b.height, "difficulty mismatch");
        if (leading_zero_bits(b.block_hash) < b.difficulty)
            ok = report(b.height, "proof of work not satisfied");
        if (b.txs.empty() && !config.allow_empty_blocks)
            ok = report(b.height, "empty block not allowed");
        for (const auto& tx : b.txs) {
            std::string why;
            if (!detail::apply_tx(state, tx, b.miner, &why)) ok = report(b.height, why);
        }
        state.balances[b.miner] += config.block_reward;
        prev = b.block_hash;
        prev_timestamp = b.timestamp;
    }
    return ok;
}

inline LedgerState replay_state(const std::vector<Block>& chain, const GenesisConfig& config) {
    std::vector<std::string> reasons;
    if (!verify_chain(chain, config, &reasons))
        raise(Errc::invalid_chain, reasons.empty() ? "chain rejected" : reasons.front());
    LedgerState state;
    state.balances = config.allocations;
    for (const auto& b : chain) {
        for (const auto& tx : b.txs) detail::apply_tx(state, tx, b.miner, nullptr);
        state.balances[b.miner] += config.block_reward;
    }
    return state;
}

// Single-node ledger: one writer at a time; reads take value snapshots.
class Ledger {
public:
    explicit Ledger(GenesisConfig config, std::vector<Block> chain = {})
        : config_(std::move(config)) {
        std::vector<std::string> reasons;
        if (!verify_chain(chain, config_, &reasons))
            raise(Errc::invalid_chain, reasons.empty() ? "chain rejected" : reasons.front());
        state_.balances = config_.allocations;
        for (const auto& b : chain) {
            for (const auto& tx : b.txs) detail::apply_tx(state_, tx, b.miner, nullptr);
            state_.balances[b.miner] += config_.block_reward;
        }
        chain_ = std::move(chain);
    }

    const GenesisConfig& config() const { return config_; }
    const std::vector<Block>& chain() const { return chain_; }
    const std::vector<Transaction>& mempool() const { return mempool_; }
    const LedgerState& state() const { return state_; }

    std::uint64_t balance(const Address& a) const { return state_.balance(a); }

    // Next valid nonce for a sender, counting queued transactions.
    std::uint64_t next_nonce(const Address& a) const {
        std::uint64_t n = state_.nonce(a);
        for (const auto& tx : mempool_)
            if (tx.sender == a) ++n;
        return n;
    }

    Hash32 submit_tx(const Transaction& tx) {
        if (tx.compute_hash() != tx.tx_hash ||
            tx.sender_pubkey.size() != 33 ||
            derive_address(tx.sender_pubkey) != tx.sender)
            raise(Errc::bad_signature, "transaction hash or sender identity rejected");
        crypto::EcdsaSignature sig;
        try {
            sig = crypto::EcdsaSignature::parse(tx.signature);
        } catch (const Error&) {
            raise(Errc::bad_signature, "signature is not 64 bytes");
        }
        if (!crypto::ecdsa_verify(tx.tx_hash, sig, tx.sender_pubkey))
            raise(Errc::bad_signature, "signature does not verify over tx hash");
        if (tx.nonce != next_nonce(tx.sender))
            raise(Errc::bad_nonce, "expected nonce " + std::to_string(next_nonce(tx.sender)));

        std::uint64_t owed = estimate_fee(tx);
        if (tx.contract == ContractKind::transfer) {
            Address to;
            std::uint64_t amount = 0;
            if (!detail::parse_transfer(tx, to, amount))
                raise(Errc::malformed_input, "transfer payload must carry {to, amount}");
            owed += amount;
        }
        for (const auto& pending : mempool_)
            if (pending.sender == tx.sender) owed += estimate_fee(pending);
        if (state_.balance(tx.sender) < owed)
            raise(Errc::insufficient_balance, "sender cannot cover fees");

        mempool_.push_back(tx);
        return tx.tx_hash;
    }

    Block mine_block(const Address& miner, std::uint64_t now) {
        if (mempool_.empty() && !config_.allow_empty_blocks)
            raise(Errc::nothing_to_mine, "mempool is empty");

        Block b;
        b.height = chain_.size();
        b.prev_hash = chain_.empty() ? Hash32{} : chain_.back().block_hash;
        std::uint64_t floor = chain_.empty() ? 0 : chain_.back().timestamp;
        b.timestamp = std::max(now, floor + 1);
        b.miner = miner;
        b.difficulty = config_.difficulty;
        b.txs = std::move(mempool_);
        mempool_.clear();

        for (b.pow_nonce = 0;; ++b.pow_nonce) {
            b.block_hash = b.compute_hash();
            if (leading_zero_bits(b.block_hash) >= b.difficulty) break;
        }

        for (const auto& tx : b.txs) {
            std::string why;
            if (!detail::apply_tx(state_, tx, b.miner, &why))
                raise(Errc::internal, "mempool tx no longer applies: " + why);
        }
        state_.balances[b.miner] += config_.block_reward;
        chain_.push_back(b);
        return chain_.back();
    }

    // ---- persistence: one canonical-JSON block per line ----

    void save_chain(const std::filesystem::path& path) const {
        std::ofstream out(path, std::ios::trunc);
        if (!out) raise(Errc::storage_failure, "cannot write " + path.string());
        for (const auto& b : chain_) out << b.to_json().dump() << "\n";
    }

    static std::vector<Block> load_chain(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) return {};
        std::vector<Block> chain;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            try {
                chain.push_back(Block::from_json(json::parse(line)));
            } catch (const json::exception& e) {
                raise(Errc::malformed_input, path.string() + ": " + e.what());
            }
        }
        return chain;
    }

private:
    GenesisConfig config_;
    std::vector<Block> chain_;
    std::vector<Transaction> mempool_;
    LedgerState state_;
};

}  // namespace vault::ledger

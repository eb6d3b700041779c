// vault: command-line front end for the encrypted file vault.
//
// State lives under --home (default $VAULT_HOME, falling back to ./.vault):
// a genesis config, the block chain, the content-addressed object store, and
// a session file pointing at the active wallet/key files.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "vault/dapp/session.hpp"
#include "vault/time.hpp"

namespace fs = std::filesystem;
using namespace vault;

namespace {

int exit_code_for(Errc code) {
    switch (code) {
        case Errc::rejected:
        case Errc::access_expired:
        case Errc::not_grantee:
        case Errc::not_owner:
            return 2;  // rejected / denied
        case Errc::auth_failure:
        case Errc::decrypt_failure:
        case Errc::integrity_failure:
        case Errc::bad_signature:
        case Errc::invalid_chain:
        case Errc::keypair_mismatch:
        case Errc::scheme_mismatch:
            return 3;  // integrity / auth failure
        case Errc::not_found:
        case Errc::unknown_file:
            return 4;  // not found
        default:
            return 1;
    }
}

struct Paths {
    fs::path home;
    fs::path config() const { return home / "config.json"; }
    fs::path chain() const { return home / "chain.jsonl"; }
    fs::path cas() const { return home / "cas"; }
    fs::path session() const { return home / "session.json"; }
    fs::path session_keys() const { return home / "session-keys.json"; }
};

ledger::GenesisConfig load_config(const Paths& paths) {
    std::ifstream in(paths.config());
    if (!in)
        raise(Errc::not_found, "no vault at " + paths.home.string() + " (run `vault init`)");
    nlohmann::json j;
    in >> j;
    return ledger::GenesisConfig::from_json(j);
}

void save_config(const Paths& paths, const ledger::GenesisConfig& cfg) {
    std::ofstream out(paths.config());
    if (!out) raise(Errc::storage_failure, "cannot write " + paths.config().string());
    out << cfg.to_json().dump(2) << "\n";
}

struct Env {
    Paths paths;
    ledger::GenesisConfig config;
    ledger::Ledger ledger;
    cas::Store store;
    dapp::Clock clock;

    Env(Paths p, dapp::Clock clk)
        : paths(std::move(p)),
          config(load_config(paths)),
          ledger(config, ledger::Ledger::load_chain(paths.chain())),
          store(paths.cas()),
          clock(std::move(clk)) {}

    void persist() { ledger.save_chain(paths.chain()); }
};

struct SessionRef {
    std::string wallet_path;
    std::string keys_path;
    std::string scheme;
};

void save_session_ref(const Paths& paths, const SessionRef& ref) {
    nlohmann::json j{{"wallet", ref.wallet_path}, {"keys", ref.keys_path}, {"scheme", ref.scheme}};
    std::ofstream out(paths.session());
    if (!out) raise(Errc::storage_failure, "cannot write " + paths.session().string());
    out << j.dump(2) << "\n";
}

SessionRef load_session_ref(const Paths& paths) {
    std::ifstream in(paths.session());
    if (!in) raise(Errc::not_found, "not logged in (run `vault login`)");
    nlohmann::json j;
    in >> j;
    return SessionRef{j.at("wallet").get<std::string>(), j.at("keys").get<std::string>(),
                      j.at("scheme").get<std::string>()};
}

dapp::Session open_session(const Paths& paths, Rng& rng, dapp::Clock clock) {
    SessionRef ref = load_session_ref(paths);
    auto w = wallet::load_wallet(ref.wallet_path);
    auto keys = crypto::load_keypair_file(ref.keys_path);
    return dapp::login(std::move(w), crypto::parse_scheme(ref.scheme), std::move(keys), rng,
                       std::move(clock));
}

std::unique_ptr<Rng> rng_from_option(const std::string& seed_hex) {
    if (seed_hex.empty()) return std::make_unique<SystemRng>();
    return std::make_unique<SeededRng>(hex_decode(seed_hex));
}

std::unique_ptr<wallet::ConfirmationPolicy> policy_from_option(bool yes) {
    if (yes) return std::make_unique<wallet::AutoApprove>();
    return std::make_unique<wallet::InteractivePolicy>(std::cin, std::cerr);
}

Bytes read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::not_found, "cannot read " + path.string());
    return Bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_file(const fs::path& path, ByteView data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
    if (!out) raise(Errc::storage_failure, "cannot write " + path.string());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vault: encrypted file storage and time-bound sharing over a local chain"};
    app.require_subcommand(1);
    app.fallthrough();  // --home/--now may follow the subcommand

    std::string home_opt;
    std::string now_opt;
    app.add_option("--home", home_opt, "vault root directory (default: $VAULT_HOME or ./.vault)");
    app.add_option("--now", now_opt, "RFC 3339 clock override for tests");

    auto resolve_paths = [&]() {
        if (!home_opt.empty()) return Paths{home_opt};
        if (const char* env = std::getenv("VAULT_HOME")) return Paths{env};
        return Paths{".vault"};
    };
    auto resolve_clock = [&]() -> dapp::Clock {
        if (now_opt.empty()) return dapp::system_clock();
        std::uint64_t fixed = rfc3339_parse(now_opt);
        return [fixed] { return fixed; };
    };

    // ---- init ----
    auto* init = app.add_subcommand("init", "create a vault home with a genesis config");
    std::uint32_t difficulty = 0;
    std::uint64_t reward = 2, gas_price = 1;
    std::vector<std::string> funds;
    std::string miner;
    bool allow_empty = false;
    init->add_option("--difficulty", difficulty, "required leading zero bits (default 0)");
    init->add_option("--reward", reward, "minted block reward (default 2)");
    init->add_option("--gas-price", gas_price, "gas price applied to transactions (default 1)");
    init->add_option("--fund", funds, "genesis allocation ADDR=AMOUNT (repeatable)");
    init->add_option("--miner", miner, "miner address credited with fees and rewards");
    init->add_flag("--allow-empty-blocks", allow_empty, "permit mining with an empty mempool");
    init->callback([&] {
        Paths paths = resolve_paths();
        if (fs::exists(paths.config()))
            raise(Errc::storage_failure, paths.config().string() + " already exists");
        fs::create_directories(paths.home);
        ledger::GenesisConfig cfg;
        cfg.difficulty = difficulty;
        cfg.block_reward = reward;
        cfg.gas_price = gas_price;
        cfg.allow_empty_blocks = allow_empty;
        cfg.miner = miner;
        for (const auto& spec : funds) {
            auto eq = spec.find('=');
            if (eq == std::string::npos)
                raise(Errc::malformed_input, "--fund expects ADDR=AMOUNT, got " + spec);
            std::string addr = spec.substr(0, eq);
            if (!ledger::is_address(addr))
                raise(Errc::malformed_input, "not a 40-hex address: " + addr);
            cfg.allocations[addr] = std::stoull(spec.substr(eq + 1));
        }
        save_config(paths, cfg);
        std::cout << "initialized " << paths.home.string() << "\n";
    });

    // ---- wallet new ----
    auto* wallet_cmd = app.add_subcommand("wallet", "signing wallet management");
    auto* wallet_new = wallet_cmd->add_subcommand("new", "create a wallet file");
    std::string w_label, w_out = "wallet.json", w_seed_hex;
    wallet_new->add_option("--label", w_label, "human-readable label");
    wallet_new->add_option("--out", w_out, "output path (default wallet.json)");
    wallet_new->add_option("--seed-hex", w_seed_hex, "deterministic seed (hex, >= 16 bytes)");
    wallet_new->callback([&] {
        Bytes seed = w_seed_hex.empty() ? SystemRng{}.bytes(32) : hex_decode(w_seed_hex);
        auto w = wallet::create_wallet(seed, w_label);
        wallet::save_wallet(w_out, w);
        std::cout << w.address << "\n";
    });

    // ---- keygen ----
    auto* keygen = app.add_subcommand("keygen", "generate an encryption keypair");
    std::string kg_scheme = "ecc", kg_out = "keys.json", kg_seed_hex;
    keygen->add_option("--scheme", kg_scheme, "rsa or ecc")->check(CLI::IsMember({"rsa", "ecc"}));
    keygen->add_option("--out", kg_out, "keypair file; a shareable .pub file is written beside it");
    keygen->add_option("--seed-hex", kg_seed_hex, "deterministic seed (hex, >= 32 bytes)");
    keygen->callback([&] {
        auto rng = rng_from_option(kg_seed_hex);
        auto kp = crypto::gen_asym_keypair(crypto::parse_scheme(kg_scheme), *rng);
        crypto::save_keypair_file(kg_out, kp);
        crypto::save_public_key_file(kg_out + ".pub", kp.scheme, kp.public_key);
        std::cout << "wrote " << kg_out << " and " << kg_out << ".pub ("
                  << crypto::scheme_name(kp.scheme) << ")\n";
    });

    // ---- login / logout ----
    auto* login_cmd = app.add_subcommand("login", "start a session");
    std::string li_wallet, li_keys, li_scheme = "ecc", li_seed_hex;
    login_cmd->add_option("--wallet", li_wallet, "wallet file")->required();
    login_cmd->add_option("--keys", li_keys, "previously exported keypair file");
    login_cmd->add_option("--scheme", li_scheme, "rsa or ecc")
        ->check(CLI::IsMember({"rsa", "ecc"}));
    login_cmd->add_option("--seed-hex", li_seed_hex, "deterministic seed for fresh keys");
    login_cmd->callback([&] {
        Paths paths = resolve_paths();
        load_config(paths);  // ensure the vault exists
        auto rng = rng_from_option(li_seed_hex);
        auto w = wallet::load_wallet(li_wallet);
        auto scheme = crypto::parse_scheme(li_scheme);

        std::string keys_path = li_keys;
        if (li_keys.empty()) {
            // Fresh keys: held for the session only, removed at logout. Shown
            // once so the user can save them for future logins.
            auto kp = crypto::gen_asym_keypair(scheme, *rng);
            keys_path = paths.session_keys().string();
            crypto::save_keypair_file(keys_path, kp);
            std::cout << "generated fresh " << crypto::scheme_name(scheme)
                      << " keys (session only; save them to keep access):\n"
                      << "  public:  " << base64_encode(kp.public_key) << "\n"
                      << "  private: " << base64_encode(kp.private_key) << "\n";
        }
        auto keys = crypto::load_keypair_file(keys_path);
        dapp::login(w, scheme, keys, *rng, resolve_clock());  // probe before persisting
        save_session_ref(paths, SessionRef{li_wallet, keys_path, crypto::scheme_name(scheme)});
        std::cout << "logged in as " << w.address << " (" << crypto::scheme_name(scheme) << ")\n";
    });

    auto* logout_cmd = app.add_subcommand("logout", "end the session and drop session keys");
    logout_cmd->callback([&] {
        Paths paths = resolve_paths();
        fs::remove(paths.session());
        fs::remove(paths.session_keys());
        std::cout << "logged out\n";
    });

    // ---- upload ----
    auto* upload = app.add_subcommand("upload", "encrypt and store a file");
    std::string up_path, up_desc, up_type = "application/octet-stream", up_seed_hex;
    bool up_yes = false;
    upload->add_option("path", up_path, "file to store")->required();
    upload->add_option("--desc", up_desc, "description stored on chain");
    upload->add_option("--type", up_type, "media type");
    upload->add_flag("--yes", up_yes, "approve the fee without prompting");
    upload->add_option("--seed-hex", up_seed_hex, "deterministic seed for keys and nonces");
    upload->callback([&] {
        Env env(resolve_paths(), resolve_clock());
        auto rng = rng_from_option(up_seed_hex);
        auto session = open_session(env.paths, *rng, env.clock);
        dapp::Dapp dapp_core(env.ledger, env.store);
        auto policy = policy_from_option(up_yes);
        auto file_id =
            dapp_core.store_file(session, read_file(up_path), up_desc, up_type, *policy, *rng);
        env.persist();
        std::cout << file_id << "\n";
    });

    // ---- ls ----
    auto* ls = app.add_subcommand("ls", "list files owned by the session");
    ls->callback([&] {
        Env env(resolve_paths(), resolve_clock());
        SystemRng rng;
        auto session = open_session(env.paths, rng, env.clock);
        dapp::Dapp dapp_core(env.ledger, env.store);
        for (const auto& view : dapp_core.list_my_files(session)) {
            std::cout << view.record.file_id << "\t" << view.record.size_bytes << "\t"
                      << view.record.file_type << "\t" << rfc3339_format(view.record.uploaded_at)
                      << "\t" << (view.locked() ? "locked" : *view.cid) << "\t"
                      << view.record.description << "\n";
        }
    });

    // ---- get ----
    auto* get = app.add_subcommand("get", "fetch and decrypt an owned file");
    std::uint64_t get_id = 0;
    std::string get_out;
    get->add_option("file_id", get_id, "file id from `vault ls`")->required();
    get->add_option("--out", get_out, "output path")->required();
    get->callback([&] {
        Env env(resolve_paths(), resolve_clock());
        SystemRng rng;
        auto session = open_session(env.paths, rng, env.clock);
        dapp::Dapp dapp_core(env.ledger, env.store);
        write_file(get_out, dapp_core.fetch_file(session, get_id));
        std::cout << "wrote " << get_out << "\n";
    });

    // ---- grant ----
    auto* grant = app.add_subcommand("grant", "share a file for a time window");
    std::uint64_t gr_id = 0;
    std::string gr_to, gr_pub, gr_from, gr_until, gr_desc, gr_seed_hex;
    bool gr_yes = false;
    grant->add_option("file_id", gr_id, "file id to share")->required();
    grant->add_option("--to", gr_to, "grantee address")->required();
    grant->add_option("--pub", gr_pub, "grantee public key file")->required();
    grant->add_option("--from", gr_from, "window start, RFC 3339")->required();
    grant->add_option("--until", gr_until, "window end (exclusive), RFC 3339")->required();
    grant->add_option("--desc", gr_desc, "description stored on chain");
    grant->add_flag("--yes", gr_yes, "approve the fee without prompting");
    grant->add_option("--seed-hex", gr_seed_hex, "deterministic seed for re-wrapping");
    grant->callback([&] {
        Env env(resolve_paths(), resolve_clock());
        auto rng = rng_from_option(gr_seed_hex);
        auto session = open_session(env.paths, *rng, env.clock);
        dapp::Dapp dapp_core(env.ledger, env.store);
        auto [pub_scheme, pub_key] = crypto::load_public_key_file(gr_pub);
        if (pub_scheme != session.scheme)
            raise(Errc::malformed_public_key, "grantee key scheme does not match the session");
        if (!ledger::is_address(gr_to))
            raise(Errc::malformed_input, "not a 40-hex address: " + gr_to);
        auto policy = policy_from_option(gr_yes);
        auto grant_id = dapp_core.grant_access(session, gr_id, gr_to, pub_key,
                                               rfc3339_parse(gr_from), rfc3339_parse(gr_until),
                                               gr_desc, *policy, *rng);
        env.persist();
        std::cout << grant_id << "\n";
    });

    // ---- shared ----
    auto* shared = app.add_subcommand("shared", "list grants naming the session");
    shared->callback([&] {
        Env env(resolve_paths(), resolve_clock());
        SystemRng rng;
        auto session = open_session(env.paths, rng, env.clock);
        dapp::Dapp dapp_core(env.ledger, env.store);
        for (const auto& view : dapp_core.list_shared(session)) {
            std::cout << view.grant.grant_id << "\t" << view.grant.granter << "\t"
                      << rfc3339_format(view.grant.valid_from) << "\t"
                      << rfc3339_format(view.grant.valid_until) << "\t"
                      << (view.accessible ? "live" : "expired") << "\t"
                      << view.grant.description << "\n";
        }
    });

    // ---- fetch ----
    auto* fetch = app.add_subcommand("fetch", "fetch a file shared with the session");
    std::uint64_t fe_id = 0;
    std::string fe_out;
    fetch->add_option("grant_id", fe_id, "grant id from `vault shared`")->required();
    fetch->add_option("--out", fe_out, "output path")->required();
    fetch->callback([&] {
        Env env(resolve_paths(), resolve_clock());
        SystemRng rng;
        auto session = open_session(env.paths, rng, env.clock);
        dapp::Dapp dapp_core(env.ledger, env.store);
        write_file(fe_out, dapp_core.fetch_shared(session, fe_id));
        std::cout << "wrote " << fe_out << "\n";
    });

    // ---- chain ----
    auto* chain_cmd = app.add_subcommand("chain", "chain inspection");
    auto* chain_verify = chain_cmd->add_subcommand("verify", "re-verify every block and rule");
    chain_verify->callback([&] {
        Paths paths = resolve_paths();
        auto cfg = load_config(paths);
        auto chain = ledger::Ledger::load_chain(paths.chain());
        std::vector<std::string> reasons;
        if (ledger::verify_chain(chain, cfg, &reasons)) {
            std::cout << "OK height=" << chain.size() << "\n";
        } else {
            for (const auto& r : reasons) std::cerr << r << "\n";
            raise(Errc::invalid_chain, "chain verification failed");
        }
    });

    // ---- abi ----
    auto* abi = app.add_subcommand("abi", "print a contract ABI descriptor");
    std::string abi_which;
    abi->add_option("contract", abi_which, "storage or permission")
        ->required()
        ->check(CLI::IsMember({"storage", "permission"}));
    abi->callback([&] {
        auto kind = abi_which == "storage" ? ledger::ContractKind::storage
                                           : ledger::ContractKind::permission;
        std::cout << contracts::export_abi(kind).dump(2) << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

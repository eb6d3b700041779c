#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include "vault/bytes.hpp"

// Drives the installed binary end to end through a scratch VAULT_HOME.

namespace fs = std::filesystem;
using vault::Bytes;

namespace {

struct CliWorld {
    fs::path dir;

    CliWorld() : dir(fs::temp_directory_path() /
                     ("vault-cli-" + std::to_string(std::random_device{}()))) {
        fs::create_directories(dir);
    }
    ~CliWorld() { fs::remove_all(dir); }

    fs::path home() const { return dir / "home"; }

    struct Result {
        int code;
        std::string out;
    };

    Result run(const std::string& args, const std::string& stdin_text = {}) const {
        fs::path out_file = dir / "stdout.txt";
        std::string cmd = std::string(VAULT_CLI_PATH) + " --home " + home().string() + " " +
                          args + " > " + out_file.string() + " 2>" + (dir / "e.txt").string();
        if (!stdin_text.empty()) {
            fs::path in_file = dir / "stdin.txt";
            std::ofstream(in_file) << stdin_text;
            cmd += " < " + in_file.string();
        } else {
            cmd += " < /dev/null";
        }
        int raw = std::system(cmd.c_str());
        std::ifstream in(out_file);
        std::string out((std::istreambuf_iterator<char>(in)), {});
        return {WEXITSTATUS(raw), out};
    }

    std::string stderr_text() const {
        std::ifstream in(dir / "e.txt");
        return std::string((std::istreambuf_iterator<char>(in)), {});
    }

    static std::string first_line(const std::string& s) {
        return s.substr(0, s.find('\n'));
    }
};

}  // namespace

TEST_CASE("cli drives the full upload/grant/fetch flow") {
    CliWorld w;

    // identities first: init needs their addresses for genesis funding
    auto alice_wallet = (w.dir / "alice-wallet.json").string();
    auto bob_wallet = (w.dir / "bob-wallet.json").string();
    auto r = w.run("wallet new --label alice --out " + alice_wallet +
                   " --seed-hex 616c6963652d736565642d30313233343536373839");
    REQUIRE(r.code == 0);
    std::string alice_addr = CliWorld::first_line(r.out);
    r = w.run("wallet new --label bob --out " + bob_wallet +
              " --seed-hex 626f622d736565642d30313233343536373839616263");
    REQUIRE(r.code == 0);
    std::string bob_addr = CliWorld::first_line(r.out);
    REQUIRE(alice_addr.size() == 40);
    REQUIRE(bob_addr.size() == 40);

    r = w.run("init --fund " + alice_addr + "=1000000000 --fund " + bob_addr +
              "=1000000000 --miner " + bob_addr);
    REQUIRE(r.code == 0);

    // encryption keypairs
    auto alice_keys = (w.dir / "alice-keys.json").string();
    auto bob_keys = (w.dir / "bob-keys.json").string();
    REQUIRE(w.run("keygen --scheme ecc --out " + alice_keys +
                  " --seed-hex 414141414141414141414141414141414141414141414141414141414141414141")
                .code == 0);
    REQUIRE(w.run("keygen --scheme ecc --out " + bob_keys +
                  " --seed-hex 424242424242424242424242424242424242424242424242424242424242424242")
                .code == 0);
    REQUIRE(fs::exists(alice_keys + ".pub"));

    // a file worth storing
    fs::path source = w.dir / "report.txt";
    std::ofstream(source) << "CLI-MARKER quarterly cardiology report\n";

    // not logged in yet
    CHECK(w.run("ls").code != 0);

    REQUIRE(w.run("login --wallet " + alice_wallet + " --keys " + alice_keys + " --scheme ecc")
                .code == 0);

    // a piped "n" rejects the fee: exit 2, nothing stored
    r = w.run("upload " + source.string() + " --desc refused --type text/plain", "n\n");
    CHECK(r.code == 2);
    CHECK(w.run("ls").out.empty());

    // approved upload
    r = w.run("upload " + source.string() +
              " --desc 'quarterly report' --type text/plain --yes --now 2026-01-01T00:00:00Z");
    REQUIRE(r.code == 0);
    std::string file_id = CliWorld::first_line(r.out);
    CHECK(file_id == "0");

    r = w.run("ls");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("quarterly report") != std::string::npos);
    CHECK(r.out.find("locked") == std::string::npos);

    // owner download
    fs::path fetched = w.dir / "fetched.txt";
    REQUIRE(w.run("get 0 --out " + fetched.string()).code == 0);
    {
        std::ifstream a(source), b(fetched);
        std::string sa((std::istreambuf_iterator<char>(a)), {});
        std::string sb((std::istreambuf_iterator<char>(b)), {});
        CHECK(sa == sb);
    }

    // unknown ids: exit 4
    CHECK(w.run("get 999 --out " + (w.dir / "nope").string()).code == 4);

    // grant to bob for one hour
    r = w.run("grant 0 --to " + bob_addr + " --pub " + bob_keys +
              ".pub --from 2026-01-01T10:00:00Z --until 2026-01-01T11:00:00Z --desc shared "
              "--yes --now 2026-01-01T09:00:00Z");
    REQUIRE(r.code == 0);
    std::string grant_id = CliWorld::first_line(r.out);
    CHECK(grant_id == "0");

    // bob's view
    REQUIRE(w.run("login --wallet " + bob_wallet + " --keys " + bob_keys + " --scheme ecc")
                .code == 0);
    r = w.run("shared --now 2026-01-01T10:30:00Z");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("live") != std::string::npos);

    fs::path shared_out = w.dir / "shared.txt";
    CHECK(w.run("fetch 0 --out " + shared_out.string() + " --now 2026-01-01T10:00:00Z").code ==
          0);
    CHECK(w.run("fetch 0 --out " + shared_out.string() + " --now 2026-01-01T11:00:00Z").code ==
          2);  // expired: denied
    CHECK(w.run("fetch 0 --out " + shared_out.string() + " --now 2026-01-01T09:59:59Z").code ==
          2);  // not yet valid

    {
        std::ifstream a(source), b(shared_out);
        std::string sa((std::istreambuf_iterator<char>(a)), {});
        std::string sb((std::istreambuf_iterator<char>(b)), {});
        CHECK(sa == sb);
    }

    // chain checks out; the plaintext marker appears nowhere in the home
    REQUIRE(w.run("chain verify").code == 0);
    {
        std::ifstream in(w.home() / "chain.jsonl");
        std::string chain((std::istreambuf_iterator<char>(in)), {});
        CHECK(chain.find("CLI-MARKER") == std::string::npos);
        CHECK(!chain.empty());
    }

    // abi export
    r = w.run("abi storage");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("uploadFile") != std::string::npos);
    CHECK(r.out.find("CriptDStorage") != std::string::npos);
    r = w.run("abi permission");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("grantPermission") != std::string::npos);

    // tampering with the chain file is caught: exit 3
    {
        fs::path chain_file = w.home() / "chain.jsonl";
        std::ifstream in(chain_file);
        std::string text((std::istreambuf_iterator<char>(in)), {});
        auto pos = text.find("\"timestamp\":");
        REQUIRE(pos != std::string::npos);
        char& digit = text[pos + 12];
        digit = digit == '9' ? '8' : digit + 1;  // stays valid JSON
        std::ofstream(chain_file) << text;
    }
    CHECK(w.run("chain verify").code == 3);
}

TEST_CASE("logout clears session state") {
    CliWorld w;
    auto wallet_path = (w.dir / "w.json").string();
    auto r = w.run("wallet new --out " + wallet_path +
                   " --seed-hex 6c6f676f75742d746573742d73656564");
    REQUIRE(r.code == 0);
    std::string addr = CliWorld::first_line(r.out);
    REQUIRE(w.run("init --fund " + addr + "=1000000").code == 0);

    // fresh-key login stores session keys under the home, shown once
    r = w.run("login --wallet " + wallet_path + " --scheme ecc --seed-hex " +
              std::string(66, '7'));
    REQUIRE(r.code == 0);
    CHECK(r.out.find("public:") != std::string::npos);
    CHECK(fs::exists(w.home() / "session.json"));
    CHECK(fs::exists(w.home() / "session-keys.json"));

    REQUIRE(w.run("logout").code == 0);
    CHECK_FALSE(fs::exists(w.home() / "session.json"));
    CHECK_FALSE(fs::exists(w.home() / "session-keys.json"));
    CHECK(w.run("ls").code != 0);

    // chain, store, and config survive logout
    CHECK(fs::exists(w.home() / "config.json"));
}

TEST_CASE("init refuses to clobber an existing vault") {
    CliWorld w;
    REQUIRE(w.run("init").code == 0);
    CHECK(w.run("init").code != 0);
}

TEST_CASE("the VAULT_HOME environment variable selects the root") {
    CliWorld w;
    fs::path env_home = w.dir / "env-home";
    auto run_env = [&](const std::string& args) {
        std::string cmd = "VAULT_HOME=" + env_home.string() + " " + VAULT_CLI_PATH + " " + args +
                          " > /dev/null 2>&1 < /dev/null";
        return WEXITSTATUS(std::system(cmd.c_str()));
    };
    REQUIRE(run_env("init") == 0);
    CHECK(fs::exists(env_home / "config.json"));
    CHECK(run_env("chain verify") == 0);
}

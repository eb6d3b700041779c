#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "vault/hash.hpp"
#include "vault/rng.hpp"
#include "vault/time.hpp"

using namespace vault;

TEST_CASE("sha256 known answer") {
    CHECK(hex_encode(sha256(as_view("abc"))) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(hex_encode(sha256({})) ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("hmac-sha256 known answer (RFC 4231 case 2)") {
    auto mac = hmac_sha256(as_view("Jefe"), as_view("what do ya want for nothing?"));
    CHECK(hex_encode(mac) == "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843");
}

TEST_CASE("hkdf-sha256 known answer (RFC 5869 case 1)") {
    Bytes ikm(22, 0x0b);
    Bytes salt = hex_decode("000102030405060708090a0b0c");
    Bytes info = hex_decode("f0f1f2f3f4f5f6f7f8f9");
    Bytes okm = hkdf_sha256(ikm, salt, info, 42);
    CHECK(hex_encode(okm) ==
          "3cb25f25faacd57a90434f64d0362f2a2d2d0a90cf1a5a4c5db02d56ecc4c5bf34007208d5b887185865");
}

TEST_CASE("hex and base64 are mutually inverse") {
    Bytes data = {0x00, 0x01, 0xfe, 0xff, 0x10, 0x80};
    CHECK(hex_decode(hex_encode(data)) == data);
    CHECK(base64_decode(base64_encode(data)) == data);
    for (std::size_t len = 0; len < 12; ++len) {
        Bytes v(len);
        for (std::size_t i = 0; i < len; ++i) v[i] = static_cast<std::uint8_t>(i * 37 + 5);
        CHECK(base64_decode(base64_encode(v)) == v);
        CHECK(hex_decode(hex_encode(v)) == v);
    }
    CHECK_THROWS_AS(hex_decode("abc"), Error);
    CHECK_THROWS_AS(hex_decode("zz"), Error);
    CHECK_THROWS_AS(base64_decode("a==="), Error);
}

TEST_CASE("seeded rng is deterministic, system rng is not") {
    SeededRng a(as_view("seed material"));
    SeededRng b(as_view("seed material"));
    CHECK(a.bytes(64) == b.bytes(64));

    SeededRng c(as_view("other seed"));
    CHECK(SeededRng(as_view("seed material")).bytes(64) != c.bytes(64));

    SystemRng sys;
    CHECK(sys.bytes(32) != sys.bytes(32));
}

TEST_CASE("seeded rng stream is stable across draw patterns") {
    SeededRng whole(as_view("pattern seed"));
    Bytes all = whole.bytes(100);
    SeededRng pieces(as_view("pattern seed"));
    Bytes joined;
    for (std::size_t n : {1u, 7u, 32u, 60u}) {
        Bytes part = pieces.bytes(n);
        joined.insert(joined.end(), part.begin(), part.end());
    }
    CHECK(Bytes(all.begin(), all.begin() + 100) == joined);
}

TEST_CASE("rfc3339 parse and format") {
    CHECK(rfc3339_parse("1970-01-01T00:00:00Z") == 0);
    CHECK(rfc3339_parse("1970-01-01T00:00:10Z") == 10);
    CHECK(rfc3339_parse("2022-01-01T12:00:00Z") == 1641038400);
    CHECK(rfc3339_parse("2022-01-01T12:00:00+02:00") == 1641038400 - 7200);
    CHECK(rfc3339_format(1641038400) == "2022-01-01T12:00:00Z");
    CHECK(rfc3339_parse(rfc3339_format(1786363200)) == 1786363200);
    CHECK_THROWS_AS(rfc3339_parse("yesterday"), Error);
    CHECK_THROWS_AS(rfc3339_parse("2022-01-01T12:00:00"), Error);
}

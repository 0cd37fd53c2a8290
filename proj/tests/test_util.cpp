#include "formsight/util.hpp"

#include "formsight/errors.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <random>

using namespace formsight;

TEST_CASE("base64 round trip over random byte strings") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        std::string bytes(rng() % 64, '\0');
        for (char& c : bytes) {
            c = static_cast<char>(rng() & 0xff);
        }
        auto decoded = util::base64_decode(util::base64_encode(bytes));
        REQUIRE(std::string(decoded.begin(), decoded.end()) == bytes);
    }
}

TEST_CASE("base64 known vector") {
    CHECK(util::base64_encode(std::string_view("any carnal pleasure.")) ==
          "YW55IGNhcm5hbCBwbGVhc3VyZS4=");
    CHECK_THROWS_AS(util::base64_decode("a==="), std::invalid_argument);
    CHECK_THROWS_AS(util::base64_decode("ab!d"), std::invalid_argument);
}

TEST_CASE("sha256 known vector") {
    CHECK(util::sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(util::sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("trim and ascii_lower") {
    CHECK(util::trim("  A1A 1A1 ") == "A1A 1A1");
    CHECK(util::trim("\t\nx\r ") == "x");
    CHECK(util::trim("   ") == "");
    CHECK(util::ascii_lower("ToRoNtO") == "toronto");
}

TEST_CASE("atomic write then read") {
    testutil::TempDir dir;
    auto path = dir / "nested" / "file.txt";
    util::write_file_atomic(path, "payload");
    CHECK(util::read_file(path) == "payload");
    CHECK_THROWS_AS(util::read_file(dir / "absent.txt"), IoError);
}

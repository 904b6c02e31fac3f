#include <string>

#include "bg/corpus.hpp"
#include "bg/errors.hpp"
#include "doctest.h"

TEST_CASE("fibonacci word prefix is the known one") {
    CHECK(bg::gen_fibonacci(13) == "abaababaabaab");
    CHECK(bg::gen_fibonacci(1) == "a");
    CHECK(bg::gen_fibonacci(2) == "ab");
    // Every shorter fibonacci word prefixes the longer ones.
    const std::string big = bg::gen_fibonacci(500);
    for (std::uint64_t n : {1, 13, 88, 233}) {
        CHECK(big.compare(0, n, bg::gen_fibonacci(n)) == 0);
    }
    CHECK(big.size() == 500);
}

TEST_CASE("random strings respect length, alphabet and seed") {
    const std::string s = bg::gen_random(4, 1000, 42);
    CHECK(s.size() == 1000);
    for (char c : s) {
        CHECK(c >= 'a');
        CHECK(c <= 'd');
    }
    CHECK(bg::gen_random(4, 1000, 42) == s);
    CHECK(bg::gen_random(4, 1000, 43) != s);
    CHECK(bg::gen_random(1, 20, 9) == std::string(20, 'a'));
    CHECK(bg::gen_random(7, 0, 1).empty());

    // Beyond 26 symbols the generator falls back to raw byte values.
    const std::string raw = bg::gen_random(200, 500, 3);
    for (char c : raw) CHECK(static_cast<unsigned char>(c) < 200);

    CHECK_THROWS_AS(bg::gen_random(0, 5, 1), bg::InvalidArgument);
    CHECK_THROWS_AS(bg::gen_random(257, 5, 1), bg::InvalidArgument);
}

TEST_CASE("powers repeat their unit") {
    CHECK(bg::gen_power("ab", 3) == "ababab");
    CHECK(bg::gen_power("xyz", 1) == "xyz");
    CHECK(bg::gen_power("q", 0).empty());
    CHECK_THROWS_AS(bg::gen_power("", 4), bg::InvalidArgument);
}

TEST_CASE("random trees encode as balanced single-rooted sequences") {
    for (std::uint64_t nodes : {1, 2, 3, 10, 500}) {
        const std::string bp = bg::gen_bp_random_tree(nodes, nodes + 7);
        REQUIRE(bp.size() == 2 * nodes);
        std::int64_t excess = 0;
        for (std::size_t i = 0; i < bp.size(); ++i) {
            excess += bp[i] == '(' ? 1 : -1;
            CHECK(excess >= 0);
            if (i + 1 < bp.size()) CHECK(excess > 0);  // single root
        }
        CHECK(excess == 0);
    }
    CHECK(bg::gen_bp_random_tree(1, 0) == "()");
    CHECK(bg::gen_bp_random_tree(50, 1) == bg::gen_bp_random_tree(50, 1));
    CHECK_THROWS_AS(bg::gen_bp_random_tree(0, 1), bg::InvalidArgument);
}

#include <cstdio>
#include <cstring>
#include <string>
#include <thread>
#include <vector>

#include "blockgraph.h"
#include "doctest.h"

namespace {

struct GraphGuard {
    bg_graph* g = nullptr;
    ~GraphGuard() { bg_free(g); }
};

struct BytesGuard {
    char* p = nullptr;
    size_t size = 0;
    ~BytesGuard() { bg_bytes_free(p); }
};

std::string make_text() {
    BytesGuard b;
    REQUIRE(bg_gen_random(4, 600, 7, &b.p, &b.size) == BG_OK);
    return std::string(b.p, b.size);
}

} // namespace

TEST_CASE("config defaults") {
    bg_build_config cfg;
    bg_build_config_init(&cfg);
    CHECK(cfg.arity == 4);
    CHECK(cfg.leaf_block_len == 0);
    CHECK(cfg.affix_len == 0);
    CHECK(cfg.rank_symbols == nullptr);
    CHECK(cfg.enable_excess == 0);
    CHECK(cfg.level_skip == 1);
    CHECK(cfg.hash_seed == 0);
    CHECK(cfg.hash_modulus_bits == 61);
    CHECK(cfg.retry_cap == 16);
}

TEST_CASE("build, query and free a graph") {
    const std::string text = make_text();
    GraphGuard g;
    REQUIRE(bg_build(text.data(), text.size(), nullptr, &g.g) == BG_OK);
    REQUIRE(g.g != nullptr);

    CHECK(bg_length(g.g) == text.size());
    CHECK(bg_sigma(g.g) == 4);
    CHECK(bg_phrase_count(g.g) > 0);
    CHECK(bg_level_count(g.g) >= 1);
    CHECK(bg_build_attempts(g.g) >= 1);
    CHECK(bg_excess_enabled(g.g) == 0);

    char sym = 0;
    for (uint64_t i = 1; i <= text.size(); i += 7) {
        REQUIRE(bg_access(g.g, i, &sym) == BG_OK);
        CHECK(sym == text[i - 1]);
    }

    std::vector<char> buf(64);
    REQUIRE(bg_extract(g.g, 5, 64, buf.data()) == BG_OK);
    CHECK(std::string(buf.data(), 64) == text.substr(4, 64));
    REQUIRE(bg_extract(g.g, 1, 0, buf.data()) == BG_OK);  // zero-length is fine

    char tracked[8] = {0};
    size_t tracked_len = 0;
    REQUIRE(bg_tracked_symbols(g.g, tracked, sizeof tracked, &tracked_len) == BG_OK);
    CHECK(tracked_len == 4);
    CHECK(std::string(tracked) == "abcd");
    char tiny[2];
    CHECK(bg_tracked_symbols(g.g, tiny, sizeof tiny, nullptr) == BG_ERR_OUT_OF_RANGE);

    uint64_t r = 0, s = 0;
    uint64_t manual = 0;
    for (uint64_t i = 1; i <= 200; ++i) {
        manual += text[i - 1] == 'b';
        REQUIRE(bg_rank(g.g, 'b', i, &r) == BG_OK);
        CHECK(r == manual);
    }
    REQUIRE(bg_rank(g.g, 'b', text.size(), &r) == BG_OK);
    REQUIRE(r > 0);
    REQUIRE(bg_select(g.g, 'b', r, &s) == BG_OK);
    uint64_t back = 0;
    REQUIRE(bg_rank(g.g, 'b', s, &back) == BG_OK);
    CHECK(back == r);

    int ok = -1;
    REQUIRE(bg_verify(g.g, text.data(), text.size(), &ok) == BG_OK);
    CHECK(ok == 1);
    const std::string wrong = std::string("x") + text.substr(1);
    REQUIRE(bg_verify(g.g, wrong.data(), wrong.size(), &ok) == BG_OK);
    CHECK(ok == 0);
}

TEST_CASE("every failure path reports its status and message") {
    const std::string text = make_text();
    GraphGuard g;
    REQUIRE(bg_build(text.data(), text.size(), nullptr, &g.g) == BG_OK);

    char sym = 0;
    uint64_t out = 0;
    CHECK(bg_build(nullptr, 3, nullptr, &g.g) == BG_ERR_INVALID_ARGUMENT);
    CHECK(bg_access(nullptr, 1, &sym) == BG_ERR_INVALID_ARGUMENT);
    CHECK(bg_access(g.g, 1, nullptr) == BG_ERR_INVALID_ARGUMENT);

    CHECK(bg_access(g.g, 0, &sym) == BG_ERR_OUT_OF_RANGE);
    CHECK(bg_last_error()[0] != '\0');
    CHECK(bg_access(g.g, text.size() + 1, &sym) == BG_ERR_OUT_OF_RANGE);
    CHECK(bg_rank(g.g, 'z', 1, &out) == BG_ERR_UNTRACKED_SYMBOL);
    CHECK(bg_select(g.g, 'a', 0, &out) == BG_ERR_OUT_OF_RANGE);

    // Empty text and bad parameters fail construction up front.
    bg_graph* h = nullptr;
    CHECK(bg_build(text.data(), 0, nullptr, &h) == BG_ERR_INVALID_ARGUMENT);
    CHECK(h == nullptr);
    bg_build_config cfg;
    bg_build_config_init(&cfg);
    cfg.arity = 1;
    CHECK(bg_build(text.data(), text.size(), &cfg, &h) == BG_ERR_INVALID_ARGUMENT);

    // Excess queries on a graph without excess metadata.
    int64_t e = 0;
    CHECK(bg_excess(g.g, 1, &e) == BG_ERR_INVALID_ARGUMENT);
    CHECK(bg_min_excess_pos(g.g, 1, 2, &out) == BG_ERR_INVALID_ARGUMENT);
    CHECK(bg_lca(g.g, 1, 2, &out) == BG_ERR_INVALID_ARGUMENT);

    // A tight retry cap with colliding fingerprints fails the build.
    bg_build_config_init(&cfg);
    cfg.hash_modulus_bits = 8;
    cfg.retry_cap = 3;
    BytesGuard big;
    REQUIRE(bg_gen_random(4, 4000, 77, &big.p, &big.size) == BG_OK);
    CHECK(bg_build(big.p, big.size, &cfg, &h) == BG_ERR_BUILD_FAILED);
    CHECK(std::strlen(bg_last_error()) > 0);
}

TEST_CASE("serialization crosses the interface") {
    const std::string text = make_text();
    GraphGuard g;
    REQUIRE(bg_build(text.data(), text.size(), nullptr, &g.g) == BG_OK);

    BytesGuard bytes;
    REQUIRE(bg_to_bytes(g.g, &bytes.p, &bytes.size) == BG_OK);
    REQUIRE(bytes.size > 0);

    GraphGuard back;
    REQUIRE(bg_from_bytes(bytes.p, bytes.size, &back.g) == BG_OK);
    CHECK(bg_length(back.g) == text.size());
    char sym = 0;
    REQUIRE(bg_access(back.g, 3, &sym) == BG_OK);
    CHECK(sym == text[2]);

    bg_graph* h = nullptr;
    CHECK(bg_from_bytes("nonsense", 8, &h) == BG_ERR_TRUNCATED);
    std::string damaged(bytes.p, bytes.size);
    damaged[0] = 'X';
    CHECK(bg_from_bytes(damaged.data(), damaged.size(), &h) == BG_ERR_BAD_FORMAT);
    damaged = std::string(bytes.p, bytes.size);
    damaged[4] = 9;
    CHECK(bg_from_bytes(damaged.data(), damaged.size(), &h) == BG_ERR_BAD_VERSION);
    damaged = std::string(bytes.p, bytes.size);
    damaged[damaged.size() / 2] ^= 0x10;
    CHECK(bg_from_bytes(damaged.data(), damaged.size(), &h) == BG_ERR_BAD_CHECKSUM);

    const char* path = "/tmp/bg_capi_roundtrip.bg";
    REQUIRE(bg_save(g.g, path) == BG_OK);
    GraphGuard loaded;
    REQUIRE(bg_load(path, &loaded.g) == BG_OK);
    CHECK(bg_length(loaded.g) == text.size());
    std::remove(path);
    CHECK(bg_load("/tmp/definitely_not_there.bg", &h) == BG_ERR_IO);
}

TEST_CASE("excess queries and lca work through the interface") {
    BytesGuard bp;
    REQUIRE(bg_gen_bp_tree(300, 5, &bp.p, &bp.size) == BG_OK);
    REQUIRE(bp.size == 600);

    bg_build_config cfg;
    bg_build_config_init(&cfg);
    cfg.enable_excess = 1;
    GraphGuard g;
    REQUIRE(bg_build(bp.p, bp.size, &cfg, &g.g) == BG_OK);
    CHECK(bg_excess_enabled(g.g) == 1);

    int64_t e = 0;
    REQUIRE(bg_excess(g.g, bp.size, &e) == BG_OK);
    CHECK(e == 0);  // balanced
    uint64_t pos = 0;
    REQUIRE(bg_min_excess_pos(g.g, 1, bp.size, &pos) == BG_OK);
    CHECK(pos == bp.size);  // the final closer reaches excess zero first

    uint64_t l = 0;
    REQUIRE(bg_lca(g.g, 1, 1, &l) == BG_OK);
    CHECK(l == 1);
    // Any two nodes share the root in a single-rooted tree; their lca's
    // opening position is at most either argument.
    std::string text(bp.p, bp.size);
    uint64_t u = 0, v = 0;
    for (uint64_t i = 2; i <= bp.size && (u == 0 || v == 0); ++i) {
        if (text[i - 1] == '(') (u == 0 ? u : v) = i;
    }
    REQUIRE(bg_lca(g.g, u, v, &l) == BG_OK);
    CHECK(l <= u);
    CHECK(bg_lca(g.g, 2, 0, &l) == BG_ERR_OUT_OF_RANGE);
}

TEST_CASE("stats text lists the accounting keys") {
    const std::string text = make_text();
    GraphGuard g;
    REQUIRE(bg_build(text.data(), text.size(), nullptr, &g.g) == BG_OK);
    BytesGuard out;
    REQUIRE(bg_stats_text(g.g, &out.p, &out.size) == BG_OK);
    const std::string s(out.p, out.size);
    for (const char* key : {"n=", "sigma=", "phrase_count=", "levels=", "attempts=",
                            "total_bytes=", "plain_bits=", "level.0.blocks="}) {
        INFO(key);
        CHECK(s.find(key) != std::string::npos);
    }
}

TEST_CASE("generators cross the interface") {
    BytesGuard fib;
    REQUIRE(bg_gen_fibonacci(13, &fib.p, &fib.size) == BG_OK);
    CHECK(std::string(fib.p, fib.size) == "abaababaabaab");

    BytesGuard pow;
    REQUIRE(bg_gen_power("ab", 2, 3, &pow.p, &pow.size) == BG_OK);
    CHECK(std::string(pow.p, pow.size) == "ababab");

    uint64_t z = 0;
    REQUIRE(bg_lz77_phrase_count("abababab", 8, &z) == BG_OK);
    CHECK(z == 3);
    CHECK(bg_lz77_phrase_count(nullptr, 4, &z) == BG_ERR_INVALID_ARGUMENT);

    BytesGuard bad;
    CHECK(bg_gen_random(0, 10, 1, &bad.p, &bad.size) == BG_ERR_INVALID_ARGUMENT);
}

TEST_CASE("error messages are thread local") {
    const std::string text = make_text();
    GraphGuard g;
    REQUIRE(bg_build(text.data(), text.size(), nullptr, &g.g) == BG_OK);

    char sym = 0;
    CHECK(bg_access(g.g, 0, &sym) == BG_ERR_OUT_OF_RANGE);
    const std::string mine = bg_last_error();
    CHECK(!mine.empty());

    std::string other_initial, other_after;
    bg_status other_status = BG_OK;
    std::thread other([&] {
        other_initial = bg_last_error();  // this thread has no error yet
        uint64_t out = 0;
        other_status = bg_rank(g.g, 'z', 1, &out);
        other_after = bg_last_error();
    });
    other.join();
    CHECK(other_initial.empty());
    CHECK(other_status == BG_ERR_UNTRACKED_SYMBOL);
    CHECK(other_after.find("rank") != std::string::npos);
    CHECK(bg_last_error() == mine);  // untouched by the other thread

    // Reads from many threads on one immutable graph agree.
    std::vector<std::thread> readers;
    std::vector<int> fails(4, 0);
    for (int t = 0; t < 4; ++t) {
        readers.emplace_back([&, t] {
            char c = 0;
            for (uint64_t i = 1; i <= 400; ++i) {
                if (bg_access(g.g, i, &c) != BG_OK || c != text[i - 1]) fails[t] = 1;
            }
        });
    }
    for (auto& th : readers) th.join();
    for (int f : fails) CHECK(f == 0);
}

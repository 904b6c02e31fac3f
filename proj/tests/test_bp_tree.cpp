#include <string>
#include <vector>

#include "bg/block_graph.hpp"
#include "bg/bp_tree.hpp"
#include "bg/corpus.hpp"
#include "bg/errors.hpp"
#include "doctest.h"
#include "oracles.hpp"

namespace {

bg::BlockGraph build_bp(const std::string& text, std::uint64_t leaf = 0) {
    bg::BuildConfig cfg;
    cfg.enable_excess = true;
    cfg.leaf_block_len = leaf;
    return bg::build(text, cfg);
}

void check_all_pairs(const std::string& text) {
    const bg::BlockGraph g = build_bp(text, text.size() > 200 ? 0 : 2);
    const bg::BpTree tree(g);
    const oracle::BpTreeOracle ref(text);
    std::vector<std::uint64_t> opens;
    for (std::uint64_t i = 1; i <= text.size(); ++i) {
        CHECK(tree.is_open(i) == (text[i - 1] == '('));
        if (text[i - 1] == '(') opens.push_back(i);
    }
    for (std::uint64_t u : opens) {
        for (std::uint64_t v : opens) {
            const std::uint64_t expect = ref.lca(u, v);
            if (expect == 0) {
                CHECK_THROWS_AS(tree.lca(u, v), bg::InvalidArgument);
            } else {
                CHECK(tree.lca(u, v) == expect);
            }
        }
    }
}

} // namespace

TEST_CASE("construction demands a balanced parenthesis graph") {
    CHECK_THROWS_AS(bg::BpTree(bg::build("(())", {})), bg::InvalidArgument);
    CHECK_THROWS_AS(bg::BpTree(build_bp("(()")), bg::InvalidArgument);
    CHECK_THROWS_AS(bg::BpTree(build_bp(")(")), bg::InvalidArgument);
    CHECK_THROWS_AS(bg::BpTree(build_bp("())(")), bg::InvalidArgument);
    CHECK_NOTHROW(bg::BpTree(build_bp("()")));
    CHECK_NOTHROW(bg::BpTree(build_bp("()()")));  // a forest is fine
}

TEST_CASE("hand-checked ancestors on a small tree") {
    //  ( ( ) ( ( ) ( ) ) )    positions 123456789,10
    //  root 1; children 2 and 4; 4's children 5 and 7.
    const std::string text = "(()(()()))";
    const bg::BlockGraph g = build_bp(text, 2);
    const bg::BpTree tree(g);
    CHECK(tree.node_count() == 5);
    CHECK(tree.lca(2, 2) == 2);
    CHECK(tree.lca(2, 4) == 1);
    CHECK(tree.lca(5, 7) == 4);
    CHECK(tree.lca(2, 5) == 1);
    CHECK(tree.lca(4, 7) == 4);  // ancestor of the pair
    CHECK(tree.lca(7, 4) == 4);
    CHECK(tree.lca(1, 7) == 1);
}

TEST_CASE("argument validation") {
    const bg::BlockGraph g = build_bp("(()())");
    const bg::BpTree tree(g);
    CHECK_THROWS_AS(tree.lca(0, 1), bg::OutOfRange);
    CHECK_THROWS_AS(tree.lca(1, 7), bg::OutOfRange);
    CHECK_THROWS_AS(tree.lca(3, 1), bg::InvalidArgument);  // 3 is a closer
    CHECK_THROWS_AS(tree.lca(1, 6), bg::InvalidArgument);
}

TEST_CASE("nodes of different forest trees have no common ancestor") {
    const std::string text = "(())()";
    const bg::BlockGraph g = build_bp(text);
    const bg::BpTree tree(g);
    CHECK(tree.lca(1, 2) == 1);
    CHECK(tree.lca(5, 5) == 5);
    CHECK_THROWS_AS(tree.lca(1, 5), bg::InvalidArgument);
    CHECK_THROWS_AS(tree.lca(2, 5), bg::InvalidArgument);
}

TEST_CASE("lca agrees with a pointer tree on fixed shapes") {
    // Chain: each node the single child of the previous one.
    check_all_pairs(std::string(24, '(') + std::string(24, ')'));
    // Star: many leaves under one root.
    std::string star = "(";
    for (int i = 0; i < 30; ++i) star += "()";
    star += ")";
    check_all_pairs(star);
    // Binary-ish comb.
    check_all_pairs("((())(()))((())(()))");
}

TEST_CASE("lca agrees with a pointer tree on random trees") {
    for (std::uint64_t nodes : {1, 2, 3, 8, 25, 80}) {
        check_all_pairs(bg::gen_bp_random_tree(nodes, nodes * 7 + 3));
    }
    // A larger tree, sampled pairs instead of all pairs.
    const std::string text = bg::gen_bp_random_tree(1500, 99);
    const bg::BlockGraph g = build_bp(text);
    const bg::BpTree tree(g);
    const oracle::BpTreeOracle ref(text);
    std::vector<std::uint64_t> opens;
    for (std::uint64_t i = 1; i <= text.size(); ++i) {
        if (text[i - 1] == '(') opens.push_back(i);
    }
    std::uint64_t x = 12345;
    for (int q = 0; q < 4000; ++q) {
        x = x * 6364136223846793005ull + 1442695040888963407ull;
        const std::uint64_t u = opens[(x >> 16) % opens.size()];
        x = x * 6364136223846793005ull + 1442695040888963407ull;
        const std::uint64_t v = opens[(x >> 16) % opens.size()];
        CHECK(tree.lca(u, v) == ref.lca(u, v));
    }
}

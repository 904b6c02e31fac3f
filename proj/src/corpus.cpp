#include "bg/corpus.hpp"

#include <random>
#include <vector>

#include "bg/errors.hpp"

namespace bg {

std::string gen_random(unsigned sigma, std::uint64_t n, std::uint64_t seed) {
    if (sigma == 0 || sigma > 256) throw InvalidArgument("alphabet size must lie in [1, 256]");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<unsigned> dist(0, sigma - 1);
    std::string out;
    out.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        unsigned v = dist(rng);
        out.push_back(sigma <= 26 ? static_cast<char>('a' + v) : static_cast<char>(v));
    }
    return out;
}

std::string gen_fibonacci(std::uint64_t n) {
    std::string prev = "a";
    std::string cur = "ab";
    if (n <= 1) return prev.substr(0, n);
    while (cur.size() < n) {
        std::string next = cur + prev;
        prev.swap(cur);
        cur.swap(next);
    }
    cur.resize(n);
    return cur;
}

std::string gen_power(std::string_view unit, std::uint64_t k) {
    if (unit.empty()) throw InvalidArgument("power unit must be non-empty");
    std::string out;
    out.reserve(unit.size() * k);
    for (std::uint64_t i = 0; i < k; ++i) out.append(unit);
    return out;
}

std::string gen_bp_random_tree(std::uint64_t nodes, std::uint64_t seed) {
    if (nodes == 0) throw InvalidArgument("a tree needs at least one node");
    std::mt19937_64 rng(seed);
    std::vector<std::vector<std::uint64_t>> children(nodes);
    for (std::uint64_t v = 1; v < nodes; ++v) {
        std::uniform_int_distribution<std::uint64_t> dist(0, v - 1);
        children[dist(rng)].push_back(v);
    }
    std::string out;
    out.reserve(2 * nodes);
    // Iterative DFS; the explicit stack holds (node, next child slot).
    std::vector<std::pair<std::uint64_t, std::size_t>> stack;
    stack.emplace_back(0, 0);
    out.push_back('(');
    while (!stack.empty()) {
        auto& [node, slot] = stack.back();
        if (slot < children[node].size()) {
            std::uint64_t child = children[node][slot++];
            out.push_back('(');
            stack.emplace_back(child, 0);
        } else {
            out.push_back(')');
            stack.pop_back();
        }
    }
    return out;
}

} // namespace bg

#include <utility>

#include "bg/bp_tree.hpp"
#include "bg/errors.hpp"

namespace bg {

BpTree::BpTree(const BlockGraph& graph) : graph_(&graph) {
    if (!graph.excess_enabled()) {
        throw InvalidArgument("tree view requires a graph with excess tracking");
    }
    const std::uint64_t n = graph.length();
    if (n == 0 || n % 2 != 0 || graph.excess(n) != 0) {
        throw InvalidArgument("text is not a balanced parenthesis sequence");
    }
    const std::uint64_t dip = graph.min_excess_pos(1, n);
    if (graph.excess(dip) < 0) {
        throw InvalidArgument("text is not a balanced parenthesis sequence");
    }
}

bool BpTree::is_open(std::uint64_t i) const { return graph_->access(i) == '('; }

std::uint64_t BpTree::lca(std::uint64_t u, std::uint64_t v) const {
    const std::uint64_t n = graph_->length();
    if (u < 1 || u > n || v < 1 || v > n) throw OutOfRange("node position out of bounds");
    if (!is_open(u) || !is_open(v)) {
        throw InvalidArgument("node positions must be opening parentheses");
    }
    if (u == v) return u;
    if (u > v) std::swap(u, v);

    // Deepest point the excess falls to strictly between the two openings
    // tells the depth of the lowest common enclosing node; its opening is
    // one past the last position where the excess was still lower.
    const std::uint64_t m = graph_->min_excess_pos(u, v - 1);
    const std::int64_t dip = graph_->excess(m);
    if (dip >= graph_->excess(u)) return u;  // v lies inside u's subtree
    if (dip == 0) throw InvalidArgument("nodes have no common ancestor");
    return graph_->last_excess_below(m, dip) + 1;
}

} // namespace bg

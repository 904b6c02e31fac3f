#pragma once

#include "bg/block_graph.hpp"

namespace bg {

/// Tree (or forest) view over a block graph whose text is a balanced
/// parenthesis sequence. Nodes are identified by the 1-based position of
/// their opening parenthesis; depths follow nesting.
class BpTree {
public:
    /// Requires the graph to track excess and its text to be a balanced
    /// parenthesis sequence; throws InvalidArgument otherwise. The view
    /// borrows the graph: the graph must stay alive for the lifetime of
    /// this object.
    explicit BpTree(const BlockGraph& graph);

    const BlockGraph& graph() const { return *graph_; }
    std::uint64_t node_count() const { return graph_->length() / 2; }

    bool is_open(std::uint64_t i) const;

    /// Opening position of the lowest common ancestor of the nodes opened at
    /// u and v. Throws InvalidArgument when either position is not an
    /// opening parenthesis or the nodes lie in different trees of a forest.
    std::uint64_t lca(std::uint64_t u, std::uint64_t v) const;

private:
    const BlockGraph* graph_;
};

} // namespace bg

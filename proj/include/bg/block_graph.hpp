#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bg {

/// Construction parameters. Zero-valued size fields select input-derived
/// defaults when the graph is built.
struct BuildConfig {
    /// Fan-out r of internal blocks; each marked block splits into up to r
    /// children of near-equal length. Must be >= 2.
    std::uint32_t arity = 4;

    /// Blocks of at most this length stop recursing and store their symbols
    /// verbatim. 0 selects max(1, floor(log2 n / log2 sigma)).
    std::uint64_t leaf_block_len = 0;

    /// Number of symbols kept from each end of every block so short
    /// substrings can be read without descending further. 0 selects the
    /// resolved leaf_block_len.
    std::uint64_t affix_len = 0;

    /// Symbols that carry rank/select metadata. When unset, all distinct
    /// symbols are tracked if the text has at most 4 of them, none otherwise.
    std::optional<std::string> rank_symbols;

    /// Record prefix-excess summaries (+1 for '(', -1 for ')') per block,
    /// enabling excess / min-excess / LCA queries. Requires the text to be
    /// drawn from {'(', ')'} and both symbols to be tracked.
    bool enable_excess = false;

    /// Start from r*z top-level blocks (z = LZ77 phrase count) instead of r,
    /// skipping the levels a plain top-down division would waste on blocks
    /// too long to repeat.
    bool level_skip = true;

    std::uint64_t hash_seed = 0;
    std::uint32_t hash_modulus_bits = 61;

    /// Failed construction attempts tolerated before giving up. Attempts
    /// beyond the first few abandon fingerprint-only matching and verify
    /// candidate occurrences by content, so any cap >= 4 always terminates.
    std::uint32_t retry_cap = 16;
};

enum class BlockKind : std::uint8_t {
    Internal = 0,  // marked, longer than the leaf threshold: splits into children
    Literal = 1,   // stores its symbols verbatim
    Back = 2,      // unmarked: replaced by a pointer to its leftmost occurrence
};

/// Prefix-excess summary of one block, with '(' counting +1 and ')' -1.
/// `min_prefix` / `min_pos` describe the leftmost minimum of the running
/// excess over prefixes of length 1..length, relative to the block start.
struct ExcessSummary {
    std::int64_t total = 0;
    std::int64_t min_prefix = 0;
    std::uint64_t min_pos = 0;  // 1-based offset within the block
};

/// Where an unmarked block finds its content: an occurrence starting at
/// 1-based offset `offset` inside `first_target`, spilling into the adjacent
/// `second_target` when it does not fit. `split` is the number of leading
/// symbols supplied by the first target.
struct BackPointer {
    std::uint32_t first_target = 0;  // index into the same level
    std::uint32_t second_target = 0;
    bool has_second = false;
    std::uint64_t offset = 0;  // g: occurrence start within first_target
    std::uint64_t split = 0;   // d: symbols of the block inside first_target

    /// Per tracked symbol: occurrences in first_target before the occurrence
    /// (prefix of length offset-1), and in the block's own first `split`
    /// symbols. These let rank/select queries cross the pointer in O(1).
    std::vector<std::uint64_t> rank_before_occurrence;
    std::vector<std::uint64_t> rank_split;

    /// Block symbols around the split point, affix_len to each side
    /// (clipped): a short substring straddling the split reads from here in
    /// a single visit. Present only when has_second.
    std::string split_affix;

    /// Leftmost prefix-excess minima of the block's two pieces: [1, split]
    /// relative to the block start, and (split, length] relative to the
    /// split point. Valid when the graph tracks excess and the piece exists.
    std::int64_t min_first = 0;
    std::uint64_t min_first_pos = 0;
    std::int64_t min_second = 0;
    std::uint64_t min_second_pos = 0;
};

struct Block {
    std::uint64_t start = 0;  // 1-based position in the text
    std::uint64_t length = 0;
    BlockKind kind = BlockKind::Literal;

    // Internal blocks: contiguous child range in the next level.
    std::uint32_t first_child = 0;
    std::uint32_t child_count = 0;

    std::string payload;  // Literal blocks only

    // First and last min(affix_len, length) symbols of the block.
    std::string prefix_affix;
    std::string suffix_affix;

    /// Per tracked symbol: occurrences in the text strictly before `start`.
    std::vector<std::uint64_t> rank_before;

    ExcessSummary excess;  // meaningful when the graph tracks excess

    std::unique_ptr<BackPointer> back;  // kind == Back

    Block() = default;
    Block(Block&&) = default;
    Block& operator=(Block&&) = default;
    Block(const Block& other);
    Block& operator=(const Block& other);
};

struct Level {
    std::vector<Block> blocks;  // sorted by start, spans non-overlapping
};

/// Mutable counters threaded through queries by tests and benchmarks.
struct QueryTrace {
    std::uint64_t block_visits = 0;
    // rank/select translation paths across back pointers:
    std::uint64_t rank_before_split = 0;  // i < d
    std::uint64_t rank_at_split = 0;      // i == d
    std::uint64_t rank_after_split = 0;   // i > d
    std::uint64_t select_first_piece = 0;
    std::uint64_t select_second_piece = 0;
};

/// An LZ-bounded representation of a byte string as layered blocks: marked
/// blocks recurse into r children, unmarked blocks point at the leftmost
/// occurrence of their content inside marked blocks of the same level.
/// Supports random access, substring extraction, rank/select over tracked
/// symbols and, for parenthesis strings, prefix-excess queries. Immutable
/// after construction; all positions are 1-based.
class BlockGraph {
public:
    std::uint64_t length() const { return n_; }
    std::uint32_t sigma() const { return static_cast<std::uint32_t>(alphabet_.size()); }
    const std::string& alphabet() const { return alphabet_; }
    const std::string& tracked_symbols() const { return tracked_; }
    bool excess_enabled() const { return excess_enabled_; }
    bool level_skip_used() const { return level_skip_used_; }
    std::uint64_t phrase_count() const { return z_; }
    std::uint32_t build_attempts() const { return build_attempts_; }
    const BuildConfig& config() const { return config_; }
    const std::vector<Level>& levels() const { return levels_; }

    /// S[i].
    unsigned char access(std::uint64_t i, QueryTrace* trace = nullptr) const;

    /// S[i, i+m). m == 0 yields the empty string.
    std::string extract(std::uint64_t i, std::uint64_t m, QueryTrace* trace = nullptr) const;

    /// Occurrences of `symbol` in S[1, i]. rank(a, 0) == 0.
    std::uint64_t rank(unsigned char symbol, std::uint64_t i, QueryTrace* trace = nullptr) const;

    /// Position of the j-th occurrence of `symbol` (1-based j).
    std::uint64_t select(unsigned char symbol, std::uint64_t j, QueryTrace* trace = nullptr) const;

    /// rank('(', i) - rank(')', i); excess(0) == 0. Requires tracked excess.
    std::int64_t excess(std::uint64_t i) const;

    /// Leftmost j in [i, k] minimising excess(j). Requires tracked excess.
    std::uint64_t min_excess_pos(std::uint64_t i, std::uint64_t k) const;

    /// Rightmost j in [1, k] with excess(j) < bound, or 0 when none exists.
    /// Internal building block for LCA; exposed for testing.
    std::uint64_t last_excess_below(std::uint64_t k, std::int64_t bound) const;

    /// Index of `symbol` in the tracked set, or npos.
    std::size_t tracked_index(unsigned char symbol) const;

    std::uint64_t total_count(unsigned char symbol) const;

private:
    friend class GraphBuilder;
    friend class GraphCodec;

    struct Cursor {
        std::uint32_t level;
        std::uint32_t block;
        const Block* b;
    };

    Cursor top_block_for(std::uint64_t i) const;  // block containing position i
    struct MinEx {
        std::int64_t min;
        std::uint64_t pos;
    };
    MinEx min_excess_in(std::uint32_t level, std::uint32_t block, std::uint64_t lo,
                        std::uint64_t hi) const;
    std::uint64_t below_in(std::uint32_t level, std::uint32_t block, std::uint64_t lo,
                           std::uint64_t hi, std::int64_t bound) const;
    ExcessSummary block_excess(const Block& b) const;
    std::int64_t excess_before(const Block& b) const;
    std::int64_t excess_split(const BackPointer& bp, std::uint64_t d) const;
    void extract_piece(std::uint64_t i, std::uint64_t m, std::string& out,
                       QueryTrace* trace) const;
    void require_excess() const;

    std::uint64_t n_ = 0;
    std::string alphabet_;  // sorted distinct symbols of the text
    std::string tracked_;   // sorted symbols with rank metadata
    bool excess_enabled_ = false;
    bool level_skip_used_ = false;
    std::uint64_t z_ = 0;
    std::uint32_t build_attempts_ = 1;
    BuildConfig config_;
    std::vector<Level> levels_;
    std::size_t open_index_ = 0;   // tracked index of '(' when excess is enabled
    std::size_t close_index_ = 0;  // tracked index of ')'
};

/// Builds a block graph for `text`. Fingerprint collisions are detected by
/// reconstructing the text afterwards; construction reseeds and retries on
/// mismatch and throws BuildError once the retry cap is exhausted.
BlockGraph build(std::string_view text, const BuildConfig& config = {});

/// True iff the graph reproduces `text` symbol by symbol.
bool verify(const BlockGraph& graph, std::string_view text);

} // namespace bg

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_map>

#include "bg/block_graph.hpp"
#include "bg/errors.hpp"
#include "bg/karp_rabin.hpp"
#include "bg/lz77.hpp"

namespace bg {

Block::Block(const Block& other)
    : start(other.start),
      length(other.length),
      kind(other.kind),
      first_child(other.first_child),
      child_count(other.child_count),
      payload(other.payload),
      prefix_affix(other.prefix_affix),
      suffix_affix(other.suffix_affix),
      rank_before(other.rank_before),
      excess(other.excess),
      back(other.back ? std::make_unique<BackPointer>(*other.back) : nullptr) {}

Block& Block::operator=(const Block& other) {
    if (this != &other) *this = Block(other);
    return *this;
}

namespace {

constexpr std::uint64_t UNSET = std::numeric_limits<std::uint64_t>::max();

struct Span {
    std::uint64_t start;  // 1-based
    std::uint64_t length;
};

struct SplitShape {
    std::uint64_t count;      // number of children
    std::uint64_t big_count;  // children of length `big` come first
    std::uint64_t big;
    std::uint64_t small;
};

SplitShape split_shape(std::uint64_t length, std::uint64_t parts) {
    SplitShape s;
    s.count = std::min<std::uint64_t>(parts, length);
    s.small = length / s.count;
    s.big_count = length % s.count;
    s.big = s.small + (s.big_count ? 1 : 0);
    return s;
}

std::vector<Span> split_span(const Span& span, std::uint64_t parts) {
    SplitShape s = split_shape(span.length, parts);
    std::vector<Span> out;
    out.reserve(s.count);
    std::uint64_t pos = span.start;
    for (std::uint64_t i = 0; i < s.count; ++i) {
        std::uint64_t len = i < s.big_count ? s.big : s.small;
        out.push_back({pos, len});
        pos += len;
    }
    return out;
}

/// Shortest block length any level of the construction will ever produce,
/// found by running the division arithmetic without looking at the text.
std::uint64_t minimum_block_length(std::uint64_t top_count, std::uint64_t n, std::uint64_t arity,
                                   std::uint64_t leaf_len) {
    std::set<std::uint64_t> lens;
    SplitShape top = split_shape(n, top_count);
    lens.insert(top.big);
    lens.insert(top.small);
    std::uint64_t min_seen = *lens.begin();
    while (true) {
        std::set<std::uint64_t> next;
        for (std::uint64_t len : lens) {
            if (len <= leaf_len) continue;
            SplitShape s = split_shape(len, arity);
            next.insert(s.big);
            next.insert(s.small);
        }
        if (next.empty()) break;
        min_seen = std::min(min_seen, *next.begin());
        lens.swap(next);
    }
    return min_seen;
}

/// For a family of equal-length windows, the leftmost text position whose
/// window carries the same fingerprint (fingerprint-only mode) or the same
/// content (verified mode). The scan walks the whole text once and keeps the
/// first hit per table entry, so every reported position is leftmost.
std::vector<std::uint64_t> leftmost_occurrences(std::string_view text,
                                                const std::vector<Span>& spans,
                                                KarpRabinHasher& hasher, bool verified) {
    std::vector<std::uint64_t> result(spans.size(), UNSET);
    if (spans.empty()) return result;
    const std::uint64_t L = spans.front().length;
    const std::uint64_t n = text.size();
    hasher.reserve_powers(L);
    const std::uint64_t top = hasher.power(L - 1);

    if (!verified) {
        std::unordered_map<std::uint64_t, std::uint64_t> first;
        first.reserve(spans.size() * 2);
        std::vector<std::uint64_t> sig(spans.size());
        for (std::size_t i = 0; i < spans.size(); ++i) {
            sig[i] = hasher.hash_window(text, spans[i].start - 1, L);
            first.emplace(sig[i], UNSET);
        }
        std::uint64_t h = hasher.hash_window(text, 0, L);
        std::uint64_t pending = first.size();
        for (std::uint64_t p = 0; p + L <= n && pending > 0; ++p) {
            if (p > 0) {
                h = hasher.roll(h, static_cast<unsigned char>(text[p - 1]),
                                static_cast<unsigned char>(text[p - 1 + L]), top);
            }
            auto it = first.find(h);
            if (it != first.end() && it->second == UNSET) {
                it->second = p + 1;
                --pending;
            }
        }
        for (std::size_t i = 0; i < spans.size(); ++i) result[i] = first[sig[i]];
        return result;
    }

    // Verified mode: fingerprints only shortlist candidates; equality is
    // decided on the symbols, so collisions cannot misreport an occurrence.
    struct Entry {
        std::uint64_t rep;  // 0-based start of a representative occurrence
        std::uint64_t first_seen = UNSET;
    };
    std::vector<Entry> entries;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets;
    buckets.reserve(spans.size() * 2);
    std::vector<std::uint32_t> entry_of(spans.size());
    for (std::size_t i = 0; i < spans.size(); ++i) {
        std::uint64_t s = hasher.hash_window(text, spans[i].start - 1, L);
        auto& bucket = buckets[s];
        std::uint32_t found = 0xffffffffu;
        for (std::uint32_t e : bucket) {
            if (text.compare(entries[e].rep, L, text, spans[i].start - 1, L) == 0) {
                found = e;
                break;
            }
        }
        if (found == 0xffffffffu) {
            found = static_cast<std::uint32_t>(entries.size());
            entries.push_back({spans[i].start - 1, UNSET});
            bucket.push_back(found);
        }
        entry_of[i] = found;
    }
    std::uint64_t h = hasher.hash_window(text, 0, L);
    std::uint64_t pending = entries.size();
    for (std::uint64_t p = 0; p + L <= n && pending > 0; ++p) {
        if (p > 0) {
            h = hasher.roll(h, static_cast<unsigned char>(text[p - 1]),
                            static_cast<unsigned char>(text[p - 1 + L]), top);
        }
        auto it = buckets.find(h);
        if (it == buckets.end()) continue;
        for (std::uint32_t e : it->second) {
            if (entries[e].first_seen != UNSET) continue;
            if (text.compare(p, L, text, entries[e].rep, L) == 0) {
                entries[e].first_seen = p + 1;
                --pending;
            }
        }
    }
    for (std::size_t i = 0; i < spans.size(); ++i) result[i] = entries[entry_of[i]].first_seen;
    return result;
}

ExcessSummary excess_of_range(std::string_view text, std::uint64_t start, std::uint64_t len) {
    ExcessSummary s;
    std::int64_t run = 0;
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    std::uint64_t best_pos = 0;
    for (std::uint64_t t = 0; t < len; ++t) {
        run += text[start - 1 + t] == '(' ? 1 : -1;
        if (run < best) {
            best = run;
            best_pos = t + 1;
        }
    }
    s.total = run;
    s.min_prefix = best;
    s.min_pos = best_pos;
    return s;
}

std::vector<std::uint64_t> count_range(std::string_view text, std::uint64_t start,
                                       std::uint64_t len, const std::array<int, 256>& tracked_of) {
    std::size_t tracked_count = 0;
    for (int v : tracked_of)
        if (v >= 0) ++tracked_count;
    std::vector<std::uint64_t> counts(tracked_count, 0);
    for (std::uint64_t t = 0; t < len; ++t) {
        int idx = tracked_of[static_cast<unsigned char>(text[start - 1 + t])];
        if (idx >= 0) ++counts[idx];
    }
    return counts;
}

} // namespace

class GraphBuilder {
public:
    static BlockGraph run(std::string_view text, const BuildConfig& config);

private:
    GraphBuilder(std::string_view text, const BuildConfig& config);

    BlockGraph make_graph(std::vector<Level> levels, std::uint32_t attempts) const;
    BlockGraph single_node() const;
    bool attempt(KarpRabinHasher& hasher, bool verified, std::vector<Level>& out) const;
    void finish_level(Level& level) const;

    std::string_view text_;
    BuildConfig config_;        // resolved values
    std::uint64_t n_;
    std::string alphabet_;
    std::string tracked_;
    std::array<int, 256> tracked_of_{};
    std::uint64_t z_ = 0;
    std::uint64_t top_count_ = 0;
    bool skip_used_ = false;
};

GraphBuilder::GraphBuilder(std::string_view text, const BuildConfig& config)
    : text_(text), config_(config), n_(text.size()) {
    if (n_ == 0) throw InvalidArgument("cannot build a graph over an empty text");
    if (config_.arity < 2) throw InvalidArgument("arity must be at least 2");
    if (config_.retry_cap < 1) throw InvalidArgument("retry cap must be at least 1");

    bool present[256] = {};
    for (char c : text) present[static_cast<unsigned char>(c)] = true;
    for (int c = 0; c < 256; ++c)
        if (present[c]) alphabet_.push_back(static_cast<char>(c));

    const double sigma_for_leaf = std::max<double>(2.0, alphabet_.size());
    if (config_.leaf_block_len == 0) {
        config_.leaf_block_len = std::max<std::uint64_t>(
            1, static_cast<std::uint64_t>(std::log2(static_cast<double>(n_)) /
                                          std::log2(sigma_for_leaf)));
    }

    if (config_.rank_symbols) {
        std::string t = *config_.rank_symbols;
        std::sort(t.begin(), t.end());
        t.erase(std::unique(t.begin(), t.end()), t.end());
        for (char c : t) {
            if (!present[static_cast<unsigned char>(c)]) {
                throw InvalidArgument("tracked symbols must occur in the text");
            }
        }
        tracked_ = t;
    } else if (alphabet_.size() <= 4) {
        tracked_ = alphabet_;
    }
    config_.rank_symbols = tracked_;
    tracked_of_.fill(-1);
    for (std::size_t i = 0; i < tracked_.size(); ++i) {
        tracked_of_[static_cast<unsigned char>(tracked_[i])] = static_cast<int>(i);
    }

    if (config_.enable_excess) {
        for (char c : alphabet_) {
            if (c != '(' && c != ')') {
                throw InvalidArgument("excess tracking requires a parenthesis alphabet");
            }
            if (tracked_of_[static_cast<unsigned char>(c)] < 0) {
                throw InvalidArgument("excess tracking requires both parentheses to be tracked");
            }
        }
    }

    z_ = lz77_phrase_count(text);

    skip_used_ = config_.level_skip &&
                 n_ > config_.arity * z_ * config_.leaf_block_len;
    top_count_ = skip_used_ ? config_.arity * z_ : config_.arity;

    if (config_.affix_len == 0) config_.affix_len = config_.leaf_block_len;
    // A substring no longer than the shortest block plus one never straddles
    // more than two blocks, which keeps per-piece extraction work at two
    // visits per level. Longer affixes would be wasted on that path anyway.
    if (n_ >= config_.arity && n_ > config_.leaf_block_len) {
        std::uint64_t floor_len =
            minimum_block_length(top_count_, n_, config_.arity, config_.leaf_block_len);
        config_.affix_len = std::min(config_.affix_len, floor_len + 1);
    }
}

BlockGraph GraphBuilder::run(std::string_view text, const BuildConfig& config) {
    GraphBuilder builder(text, config);

    if (builder.n_ < builder.config_.arity || builder.n_ <= builder.config_.leaf_block_len) {
        return builder.single_node();
    }

    for (std::uint32_t attempt = 1; attempt <= builder.config_.retry_cap; ++attempt) {
        KarpRabinHasher hasher(builder.config_.hash_seed +
                                   0x9e3779b97f4a7c15ull * (attempt - 1),
                               builder.config_.hash_modulus_bits);
        // The first attempts trust fingerprints alone; later ones verify
        // candidate occurrences against the text, which always converges.
        const bool verified = attempt >= 4;
        std::vector<Level> levels;
        if (!builder.attempt(hasher, verified, levels)) continue;
        BlockGraph graph = builder.make_graph(std::move(levels), attempt);
        if (verify(graph, text)) return graph;
    }
    throw BuildError("hash collisions persist: retry cap exhausted");
}

BlockGraph GraphBuilder::single_node() const {
    Level level;
    Block b;
    b.start = 1;
    b.length = n_;
    b.kind = BlockKind::Literal;
    b.payload.assign(text_);
    level.blocks.push_back(std::move(b));
    std::vector<Level> levels;
    levels.push_back(std::move(level));
    finish_level(levels.back());
    return make_graph(std::move(levels), 1);
}

bool GraphBuilder::attempt(KarpRabinHasher& hasher, bool verified,
                           std::vector<Level>& out) const {
    out.clear();
    std::vector<Span> spans = split_span({1, n_}, top_count_);

    while (true) {
        const std::size_t count = spans.size();
        std::vector<bool> marked(count, false);

        // Pair scan: a block pair that is the leftmost occurrence of its
        // concatenation keeps both blocks explicit. Only pairs adjacent in
        // the text qualify; windows are grouped by length so each distinct
        // length costs one pass over the text.
        std::unordered_map<std::uint64_t, std::vector<std::size_t>> pair_groups;
        for (std::size_t i = 0; i + 1 < count; ++i) {
            if (spans[i].start + spans[i].length == spans[i + 1].start) {
                pair_groups[spans[i].length + spans[i + 1].length].push_back(i);
            }
        }
        for (auto& [len, members] : pair_groups) {
            std::vector<Span> windows;
            windows.reserve(members.size());
            for (std::size_t i : members) windows.push_back({spans[i].start, len});
            auto first = leftmost_occurrences(text_, windows, hasher, verified);
            for (std::size_t k = 0; k < members.size(); ++k) {
                if (first[k] == spans[members[k]].start) {
                    marked[members[k]] = true;
                    marked[members[k] + 1] = true;
                }
            }
        }

        // Single-block scan: the leftmost occurrence of each block's own
        // content, used both to mark blocks that have no earlier occurrence
        // (nothing to point at) and to aim the pointers of unmarked ones.
        std::vector<std::uint64_t> block_first(count, UNSET);
        {
            std::unordered_map<std::uint64_t, std::vector<std::size_t>> groups;
            for (std::size_t i = 0; i < count; ++i) groups[spans[i].length].push_back(i);
            for (auto& [len, members] : groups) {
                std::vector<Span> windows;
                windows.reserve(members.size());
                for (std::size_t i : members) windows.push_back({spans[i].start, len});
                auto first = leftmost_occurrences(text_, windows, hasher, verified);
                for (std::size_t k = 0; k < members.size(); ++k) {
                    block_first[members[k]] = first[k];
                    if (first[k] == spans[members[k]].start) marked[members[k]] = true;
                }
            }
        }

        Level level;
        level.blocks.resize(count);
        std::vector<Span> next_spans;
        for (std::size_t i = 0; i < count; ++i) {
            Block& b = level.blocks[i];
            b.start = spans[i].start;
            b.length = spans[i].length;
            if (b.length <= config_.leaf_block_len) {
                b.kind = BlockKind::Literal;
                b.payload.assign(text_.substr(b.start - 1, b.length));
            } else if (marked[i]) {
                b.kind = BlockKind::Internal;
                auto children = split_span(spans[i], config_.arity);
                b.first_child = static_cast<std::uint32_t>(next_spans.size());
                b.child_count = static_cast<std::uint32_t>(children.size());
                next_spans.insert(next_spans.end(), children.begin(), children.end());
            } else {
                // Unmarked: point at the leftmost occurrence of the block's
                // content. The occurrence must lie strictly left of the
                // block inside explicit blocks of this level; anything else
                // is a fingerprint artefact and aborts the attempt.
                const std::uint64_t p = block_first[i];
                if (p == UNSET || p >= b.start) return false;
                const std::uint64_t occ_end = p + b.length - 1;
                if (occ_end >= b.start) return false;
                auto it = std::upper_bound(
                    spans.begin(), spans.end(), p,
                    [](std::uint64_t pos, const Span& s) { return pos < s.start; });
                if (it == spans.begin()) return false;
                const std::size_t t1 = static_cast<std::size_t>(it - spans.begin()) - 1;
                if (p > spans[t1].start + spans[t1].length - 1) return false;  // occurrence in a gap
                const std::uint64_t t1_end = spans[t1].start + spans[t1].length - 1;
                const bool two = occ_end > t1_end;
                std::size_t t2 = t1;
                if (two) {
                    t2 = t1 + 1;
                    if (t2 >= count) return false;
                    if (spans[t2].start != t1_end + 1) return false;
                    if (occ_end > spans[t2].start + spans[t2].length - 1) return false;
                }
                if (level.blocks[t1].kind == BlockKind::Back ||
                    (two && level.blocks[t2].kind == BlockKind::Back)) {
                    return false;
                }
                b.kind = BlockKind::Back;
                b.back = std::make_unique<BackPointer>();
                b.back->first_target = static_cast<std::uint32_t>(t1);
                b.back->has_second = two;
                b.back->second_target = two ? static_cast<std::uint32_t>(t2) : 0;
                b.back->offset = p - spans[t1].start + 1;
                b.back->split = two ? t1_end - p + 1 : b.length;
                b.back->rank_before_occurrence =
                    count_range(text_, spans[t1].start, b.back->offset - 1, tracked_of_);
                b.back->rank_split = count_range(text_, b.start, b.back->split, tracked_of_);
                if (two) {
                    const std::uint64_t a1 = std::min(config_.affix_len, b.back->split);
                    const std::uint64_t a2 =
                        std::min(config_.affix_len, b.length - b.back->split);
                    b.back->split_affix.assign(
                        text_.substr(b.start - 1 + b.back->split - a1, a1 + a2));
                }
                if (config_.enable_excess) {
                    ExcessSummary part1 = excess_of_range(text_, b.start, b.back->split);
                    b.back->min_first = part1.min_prefix;
                    b.back->min_first_pos = part1.min_pos;
                    if (two) {
                        ExcessSummary part2 = excess_of_range(text_, b.start + b.back->split,
                                                              b.length - b.back->split);
                        b.back->min_second = part2.min_prefix;
                        b.back->min_second_pos = part2.min_pos;
                    }
                }
            }
        }

        finish_level(level);
        out.push_back(std::move(level));
        if (next_spans.empty()) break;
        spans = std::move(next_spans);
    }
    return true;
}

void GraphBuilder::finish_level(Level& level) const {
    // Affixes and excess summaries come straight from the text.
    for (Block& b : level.blocks) {
        const std::uint64_t a = std::min<std::uint64_t>(config_.affix_len, b.length);
        b.prefix_affix.assign(text_.substr(b.start - 1, a));
        b.suffix_affix.assign(text_.substr(b.start - 1 + b.length - a, a));
        if (config_.enable_excess) b.excess = excess_of_range(text_, b.start, b.length);
    }
    // One sweep fills the text-prefix rank samples for the whole level.
    std::vector<std::uint64_t> counts(tracked_.size(), 0);
    std::uint64_t cursor = 1;
    for (Block& b : level.blocks) {
        while (cursor < b.start) {
            int idx = tracked_of_[static_cast<unsigned char>(text_[cursor - 1])];
            if (idx >= 0) ++counts[idx];
            ++cursor;
        }
        b.rank_before = counts;
    }
}

BlockGraph GraphBuilder::make_graph(std::vector<Level> levels, std::uint32_t attempts) const {
    BlockGraph g;
    g.n_ = n_;
    g.alphabet_ = alphabet_;
    g.tracked_ = tracked_;
    g.excess_enabled_ = config_.enable_excess;
    g.level_skip_used_ = skip_used_;
    g.z_ = z_;
    g.build_attempts_ = attempts;
    g.config_ = config_;
    g.levels_ = std::move(levels);
    g.open_index_ = g.tracked_.find('(');
    g.close_index_ = g.tracked_.find(')');
    return g;
}

BlockGraph build(std::string_view text, const BuildConfig& config) {
    return GraphBuilder::run(text, config);
}

bool verify(const BlockGraph& graph, std::string_view text) {
    if (graph.length() != text.size()) return false;
    for (std::uint64_t i = 1; i <= graph.length(); ++i) {
        if (graph.access(i) != static_cast<unsigned char>(text[i - 1])) return false;
    }
    return true;
}

} // namespace bg

#include <algorithm>
#include <limits>

#include "bg/block_graph.hpp"
#include "bg/errors.hpp"

namespace bg {

namespace {

inline void bump(QueryTrace* trace) {
    if (trace) ++trace->block_visits;
}

/// Child geometry of an internal block: children have lengths `big` and
/// `small` (big first), mirroring the division used at construction.
struct ChildShape {
    std::uint64_t big_count;
    std::uint64_t big;
    std::uint64_t small;
};

ChildShape child_shape(const Block& b) {
    ChildShape s;
    const std::uint64_t cc = b.child_count;
    s.small = b.length / cc;
    s.big_count = b.length % cc;
    s.big = s.small + (s.big_count ? 1 : 0);
    return s;
}

/// Index (0-based, relative to first_child) of the child holding local
/// position `local`, and the position relative to that child.
std::pair<std::uint64_t, std::uint64_t> child_containing(const Block& b, std::uint64_t local) {
    ChildShape s = child_shape(b);
    const std::uint64_t boundary = s.big_count * s.big;
    if (local <= boundary) {
        const std::uint64_t ci = (local - 1) / s.big;
        return {ci, local - ci * s.big};
    }
    const std::uint64_t off = local - boundary;
    const std::uint64_t rel = (off - 1) / s.small;
    return {s.big_count + rel, off - rel * s.small};
}

std::uint64_t child_offset(const Block& b, std::uint64_t child_index) {
    ChildShape s = child_shape(b);
    if (child_index <= s.big_count) return child_index * s.big;
    return s.big_count * s.big + (child_index - s.big_count) * s.small;
}

std::uint64_t child_length(const Block& b, std::uint64_t child_index) {
    ChildShape s = child_shape(b);
    return child_index < s.big_count ? s.big : s.small;
}

} // namespace

BlockGraph::Cursor BlockGraph::top_block_for(std::uint64_t i) const {
    const auto& blocks = levels_.front().blocks;
    auto it = std::upper_bound(blocks.begin(), blocks.end(), i,
                               [](std::uint64_t pos, const Block& b) { return pos < b.start; });
    const std::uint32_t idx = static_cast<std::uint32_t>(it - blocks.begin()) - 1;
    return {0, idx, &blocks[idx]};
}

unsigned char BlockGraph::access(std::uint64_t i, QueryTrace* trace) const {
    if (i < 1 || i > n_) throw OutOfRange("access position out of bounds");
    Cursor c = top_block_for(i);
    std::uint64_t local = i - c.b->start + 1;
    while (true) {
        bump(trace);
        switch (c.b->kind) {
            case BlockKind::Literal:
                return static_cast<unsigned char>(c.b->payload[local - 1]);
            case BlockKind::Internal: {
                auto [ci, nl] = child_containing(*c.b, local);
                c.level += 1;
                c.block = c.b->first_child + static_cast<std::uint32_t>(ci);
                c.b = &levels_[c.level].blocks[c.block];
                local = nl;
                break;
            }
            case BlockKind::Back: {
                const BackPointer& bp = *c.b->back;
                if (local <= bp.split) {
                    c.block = bp.first_target;
                    local = bp.offset - 1 + local;
                } else {
                    c.block = bp.second_target;
                    local -= bp.split;
                }
                c.b = &levels_[c.level].blocks[c.block];
                break;
            }
        }
    }
}

void BlockGraph::extract_piece(std::uint64_t i, std::uint64_t m, std::string& out,
                               QueryTrace* trace) const {
    Cursor c = top_block_for(i);
    std::uint64_t lo = i - c.b->start + 1;
    while (true) {
        bump(trace);
        const std::uint64_t hi = lo + m - 1;
        if (hi > c.b->length) {
            // The piece straddles this block and its right neighbour. Pieces
            // are never longer than the shortest block plus one, so the two
            // affixes always cover both parts.
            const std::uint64_t left_len = c.b->length - lo + 1;
            out.append(c.b->suffix_affix, c.b->suffix_affix.size() - left_len, left_len);
            const Block& nb = levels_[c.level].blocks[c.block + 1];
            bump(trace);
            out.append(nb.prefix_affix, 0, m - left_len);
            return;
        }
        switch (c.b->kind) {
            case BlockKind::Literal:
                out.append(c.b->payload, lo - 1, m);
                return;
            case BlockKind::Internal: {
                auto [ci, nl] = child_containing(*c.b, lo);
                c.level += 1;
                c.block = c.b->first_child + static_cast<std::uint32_t>(ci);
                c.b = &levels_[c.level].blocks[c.block];
                lo = nl;
                break;
            }
            case BlockKind::Back: {
                const BackPointer& bp = *c.b->back;
                if (hi <= bp.split) {
                    c.block = bp.first_target;
                    lo = bp.offset - 1 + lo;
                } else if (lo > bp.split) {
                    c.block = bp.second_target;
                    lo -= bp.split;
                } else {
                    // Straddles the split: the stored window around the
                    // split covers any piece, as pieces never exceed the
                    // affix length.
                    const std::uint64_t a1 = std::min(config_.affix_len, bp.split);
                    const std::uint64_t window_start = bp.split - a1 + 1;
                    out.append(bp.split_affix, lo - window_start, m);
                    return;
                }
                c.b = &levels_[c.level].blocks[c.block];
                break;
            }
        }
    }
}

std::string BlockGraph::extract(std::uint64_t i, std::uint64_t m, QueryTrace* trace) const {
    if (m == 0) {
        if (i < 1 || i > n_ + 1) throw OutOfRange("extract position out of bounds");
        return {};
    }
    if (i < 1 || i > n_ || i + m - 1 > n_) throw OutOfRange("extract range out of bounds");
    std::string out;
    out.reserve(m);
    std::uint64_t pos = i;
    std::uint64_t left = m;
    while (left > 0) {
        const std::uint64_t take = std::min<std::uint64_t>(config_.affix_len, left);
        extract_piece(pos, take, out, trace);
        pos += take;
        left -= take;
    }
    return out;
}

std::size_t BlockGraph::tracked_index(unsigned char symbol) const {
    return tracked_.find(static_cast<char>(symbol));
}

std::uint64_t BlockGraph::total_count(unsigned char symbol) const {
    return rank(symbol, n_);
}

std::uint64_t BlockGraph::rank(unsigned char symbol, std::uint64_t i, QueryTrace* trace) const {
    const std::size_t idx = tracked_index(symbol);
    if (idx == std::string::npos) throw UntrackedSymbol("symbol carries no rank metadata");
    if (i == 0) return 0;
    if (i > n_) throw OutOfRange("rank position out of bounds");

    Cursor c = top_block_for(i);
    std::uint64_t acc = c.b->rank_before[idx];
    std::uint64_t local = i - c.b->start + 1;
    while (true) {
        bump(trace);
        switch (c.b->kind) {
            case BlockKind::Literal: {
                const char target = static_cast<char>(symbol);
                for (std::uint64_t t = 0; t < local; ++t) {
                    if (c.b->payload[t] == target) ++acc;
                }
                return acc;
            }
            case BlockKind::Internal: {
                auto [ci, nl] = child_containing(*c.b, local);
                const Block& cb = levels_[c.level + 1].blocks[c.b->first_child + ci];
                acc += cb.rank_before[idx] - c.b->rank_before[idx];
                c.level += 1;
                c.block = c.b->first_child + static_cast<std::uint32_t>(ci);
                c.b = &cb;
                local = nl;
                break;
            }
            case BlockKind::Back: {
                const BackPointer& bp = *c.b->back;
                if (local < bp.split) {
                    if (trace) ++trace->rank_before_split;
                    acc -= bp.rank_before_occurrence[idx];
                    c.block = bp.first_target;
                    local = bp.offset - 1 + local;
                } else if (local == bp.split) {
                    if (trace) ++trace->rank_at_split;
                    return acc + bp.rank_split[idx];
                } else {
                    if (trace) ++trace->rank_after_split;
                    acc += bp.rank_split[idx];
                    c.block = bp.second_target;
                    local -= bp.split;
                }
                c.b = &levels_[c.level].blocks[c.block];
                break;
            }
        }
    }
}

std::uint64_t BlockGraph::select(unsigned char symbol, std::uint64_t j, QueryTrace* trace) const {
    const std::size_t idx = tracked_index(symbol);
    if (idx == std::string::npos) throw UntrackedSymbol("symbol carries no rank metadata");
    if (j < 1 || j > total_count(symbol)) throw OutOfRange("select ordinal out of bounds");

    // Top block holding the j-th occurrence: the last one whose before-count
    // stays under j.
    const auto& tops = levels_.front().blocks;
    auto it = std::upper_bound(tops.begin(), tops.end(), j,
                               [idx](std::uint64_t v, const Block& b) {
                                   return v <= b.rank_before[idx];
                               });
    Cursor c;
    c.level = 0;
    c.block = static_cast<std::uint32_t>(it - tops.begin()) - 1;
    c.b = &tops[c.block];

    std::uint64_t want = j - c.b->rank_before[idx];  // ordinal within the block
    std::uint64_t delta = c.b->start - 1;            // block start - 1 in text coords
    while (true) {
        bump(trace);
        switch (c.b->kind) {
            case BlockKind::Literal: {
                const char target = static_cast<char>(symbol);
                std::uint64_t seen = 0;
                for (std::uint64_t t = 0; t < c.b->length; ++t) {
                    if (c.b->payload[t] == target && ++seen == want) return delta + t + 1;
                }
                throw BuildError("rank metadata inconsistent with payload");
            }
            case BlockKind::Internal: {
                const std::uint64_t base = c.b->rank_before[idx];
                const std::uint32_t first = c.b->first_child;
                std::uint64_t lo = 0, hi = c.b->child_count - 1;
                const auto& next = levels_[c.level + 1].blocks;
                while (lo < hi) {
                    const std::uint64_t mid = (lo + hi + 1) / 2;
                    if (next[first + mid].rank_before[idx] - base < want) {
                        lo = mid;
                    } else {
                        hi = mid - 1;
                    }
                }
                const Block& cb = next[first + lo];
                want -= cb.rank_before[idx] - base;
                delta += child_offset(*c.b, lo);
                c.level += 1;
                c.block = first + static_cast<std::uint32_t>(lo);
                c.b = &cb;
                break;
            }
            case BlockKind::Back: {
                const BackPointer& bp = *c.b->back;
                if (want <= bp.rank_split[idx]) {
                    if (trace) ++trace->select_first_piece;
                    want += bp.rank_before_occurrence[idx];
                    delta -= bp.offset - 1;
                    c.block = bp.first_target;
                } else {
                    if (trace) ++trace->select_second_piece;
                    want -= bp.rank_split[idx];
                    delta += bp.split;
                    c.block = bp.second_target;
                }
                c.b = &levels_[c.level].blocks[c.block];
                break;
            }
        }
    }
}

void BlockGraph::require_excess() const {
    if (!excess_enabled_) {
        throw InvalidArgument("graph was built without excess tracking");
    }
}

std::int64_t BlockGraph::excess(std::uint64_t i) const {
    require_excess();
    if (i == 0) return 0;
    if (i > n_) throw OutOfRange("excess position out of bounds");
    const std::uint64_t opens =
        open_index_ == std::string::npos ? 0 : rank('(', i);
    return 2 * static_cast<std::int64_t>(opens) - static_cast<std::int64_t>(i);
}

std::int64_t BlockGraph::excess_before(const Block& b) const {
    const std::uint64_t opens = open_index_ == std::string::npos ? 0 : b.rank_before[open_index_];
    return 2 * static_cast<std::int64_t>(opens) - static_cast<std::int64_t>(b.start - 1);
}

std::int64_t BlockGraph::excess_split(const BackPointer& bp, std::uint64_t d) const {
    const std::uint64_t opens =
        open_index_ == std::string::npos ? 0 : bp.rank_split[open_index_];
    return 2 * static_cast<std::int64_t>(opens) - static_cast<std::int64_t>(d);
}

ExcessSummary BlockGraph::block_excess(const Block& b) const { return b.excess; }

/// Leftmost minimum of the within-block prefix excess over positions
/// [lo, hi] of the given block. The returned position is within-block.
BlockGraph::MinEx BlockGraph::min_excess_in(std::uint32_t level, std::uint32_t block,
                                            std::uint64_t lo, std::uint64_t hi) const {
    const Block& b = levels_[level].blocks[block];
    if (lo == 1 && hi == b.length) {
        return {b.excess.min_prefix, b.excess.min_pos};
    }
    switch (b.kind) {
        case BlockKind::Literal: {
            std::int64_t run = 0;
            std::int64_t best = std::numeric_limits<std::int64_t>::max();
            std::uint64_t best_pos = 0;
            for (std::uint64_t t = 1; t <= hi; ++t) {
                run += b.payload[t - 1] == '(' ? 1 : -1;
                if (t >= lo && run < best) {
                    best = run;
                    best_pos = t;
                }
            }
            return {best, best_pos};
        }
        case BlockKind::Internal: {
            MinEx best{std::numeric_limits<std::int64_t>::max(), 0};
            std::int64_t base = 0;
            for (std::uint64_t ci = 0; ci < b.child_count; ++ci) {
                const std::uint64_t off = child_offset(b, ci);
                const std::uint64_t len = child_length(b, ci);
                const Block& cb = levels_[level + 1].blocks[b.first_child + ci];
                if (off + 1 <= hi && off + len >= lo) {
                    const std::uint64_t clo = lo > off ? lo - off : 1;
                    const std::uint64_t chi = std::min(hi - off, len);
                    MinEx cur;
                    if (clo == 1 && chi == len) {
                        cur = {cb.excess.min_prefix, cb.excess.min_pos};
                    } else {
                        cur = min_excess_in(level + 1, b.first_child + ci, clo, chi);
                    }
                    if (base + cur.min < best.min) {
                        best = {base + cur.min, off + cur.pos};
                    }
                }
                base += cb.excess.total;
                if (off + len >= hi) break;
            }
            return best;
        }
        case BlockKind::Back: {
            const BackPointer& bp = *b.back;
            MinEx best{std::numeric_limits<std::int64_t>::max(), 0};
            if (lo <= bp.split) {
                const std::uint64_t hi1 = std::min(hi, bp.split);
                if (lo == 1 && hi1 == bp.split) {
                    best = {bp.min_first, bp.min_first_pos};
                } else {
                    const std::uint64_t opens = open_index_ == std::string::npos
                                                    ? 0
                                                    : bp.rank_before_occurrence[open_index_];
                    const std::int64_t exc_g = 2 * static_cast<std::int64_t>(opens) -
                                               static_cast<std::int64_t>(bp.offset - 1);
                    MinEx r = min_excess_in(level, bp.first_target, bp.offset - 1 + lo,
                                            bp.offset - 1 + hi1);
                    best = {r.min - exc_g, r.pos - (bp.offset - 1)};
                }
            }
            if (hi > bp.split) {
                const std::uint64_t lo2 = std::max(lo, bp.split + 1);
                const std::int64_t exc_d = excess_split(bp, bp.split);
                MinEx r;
                if (lo2 == bp.split + 1 && hi == b.length) {
                    r = {bp.min_second, bp.min_second_pos};
                } else {
                    r = min_excess_in(level, bp.second_target, lo2 - bp.split, hi - bp.split);
                }
                if (exc_d + r.min < best.min) {
                    best = {exc_d + r.min, bp.split + r.pos};
                }
            }
            return best;
        }
    }
    return {0, 0};  // unreachable
}

std::uint64_t BlockGraph::min_excess_pos(std::uint64_t i, std::uint64_t k) const {
    require_excess();
    if (i < 1 || k > n_) throw OutOfRange("excess range out of bounds");
    if (i > k) throw InvalidArgument("empty excess range");

    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    std::uint64_t best_pos = 0;
    Cursor c = top_block_for(i);
    for (std::uint32_t idx = c.block; idx < levels_.front().blocks.size(); ++idx) {
        const Block& b = levels_.front().blocks[idx];
        if (b.start > k) break;
        const std::uint64_t lo = i > b.start ? i - b.start + 1 : 1;
        const std::uint64_t hi = std::min(k - b.start + 1, b.length);
        MinEx m = min_excess_in(0, idx, lo, hi);
        const std::int64_t value = excess_before(b) + m.min;
        if (value < best) {
            best = value;
            best_pos = b.start - 1 + m.pos;
        }
    }
    return best_pos;
}

/// Rightmost position t in [lo, hi] (within-block) whose within-block prefix
/// excess is strictly below `bound`, or 0 when none exists.
std::uint64_t BlockGraph::below_in(std::uint32_t level, std::uint32_t block, std::uint64_t lo,
                                   std::uint64_t hi, std::int64_t bound) const {
    const Block& b = levels_[level].blocks[block];
    if (lo == 1 && hi == b.length && b.excess.min_prefix >= bound) return 0;
    switch (b.kind) {
        case BlockKind::Literal: {
            std::int64_t run = 0;
            std::uint64_t found = 0;
            for (std::uint64_t t = 1; t <= hi; ++t) {
                run += b.payload[t - 1] == '(' ? 1 : -1;
                if (t >= lo && run < bound) found = t;
            }
            return found;
        }
        case BlockKind::Internal: {
            std::vector<std::int64_t> bases(b.child_count, 0);
            for (std::uint64_t ci = 1; ci < b.child_count; ++ci) {
                const Block& prev = levels_[level + 1].blocks[b.first_child + ci - 1];
                bases[ci] = bases[ci - 1] + prev.excess.total;
            }
            for (std::uint64_t ri = b.child_count; ri-- > 0;) {
                const std::uint64_t off = child_offset(b, ri);
                const std::uint64_t len = child_length(b, ri);
                if (off + 1 > hi || off + len < lo) continue;
                const Block& cb = levels_[level + 1].blocks[b.first_child + ri];
                const std::uint64_t clo = lo > off ? lo - off : 1;
                const std::uint64_t chi = std::min(hi - off, len);
                if (clo == 1 && chi == len && bases[ri] + cb.excess.min_prefix >= bound) {
                    continue;
                }
                const std::uint64_t t =
                    below_in(level + 1, b.first_child + ri, clo, chi, bound - bases[ri]);
                if (t) return off + t;
            }
            return 0;
        }
        case BlockKind::Back: {
            const BackPointer& bp = *b.back;
            if (hi > bp.split) {
                const std::uint64_t lo2 = std::max(lo, bp.split + 1);
                const std::int64_t exc_d = excess_split(bp, bp.split);
                const bool full = lo2 == bp.split + 1 && hi == b.length;
                if (!(full && exc_d + bp.min_second >= bound)) {
                    const std::uint64_t t = below_in(level, bp.second_target, lo2 - bp.split,
                                                     hi - bp.split, bound - exc_d);
                    if (t) return bp.split + t;
                }
            }
            if (lo <= bp.split) {
                const std::uint64_t hi1 = std::min(hi, bp.split);
                const bool full = lo == 1 && hi1 == bp.split;
                if (full && bp.min_first >= bound) return 0;
                const std::uint64_t opens = open_index_ == std::string::npos
                                                ? 0
                                                : bp.rank_before_occurrence[open_index_];
                const std::int64_t exc_g = 2 * static_cast<std::int64_t>(opens) -
                                           static_cast<std::int64_t>(bp.offset - 1);
                const std::uint64_t t = below_in(level, bp.first_target, bp.offset - 1 + lo,
                                                 bp.offset - 1 + hi1, bound + exc_g);
                if (t) return t - (bp.offset - 1);
            }
            return 0;
        }
    }
    return 0;  // unreachable
}

std::uint64_t BlockGraph::last_excess_below(std::uint64_t k, std::int64_t bound) const {
    require_excess();
    if (k > n_) throw OutOfRange("excess position out of bounds");
    if (k == 0) return 0;

    Cursor c = top_block_for(k);
    for (std::uint32_t idx = c.block + 1; idx-- > 0;) {
        const Block& b = levels_.front().blocks[idx];
        const std::uint64_t hi = std::min(k - b.start + 1, b.length);
        const std::int64_t rel = bound - excess_before(b);
        if (hi == b.length && b.excess.min_prefix >= rel) continue;
        const std::uint64_t t = below_in(0, idx, 1, hi, rel);
        if (t) return b.start - 1 + t;
    }
    return 0;
}

} // namespace bg

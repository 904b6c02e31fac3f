#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "bg/errors.hpp"
#include "bg/serialize.hpp"

namespace bg {

namespace {

constexpr char MAGIC[4] = {'B', 'G', 'F', '1'};
constexpr std::uint16_t VERSION = 1;
constexpr std::size_t TRAILER_SIZE = 8;
// magic + version + flags + trailer: nothing valid can be shorter.
constexpr std::size_t MIN_SIZE = 4 + 2 + 1 + TRAILER_SIZE;

constexpr std::uint64_t FNV_OFFSET = 14695981039346656037ull;
constexpr std::uint64_t FNV_PRIME = 1099511628211ull;

std::uint64_t fnv1a(const char* data, std::size_t size) {
    std::uint64_t h = FNV_OFFSET;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= static_cast<unsigned char>(data[i]);
        h *= FNV_PRIME;
    }
    return h;
}

unsigned symbol_bits(std::size_t sigma) {
    unsigned bits = 0;
    while ((1ull << bits) < sigma) ++bits;
    return bits;
}

enum class Cat : std::size_t {
    Header = 0,
    Structure,
    Literal,
    Pointer,
    Rank,
    Affix,
    Excess,
    Trailer,
    COUNT,
};

class Sink {
public:
    void raw(Cat c, const void* p, std::size_t n) {
        bytes_.append(static_cast<const char*>(p), n);
        tally_[static_cast<std::size_t>(c)] += n;
    }
    void u8(Cat c, std::uint8_t v) { raw(c, &v, 1); }
    void u16le(Cat c, std::uint16_t v) {
        const std::uint8_t b[2] = {static_cast<std::uint8_t>(v & 0xff),
                                   static_cast<std::uint8_t>(v >> 8)};
        raw(c, b, 2);
    }
    void u64le(Cat c, std::uint64_t v) {
        std::uint8_t b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
        raw(c, b, 8);
    }
    void varint(Cat c, std::uint64_t v) {
        std::uint8_t buf[10];
        std::size_t n = 0;
        do {
            std::uint8_t byte = v & 0x7f;
            v >>= 7;
            if (v) byte |= 0x80;
            buf[n++] = byte;
        } while (v);
        raw(c, buf, n);
    }
    void zigzag(Cat c, std::int64_t v) {
        varint(c, (static_cast<std::uint64_t>(v) << 1) ^
                      static_cast<std::uint64_t>(v >> 63));
    }
    /// Bit-packs `s` with `bits` bits per symbol (byte-aligned per call).
    void packed(Cat c, const std::string& s, const std::array<int, 256>& index_of,
                unsigned bits) {
        if (bits == 0 || s.empty()) return;
        std::string out((s.size() * bits + 7) / 8, '\0');
        std::size_t bit = 0;
        for (char ch : s) {
            const unsigned v = static_cast<unsigned>(index_of[static_cast<unsigned char>(ch)]);
            for (unsigned k = bits; k-- > 0;) {
                if ((v >> k) & 1u) out[bit / 8] |= static_cast<char>(0x80u >> (bit % 8));
                ++bit;
            }
        }
        raw(c, out.data(), out.size());
    }

    const std::string& bytes() const { return bytes_; }
    std::uint64_t tally(Cat c) const { return tally_[static_cast<std::size_t>(c)]; }

private:
    std::string bytes_;
    std::array<std::uint64_t, static_cast<std::size_t>(Cat::COUNT)> tally_{};
};

class Reader {
public:
    Reader(std::string_view data, std::size_t end) : data_(data), end_(end) {}

    std::size_t pos() const { return pos_; }

    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(data_[pos_++]);
    }
    std::uint64_t varint() {
        std::uint64_t v = 0;
        unsigned shift = 0;
        while (true) {
            need(1);
            const std::uint8_t byte = static_cast<std::uint8_t>(data_[pos_++]);
            if (shift >= 64 || (shift == 63 && (byte & 0x7e))) {
                throw FormatError("varint overflows 64 bits");
            }
            v |= static_cast<std::uint64_t>(byte & 0x7f) << shift;
            if (!(byte & 0x80)) return v;
            shift += 7;
        }
    }
    std::int64_t zigzag() {
        const std::uint64_t u = varint();
        return static_cast<std::int64_t>((u >> 1) ^ (~(u & 1) + 1));
    }
    std::string packed(std::uint64_t len, const std::string& alphabet, unsigned bits) {
        if (len == 0) return {};
        if (bits == 0) return std::string(len, alphabet[0]);
        const std::uint64_t nbytes = (len * bits + 7) / 8;
        need(nbytes);
        std::string out;
        out.reserve(len);
        std::size_t bit = 0;
        for (std::uint64_t i = 0; i < len; ++i) {
            unsigned v = 0;
            for (unsigned k = 0; k < bits; ++k) {
                const unsigned char byte =
                    static_cast<unsigned char>(data_[pos_ + bit / 8]);
                v = (v << 1) | ((byte >> (7 - bit % 8)) & 1u);
                ++bit;
            }
            if (v >= alphabet.size()) throw FormatError("packed symbol out of range");
            out.push_back(alphabet[v]);
        }
        pos_ += nbytes;
        return out;
    }
    std::string raw(std::uint64_t len) {
        need(len);
        std::string out(data_.substr(pos_, len));
        pos_ += len;
        return out;
    }
    std::uint64_t remaining() const { return end_ - pos_; }

private:
    void need(std::uint64_t n) const {
        if (pos_ + n > end_) throw TruncatedError("serialized graph ends mid-record");
    }
    std::string_view data_;
    std::size_t end_;
    std::size_t pos_ = 0;
};

} // namespace

class GraphCodec {
public:
    static std::string encode(const BlockGraph& g, SpaceStats* tally);
    static BlockGraph decode(std::string_view data);
};

std::string GraphCodec::encode(const BlockGraph& g, SpaceStats* tally) {
    Sink sink;
    const std::string& alphabet = g.alphabet_;
    const unsigned bits = symbol_bits(alphabet.size());
    std::array<int, 256> index_of;
    index_of.fill(-1);
    for (std::size_t i = 0; i < alphabet.size(); ++i) {
        index_of[static_cast<unsigned char>(alphabet[i])] = static_cast<int>(i);
    }
    const std::size_t tracked_count = g.tracked_.size();
    const bool excess = g.excess_enabled_;

    sink.raw(Cat::Header, MAGIC, 4);
    sink.u16le(Cat::Header, VERSION);
    std::uint8_t flags = 0;
    if (g.level_skip_used_) flags |= 1;
    if (excess) flags |= 2;
    if (g.config_.level_skip) flags |= 4;
    sink.u8(Cat::Header, flags);
    sink.varint(Cat::Header, g.n_);
    sink.varint(Cat::Header, alphabet.size());
    sink.raw(Cat::Header, alphabet.data(), alphabet.size());
    sink.varint(Cat::Header, g.config_.arity);
    sink.varint(Cat::Header, g.config_.leaf_block_len);
    sink.varint(Cat::Header, g.config_.affix_len);
    sink.varint(Cat::Header, g.z_);
    sink.varint(Cat::Header, tracked_count);
    sink.raw(Cat::Header, g.tracked_.data(), tracked_count);
    sink.varint(Cat::Header, g.config_.hash_seed);
    sink.varint(Cat::Header, g.config_.hash_modulus_bits);
    sink.varint(Cat::Header, g.config_.retry_cap);
    sink.varint(Cat::Header, g.build_attempts_);
    sink.varint(Cat::Header, g.levels_.size());

    for (const Level& level : g.levels_) {
        sink.varint(Cat::Structure, level.blocks.size());
        std::uint64_t prev_end = 0;
        const std::vector<std::uint64_t>* prev_rank = nullptr;
        for (const Block& b : level.blocks) {
            std::uint8_t kind_flags = static_cast<std::uint8_t>(b.kind);
            if (b.back && b.back->has_second) kind_flags |= 4;
            sink.u8(Cat::Structure, kind_flags);
            sink.varint(Cat::Structure, b.start - (prev_end + 1));
            sink.varint(Cat::Structure, b.length);
            prev_end = b.start + b.length - 1;
            for (std::size_t t = 0; t < tracked_count; ++t) {
                const std::uint64_t base = prev_rank ? (*prev_rank)[t] : 0;
                sink.varint(Cat::Rank, b.rank_before[t] - base);
            }
            prev_rank = &b.rank_before;
            if (excess) {
                sink.zigzag(Cat::Excess, b.excess.total);
                sink.zigzag(Cat::Excess, b.excess.min_prefix);
                sink.varint(Cat::Excess, b.excess.min_pos);
            }
            switch (b.kind) {
                case BlockKind::Literal:
                    sink.packed(Cat::Literal, b.payload, index_of, bits);
                    break;
                case BlockKind::Internal:
                    sink.varint(Cat::Structure, b.child_count);
                    sink.packed(Cat::Affix, b.prefix_affix, index_of, bits);
                    sink.packed(Cat::Affix, b.suffix_affix, index_of, bits);
                    break;
                case BlockKind::Back: {
                    const BackPointer& bp = *b.back;
                    sink.varint(Cat::Pointer, bp.first_target);
                    sink.varint(Cat::Pointer, bp.offset);
                    sink.varint(Cat::Pointer, bp.split);
                    for (std::size_t t = 0; t < tracked_count; ++t) {
                        sink.varint(Cat::Rank, bp.rank_before_occurrence[t]);
                    }
                    for (std::size_t t = 0; t < tracked_count; ++t) {
                        sink.varint(Cat::Rank, bp.rank_split[t]);
                    }
                    sink.packed(Cat::Affix, b.prefix_affix, index_of, bits);
                    sink.packed(Cat::Affix, b.suffix_affix, index_of, bits);
                    if (bp.has_second) {
                        sink.packed(Cat::Affix, bp.split_affix, index_of, bits);
                    }
                    if (excess) {
                        sink.zigzag(Cat::Excess, bp.min_first);
                        sink.varint(Cat::Excess, bp.min_first_pos);
                        if (bp.has_second) {
                            sink.zigzag(Cat::Excess, bp.min_second);
                            sink.varint(Cat::Excess, bp.min_second_pos);
                        }
                    }
                    break;
                }
            }
        }
    }

    Sink trailer;
    trailer.u64le(Cat::Trailer, fnv1a(sink.bytes().data(), sink.bytes().size()));
    std::string out = sink.bytes() + trailer.bytes();

    if (tally) {
        tally->total_bytes = out.size();
        tally->header_bytes = sink.tally(Cat::Header);
        tally->structure_bytes = sink.tally(Cat::Structure);
        tally->literal_bytes = sink.tally(Cat::Literal);
        tally->pointer_bytes = sink.tally(Cat::Pointer);
        tally->rank_bytes = sink.tally(Cat::Rank);
        tally->affix_bytes = sink.tally(Cat::Affix);
        tally->excess_bytes = sink.tally(Cat::Excess);
        tally->trailer_bytes = TRAILER_SIZE;
    }
    return out;
}

BlockGraph GraphCodec::decode(std::string_view data) {
    if (data.size() < MIN_SIZE) {
        throw TruncatedError("serialized graph shorter than any valid image");
    }
    if (std::memcmp(data.data(), MAGIC, 4) != 0) {
        throw FormatError("not a serialized block graph");
    }
    const std::uint16_t version = static_cast<std::uint8_t>(data[4]) |
                                  (static_cast<std::uint16_t>(
                                       static_cast<std::uint8_t>(data[5]))
                                   << 8);
    if (version != VERSION) throw VersionError("unsupported serialization version");

    const std::size_t body_end = data.size() - TRAILER_SIZE;
    std::uint64_t stored = 0;
    for (int i = 7; i >= 0; --i) {
        stored = (stored << 8) | static_cast<std::uint8_t>(data[body_end + i]);
    }
    if (fnv1a(data.data(), body_end) != stored) {
        throw ChecksumError("serialized graph fails its checksum");
    }

    Reader r(data, body_end);
    r.raw(4);  // magic
    r.raw(2);  // version
    const std::uint8_t flags = r.u8();
    if (flags & ~0x07u) throw FormatError("unknown flag bits set");

    BlockGraph g;
    g.level_skip_used_ = flags & 1;
    g.excess_enabled_ = flags & 2;
    g.config_.level_skip = flags & 4;
    g.config_.enable_excess = g.excess_enabled_;
    g.n_ = r.varint();
    if (g.n_ == 0) throw FormatError("graph over an empty text");
    const std::uint64_t sigma = r.varint();
    if (sigma == 0 || sigma > 256) throw FormatError("alphabet size out of range");
    g.alphabet_ = r.raw(sigma);
    for (std::size_t i = 1; i < g.alphabet_.size(); ++i) {
        if (static_cast<unsigned char>(g.alphabet_[i - 1]) >=
            static_cast<unsigned char>(g.alphabet_[i])) {
            throw FormatError("alphabet not sorted");
        }
    }
    const unsigned bits = symbol_bits(sigma);
    g.config_.arity = static_cast<std::uint32_t>(r.varint());
    if (g.config_.arity < 2) throw FormatError("arity out of range");
    g.config_.leaf_block_len = r.varint();
    g.config_.affix_len = r.varint();
    if (g.config_.leaf_block_len == 0 || g.config_.affix_len == 0) {
        throw FormatError("zero block parameters");
    }
    g.z_ = r.varint();
    const std::uint64_t tracked_count = r.varint();
    if (tracked_count > sigma) throw FormatError("tracked set larger than alphabet");
    g.tracked_ = r.raw(tracked_count);
    for (char c : g.tracked_) {
        if (g.alphabet_.find(c) == std::string::npos) {
            throw FormatError("tracked symbol outside alphabet");
        }
    }
    g.config_.rank_symbols = g.tracked_;
    g.config_.hash_seed = r.varint();
    g.config_.hash_modulus_bits = static_cast<std::uint32_t>(r.varint());
    g.config_.retry_cap = static_cast<std::uint32_t>(r.varint());
    g.build_attempts_ = static_cast<std::uint32_t>(r.varint());
    const std::uint64_t level_count = r.varint();
    if (level_count == 0 || level_count > 4096) throw FormatError("level count out of range");
    if (g.excess_enabled_) {
        for (char c : g.alphabet_) {
            if (c != '(' && c != ')') {
                throw FormatError("excess flag on a non-parenthesis alphabet");
            }
        }
    }

    g.levels_.resize(level_count);
    std::uint64_t expected_blocks = 0;  // children promised by the level above
    for (std::uint64_t li = 0; li < level_count; ++li) {
        Level& level = g.levels_[li];
        const std::uint64_t count = r.varint();
        if (count == 0 || count > r.remaining() + 1) {
            throw FormatError("block count out of range");
        }
        if (li > 0 && count != expected_blocks) {
            throw FormatError("level size disagrees with child counts above");
        }
        level.blocks.resize(count);
        std::uint64_t next_child = 0;
        std::uint64_t prev_end = 0;
        const std::vector<std::uint64_t>* prev_rank = nullptr;
        for (std::uint64_t bi = 0; bi < count; ++bi) {
            Block& b = level.blocks[bi];
            const std::uint8_t kind_flags = r.u8();
            if ((kind_flags & 3) > 2 || (kind_flags & ~0x07u)) {
                throw FormatError("unknown block kind");
            }
            b.kind = static_cast<BlockKind>(kind_flags & 3);
            const bool has_second = kind_flags & 4;
            if (has_second && b.kind != BlockKind::Back) {
                throw FormatError("split flag on a non-pointer block");
            }
            b.start = prev_end + 1 + r.varint();
            b.length = r.varint();
            if (b.length == 0 || b.start + b.length - 1 > g.n_) {
                throw FormatError("block span out of range");
            }
            if (li == 0 && b.start != prev_end + 1) {
                throw FormatError("top level blocks must tile the text");
            }
            prev_end = b.start + b.length - 1;
            b.rank_before.resize(tracked_count);
            for (std::uint64_t t = 0; t < tracked_count; ++t) {
                const std::uint64_t base = prev_rank ? (*prev_rank)[t] : 0;
                b.rank_before[t] = base + r.varint();
            }
            prev_rank = &b.rank_before;
            if (g.excess_enabled_) {
                b.excess.total = r.zigzag();
                b.excess.min_prefix = r.zigzag();
                b.excess.min_pos = r.varint();
            }
            switch (b.kind) {
                case BlockKind::Literal: {
                    b.payload = r.packed(b.length, g.alphabet_, bits);
                    const std::uint64_t a =
                        std::min<std::uint64_t>(g.config_.affix_len, b.length);
                    b.prefix_affix = b.payload.substr(0, a);
                    b.suffix_affix = b.payload.substr(b.length - a, a);
                    break;
                }
                case BlockKind::Internal: {
                    b.child_count = static_cast<std::uint32_t>(r.varint());
                    if (b.child_count == 0 || b.child_count > b.length) {
                        throw FormatError("child count out of range");
                    }
                    b.first_child = static_cast<std::uint32_t>(next_child);
                    next_child += b.child_count;
                    const std::uint64_t a =
                        std::min<std::uint64_t>(g.config_.affix_len, b.length);
                    b.prefix_affix = r.packed(a, g.alphabet_, bits);
                    b.suffix_affix = r.packed(a, g.alphabet_, bits);
                    break;
                }
                case BlockKind::Back: {
                    b.back = std::make_unique<BackPointer>();
                    BackPointer& bp = *b.back;
                    bp.has_second = has_second;
                    bp.first_target = static_cast<std::uint32_t>(r.varint());
                    bp.offset = r.varint();
                    bp.split = r.varint();
                    if (bp.first_target + (has_second ? 1u : 0u) >= bi) {
                        throw FormatError("pointer target not an earlier block");
                    }
                    bp.second_target = has_second ? bp.first_target + 1 : 0;
                    const Block& t1 = level.blocks[bp.first_target];
                    if (t1.kind == BlockKind::Back ||
                        (has_second &&
                         level.blocks[bp.second_target].kind == BlockKind::Back)) {
                        throw FormatError("pointer target is itself a pointer");
                    }
                    if (bp.offset == 0 || bp.split == 0 || bp.split > b.length ||
                        (has_second ? (bp.split >= b.length ||
                                       bp.offset - 1 + bp.split != t1.length)
                                    : (bp.split != b.length ||
                                       bp.offset - 1 + b.length > t1.length))) {
                        throw FormatError("pointer geometry out of range");
                    }
                    bp.rank_before_occurrence.resize(tracked_count);
                    for (std::uint64_t t = 0; t < tracked_count; ++t) {
                        bp.rank_before_occurrence[t] = r.varint();
                    }
                    bp.rank_split.resize(tracked_count);
                    for (std::uint64_t t = 0; t < tracked_count; ++t) {
                        bp.rank_split[t] = r.varint();
                    }
                    const std::uint64_t a =
                        std::min<std::uint64_t>(g.config_.affix_len, b.length);
                    b.prefix_affix = r.packed(a, g.alphabet_, bits);
                    b.suffix_affix = r.packed(a, g.alphabet_, bits);
                    if (has_second) {
                        const std::uint64_t a1 =
                            std::min<std::uint64_t>(g.config_.affix_len, bp.split);
                        const std::uint64_t a2 = std::min<std::uint64_t>(
                            g.config_.affix_len, b.length - bp.split);
                        bp.split_affix = r.packed(a1 + a2, g.alphabet_, bits);
                    }
                    if (g.excess_enabled_) {
                        bp.min_first = r.zigzag();
                        bp.min_first_pos = r.varint();
                        if (has_second) {
                            bp.min_second = r.zigzag();
                            bp.min_second_pos = r.varint();
                        }
                    }
                    break;
                }
            }
        }
        if (li == 0 && prev_end != g.n_) {
            throw FormatError("top level does not cover the text");
        }
        expected_blocks = next_child;
    }
    if (expected_blocks != 0) {
        throw FormatError("bottom level still promises children");
    }
    if (r.pos() != body_end) throw FormatError("trailing bytes after the graph body");

    g.open_index_ = g.tracked_.find('(');
    g.close_index_ = g.tracked_.find(')');
    return g;
}

std::string to_bytes(const BlockGraph& graph) { return GraphCodec::encode(graph, nullptr); }

BlockGraph from_bytes(std::string_view bytes) { return GraphCodec::decode(bytes); }

void save(const BlockGraph& graph, const std::string& path) {
    const std::string bytes = to_bytes(graph);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path);
}

BlockGraph load(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw IoError("cannot open file for reading: " + path);
    const std::streamsize size = in.tellg();
    in.seekg(0);
    std::string bytes(static_cast<std::size_t>(size), '\0');
    if (size > 0) in.read(bytes.data(), size);
    if (!in) throw IoError("read failed: " + path);
    return from_bytes(bytes);
}

SpaceStats stats(const BlockGraph& graph) {
    SpaceStats s;
    GraphCodec::encode(graph, &s);
    s.text_length = graph.length();
    s.sigma = graph.sigma();
    s.phrase_count = graph.phrase_count();
    s.build_attempts = graph.build_attempts();
    s.plain_bits = graph.length() * std::max(1u, symbol_bits(graph.sigma()));
    for (const Level& level : graph.levels()) {
        SpaceStats::LevelStats ls;
        ls.blocks = level.blocks.size();
        for (const Block& b : level.blocks) {
            switch (b.kind) {
                case BlockKind::Internal: ++ls.internal_blocks; break;
                case BlockKind::Literal: ++ls.literal_blocks; break;
                case BlockKind::Back: ++ls.back_blocks; break;
            }
        }
        s.levels.push_back(ls);
    }
    return s;
}

} // namespace bg

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bg/block_graph.hpp"

namespace bg {

/// Exact byte-level accounting of a graph's serialized form, grouped by what
/// the bytes pay for. The sums of the category fields equal total_bytes.
struct SpaceStats {
    std::uint64_t total_bytes = 0;
    std::uint64_t header_bytes = 0;     // magic, version, parameters, alphabet
    std::uint64_t structure_bytes = 0;  // block kinds, spans, child counts
    std::uint64_t literal_bytes = 0;    // packed literal payloads
    std::uint64_t pointer_bytes = 0;    // back-pointer targets and offsets
    std::uint64_t rank_bytes = 0;       // rank samples and cached counts
    std::uint64_t affix_bytes = 0;      // packed affixes
    std::uint64_t excess_bytes = 0;     // excess summaries and piece minima
    std::uint64_t trailer_bytes = 0;    // checksum

    struct LevelStats {
        std::uint64_t blocks = 0;
        std::uint64_t internal_blocks = 0;
        std::uint64_t literal_blocks = 0;
        std::uint64_t back_blocks = 0;
    };
    std::vector<LevelStats> levels;

    std::uint64_t text_length = 0;
    std::uint32_t sigma = 0;
    std::uint64_t phrase_count = 0;
    std::uint32_t build_attempts = 0;
    /// Bits a plain fixed-width array would need: n * ceil(log2 sigma).
    std::uint64_t plain_bits = 0;
};

/// Serialized image of the graph (deterministic for a given graph).
std::string to_bytes(const BlockGraph& graph);

/// Rebuilds a graph from its serialized image. Throws TruncatedError,
/// FormatError, VersionError or ChecksumError on damaged input.
BlockGraph from_bytes(std::string_view bytes);

/// Writes / reads the serialized image to a file. Throws IoError on
/// filesystem failures, plus the from_bytes errors when loading.
void save(const BlockGraph& graph, const std::string& path);
BlockGraph load(const std::string& path);

/// Serializes the graph internally and reports where the bytes went.
SpaceStats stats(const BlockGraph& graph);

} // namespace bg

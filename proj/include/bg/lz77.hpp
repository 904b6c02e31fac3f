#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace bg {

/// One phrase of a greedy left-to-right LZ77 parse. Positions are 1-based.
///
/// A copy phrase (`length > 0`) repeats `length` symbols starting at
/// `source`, where `source < start`; the copied range may overlap the phrase
/// itself, so runs like "aaaa..." compress into a single self-referential
/// phrase. A literal phrase (`length == 0`) contributes the single symbol
/// `literal`, used whenever the next symbol has no earlier occurrence.
struct Lz77Phrase {
    std::uint64_t start = 0;
    std::uint64_t length = 0;   // 0 marks a literal phrase
    std::uint64_t source = 0;   // valid when length > 0
    unsigned char literal = 0;  // valid when length == 0
};

struct Lz77Parse {
    std::uint64_t text_length = 0;
    std::vector<Lz77Phrase> phrases;
};

/// Greedy parse: each phrase takes the longest prefix of the remaining
/// suffix that also occurs starting strictly earlier, falling back to a
/// literal when that longest prefix is empty. Throws on empty input.
Lz77Parse lz77_parse(std::string_view text);

/// Number of phrases in the greedy parse.
std::uint64_t lz77_phrase_count(std::string_view text);

/// Reconstructs the text a parse encodes.
std::string lz77_decode(const Lz77Parse& parse);

} // namespace bg

#include "bg/lz77.hpp"

#include <algorithm>
#include <numeric>

#include "bg/errors.hpp"

namespace bg {

namespace {

// Suffix array by prefix doubling; O(n log^2 n) with plain sorts, which is
// comfortably fast for the input sizes this library targets.
std::vector<std::uint32_t> suffix_array(std::string_view text) {
    const std::size_t n = text.size();
    std::vector<std::uint32_t> sa(n);
    std::vector<std::int64_t> rank(n), next_rank(n);
    std::iota(sa.begin(), sa.end(), 0);
    for (std::size_t i = 0; i < n; ++i) rank[i] = static_cast<unsigned char>(text[i]);
    for (std::size_t k = 1;; k <<= 1) {
        auto key = [&](std::uint32_t i) {
            return std::pair<std::int64_t, std::int64_t>(rank[i], i + k < n ? rank[i + k] : -1);
        };
        std::sort(sa.begin(), sa.end(),
                  [&](std::uint32_t a, std::uint32_t b) { return key(a) < key(b); });
        next_rank[sa[0]] = 0;
        for (std::size_t i = 1; i < n; ++i) {
            next_rank[sa[i]] = next_rank[sa[i - 1]] + (key(sa[i - 1]) < key(sa[i]) ? 1 : 0);
        }
        rank.swap(next_rank);
        if (rank[sa[n - 1]] == static_cast<std::int64_t>(n - 1)) break;
        if (k >= n) break;
    }
    return sa;
}

// Kasai's LCP construction: lcp[i] = longest common prefix of suffixes
// sa[i-1] and sa[i]; lcp[0] = 0.
std::vector<std::uint32_t> lcp_array(std::string_view text, const std::vector<std::uint32_t>& sa) {
    const std::size_t n = text.size();
    std::vector<std::uint32_t> inv(n), lcp(n, 0);
    for (std::size_t i = 0; i < n; ++i) inv[sa[i]] = static_cast<std::uint32_t>(i);
    std::size_t h = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (inv[i] == 0) {
            h = 0;
            continue;
        }
        std::size_t j = sa[inv[i] - 1];
        while (i + h < n && j + h < n && text[i + h] == text[j + h]) ++h;
        lcp[inv[i]] = static_cast<std::uint32_t>(h);
        if (h) --h;
    }
    return lcp;
}

// Sparse table over the LCP array for range-minimum queries.
class LcpIndex {
public:
    explicit LcpIndex(std::vector<std::uint32_t> lcp) : lcp_(std::move(lcp)) {
        const std::size_t n = lcp_.size();
        levels_ = 1;
        while ((1u << levels_) <= n) ++levels_;
        table_.assign(levels_, lcp_);
        for (unsigned j = 1; j < levels_; ++j) {
            const std::size_t span = 1u << j;
            for (std::size_t i = 0; i + span <= n; ++i) {
                table_[j][i] = std::min(table_[j - 1][i], table_[j - 1][i + span / 2]);
            }
        }
    }

    // min of lcp over SA ranks (lo, hi], i.e. the LCP of suffixes ranked lo and hi.
    std::uint32_t between(std::size_t lo, std::size_t hi) const {
        std::size_t i = lo + 1, len = hi - lo;
        unsigned j = 31 - __builtin_clz(static_cast<unsigned>(len));
        return std::min(table_[j][i], table_[j][i + len - (1u << j)]);
    }

private:
    std::vector<std::uint32_t> lcp_;
    std::vector<std::vector<std::uint32_t>> table_;
    unsigned levels_ = 0;
};

} // namespace

Lz77Parse lz77_parse(std::string_view text) {
    const std::size_t n = text.size();
    if (n == 0) throw InvalidArgument("cannot parse an empty text");

    auto sa = suffix_array(text);
    auto lcp = lcp_array(text, sa);
    LcpIndex lcp_index(lcp);
    std::vector<std::uint32_t> inv(n);
    for (std::size_t i = 0; i < n; ++i) inv[sa[i]] = static_cast<std::uint32_t>(i);

    // For each SA rank, the nearest rank above/below whose suffix starts at a
    // smaller text position. Monotonic stacks give both in linear time.
    constexpr std::uint32_t NONE = 0xffffffffu;
    std::vector<std::uint32_t> prev_smaller(n, NONE), next_smaller(n, NONE);
    {
        std::vector<std::uint32_t> stack;
        for (std::size_t i = 0; i < n; ++i) {
            while (!stack.empty() && sa[stack.back()] > sa[i]) stack.pop_back();
            prev_smaller[i] = stack.empty() ? NONE : stack.back();
            stack.push_back(static_cast<std::uint32_t>(i));
        }
        stack.clear();
        for (std::size_t i = n; i-- > 0;) {
            while (!stack.empty() && sa[stack.back()] > sa[i]) stack.pop_back();
            next_smaller[i] = stack.empty() ? NONE : stack.back();
            stack.push_back(static_cast<std::uint32_t>(i));
        }
    }

    Lz77Parse parse;
    parse.text_length = n;
    std::size_t pos = 0;
    while (pos < n) {
        const std::uint32_t r = inv[pos];
        std::uint32_t best_len = 0;
        std::uint32_t best_src = 0;
        if (prev_smaller[r] != NONE) {
            std::uint32_t len = lcp_index.between(prev_smaller[r], r);
            if (len > best_len) {
                best_len = len;
                best_src = sa[prev_smaller[r]];
            }
        }
        if (next_smaller[r] != NONE) {
            std::uint32_t len = lcp_index.between(r, next_smaller[r]);
            if (len > best_len) {
                best_len = len;
                best_src = sa[next_smaller[r]];
            }
        }
        Lz77Phrase phrase;
        phrase.start = pos + 1;
        if (best_len == 0) {
            phrase.length = 0;
            phrase.literal = static_cast<unsigned char>(text[pos]);
            pos += 1;
        } else {
            best_len = std::min<std::uint32_t>(best_len, static_cast<std::uint32_t>(n - pos));
            phrase.length = best_len;
            phrase.source = best_src + 1;
            pos += best_len;
        }
        parse.phrases.push_back(phrase);
    }
    return parse;
}

std::uint64_t lz77_phrase_count(std::string_view text) {
    return lz77_parse(text).phrases.size();
}

std::string lz77_decode(const Lz77Parse& parse) {
    std::string out;
    out.reserve(parse.text_length);
    for (const auto& phrase : parse.phrases) {
        if (phrase.start != out.size() + 1) {
            throw InvalidArgument("phrase starts do not tile the text");
        }
        if (phrase.length == 0) {
            out.push_back(static_cast<char>(phrase.literal));
        } else {
            if (phrase.source == 0 || phrase.source >= phrase.start) {
                throw InvalidArgument("phrase source must start strictly earlier");
            }
            // Byte-at-a-time copy keeps self-overlapping sources correct.
            for (std::uint64_t i = 0; i < phrase.length; ++i) {
                out.push_back(out[phrase.source - 1 + i]);
            }
        }
    }
    if (out.size() != parse.text_length) {
        throw InvalidArgument("decoded length disagrees with the recorded text length");
    }
    return out;
}

} // namespace bg

#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace bg {

/// Rolling polynomial fingerprints over byte strings.
///
/// A window W[0..len) is mapped to
///     sum_i W[i] * base^(len-1-i)  mod  modulus
/// so the leftmost symbol carries the highest power and a window can be
/// slid one position to the right in O(1).
///
/// The modulus is a random prime below 2^modulus_bits and the base a random
/// value in [2, modulus-2], both drawn deterministically from the seed, so a
/// fixed seed always produces the same fingerprints and a reseed draws an
/// independent (prime, base) pair. Instances are immutable after
/// construction and safe to share across threads.
class KarpRabinHasher {
public:
    /// Draws (modulus, base) from the seed. modulus_bits must lie in [8, 62];
    /// small values such as 8 make collisions easy to provoke and are only
    /// useful for stress tests.
    KarpRabinHasher(std::uint64_t seed, unsigned modulus_bits);

    std::uint64_t modulus() const { return modulus_; }
    std::uint64_t base() const { return base_; }
    std::uint64_t seed() const { return seed_; }
    unsigned modulus_bits() const { return modulus_bits_; }

    /// Fingerprint of text[start, start+len). The empty window hashes to 0.
    std::uint64_t hash_window(std::string_view text, std::size_t start, std::size_t len) const;

    /// Slides a window of length `len` one step right: `prev` fingerprints
    /// text[start..start+len), the result fingerprints text[start+1..start+1+len).
    /// `top` must be power(len-1).
    std::uint64_t roll(std::uint64_t prev, unsigned char outgoing, unsigned char incoming,
                       std::uint64_t top) const {
        // Symbols are reduced first: an 8-bit modulus is smaller than the
        // byte range, and add/sub expect both operands below the modulus.
        std::uint64_t h = sub(prev, mul(outgoing % modulus_, top));
        return add(mul(h, base_), incoming % modulus_);
    }

    /// base^k mod modulus, answered from a table filled by reserve_powers().
    std::uint64_t power(std::size_t k) const { return power_cache_[k]; }

    /// Extends the power table so power(k) is valid for all k <= max_exponent.
    /// Callers do this once up front; the table is read-only afterwards.
    void reserve_powers(std::size_t max_exponent);

private:
    std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
        std::uint64_t s = a + b;
        return s >= modulus_ ? s - modulus_ : s;
    }
    std::uint64_t sub(std::uint64_t a, std::uint64_t b) const {
        return a >= b ? a - b : a + modulus_ - b;
    }
    std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
        return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % modulus_);
    }

    std::uint64_t seed_;
    unsigned modulus_bits_;
    std::uint64_t modulus_;
    std::uint64_t base_;
    std::vector<std::uint64_t> power_cache_;
};

} // namespace bg

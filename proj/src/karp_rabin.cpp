#include "bg/karp_rabin.hpp"

#include <random>

#include "bg/errors.hpp"

namespace bg {

namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    while (e) {
        if (e & 1) r = mulmod(r, b, m);
        b = mulmod(b, b, m);
        e >>= 1;
    }
    return r;
}

// Deterministic Miller-Rabin; this witness set decides primality exactly for
// every 64-bit integer.
bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    std::uint64_t d = n - 1;
    unsigned s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        std::uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (unsigned i = 1; i < s; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

} // namespace

KarpRabinHasher::KarpRabinHasher(std::uint64_t seed, unsigned modulus_bits)
    : seed_(seed), modulus_bits_(modulus_bits) {
    if (modulus_bits < 8 || modulus_bits > 62) {
        throw InvalidArgument("hash modulus width must lie in [8, 62] bits");
    }
    std::mt19937_64 rng(seed ^ 0x5851f42d4c957f2dull);
    const std::uint64_t lo = 1ull << (modulus_bits - 1);
    const std::uint64_t hi = (1ull << modulus_bits) - 1;
    std::uniform_int_distribution<std::uint64_t> dist(lo, hi);
    std::uint64_t candidate = dist(rng) | 1ull;
    while (!is_prime(candidate)) {
        candidate += 2;
        if (candidate > hi) candidate = lo | 1ull;
    }
    modulus_ = candidate;
    std::uniform_int_distribution<std::uint64_t> base_dist(2, modulus_ - 2);
    base_ = base_dist(rng);
    power_cache_.push_back(1 % modulus_);
}

std::uint64_t KarpRabinHasher::hash_window(std::string_view text, std::size_t start,
                                           std::size_t len) const {
    if (start + len > text.size()) {
        throw OutOfRange("hash window exceeds text bounds");
    }
    std::uint64_t h = 0;
    for (std::size_t i = 0; i < len; ++i) {
        h = add(mul(h, base_), static_cast<unsigned char>(text[start + i]) % modulus_);
    }
    return h;
}

void KarpRabinHasher::reserve_powers(std::size_t max_exponent) {
    while (power_cache_.size() <= max_exponent) {
        power_cache_.push_back(mul(power_cache_.back(), base_));
    }
}

} // namespace bg

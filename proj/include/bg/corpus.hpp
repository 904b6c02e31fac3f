#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace bg {

/// Uniform random string of length n over an alphabet of `sigma` symbols
/// ('a'.. for sigma <= 26, raw byte values 0..sigma-1 beyond that).
/// Deterministic in the seed.
std::string gen_random(unsigned sigma, std::uint64_t n, std::uint64_t seed);

/// Prefix of length n of the infinite Fibonacci word over {a, b}.
std::string gen_fibonacci(std::uint64_t n);

/// The unit repeated k times.
std::string gen_power(std::string_view unit, std::uint64_t k);

/// Balanced parenthesis encoding of a random tree with `nodes` nodes,
/// single-rooted, deterministic in the seed. Node i attaches to a uniformly
/// random earlier node, which keeps expected depth logarithmic.
std::string gen_bp_random_tree(std::uint64_t nodes, std::uint64_t seed);

} // namespace bg

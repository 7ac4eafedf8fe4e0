#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace trajmatch {

using Rng = std::mt19937_64;

/// 64-bit seed for a named substream. The label is hashed (FNV-1a) and
/// mixed with the base seed (splitmix64), so streams with different labels
/// are unrelated and independent of evaluation order.
std::uint64_t substream_seed(std::uint64_t base, std::string_view label);

inline Rng make_stream(std::uint64_t base, std::string_view label)
{
    return Rng(substream_seed(base, label));
}

} // namespace trajmatch

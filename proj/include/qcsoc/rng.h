#ifndef QCSOC_RNG_H
#define QCSOC_RNG_H

#include <cstdint>
#include <string_view>

namespace qcsoc {

constexpr uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

constexpr uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 0xCBF29CE484222325ull;
    for (char c : s) {
        h ^= static_cast<uint8_t>(c);
        h *= 0x100000001B3ull;
    }
    return h;
}

// Independent seed for a named stream; order of stream creation does not matter.
constexpr uint64_t derive_seed(uint64_t seed, std::string_view stream) {
    return splitmix64(splitmix64(seed) ^ fnv1a64(stream));
}

// Seed for shot `index` of a run, so shots can execute in any order.
constexpr uint64_t derive_seed(uint64_t seed, uint64_t index) {
    return splitmix64(splitmix64(seed) + splitmix64(index ^ 0x5EED5EED5EED5EEDull));
}

}  // namespace qcsoc

#endif  // QCSOC_RNG_H

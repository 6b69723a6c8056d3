#ifndef QCSOC_FIXED_POINT_H
#define QCSOC_FIXED_POINT_H

#include <cmath>
#include <cstdint>

namespace qcsoc {

// Signed Q1.15 sample. Full scale is 32767; -32768 is reachable only by saturation.
using q15_t = int16_t;

inline constexpr int32_t kQ15One = 32767;
inline constexpr int32_t kQ15Min = -32768;

// Phase and frequency words count 2^32 per full turn.
inline constexpr double kTurn = 4294967296.0;

constexpr int16_t saturate_q15(int64_t v) {
    if (v > 32767) return 32767;
    if (v < -32768) return -32768;
    return static_cast<int16_t>(v);
}

// Divides by 2^shift rounding to nearest, ties to even.
constexpr int64_t shift_round_half_even(int64_t v, int shift) {
    const int64_t floor_q = v >> shift;  // arithmetic shift
    const int64_t rem = v - (floor_q << shift);
    const int64_t half = int64_t{1} << (shift - 1);
    if (rem > half) return floor_q + 1;
    if (rem < half) return floor_q;
    return floor_q + (floor_q & 1);
}

// Q1.15 x Q1.15 -> Q1.15, rounded to nearest even then saturated.
constexpr int16_t mul_q15(int16_t a, int16_t b) {
    return saturate_q15(shift_round_half_even(int64_t{a} * int64_t{b}, 15));
}

inline uint32_t phase_word_from_turns(double turns) {
    double frac = turns - std::floor(turns);
    return static_cast<uint32_t>(static_cast<uint64_t>(std::llround(frac * kTurn)) & 0xFFFFFFFFu);
}

inline double phase_word_to_radians(uint32_t word) {
    return 2.0 * M_PI * (static_cast<double>(word) / kTurn);
}

// Modular distance between two 32-bit angle/frequency words.
constexpr uint32_t modular_distance(uint32_t a, uint32_t b) {
    uint32_t d = a - b;
    uint32_t e = b - a;
    return d < e ? d : e;
}

// True when a precedes b inside the +/-2^31 comparison window.
constexpr bool time_before(uint32_t a, uint32_t b) {
    return static_cast<int32_t>(a - b) < 0;
}

}  // namespace qcsoc

#endif  // QCSOC_FIXED_POINT_H

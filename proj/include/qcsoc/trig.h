#ifndef QCSOC_TRIG_H
#define QCSOC_TRIG_H

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qcsoc/fixed_point.h"

namespace qcsoc {

enum class TrigKind : uint8_t { kLut, kCordic };

/// Selects the cos/sin implementation of a carrier generator.
///
/// `param` is the quarter-wave table resolution in bits for kLut and the
/// iteration count for kCordic.
struct TrigBackend {
    TrigKind kind = TrigKind::kLut;
    int param = 12;

    static TrigBackend lut(int table_bits) { return {TrigKind::kLut, table_bits}; }
    static TrigBackend cordic(int iterations) { return {TrigKind::kCordic, iterations}; }

    // Pipeline depth in cycles added to every parameter port of a channel.
    uint32_t latency() const { return kind == TrigKind::kLut ? 2u : static_cast<uint32_t>(param); }

    bool operator==(const TrigBackend&) const = default;
};

// "lut:12" / "cordic:16". Throws std::invalid_argument on malformed text.
TrigBackend parse_trig_backend(std::string_view text);
std::string format_trig_backend(const TrigBackend& backend);

struct CosSin {
    q15_t c;
    q15_t s;
    bool operator==(const CosSin&) const = default;
};

/// Fixed-point cos/sin of a 32-bit phase word (2^32 per turn).
///
/// Outputs are Q1.15 clamped to [-32767, 32767]. Both backends are exact at
/// the four quadrant points.
class TrigUnit {
   public:
    explicit TrigUnit(TrigBackend backend = {});

    CosSin eval(uint32_t theta) const;
    const TrigBackend& backend() const { return backend_; }
    uint32_t latency() const { return backend_.latency(); }

   private:
    CosSin eval_lut(uint32_t theta) const;
    CosSin eval_cordic(uint32_t theta) const;

    TrigBackend backend_;
    std::vector<int32_t> quarter_table_;  // 2^bits + 1 entries of sin over [0, pi/2]
    std::vector<int64_t> atan_table_;     // atan(2^-i) in phase-word units
    int64_t cordic_x0_ = 0;
};

}  // namespace qcsoc

#endif  // QCSOC_TRIG_H

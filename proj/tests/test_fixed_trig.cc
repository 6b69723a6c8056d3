#include <cfenv>
#include <cmath>

#include <gtest/gtest.h>

#include "qcsoc/fixed_point.h"
#include "qcsoc/trig.h"
#include "test_util.h"

using namespace qcsoc;
using qcsoc::qtest::Gen;

namespace {

// Worst-case error against round(32767 * cos/sin) over the 2^16-point sweep.
// Measured once for each default backend and locked here.
constexpr int kTrigToleranceLsb = 1;

int oracle(double v) { return static_cast<int>(std::lround(std::clamp(32767.0 * v, -32767.0, 32767.0))); }

int sweep_error(const TrigUnit& t, uint32_t stride, uint32_t offset) {
    int worst = 0;
    for (uint32_t k = 0; k < 65536; ++k) {
        const uint32_t theta = k * stride + offset;
        const double a = 2.0 * M_PI * theta / kTurn;
        const CosSin cs = t.eval(theta);
        worst = std::max({worst, std::abs(cs.c - oracle(std::cos(a))), std::abs(cs.s - oracle(std::sin(a)))});
    }
    return worst;
}

}  // namespace

TEST(FixedPoint, SaturateClampsToInt16) {
    EXPECT_EQ(saturate_q15(40000), 32767);
    EXPECT_EQ(saturate_q15(-40000), -32768);
    EXPECT_EQ(saturate_q15(-5), -5);
}

TEST(FixedPoint, ShiftRoundHalfEvenMatchesNearbyint) {
    std::fesetround(FE_TONEAREST);
    Gen g(11);
    for (int i = 0; i < 200000; ++i) {
        const int shift = static_cast<int>(g.range(1, 30));
        const int64_t v = g.range(-(int64_t{1} << 46), int64_t{1} << 46);
        const long double exact = static_cast<long double>(v) / static_cast<long double>(int64_t{1} << shift);
        ASSERT_EQ(shift_round_half_even(v, shift), static_cast<int64_t>(std::nearbyintl(exact))) << v << " >> " << shift;
    }
}

TEST(FixedPoint, MulQ15Examples) {
    EXPECT_EQ(mul_q15(32767, 32767), 32766);
    EXPECT_EQ(mul_q15(-32768, -32768), 32767);  // saturates
    EXPECT_EQ(mul_q15(16384, 1), 0);            // 0.5 rounds to even
    EXPECT_EQ(mul_q15(16384, 3), 2);            // 1.5 rounds to even
    EXPECT_EQ(mul_q15(16384, 5), 2);            // 2.5 rounds to even
    EXPECT_EQ(mul_q15(-16384, 3), -2);
}

TEST(FixedPoint, MulQ15IsCommutativeAndBounded) {
    Gen g(12);
    for (int i = 0; i < 100000; ++i) {
        const auto a = static_cast<int16_t>(g.u32());
        const auto b = static_cast<int16_t>(g.u32());
        ASSERT_EQ(mul_q15(a, b), mul_q15(b, a));
        const double exact = a * static_cast<double>(b) / 32768.0;
        ASSERT_LE(std::abs(mul_q15(a, b) - std::clamp(exact, -32768.0, 32767.0)), 0.5 + 1e-9);
    }
}

TEST(FixedPoint, TimeBeforeWrapsModulo32Bits) {
    EXPECT_TRUE(time_before(0xFFFFFFF0u, 5));
    EXPECT_FALSE(time_before(5, 0xFFFFFFF0u));
    EXPECT_FALSE(time_before(7, 7));
    EXPECT_EQ(modular_distance(0xFFFFFFFFu, 1), 2u);
}

TEST(FixedPoint, PhaseWordConversions) {
    EXPECT_EQ(phase_word_from_turns(0.25), 0x40000000u);
    EXPECT_EQ(phase_word_from_turns(-0.25), 0xC0000000u);
    EXPECT_DOUBLE_EQ(phase_word_to_radians(0x80000000u), M_PI);
}

TEST(Trig, BackendLatencies) {
    EXPECT_EQ(TrigBackend::lut(12).latency(), 2u);
    EXPECT_EQ(TrigBackend::cordic(16).latency(), 16u);
    EXPECT_EQ(TrigBackend::cordic(9).latency(), 9u);
}

TEST(Trig, ParseAndFormatRoundTrip) {
    EXPECT_EQ(parse_trig_backend("lut:12"), TrigBackend::lut(12));
    EXPECT_EQ(parse_trig_backend("cordic:16"), TrigBackend::cordic(16));
    EXPECT_EQ(format_trig_backend(TrigBackend::cordic(20)), "cordic:20");
    EXPECT_THROW(parse_trig_backend("lut"), std::invalid_argument);
    EXPECT_THROW(parse_trig_backend("fft:3"), std::invalid_argument);
    EXPECT_THROW(parse_trig_backend("lut:x"), std::invalid_argument);
}

TEST(Trig, QuadrantPointsAreExact) {
    for (auto b : {TrigBackend::lut(12), TrigBackend::lut(4), TrigBackend::cordic(16), TrigBackend::cordic(6)}) {
        TrigUnit t(b);
        EXPECT_EQ(t.eval(0x00000000u), (CosSin{32767, 0})) << format_trig_backend(b);
        EXPECT_EQ(t.eval(0x40000000u), (CosSin{0, 32767})) << format_trig_backend(b);
        EXPECT_EQ(t.eval(0x80000000u), (CosSin{-32767, 0})) << format_trig_backend(b);
        EXPECT_EQ(t.eval(0xC0000000u), (CosSin{0, -32767})) << format_trig_backend(b);
    }
}

TEST(Trig, DefaultBackendsWithinLockedTolerance) {
    EXPECT_LE(sweep_error(TrigUnit(TrigBackend::lut(12)), 1u << 16, 0), kTrigToleranceLsb);
    EXPECT_LE(sweep_error(TrigUnit(TrigBackend::cordic(16)), 1u << 16, 0), kTrigToleranceLsb);
    // Off-grid angles.
    EXPECT_LE(sweep_error(TrigUnit(TrigBackend::lut(12)), 65537u, 12345u), kTrigToleranceLsb);
    EXPECT_LE(sweep_error(TrigUnit(TrigBackend::cordic(16)), 65537u, 12345u), kTrigToleranceLsb);
}

TEST(Trig, CoarseBackendsDegradeGracefully) {
    // Fewer table bits or iterations trade accuracy for resources.
    EXPECT_GT(sweep_error(TrigUnit(TrigBackend::lut(5)), 65537u, 99u), kTrigToleranceLsb);
    EXPECT_GT(sweep_error(TrigUnit(TrigBackend::cordic(4)), 65537u, 99u), kTrigToleranceLsb);
    EXPECT_LT(sweep_error(TrigUnit(TrigBackend::lut(5)), 65537u, 99u), 2000);
}

TEST(Trig, SymmetryProperties) {
    Gen g(13);
    for (auto b : {TrigBackend::lut(12), TrigBackend::cordic(16)}) {
        TrigUnit t(b);
        for (int i = 0; i < 20000; ++i) {
            const uint32_t th = g.u32();
            const CosSin a = t.eval(th);
            ASSERT_LE(std::abs(a.c), 32767);
            ASSERT_LE(std::abs(a.s), 32767);
            // cos(-x) = cos(x), sin(-x) = -sin(x), within one LSB of each other.
            const CosSin n = t.eval(0u - th);
            ASSERT_LE(std::abs(a.c - n.c), 1);
            ASSERT_LE(std::abs(a.s + n.s), 1);
        }
    }
}

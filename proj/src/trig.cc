#include "qcsoc/trig.h"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace qcsoc {
namespace {

constexpr int kCordicGuardBits = 14;
// 2*pi in Q29; multiplies a phase-word residual into radians in Q32.
constexpr int64_t kTwoPiQ29 = 3373259426;

int16_t clamp_unit(int64_t v) {
    if (v > kQ15One) return kQ15One;
    if (v < -kQ15One) return -kQ15One;
    return static_cast<int16_t>(v);
}

CosSin unfold_quadrant(uint32_t quadrant, int16_t c, int16_t s) {
    switch (quadrant & 3u) {
        case 0: return {c, s};
        case 1: return {static_cast<int16_t>(-s), c};
        case 2: return {static_cast<int16_t>(-c), static_cast<int16_t>(-s)};
        default: return {s, static_cast<int16_t>(-c)};
    }
}

}  // namespace

TrigBackend parse_trig_backend(std::string_view text) {
    auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw std::invalid_argument("trig backend must look like 'lut:<bits>' or 'cordic:<iterations>'");
    }
    std::string_view kind = text.substr(0, colon);
    std::string_view num = text.substr(colon + 1);
    int value = 0;
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), value);
    if (ec != std::errc() || ptr != num.data() + num.size()) {
        throw std::invalid_argument("bad trig backend parameter: " + std::string(text));
    }
    if (kind == "lut") {
        if (value < 4 || value > 20) throw std::invalid_argument("lut table bits must be in [4, 20]");
        return TrigBackend::lut(value);
    }
    if (kind == "cordic") {
        if (value < 4 || value > 30) throw std::invalid_argument("cordic iterations must be in [4, 30]");
        return TrigBackend::cordic(value);
    }
    throw std::invalid_argument("unknown trig backend: " + std::string(kind));
}

std::string format_trig_backend(const TrigBackend& backend) {
    return (backend.kind == TrigKind::kLut ? "lut:" : "cordic:") + std::to_string(backend.param);
}

TrigUnit::TrigUnit(TrigBackend backend) : backend_(backend) {
    if (backend_.kind == TrigKind::kLut) {
        if (backend_.param < 4 || backend_.param > 20) throw std::invalid_argument("lut table bits must be in [4, 20]");
        const size_t n = size_t{1} << backend_.param;
        quarter_table_.resize(n + 1);
        for (size_t i = 0; i <= n; ++i) {
            quarter_table_[i] = static_cast<int32_t>(
                std::lround(kQ15One * std::sin(M_PI / 2.0 * static_cast<double>(i) / static_cast<double>(n))));
        }
    } else {
        if (backend_.param < 4 || backend_.param > 30) throw std::invalid_argument("cordic iterations must be in [4, 30]");
        double gain = 1.0;
        atan_table_.resize(backend_.param);
        for (int i = 0; i < backend_.param; ++i) {
            atan_table_[i] = std::llround(std::atan(std::ldexp(1.0, -i)) / (2.0 * M_PI) * kTurn);
            gain /= std::sqrt(1.0 + std::ldexp(1.0, -2 * i));
        }
        cordic_x0_ = std::llround(gain * kQ15One * std::ldexp(1.0, kCordicGuardBits));
    }
}

CosSin TrigUnit::eval(uint32_t theta) const {
    return backend_.kind == TrigKind::kLut ? eval_lut(theta) : eval_cordic(theta);
}

CosSin TrigUnit::eval_lut(uint32_t theta) const {
    const int frac_bits = 30 - backend_.param;
    const uint32_t frac_mask = (1u << frac_bits) - 1u;
    const uint32_t rem = theta & 0x3FFFFFFFu;

    auto interp = [&](uint32_t pos) -> int16_t {
        const uint32_t idx = pos >> frac_bits;
        const uint32_t frac = pos & frac_mask;
        int64_t v = quarter_table_[idx];
        if (frac != 0) {
            const int64_t delta = quarter_table_[idx + 1] - quarter_table_[idx];
            v += (delta * frac + (int64_t{1} << (frac_bits - 1))) >> frac_bits;
        }
        return clamp_unit(v);
    };

    const int16_t s = interp(rem);
    const int16_t c = interp((1u << 30) - rem);
    return unfold_quadrant(theta >> 30, c, s);
}

CosSin TrigUnit::eval_cordic(uint32_t theta) const {
    // Rotate to the nearest quadrant point so the residual stays within +/-45 degrees.
    const uint32_t quadrant = (theta + (1u << 29)) >> 30;
    int64_t z = static_cast<int32_t>(theta - (quadrant << 30));
    int64_t x = cordic_x0_;
    int64_t y = 0;
    for (int i = 0; i < backend_.param; ++i) {
        const int64_t xs = x >> i;
        const int64_t ys = y >> i;
        if (z >= 0) {
            x -= ys;
            y += xs;
            z -= atan_table_[i];
        } else {
            x += ys;
            y -= xs;
            z += atan_table_[i];
        }
    }
    // First-order correction for the residual angle left after the last iteration.
    const int64_t z_rad_q32 = (z * kTwoPiQ29) >> 29;
    const int64_t xf = x - ((y * z_rad_q32) >> 32);
    const int64_t yf = y + ((x * z_rad_q32) >> 32);
    const int16_t c = clamp_unit(shift_round_half_even(xf, kCordicGuardBits));
    const int16_t s = clamp_unit(shift_round_half_even(yf, kCordicGuardBits));
    return unfold_quadrant(quadrant, c, s);
}

}  // namespace qcsoc

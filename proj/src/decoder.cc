#include "qcsoc/decoder.h"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace qcsoc {
namespace {

int32_t saturate32(int64_t v) {
    return static_cast<int32_t>(std::clamp<int64_t>(v, std::numeric_limits<int32_t>::min(),
                                                    std::numeric_limits<int32_t>::max()));
}

}  // namespace

Decoder::Decoder(DecoderChannelConfig cfg) : cfg_(cfg), trig_(cfg.trig) {
    if (cfg_.samples_per_cycle <= 0) throw std::invalid_argument("adc samples_per_cycle must be positive");
    if (cfg_.readout_buffer) buffer_.assign(cfg_.readout_buffer_capacity, 0);
}

void Decoder::arm(const DecoderSettings& settings, uint32_t t_start, uint64_t now, bool capture) {
    if (settings.window == 0 || settings.window > kMaxWindow) {
        raise(rd_err::kBadWindow);
        return;
    }
    if (armed_ || finalize_pending_) raise(rd_err::kArmReplaced);
    const int32_t ahead = static_cast<int32_t>(t_start - static_cast<uint32_t>(now));
    uint64_t start_cycle = now;
    if (ahead < 0) {
        raise(rd_err::kArmInPast);
    } else {
        start_cycle = now + static_cast<uint64_t>(ahead);
    }
    settings_ = settings;
    start_sample_ = start_cycle * static_cast<uint64_t>(cfg_.samples_per_cycle);
    remaining_ = settings.window;
    acc_i_ = 0;
    acc_q_ = 0;
    result_ = DecoderResult{};
    valid_cycle_.reset();
    armed_ = true;
    finalize_pending_ = false;
    capture_ = false;
    if (capture) {
        if (!cfg_.readout_buffer) {
            raise(rd_err::kCaptureUnavailable);
        } else {
            if (settings.window > buffer_.size()) raise(rd_err::kBadWindow);
            capture_ = true;
            captured_ = 0;
        }
    }
}

void Decoder::reset() {
    std::fill(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(captured_), int16_t{0});
    captured_ = 0;
    capture_ = false;
    settings_ = DecoderSettings{};
    armed_ = false;
    finalize_pending_ = false;
    start_sample_ = 0;
    remaining_ = 0;
    acc_i_ = acc_q_ = 0;
    result_ = DecoderResult{};
    valid_cycle_.reset();
    err_ = 0;
}

void Decoder::finalize(uint64_t cycle) {
    const CosSin axis = trig_.eval(settings_.rotation);
    const int64_t projection = (acc_i_ * axis.c + acc_q_ * axis.s) >> 15;
    result_.valid = true;
    result_.state = projection < settings_.threshold;
    result_.i = acc_i_;
    result_.q = acc_q_;
    result_.projection = projection;
    valid_cycle_ = cycle;
    finalize_pending_ = false;
}

void Decoder::consume(std::span<const int16_t> samples, uint64_t cycle) {
    if (finalize_pending_) finalize(cycle);
    if (!armed_) return;
    const auto spc = static_cast<uint64_t>(cfg_.samples_per_cycle);
    const uint64_t g0 = cycle * spc;
    if (g0 + spc <= start_sample_) return;
    for (uint64_t k = 0; k < spc && remaining_ > 0; ++k) {
        const uint64_t g = g0 + k;
        if (g < start_sample_) continue;
        const int64_t x = samples[k];
        const CosSin cs = trig_.eval(settings_.freq * static_cast<uint32_t>(g) + settings_.phase);
        acc_i_ += (x * cs.c) >> 15;
        acc_q_ += (-x * cs.s) >> 15;
        if (capture_ && captured_ < buffer_.size()) buffer_[captured_++] = static_cast<int16_t>(x);
        --remaining_;
    }
    if (remaining_ == 0) {
        armed_ = false;
        finalize_pending_ = true;
    }
}

uint32_t Decoder::read_result() const {
    if (!result_.valid) return 0;
    return 0x8000'0000u | (result_.state ? 1u : 0u);
}

int32_t Decoder::i_view() const { return saturate32(result_.i); }
int32_t Decoder::q_view() const { return saturate32(result_.q); }

}  // namespace qcsoc

#ifndef QCSOC_DECODER_H
#define QCSOC_DECODER_H

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qcsoc/trig.h"

namespace qcsoc {

struct DecoderChannelConfig {
    int samples_per_cycle = 4;
    TrigBackend trig = TrigBackend::lut(12);
    bool readout_buffer = true;
    uint32_t readout_buffer_capacity = 16384;  // samples

    bool operator==(const DecoderChannelConfig&) const = default;
};

struct DecoderSettings {
    uint32_t freq = 0;      // per ADC sample
    uint32_t phase = 0;
    uint32_t window = 0;    // samples, 1..kMaxWindow
    int64_t threshold = 0;  // state = projection < threshold
    uint32_t rotation = 0;  // discrimination axis angle
};

inline constexpr uint32_t kMaxWindow = 1u << 16;

namespace rd_err {
inline constexpr uint32_t kArmInPast = 1u << 0;
inline constexpr uint32_t kArmReplaced = 1u << 1;
inline constexpr uint32_t kReadOnlyWrite = 1u << 2;
inline constexpr uint32_t kBadWindow = 1u << 3;
inline constexpr uint32_t kCaptureUnavailable = 1u << 4;
}  // namespace rd_err

struct DecoderResult {
    bool valid = false;
    bool state = false;
    int64_t i = 0;
    int64_t q = 0;
    int64_t projection = 0;
};

/// IQ demodulator with boxcar integration and a rotated-axis threshold.
///
/// Accumulation ends in the cycle holding the last window sample; the
/// discrimination stage latches RESULT one cycle later.
class Decoder {
   public:
    explicit Decoder(DecoderChannelConfig cfg);

    const DecoderChannelConfig& config() const { return cfg_; }

    // Starts a window at global ADC sample S*t_start. A start already in the
    // past raises kArmInPast and begins at `now` instead.
    void arm(const DecoderSettings& settings, uint32_t t_start, uint64_t now, bool capture);
    void consume(std::span<const int16_t> samples, uint64_t cycle);
    // Returns to power-on state; the readout buffer reads as zeros afterwards.
    void reset();

    // {valid bit31, state bit0}; 0 while not valid.
    uint32_t read_result() const;
    int32_t i_view() const;
    int32_t q_view() const;
    const DecoderResult& result() const { return result_; }
    int64_t acc_i() const { return acc_i_; }
    int64_t acc_q() const { return acc_q_; }

    bool armed() const { return armed_; }
    bool idle() const { return !armed_ && !finalize_pending_; }
    std::optional<uint64_t> valid_cycle() const { return valid_cycle_; }
    uint64_t window_start_cycle() const { return start_sample_ / static_cast<uint64_t>(cfg_.samples_per_cycle); }

    std::span<const int16_t> readout_buffer() const { return buffer_; }
    size_t captured() const { return captured_; }
    std::vector<int16_t>* mutable_readout_buffer() { return &buffer_; }

    uint32_t error_flags() const { return err_; }
    void raise(uint32_t flags) { err_ |= flags; }
    void clear_error_flags(uint32_t mask) { err_ &= ~mask; }

   private:
    void finalize(uint64_t cycle);

    DecoderChannelConfig cfg_;
    TrigUnit trig_;
    DecoderSettings settings_;
    std::vector<int16_t> buffer_;
    size_t captured_ = 0;
    bool capture_ = false;

    bool armed_ = false;
    bool finalize_pending_ = false;
    uint64_t start_sample_ = 0;
    uint32_t remaining_ = 0;
    int64_t acc_i_ = 0;
    int64_t acc_q_ = 0;
    DecoderResult result_;
    std::optional<uint64_t> valid_cycle_;
    uint32_t err_ = 0;
};

}  // namespace qcsoc

#endif  // QCSOC_DECODER_H

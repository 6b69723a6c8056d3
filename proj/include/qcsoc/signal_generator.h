#ifndef QCSOC_SIGNAL_GENERATOR_H
#define QCSOC_SIGNAL_GENERATOR_H

#include <array>
#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "qcsoc/fixed_point.h"
#include "qcsoc/trig.h"

namespace qcsoc {

enum class Port : uint8_t { kFreq, kPhase, kAmp, kEnvStart, kDuration };
inline constexpr int kNumPorts = 5;
const char* port_name(Port port);

struct GeneratorConfig {
    int samples_per_cycle = 16;
    TrigBackend trig = TrigBackend::lut(12);
    // Base latency per port in cycles; the trig latency is added to every port.
    std::array<uint32_t, kNumPorts> port_latency{6, 6, 4, 4, 4};
    uint32_t fifo_depth = 16;
    uint32_t envelope_capacity = 4096;
    bool multiplex = false;

    bool operator==(const GeneratorConfig&) const = default;
};

// Sticky ERRFLAGS bits of a signal generator.
namespace sg_err {
inline constexpr uint32_t kSchedInPast = 1u << 0;
inline constexpr uint32_t kOrderViolation = 1u << 1;
inline constexpr uint32_t kEnvOverrun = 1u << 2;
inline constexpr uint32_t kMuxDisabled = 1u << 3;
inline constexpr uint32_t kReadOnlyWrite = 1u << 4;
inline constexpr uint32_t kBadBank = 1u << 5;
}  // namespace sg_err

enum class ScheduleStatus : uint8_t { kOk, kFull, kInPast, kOrderViolation, kBadBank };

struct FifoEntry {
    uint32_t t0;
    uint32_t value;
};

/// Parameter queue released at RefTime t0 - latency, so that the entry's
/// effect reaches the output at cycle t0 after the port's pipeline delay.
class TimedFifo {
   public:
    TimedFifo(uint32_t depth, uint32_t latency) : depth_(depth), latency_(latency) {}

    uint32_t latency() const { return latency_; }
    size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    bool full() const { return entries_.size() >= depth_; }
    uint32_t release_time(uint32_t t0) const { return t0 - latency_; }

    // kOk, kFull, kInPast or kOrderViolation; does not modify the queue.
    ScheduleStatus check(uint32_t t0, uint32_t now) const;
    void push(FifoEntry e);
    void clear();
    // Pops the head if its release time is at or before `now`.
    bool pop_due(uint32_t now, FifoEntry& out);

   private:
    std::deque<FifoEntry> entries_;
    uint32_t depth_;
    uint32_t latency_;
    uint32_t last_t0_ = 0;
    bool has_last_ = false;
};

struct PulseParams {
    uint32_t freq = 0;
    uint32_t phase = 0;
    int16_t amp = 0;
    uint16_t env_start = 0;
    uint16_t duration = 0;  // output samples

    uint32_t port_value(Port p) const;
};

/// One DAC channel: timed FIFO banks, per-port pipeline delay, carrier
/// generator and envelope memory.
///
/// Output sample g (global index S*cycle + k) inside the active window
/// [S*t0, S*t0 + duration) is mul(mul(E[g - S*t0 + env_start], amp), cos(f*g + phi)).
class SignalGenerator {
   public:
    explicit SignalGenerator(GeneratorConfig cfg);

    const GeneratorConfig& config() const { return cfg_; }
    int samples_per_cycle() const { return cfg_.samples_per_cycle; }
    uint32_t latency(Port p) const { return cfg_.port_latency[static_cast<int>(p)] + trig_.latency(); }
    uint32_t max_latency() const;
    int banks() const { return cfg_.multiplex ? 2 : 1; }
    const TimedFifo& fifo(int bank, Port p) const { return fifos_[bank][static_cast<int>(p)]; }

    ScheduleStatus schedule_param(int bank, Port port, uint32_t t0, uint32_t value, uint32_t now);
    // All five ports are queued together or not at all.
    ScheduleStatus schedule_pulse(int bank, const PulseParams& params, uint32_t t0, uint32_t now);

    // Selects the bank for releases from the next cycle on. Returns false and
    // raises kMuxDisabled when the channel has no second bank.
    bool set_multiplex(uint32_t bank_bit);
    uint32_t multiplex() const { return mux_pending_; }

    void tick(uint64_t cycle);
    // Returns to power-on state except for envelope memory contents.
    void reset();

    std::span<const int16_t> samples() const { return samples_; }
    // Envelope * amplitude before carrier mixing (rotating-frame drive).
    std::span<const int16_t> baseband() const { return baseband_; }
    bool emitting() const { return emitting_; }
    uint32_t active_freq() const { return freq_; }
    uint32_t active_phase() const { return phase_; }

    uint32_t error_flags() const { return err_; }
    void raise(uint32_t flags) { err_ |= flags; }
    void clear_error_flags(uint32_t mask) { err_ &= ~mask; }

    std::vector<int16_t>& envelope() { return envelope_; }
    const std::vector<int16_t>& envelope() const { return envelope_; }
    const TrigUnit& trig() const { return trig_; }

   private:
    struct InFlight {
        uint64_t effective_cycle;
        uint32_t t0;
        uint32_t value;
    };

    void apply(Port p, const InFlight& e, uint64_t cycle);

    GeneratorConfig cfg_;
    TrigUnit trig_;
    std::vector<std::array<TimedFifo, kNumPorts>> fifos_;
    std::array<std::deque<InFlight>, kNumPorts> in_flight_;
    std::vector<int16_t> envelope_;
    std::vector<int16_t> samples_;
    std::vector<int16_t> baseband_;

    uint32_t mux_active_ = 0;
    uint32_t mux_pending_ = 0;
    uint32_t err_ = 0;
    uint32_t queued_ = 0;  // entries in FIFOs plus entries in flight

    uint32_t freq_ = 0;
    uint32_t phase_ = 0;
    int16_t amp_ = 0;
    uint32_t env_start_ = 0;
    uint64_t window_start_ = 0;  // global sample index
    uint32_t window_len_ = 0;
    bool emitting_ = false;
    bool output_dirty_ = false;
};

}  // namespace qcsoc

#endif  // QCSOC_SIGNAL_GENERATOR_H

#ifndef QCSOC_SOC_H
#define QCSOC_SOC_H

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "qcsoc/bus.h"
#include "qcsoc/cpu.h"
#include "qcsoc/decoder.h"
#include "qcsoc/plant.h"
#include "qcsoc/signal_generator.h"

namespace qcsoc {

/// Hardware parameters of one controller instance.
struct SystemConfig {
    double clock_hz = 500e6;
    int dac_channels = 16;
    int adc_channels = 8;
    int dac_samples_per_cycle = 16;
    int adc_samples_per_cycle = 4;
    int qubits_per_cpu = 1;
    PipelineModel pipeline;
    bool rv32m = true;
    std::vector<GeneratorConfig> generators;  // one per DAC channel
    std::vector<DecoderChannelConfig> decoders;  // one per ADC channel
    bool plant_enabled = true;
    PlantConfig plant;

    // Defaults with per-channel blocks filled in.
    static SystemConfig defaults();
    // Resizes the per-channel blocks to the channel counts, copying the
    // samples-per-cycle fields into every channel.
    void normalize();
    // Throws std::invalid_argument naming the offending field.
    void validate() const;

    double dac_rate_hz() const { return clock_hz * dac_samples_per_cycle; }
    double adc_rate_hz() const { return clock_hz * adc_samples_per_cycle; }
};

enum class EventKind : uint8_t {
    kInstruction,    // a = pc, b = op
    kStall,          // a = pc
    kPulseScheduled, // channel, a = t0, b = bank
    kPulseDropped,   // channel, a = t0, b = ScheduleStatus
    kArm,            // channel, a = t_start, b = window
    kResultValid,    // channel, a = RESULT register
    kMuxWrite,       // channel, a = bank bit
    kCollapse,       // a = state
    kHalt,           // a = HaltReason, b = exit code
};

const char* event_kind_name(EventKind kind);

struct Event {
    uint64_t cycle = 0;
    EventKind kind = EventKind::kInstruction;
    int32_t channel = -1;
    uint32_t a = 0;
    uint32_t b = 0;

    bool operator==(const Event&) const = default;
};

std::string format_event(const Event& e);

struct WaveSample {
    uint64_t cycle;
    int32_t channel;
    int32_t index;  // sample index within the cycle
    int16_t value;
};

struct HaltReport {
    HaltReason reason = HaltReason::kNone;
    uint64_t cycles = 0;
    int32_t exit_code = 0;
    uint32_t pc = 0;
    uint32_t fault_addr = 0;
};

/// CPU, bus, signal generators, decoders and plant stepped in lockstep.
///
/// An instruction issued at cycle t performs its bus and pulse side effects
/// before the peripherals tick for cycle t, so a load at t observes the state
/// left by tick t-1. Peripherals tick in the order generators, plant absorb,
/// plant emit, decoders.
class Soc : public PulseSink {
   public:
    explicit Soc(SystemConfig cfg);
    ~Soc() override;
    Soc(const Soc&) = delete;
    Soc& operator=(const Soc&) = delete;

    const SystemConfig& config() const { return cfg_; }

    // Host-side memory access; bypasses read-only protection. Throws
    // std::out_of_range for unmapped or MMIO addresses.
    void host_write(uint32_t addr, std::span<const uint8_t> bytes);
    std::vector<uint8_t> host_read(uint32_t addr, size_t len);
    void load_program(std::span<const uint8_t> image, uint32_t origin = kProgBase);
    void load_program(std::span<const uint32_t> words, uint32_t origin = kProgBase);
    void set_envelope(int channel, std::span<const int16_t> samples, uint32_t start = 0);

    // Records the current data RAM contents as the state restored by reset().
    void snapshot_memory();
    // Power-on state for a new shot: CPU, peripherals, plant seeded with
    // `plant_seed`, data RAM restored to the snapshot. Program RAM and
    // envelope memories are kept.
    void reset(uint64_t plant_seed);

    StepReport step();
    // Steps until halt or until the cycle counter reaches max_cycles.
    HaltReport run(uint64_t max_cycles);
    HaltReport report() const;

    uint64_t cycle() const { return cpu_.state().cycle; }
    uint32_t ref_time() const { return static_cast<uint32_t>(cpu_.state().cycle); }

    Cpu& cpu() { return cpu_; }
    const Cpu& cpu() const { return cpu_; }
    Bus& bus() { return bus_; }
    SignalGenerator& generator(int ch) { return *generators_.at(ch); }
    const SignalGenerator& generator(int ch) const { return *generators_.at(ch); }
    Decoder& decoder(int ch) { return *decoders_.at(ch); }
    const Decoder& decoder(int ch) const { return *decoders_.at(ch); }
    QubitPlant* plant() { return plant_.get(); }
    const QubitPlant* plant() const { return plant_.get(); }
    std::span<const int16_t> adc_samples(int ch) const;

    void set_event_logging(bool on) { log_events_ = on; }
    const std::vector<Event>& events() const { return events_; }
    void set_trace_channels(std::vector<int> channels);
    const std::vector<WaveSample>& waveform() const { return waveform_; }

    PulseStatus issue_pulse(const PulseInstruction& pulse, uint32_t t0) override;

   private:
    class DataRam;
    class SpanDevice;
    class SgRegisters;
    class RdRegisters;
    class SysRegisters;
    friend class SgRegisters;
    friend class RdRegisters;
    friend class SysRegisters;

    void tick(uint64_t cycle);
    void log(EventKind kind, int32_t channel, uint32_t a, uint32_t b = 0);
    BusStatus schedule(int channel, int bank, const PulseParams& params, uint32_t t0);

    SystemConfig cfg_;
    Cpu cpu_;
    Bus bus_;
    std::shared_ptr<DataRam> prog_;
    std::shared_ptr<DataRam> data_;
    std::vector<std::unique_ptr<SignalGenerator>> generators_;
    std::vector<std::unique_ptr<Decoder>> decoders_;
    std::vector<std::shared_ptr<SgRegisters>> sg_regs_;
    std::vector<std::shared_ptr<RdRegisters>> rd_regs_;
    std::unique_ptr<QubitPlant> plant_;
    std::vector<std::vector<int16_t>> adc_;
    std::vector<uint8_t> data_snapshot_;
    std::vector<uint8_t> prog_snapshot_;

    bool log_events_ = false;
    std::vector<Event> events_;
    std::vector<int> trace_channels_;
    std::vector<WaveSample> waveform_;
};

}  // namespace qcsoc

#endif  // QCSOC_SOC_H

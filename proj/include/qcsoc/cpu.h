#ifndef QCSOC_CPU_H
#define QCSOC_CPU_H

#include <array>
#include <cstdint>

#include "qcsoc/address_map.h"
#include "qcsoc/bus.h"
#include "qcsoc/isa.h"

namespace qcsoc {

enum class HaltReason : uint8_t {
    kNone,
    kProgramExit,
    kBreakpoint,
    kBusFault,
    kMisaligned,
    kIllegalInstruction,
    kTimeout,
};

// "program-exit", "bus-fault", "misaligned", "illegal-instruction", "timeout", ...
const char* halt_reason_name(HaltReason reason);

struct CpuState {
    uint32_t pc = kProgBase;
    std::array<uint32_t, 32> regs{};
    uint64_t cycle = 0;
    uint32_t treg = 0;  // start time for the next pulse/trigger, in RefTime cycles
    HaltReason halt = HaltReason::kNone;
    int32_t exit_code = 0;
    uint32_t fault_addr = 0;
    uint32_t fault_word = 0;

    bool halted() const { return halt != HaltReason::kNone; }
};

/// Per-instruction cycle costs. Every instruction costs 1 plus the penalty
/// that applies to its class and outcome.
struct PipelineModel {
    uint32_t branch_taken_penalty = 3;
    uint32_t mmio_load_latency = 2;
    uint32_t ram_load_latency = 1;

    // `taken` applies to branches; jumps always pay the taken penalty.
    uint32_t cost(OpClass cls, bool taken, RegionKind load_region) const {
        switch (cls) {
            case OpClass::kBranch: return 1 + (taken ? branch_taken_penalty : 0);
            case OpClass::kJump: return 1 + branch_taken_penalty;
            case OpClass::kLoad: return 1 + (load_region == RegionKind::kMmio ? mmio_load_latency : ram_load_latency);
            default: return 1;
        }
    }

    bool operator==(const PipelineModel&) const = default;
};

enum class PulseStatus : uint8_t { kAccepted, kBusy, kRejected };

// Receives pulse instructions; implemented by the SoC, which owns the generators.
class PulseSink {
   public:
    virtual ~PulseSink() = default;
    virtual PulseStatus issue_pulse(const PulseInstruction& pulse, uint32_t t0) = 0;
};

struct StepReport {
    uint32_t cycles = 0;
    uint32_t pc = 0;  // pc of the attempted instruction
    bool retired = false;
    bool stalled = false;
    Op op = Op::kAddi;
    bool taken = false;
};

/// RV32I(+M) interpreter with the custom pulse and settime instructions.
class Cpu {
   public:
    explicit Cpu(PipelineModel model = {}, bool rv32m = true) : model_(model), rv32m_(rv32m) {}

    CpuState& state() { return state_; }
    const CpuState& state() const { return state_; }
    const PipelineModel& model() const { return model_; }

    /// One issue attempt. On back-pressure the instruction does not retire,
    /// costs one cycle and is retried on the next call. The cycle counter
    /// advances by the returned cycle count.
    StepReport step(Bus& bus, PulseSink* sink);

   private:
    void halt(HaltReason reason, uint32_t addr = 0);
    void write_reg(uint8_t rd, uint32_t v) {
        if (rd != 0) state_.regs[rd] = v;
    }

    CpuState state_;
    PipelineModel model_;
    bool rv32m_;
};

}  // namespace qcsoc

#endif  // QCSOC_CPU_H

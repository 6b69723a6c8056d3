#ifndef QCSOC_PROGRAMS_H
#define QCSOC_PROGRAMS_H

#include <cstdint>
#include <string>
#include <vector>

#include "qcsoc/assembler.h"
#include "qcsoc/soc.h"

namespace qcsoc {

// Timing and channel constants shared by the built-in guest programs,
// derived from a system configuration.
struct ProgramContext {
    int drive_channel = 7;
    int readout_channel = 15;
    int adc_channel = 7;
    uint32_t qubit_freq = 0;
    uint32_t readout_carrier = 0;  // DAC frequency word of the readout tone
    uint32_t dec_freq = 0;
    uint32_t dec_phase = 0;        // cancels the plant delay
    uint32_t rotation = 0x4000'0000;
    int32_t threshold = 0;
    uint32_t window = 64;          // ADC samples
    uint32_t arm_delay = 2;        // cycles, ceil(delay / S_adc)
    uint32_t window_cycles = 16;
    uint32_t readout_duration = 0; // DAC samples
    int16_t pi_amp = kDefaultPiAmp;
    uint16_t pi_duration = kDefaultPiDuration;
    uint32_t pi_cycles = 4;
    uint32_t drive_latency = 8;    // max port latency of the drive channel
    uint32_t readout_latency = 8;

    static ProgramContext from(const SystemConfig& cfg, uint32_t window = 64);
};

struct EnvelopeLoad {
    int channel = 0;
    uint32_t start = 0;
    std::vector<int16_t> samples;
};

/// A guest program plus the configuration it needs.
///
/// Mailbox layout is documented per builder. `section_begin` and labels
/// starting with `section_end_prefix` delimit the conditional section used
/// by latency accounting.
struct ExperimentScript {
    std::string name;
    std::string source;
    std::vector<int> multiplex_channels;
    bool needs_rv32m = false;
    std::vector<EnvelopeLoad> envelopes;
    uint64_t cycle_budget = 0;
    std::string section_begin;
    std::string section_end_prefix;
};

// Enables what the script needs (multiplexing, RV32M) on top of `cfg`.
void apply_requirements(const ExperimentScript& script, SystemConfig& cfg);
// Empty when `cfg` satisfies the script.
std::vector<std::string> unmet_requirements(const ExperimentScript& script, const SystemConfig& cfg);
AsmOptions asm_options(const SystemConfig& cfg);

struct InstalledProgram {
    AssemblyUnit unit;
    uint32_t section_begin = 0;
    std::vector<uint32_t> section_ends;
};

// Assembles the script, loads program and envelopes into `soc`, snapshots memory.
InstalledProgram install(const ExperimentScript& script, Soc& soc);
InstalledProgram assemble_script(const ExperimentScript& script, const SystemConfig& cfg);

// Mailbox: +0x0 pointer to the result array, +0x4 result count (1); result 0
// is the RESULT register. Exit code = measured state.
ExperimentScript build_readout(const SystemConfig& cfg, uint32_t window = 64);

enum class FastResetVariant { kBranch, kBranchless };

// Measure, conditionally play X, measure again. Branchless preloads X into
// FIFO bank 1 and idle into bank 0, then copies RESULT into MULTIPLEX.
// Mailbox: +0x0 pointer, +0x4 count (2); results are the two RESULT words.
// Exit code = state of the second measurement.
ExperimentScript build_fast_reset(FastResetVariant variant, const SystemConfig& cfg, uint32_t window = 64);

struct CalibrationParams {
    int32_t initial_amp = kDefaultPiAmp;
    uint32_t shots_per_iter = 100;  // split evenly into check and estimate blocks
    uint32_t max_iters = 50;
    uint32_t check_pulses = 15;     // odd
    uint32_t window = 32;
};

// Repetition counts of the estimation block by iteration, and the matching
// Q16 gains round(65536 / ((k + 1/2) * pi)).
inline constexpr int kCalibrationSchedule[4] = {1, 3, 7, 15};
int32_t calibration_gain(int k);

/// Closed-loop pi-amplitude calibration.
///
/// Each iteration runs a check block (shots of `check_pulses` pi pulses) and
/// stops when every shot flips the state, provided every k of the schedule has
/// already been used once. Otherwise an estimation block plays
/// a half-amplitude pulse then k pi pulses per shot; with f flips out of N,
///   a -= ((a * (N - 2f)) / N * gain_k) >> 16
/// clamped to [1, 32767]. Flips are counted against the previous outcome.
/// Mailbox: +0x0 final amplitude, +0x4 updates applied; log at +0x100 with
/// 16-byte records {a, check flips, k, estimate flips}. Exit 0 on
/// convergence, 2 after max_iters.
ExperimentScript build_amplitude_calibration(const SystemConfig& cfg, const CalibrationParams& params);

/// Plays one pulse per shot at each amplitude and counts state flips.
/// Mailbox: +0x0 pointer, +0x4 point count, +0x8 shots per point; results
/// are flip counts per amplitude.
ExperimentScript build_rabi_scan(const SystemConfig& cfg, const std::vector<int32_t>& amps, uint32_t shots_per_point,
                                 uint32_t window = 32);

inline constexpr uint32_t kMailboxResults = kDataBase + 0x100;

}  // namespace qcsoc

#endif  // QCSOC_PROGRAMS_H

#ifndef QCSOC_EXPERIMENT_H
#define QCSOC_EXPERIMENT_H

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qcsoc/config.h"
#include "qcsoc/programs.h"
#include "qcsoc/soc.h"

namespace qcsoc {

/// A resolved program: image, labels, envelopes and cycle budget.
struct LoadedProgram {
    std::string name;
    ExperimentScript script;   // source empty for prebuilt binaries
    InstalledProgram installed;
    std::vector<EnvelopeLoad> envelopes;  // script envelopes, then config uploads
};

// Names accepted after "builtin:".
std::vector<std::string> builtin_program_names();

// Builds a built-in program or reads a file: ".bin" files are flat
// little-endian images, anything else is assembly source. Enables whatever
// the built-in needs in rc.system. Throws ConfigError for an unknown
// built-in, AssemblyError for bad source, std::runtime_error for a missing file.
LoadedProgram load_program(RunConfig& rc);
// Assembles or wraps an already-built script against `cfg`.
LoadedProgram load_script(const ExperimentScript& script, const SystemConfig& cfg);

struct ShotRecord {
    uint64_t shot = 0;
    int state = 0;     // RESULT state bit of the measurement channel's last window
    int64_t i = 0;
    int64_t q = 0;
    uint64_t cycles = 0;
    int32_t exit_code = 0;
    HaltReason halt = HaltReason::kNone;
    uint32_t pc = 0;
};

struct RunOptions {
    uint64_t shots = 1;
    uint64_t seed = 0;
    uint64_t max_cycles = 0;  // 0: the program's cycle budget
    unsigned threads = 1;
    std::vector<int> trace_channels;  // traced on shot 0
    bool log_events = false;          // every shot; RunResult keeps shot 0's
    bool capture_readout = false;     // keep shot 0's readout buffers
};

struct RunResult {
    std::vector<ShotRecord> records;
    std::vector<WaveSample> waveform;
    std::vector<Event> events;
    std::vector<std::vector<int16_t>> readout_buffers;  // per ADC channel
};

// Runs before each shot, after reset.
using ShotPrepare = std::function<void(uint64_t shot, Soc& soc)>;
// Runs after each shot; may fill extra fields into the record. Called from
// worker threads when threads > 1.
using ShotObserve = std::function<void(uint64_t shot, const Soc& soc, ShotRecord& rec)>;

// Plant seed of a shot.
uint64_t shot_seed(uint64_t seed, uint64_t shot);

/// Runs `options.shots` shots. Shot k resets the SoC with shot_seed(seed, k),
/// so the records do not depend on the thread count.
RunResult run_shots(const SystemConfig& cfg, const LoadedProgram& program, const RunOptions& options,
                    const ShotPrepare& prepare = {}, const ShotObserve& observe = {});

std::string format_shots_csv(const std::vector<ShotRecord>& records);
std::string format_waveform_csv(const std::vector<WaveSample>& samples);

struct Manifest {
    std::string config_sha1;
    std::string program_name;
    std::string program_sha1;  // git blob hash of the program image
    uint64_t seed = 0;
    uint64_t shots = 0;
    SystemConfig system;
    std::map<std::string, uint64_t> halts;  // halt reason -> shot count
};

Manifest make_manifest(const RunConfig& rc, const LoadedProgram& program, const RunResult& result);
// `key=value` lines; no timestamps or host details, so reruns are byte-identical.
std::string format_manifest(const Manifest& m);

/// Round-trip feedback latency of one shot, from the readout pulse release to
/// the conditional pulse reaching the output.
struct LatencyReport {
    uint32_t pulse_latency = 0;        // readout channel Λ
    uint32_t plant_delay = 0;          // cycles from readout t0 to window start
    uint32_t window = 0;               // integration cycles
    uint32_t finalize = 1;             // discrimination stage
    uint32_t cpu_reaction = 0;         // RESULT visible -> end of the conditional section
    uint32_t conditional_latency = 0;  // drive channel Λ
    uint64_t measured_loop = 0;        // RESULT visible - readout release, from the trace
    double clock_hz = 500e6;

    uint64_t loop_components() const { return uint64_t{pulse_latency} + plant_delay + window + finalize; }
    uint64_t total() const { return loop_components() + cpu_reaction + conditional_latency; }
    double ns(uint64_t cycles) const { return cycles * 1e9 / clock_hz; }
};

// Cycles from the first issue of the section-begin instruction to the first
// issue of a section end, from the event log of `soc`. Empty without both.
std::optional<uint64_t> section_cycles(const Soc& soc, const InstalledProgram& program);

// Runs one shot with event logging and decomposes its latency. Throws
// std::runtime_error if the trace has no readout pulse, arm or result.
LatencyReport measure_latency(const SystemConfig& cfg, const LoadedProgram& program, uint64_t seed,
                              uint64_t max_cycles = 0);
std::string format_latency(const LatencyReport& r);

}  // namespace qcsoc

#endif  // QCSOC_EXPERIMENT_H

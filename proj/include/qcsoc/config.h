#ifndef QCSOC_CONFIG_H
#define QCSOC_CONFIG_H

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qcsoc/soc.h"

namespace qcsoc {

// Malformed experiment file. The message names the offending key.
class ConfigError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

// One envelope upload: either a raw little-endian int16 file or a generated
// shape ("rect", "gauss" or "zero").
struct EnvelopeSpec {
    int channel = 0;
    uint32_t start = 0;
    std::string file;  // resolved against the experiment file's directory
    std::string shape;
    uint32_t length = 0;
    int32_t value = 32767;  // rect level or gauss peak
};

// Builder arguments for the built-in programs.
struct ProgramArgs {
    uint32_t window = 0;  // 0 picks the builder's default
    int32_t initial_amp = kDefaultPiAmp;
    uint32_t shots_per_iter = 100;
    uint32_t max_iters = 50;
    uint32_t check_pulses = 15;
    std::vector<int32_t> amps;
    uint32_t shots_per_point = 200;
};

/// Everything an experiment file describes.
struct RunConfig {
    SystemConfig system = SystemConfig::defaults();
    uint64_t shots = 1;
    uint64_t seed = 0;
    uint64_t max_cycles = 0;  // 0: the program's cycle budget
    unsigned threads = 1;
    std::string program;  // file path or "builtin:<name>"
    ProgramArgs program_args;
    std::vector<EnvelopeSpec> envelopes;
    std::vector<int> trace_channels;
    bool dump_readout_buffers = false;
    std::filesystem::path base_dir;  // directory relative paths resolve against

    // Sorted-key compact JSON of the parsed file; the manifest hashes this.
    std::string canonical = "{}";
};

// Parses and validates. Unknown keys, wrong types and out-of-range values
// raise ConfigError. Integers may be written as decimal or "0x" strings.
RunConfig parse_run_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

// Raw little-endian int16 samples.
std::vector<int16_t> read_samples_file(const std::filesystem::path& path);
void write_samples_file(const std::filesystem::path& path, std::span<const int16_t> samples);

std::vector<int16_t> make_envelope(const EnvelopeSpec& spec, const std::filesystem::path& base_dir);

}  // namespace qcsoc

#endif  // QCSOC_CONFIG_H

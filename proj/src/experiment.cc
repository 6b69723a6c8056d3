#include "qcsoc/experiment.h"

#include <algorithm>
#include <limits>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "qcsoc/hash.h"
#include "qcsoc/rng.h"

namespace qcsoc {

namespace fs = std::filesystem;

namespace {

constexpr uint64_t kDefaultMaxCycles = 10'000'000;

int measurement_channel(const SystemConfig& cfg) { return cfg.plant_enabled ? cfg.plant.adc_channel : 0; }

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error(fmt::format("cannot open program {}", p.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExperimentScript builtin_script(const std::string& name, const ProgramArgs& a, const SystemConfig& cfg) {
    const auto window = [&](uint32_t dflt) { return a.window ? a.window : dflt; };
    if (name == "readout") return build_readout(cfg, window(64));
    if (name == "fast-reset-branch") return build_fast_reset(FastResetVariant::kBranch, cfg, window(64));
    if (name == "fast-reset-branchless") return build_fast_reset(FastResetVariant::kBranchless, cfg, window(64));
    if (name == "calibration") {
        CalibrationParams p;
        p.initial_amp = a.initial_amp;
        p.shots_per_iter = a.shots_per_iter;
        p.max_iters = a.max_iters;
        p.check_pulses = a.check_pulses;
        p.window = window(32);
        return build_amplitude_calibration(cfg, p);
    }
    if (name == "rabi-scan") {
        std::vector<int32_t> amps = a.amps;
        if (amps.empty()) {
            for (int i = 0; i <= 20; ++i) amps.push_back(i * 32767 / 20);
        }
        return build_rabi_scan(cfg, amps, a.shots_per_point, window(32));
    }
    throw ConfigError(fmt::format("program: unknown built-in '{}'", name));
}

}  // namespace

std::vector<std::string> builtin_program_names() {
    return {"readout", "fast-reset-branch", "fast-reset-branchless", "calibration", "rabi-scan"};
}

LoadedProgram load_script(const ExperimentScript& script, const SystemConfig& cfg) {
    LoadedProgram lp;
    lp.name = script.name;
    lp.script = script;
    lp.installed = assemble_script(script, cfg);
    lp.envelopes = script.envelopes;
    return lp;
}

LoadedProgram load_program(RunConfig& rc) {
    static constexpr std::string_view kBuiltin = "builtin:";
    if (rc.program.empty()) throw ConfigError("program: missing");
    LoadedProgram lp;
    if (rc.program.rfind(kBuiltin, 0) == 0) {
        ExperimentScript script;
        try {
            script = builtin_script(rc.program.substr(kBuiltin.size()), rc.program_args, rc.system);
        } catch (const ConfigError&) {
            throw;
        } catch (const std::invalid_argument& e) {
            throw ConfigError(fmt::format("program_args: {}", e.what()));
        }
        apply_requirements(script, rc.system);
        lp = load_script(script, rc.system);
        lp.name = rc.program;
    } else {
        fs::path path(rc.program);
        if (path.is_relative() && !rc.base_dir.empty() && !fs::exists(path)) path = rc.base_dir / path;
        const std::string text = read_text(path);
        lp.name = path.filename().string();
        if (path.extension() == ".bin") {
            if (text.size() % 4 != 0) throw ConfigError(fmt::format("program: {} is not a whole number of words", path.string()));
            lp.installed.unit.origin = kProgBase;
            lp.installed.unit.image.assign(text.begin(), text.end());
        } else {
            lp.script.name = lp.name;
            lp.script.source = text;
            lp.installed = assemble_script(lp.script, rc.system);
        }
    }
    for (const auto& e : rc.envelopes) lp.envelopes.push_back({e.channel, e.start, make_envelope(e, rc.base_dir)});
    return lp;
}

uint64_t shot_seed(uint64_t seed, uint64_t shot) { return derive_seed(seed, shot); }

RunResult run_shots(const SystemConfig& cfg, const LoadedProgram& program, const RunOptions& options,
                    const ShotPrepare& prepare, const ShotObserve& observe) {
    RunResult result;
    result.records.resize(options.shots);
    const uint64_t max_cycles = options.max_cycles      ? options.max_cycles
                                : program.script.cycle_budget ? program.script.cycle_budget
                                                              : kDefaultMaxCycles;
    const int meas = measurement_channel(cfg);
    const unsigned threads =
        static_cast<unsigned>(std::max<uint64_t>(1, std::min<uint64_t>(options.threads, options.shots)));

    auto worker = [&](unsigned w) {
        Soc soc(cfg);
        for (const auto& e : program.envelopes) soc.set_envelope(e.channel, e.samples, e.start);
        soc.load_program(std::span<const uint8_t>(program.installed.unit.image), program.installed.unit.origin);
        soc.set_event_logging(options.log_events);
        for (uint64_t shot = w; shot < options.shots; shot += threads) {
            const bool first = shot == 0;
            soc.set_trace_channels(first ? options.trace_channels : std::vector<int>{});
            soc.reset(shot_seed(options.seed, shot));
            if (prepare) prepare(shot, soc);
            const HaltReport h = soc.run(max_cycles);
            ShotRecord& r = result.records[shot];
            r.shot = shot;
            const DecoderResult& d = soc.decoder(meas).result();
            r.state = d.valid && d.state ? 1 : 0;
            r.i = d.i;
            r.q = d.q;
            r.cycles = h.cycles;
            r.exit_code = h.exit_code;
            r.halt = h.reason;
            r.pc = h.pc;
            if (observe) observe(shot, soc, r);
            if (first) {
                result.waveform = soc.waveform();
                result.events = soc.events();
                if (options.capture_readout) {
                    for (int ch = 0; ch < cfg.adc_channels; ++ch) {
                        const auto buf = soc.decoder(ch).readout_buffer();
                        const size_t n = soc.decoder(ch).captured();
                        result.readout_buffers.emplace_back(buf.begin(), buf.begin() + static_cast<ptrdiff_t>(n));
                    }
                }
            }
        }
    };

    if (threads == 1) {
        worker(0);
        return result;
    }
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            try {
                worker(w);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return result;
}

std::string format_shots_csv(const std::vector<ShotRecord>& records) {
    std::string out = "shot,measured_state,I,Q,cycles\n";
    for (const auto& r : records) out += fmt::format("{},{},{},{},{}\n", r.shot, r.state, r.i, r.q, r.cycles);
    return out;
}

std::string format_waveform_csv(const std::vector<WaveSample>& samples) {
    std::string out = "cycle,channel,sample_index_in_cycle,value\n";
    for (const auto& s : samples) out += fmt::format("{},{},{},{}\n", s.cycle, s.channel, s.index, s.value);
    return out;
}

Manifest make_manifest(const RunConfig& rc, const LoadedProgram& program, const RunResult& result) {
    Manifest m;
    m.config_sha1 = sha1_hex(rc.canonical);
    m.program_name = program.name;
    const auto& img = program.installed.unit.image;
    m.program_sha1 = git_blob_sha1(std::string_view(reinterpret_cast<const char*>(img.data()), img.size()));
    m.seed = rc.seed;
    m.shots = result.records.size();
    m.system = rc.system;
    for (const auto& r : result.records) ++m.halts[halt_reason_name(r.halt)];
    return m;
}

std::string format_manifest(const Manifest& m) {
    const SystemConfig& s = m.system;
    std::string out;
    auto kv = [&](std::string_view k, const std::string& v) { out += fmt::format("{}={}\n", k, v); };
    kv("config_sha1", m.config_sha1);
    kv("program", m.program_name);
    kv("program_sha1", m.program_sha1);
    kv("seed", std::to_string(m.seed));
    kv("shots", std::to_string(m.shots));
    kv("system_clock", fmt::format("{:.1f} MHz", s.clock_hz / 1e6));
    kv("dac_channels", std::to_string(s.dac_channels));
    kv("adc_channels", std::to_string(s.adc_channels));
    kv("samples_per_cycle_dac", std::to_string(s.dac_samples_per_cycle));
    kv("samples_per_cycle_adc", std::to_string(s.adc_samples_per_cycle));
    kv("dac_rate", fmt::format("{:.1f} GHz", s.dac_rate_hz() / 1e9));
    kv("adc_rate", fmt::format("{:.1f} GHz", s.adc_rate_hz() / 1e9));
    kv("reftime_bits", std::to_string(std::numeric_limits<decltype(std::declval<const Soc&>().ref_time())>::digits));
    kv("rv32m", s.rv32m ? "on" : "off");
    for (const auto& [reason, n] : m.halts) kv(fmt::format("halt.{}", reason), std::to_string(n));
    return out;
}

std::optional<uint64_t> section_cycles(const Soc& soc, const InstalledProgram& program) {
    if (program.section_ends.empty()) return std::nullopt;
    std::optional<uint64_t> begin;
    for (const Event& e : soc.events()) {
        if (e.kind != EventKind::kInstruction) continue;
        if (!begin && e.a == program.section_begin) {
            begin = e.cycle;
        } else if (begin && std::find(program.section_ends.begin(), program.section_ends.end(), e.a) !=
                                program.section_ends.end()) {
            return e.cycle - *begin;
        }
    }
    return std::nullopt;
}

LatencyReport measure_latency(const SystemConfig& cfg, const LoadedProgram& program, uint64_t seed,
                              uint64_t max_cycles) {
    RunOptions opt;
    opt.shots = 1;
    opt.seed = seed;
    opt.max_cycles = max_cycles;
    opt.log_events = true;
    const RunResult run = run_shots(cfg, program, opt);
    if (!cfg.plant_enabled) throw std::runtime_error("latency needs the plant to close the loop");
    const int readout = cfg.plant.readout_channel;
    const int adc = cfg.plant.adc_channel;

    std::optional<Event> pulse, arm, valid;
    for (const Event& e : run.events) {
        if (e.kind == EventKind::kPulseScheduled && e.channel == readout && !arm) pulse = e;
        if (e.kind == EventKind::kArm && e.channel == adc && pulse && !valid) arm = e;
        if (e.kind == EventKind::kResultValid && e.channel == adc && arm && !valid) valid = e;
    }
    if (!pulse || !arm || !valid) throw std::runtime_error("trace has no readout pulse, arm and result");

    LatencyReport r;
    r.clock_hz = cfg.clock_hz;
    const SignalGenerator gen(cfg.generators.at(readout));
    r.pulse_latency = gen.max_latency();
    r.plant_delay = arm->a - pulse->a;
    const auto s_adc = static_cast<uint32_t>(cfg.adc_samples_per_cycle);
    r.window = (arm->b + s_adc - 1) / s_adc;
    r.finalize = 1;
    r.measured_loop = (valid->cycle + 1) - (uint64_t{pulse->a} - r.pulse_latency);
    const auto& ends = program.installed.section_ends;
    if (!ends.empty()) {
        for (const Event& e : run.events) {
            if (e.kind == EventKind::kInstruction && e.cycle > valid->cycle &&
                std::find(ends.begin(), ends.end(), e.a) != ends.end()) {
                r.cpu_reaction = static_cast<uint32_t>(e.cycle - (valid->cycle + 1));
                break;
            }
        }
        r.conditional_latency = SignalGenerator(cfg.generators.at(cfg.plant.drive_channel)).max_latency();
    }
    return r;
}

std::string format_latency(const LatencyReport& r) {
    std::string out;
    auto row = [&](std::string_view name, uint64_t c) {
        out += fmt::format("{:<22}{:>8} cycles {:>10.1f} ns\n", name, c, r.ns(c));
    };
    row("pulse_latency", r.pulse_latency);
    row("plant_delay", r.plant_delay);
    row("window", r.window);
    row("decode_finalize", r.finalize);
    row("loop_sum", r.loop_components());
    row("loop_measured", r.measured_loop);
    row("cpu_reaction", r.cpu_reaction);
    row("conditional_latency", r.conditional_latency);
    row("total", r.total());
    return out;
}

}  // namespace qcsoc

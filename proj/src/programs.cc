#include "qcsoc/programs.h"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace qcsoc {

namespace {

uint32_t ceil_div(uint32_t a, uint32_t b) { return (a + b - 1) / b; }

// Source builder with one instruction or label per call.
class Src {
   public:
    template <typename... Args>
    Src& operator()(fmt::format_string<Args...> f, Args&&... args) {
        text_ += "    ";
        text_ += fmt::format(f, std::forward<Args>(args)...);
        text_ += '\n';
        return *this;
    }
    Src& label(std::string_view name) {
        text_ += name;
        text_ += ":\n";
        return *this;
    }
    Src& comment(std::string_view c) {
        text_ += "    # ";
        text_ += c;
        text_ += '\n';
        return *this;
    }
    const std::string& str() const { return text_; }

   private:
    std::string text_;
};

void equates(Src& s, const ProgramContext& c) {
    s(".equ DRIVE, {}", c.drive_channel);
    s(".equ READOUT, {}", c.readout_channel);
    s(".equ ADC, {}", c.adc_channel);
    s(".equ QUBIT_FREQ, 0x{:08x}", c.qubit_freq);
    s(".equ READ_CARRIER, 0x{:08x}", c.readout_carrier);
    s(".equ READ_DUR, {}", c.readout_duration);
    s(".equ DEC_FREQ, 0x{:08x}", c.dec_freq);
    s(".equ DEC_PHASE, 0x{:08x}", c.dec_phase);
    s(".equ WINDOW, {}", c.window);
    s(".equ THRESHOLD, {}", c.threshold);
    s(".equ ROTATION, 0x{:08x}", c.rotation);
    s(".equ ARM_DELAY, {}", c.arm_delay);
    s(".equ PI_AMP, 0x{:04x}", static_cast<uint16_t>(c.pi_amp));
    s(".equ PI_DUR, {}", c.pi_duration);
    s(".equ RESULTS, 0x{:08x}", kMailboxResults);
}

// s0 = RESULT, s1 = valid-and-state-0 pattern, s2 = CAPTURE_CTRL, s3 = MULTIPLEX.
void decoder_setup(Src& s) {
    s("li s0, RD_RES_ADDR(ADC)");
    s("li s1, 0x80000000");
    s("li s2, RD_CAPTURE_CTRL_ADDR(ADC)");
    s("li s3, MULTIPLEX_REG_ADDR(ADC)");
    const char* regs[][2] = {{"RD_DEC_FREQ_ADDR", "DEC_FREQ"},
                             {"RD_DEC_PHASE_ADDR", "DEC_PHASE"},
                             {"RD_WINDOW_ADDR", "WINDOW"},
                             {"RD_THRESHOLD_ADDR", "THRESHOLD"},
                             {"RD_ROTATION_ADDR", "ROTATION"}};
    for (const auto& r : regs) {
        s("li t0, {}(ADC)", r[0]);
        s("li t1, {}", r[1]);
        s("sw t1, 0(t0)");
    }
}

// Readout pulse at t0 = `t0_expr`, decoder armed ARM_DELAY cycles later,
// then poll until RESULT is valid. Leaves RESULT in t2.
void measure(Src& s, const std::string& t0_expr, const std::string& tag) {
    s("li t0, {}", t0_expr);
    s("settime t0");
    s("pulse READOUT, READ_CARRIER, 0, 0x7fff, 0, READ_DUR, 0");
    s("addi t0, t0, ARM_DELAY");
    s("settime t0");
    s("li t1, {}", kCaptureArm);
    s("sw t1, 0(s2)");
    s.label("poll_" + tag);
    s("lw t2, 0(s0)");
    s("bge t2, zero, poll_{}", tag);
}

std::vector<int16_t> rect(uint32_t n) { return std::vector<int16_t>(n, 0x7FFF); }

void add_envelopes(ExperimentScript& sc, const ProgramContext& c) {
    sc.envelopes.push_back({c.drive_channel, 0, rect(c.pi_duration)});
    sc.envelopes.push_back({c.readout_channel, 0, rect(c.readout_duration)});
}

// Drive and readout channels plus the shared flip-counting block used by the
// calibration and Rabi programs. s4 = SG AMP, s5 = SG T0, s6 = REFTIME,
// s7 = amplitude of pulses after the first, s9 = previous state.
void drive_setup(Src& s) {
    s("li s4, SG_AMP_ADDR(DRIVE)");
    s("li s5, SG_T0_ADDR(DRIVE)");
    s("li s6, SYS_REFTIME_ADDR");
    s("li t0, SG_FREQ_ADDR(DRIVE)");
    s("li t1, QUBIT_FREQ");
    s("sw t1, 0(t0)");
    s("li t0, SG_DURATION_ADDR(DRIVE)");
    s("li t1, PI_DUR");
    s("sw t1, 0(t0)");
    s("li s9, 0");
}

// block(a2 = first amplitude, a3 = pulses per shot, a6 = shots) -> a0 = flips.
void flip_block(Src& s, const ProgramContext& c) {
    const uint32_t lead = std::max(c.drive_latency, c.readout_latency) + 10;
    const uint32_t spacing = std::max<uint32_t>(8, c.pi_cycles + 1);
    s.label("block");
    s("li a0, 0");
    s("mv a4, a6");
    s.label("block_shot");
    s("lw t3, 0(s6)");
    s("addi t3, t3, {}", lead);
    s("sw a2, 0(s4)");
    s("sw t3, 0(s5)");
    s("sw s7, 0(s4)");
    s("addi a5, a3, -1");
    s("beqz a5, block_read");
    s.label("block_pulse");
    s("addi t3, t3, {}", spacing);
    s("sw t3, 0(s5)");
    s("addi a5, a5, -1");
    s("bnez a5, block_pulse");
    s.label("block_read");
    s("addi t3, t3, {}", c.pi_cycles + 2);
    s("settime t3");
    s("pulse READOUT, READ_CARRIER, 0, 0x7fff, 0, READ_DUR, 0");
    s("addi t3, t3, ARM_DELAY");
    s("settime t3");
    s("li t1, {}", kCaptureArm);
    s("sw t1, 0(s2)");
    s.label("block_poll");
    s("lw t2, 0(s0)");
    s("bge t2, zero, block_poll");
    s("andi t2, t2, 1");
    s("xor t6, t2, s9");
    s("add a0, a0, t6");
    s("mv s9, t2");
    s("addi a4, a4, -1");
    s("bnez a4, block_shot");
    s("ret");
}

uint64_t block_shot_cycles(const ProgramContext& c, uint32_t pulses) {
    const uint32_t lead = std::max(c.drive_latency, c.readout_latency) + 10;
    const uint32_t spacing = std::max<uint32_t>(8, c.pi_cycles + 1);
    return lead + uint64_t{spacing} * pulses + c.pi_cycles + c.arm_delay + c.window_cycles + 40;
}

}  // namespace

ProgramContext ProgramContext::from(const SystemConfig& cfg, uint32_t window) {
    if (!cfg.plant_enabled) throw std::invalid_argument("built-in programs need the plant");
    if (window == 0 || window > kMaxWindow) throw std::invalid_argument("window must be in [1, 65536]");
    ProgramContext c;
    const PlantConfig& p = cfg.plant;
    const auto s_adc = static_cast<uint32_t>(cfg.adc_samples_per_cycle);
    const auto s_dac = static_cast<uint32_t>(cfg.dac_samples_per_cycle);
    const uint32_t decim = s_dac / s_adc;
    c.drive_channel = p.drive_channel;
    c.readout_channel = p.readout_channel;
    c.adc_channel = p.adc_channel;
    c.qubit_freq = p.qubit_freq;
    c.readout_carrier = p.readout_freq / decim;
    c.dec_freq = p.readout_freq;
    c.dec_phase = 0u - p.readout_freq * p.delay;
    c.window = window;
    c.arm_delay = ceil_div(p.delay, s_adc);
    c.window_cycles = ceil_div(window, s_adc);
    const uint64_t dur = uint64_t{window + s_adc} * decim;
    if (dur > 0xFFFF) throw std::invalid_argument("readout window too long for a 16-bit pulse duration");
    c.readout_duration = static_cast<uint32_t>(dur);
    c.pi_cycles = ceil_div(c.pi_duration, s_dac);
    SignalGenerator drive(cfg.generators.at(p.drive_channel));
    SignalGenerator readout(cfg.generators.at(p.readout_channel));
    c.drive_latency = drive.max_latency();
    c.readout_latency = readout.max_latency();
    if (c.readout_duration > cfg.generators[p.readout_channel].envelope_capacity) {
        throw std::invalid_argument("readout pulse longer than the readout channel's envelope memory");
    }
    return c;
}

void apply_requirements(const ExperimentScript& script, SystemConfig& cfg) {
    for (int ch : script.multiplex_channels) cfg.generators.at(ch).multiplex = true;
    if (script.needs_rv32m) cfg.rv32m = true;
}

std::vector<std::string> unmet_requirements(const ExperimentScript& script, const SystemConfig& cfg) {
    std::vector<std::string> out;
    for (int ch : script.multiplex_channels) {
        if (ch >= cfg.dac_channels || !cfg.generators[ch].multiplex) {
            out.push_back(fmt::format("{} needs multiplexing on DAC channel {}", script.name, ch));
        }
    }
    if (script.needs_rv32m && !cfg.rv32m) out.push_back(fmt::format("{} needs RV32M", script.name));
    return out;
}

AsmOptions asm_options(const SystemConfig& cfg) {
    AsmOptions o;
    o.dac_channels = cfg.dac_channels;
    o.adc_channels = cfg.adc_channels;
    o.rv32m = cfg.rv32m;
    return o;
}

InstalledProgram assemble_script(const ExperimentScript& script, const SystemConfig& cfg) {
    InstalledProgram out;
    out.unit = assemble(script.source, kProgBase, asm_options(cfg));
    if (!script.section_begin.empty()) {
        out.section_begin = out.unit.labels.at(script.section_begin);
        for (const auto& [name, addr] : out.unit.labels) {
            if (name.rfind(script.section_end_prefix, 0) == 0) out.section_ends.push_back(addr);
        }
    }
    return out;
}

InstalledProgram install(const ExperimentScript& script, Soc& soc) {
    const auto unmet = unmet_requirements(script, soc.config());
    if (!unmet.empty()) throw std::invalid_argument(unmet.front());
    InstalledProgram prog = assemble_script(script, soc.config());
    for (const auto& e : script.envelopes) soc.set_envelope(e.channel, e.samples, e.start);
    soc.load_program(std::span<const uint8_t>(prog.unit.image));
    return prog;
}

ExperimentScript build_readout(const SystemConfig& cfg, uint32_t window) {
    const ProgramContext c = ProgramContext::from(cfg, window);
    const uint32_t t_read = 64 + c.readout_latency;
    Src s;
    s.comment("single readout; exit code = measured state");
    equates(s, c);
    s.label("start");
    decoder_setup(s);
    measure(s, std::to_string(t_read), "read");
    s("li t0, RESULTS");
    s("sw t2, 0(t0)");
    s("li t1, DATA_BASE");
    s("sw t0, 0(t1)");
    s("li t0, 1");
    s("sw t0, 4(t1)");
    s("andi a0, t2, 1");
    s("ecall");
    ExperimentScript sc;
    sc.name = "readout";
    sc.source = s.str();
    add_envelopes(sc, c);
    sc.cycle_budget = t_read + c.arm_delay + c.window_cycles + 200;
    return sc;
}

ExperimentScript build_fast_reset(FastResetVariant variant, const SystemConfig& cfg, uint32_t window) {
    const ProgramContext c = ProgramContext::from(cfg, window);
    const bool branchless = variant == FastResetVariant::kBranchless;
    const uint32_t t_read = 64 + c.readout_latency;
    const uint32_t t_x = t_read + c.arm_delay + c.window_cycles + c.drive_latency + 24;
    const uint32_t t_read2 = t_x + c.pi_cycles + c.readout_latency + 12;
    Src s;
    s.comment(branchless ? "fast reset, branchless: X in bank 1, idle in bank 0, MULTIPLEX <- RESULT"
                         : "fast reset, branch: skip X when the first result is state 0");
    equates(s, c);
    s(".equ T_X, {}", t_x);
    s.label("start");
    decoder_setup(s);
    measure(s, std::to_string(t_read), "first");
    s("li t0, T_X");
    s("settime t0");
    if (branchless) {
        s("pulse DRIVE, QUBIT_FREQ, 0, PI_AMP, 0, PI_DUR, 1");
        s("pulse DRIVE, QUBIT_FREQ, 0, 0, 0, PI_DUR, 0");
    } else {
        s("nop");
        s("nop");
    }
    s.label("poll_ready");
    s("lw t2, 0(s0)");
    s("bge t2, zero, poll_ready");
    s.label("cond_begin");
    s("lw t2, 0(s0)");
    if (branchless) {
        s("sw t2, 0(s3)");
        s.label("cond_end");
    } else {
        s("beq t2, s1, cond_end_skip");
        s.label("cond_end_x");
        s("pulse DRIVE, QUBIT_FREQ, 0, PI_AMP, 0, PI_DUR, 0");
        s.label("cond_end_skip");
    }
    s("li t3, RESULTS");
    s("sw t2, 0(t3)");
    measure(s, std::to_string(t_read2), "second");
    s("li t3, RESULTS");
    s("sw t2, 4(t3)");
    s("li t1, DATA_BASE");
    s("sw t3, 0(t1)");
    s("li t0, 2");
    s("sw t0, 4(t1)");
    s("andi a0, t2, 1");
    s("ecall");
    ExperimentScript sc;
    sc.name = branchless ? "fast-reset-branchless" : "fast-reset-branch";
    sc.source = s.str();
    if (branchless) sc.multiplex_channels.push_back(c.drive_channel);
    add_envelopes(sc, c);
    sc.cycle_budget = t_read2 + c.arm_delay + c.window_cycles + 200;
    sc.section_begin = "cond_begin";
    sc.section_end_prefix = "cond_end";
    return sc;
}

int32_t calibration_gain(int k) { return static_cast<int32_t>(std::lround(65536.0 / ((k + 0.5) * M_PI))); }

ExperimentScript build_amplitude_calibration(const SystemConfig& cfg, const CalibrationParams& params) {
    if (params.shots_per_iter < 2 || params.shots_per_iter % 2 != 0) {
        throw std::invalid_argument("shots_per_iter must be even and at least 2");
    }
    if (params.check_pulses % 2 == 0) throw std::invalid_argument("check_pulses must be odd");
    if (params.check_pulses + 1 > 16 || params.max_iters == 0) {
        throw std::invalid_argument("check_pulses must be at most 15 and max_iters positive");
    }
    if (params.initial_amp < 1 || params.initial_amp > 32767) throw std::invalid_argument("initial_amp out of range");
    const ProgramContext c = ProgramContext::from(cfg, params.window);
    const uint32_t half = params.shots_per_iter / 2;
    Src s;
    s.comment("pi-amplitude calibration by repeated-pulse error amplification");
    equates(s, c);
    s(".equ HALF, {}", half);
    s(".equ MAX_ITERS, {}", params.max_iters);
    s(".equ CHECK_PULSES, {}", params.check_pulses);
    s(".equ MIN_UPDATES, {}", std::size(kCalibrationSchedule));
    s(".equ LOG, 0x{:08x}", kMailboxResults);
    s.label("start");
    decoder_setup(s);
    drive_setup(s);
    s("li s7, {}", params.initial_amp);
    s("li s8, 0");
    s("li s10, LOG");
    s("li a6, HALF");
    s.label("cal_iter");
    s("mv a2, s7");
    s("li a3, CHECK_PULSES");
    s("call block");
    s("sw s7, 0(s10)");
    s("sw a0, 4(s10)");
    s("li t0, HALF");
    s("blt a0, t0, cal_estimate");
    s.comment("a passing check ends the loop only once every k has been used");
    s("li t0, MIN_UPDATES");
    s("bge s8, t0, cal_done");
    s.label("cal_estimate");
    s("call cal_index");
    s("la t1, cal_ks");
    s("add t1, t1, t0");
    s("lw s11, 0(t1)");
    s("srai a2, s7, 1");
    s("addi a3, s11, 1");
    s("call block");
    s("sw s11, 8(s10)");
    s("sw a0, 12(s10)");
    s("call cal_index");
    s("la t1, cal_gains");
    s("add t1, t1, t0");
    s("lw t1, 0(t1)");
    s("slli t2, a0, 1");
    s("sub t2, a6, t2");
    s("mul t2, s7, t2");
    s("div t2, t2, a6");
    s("mul t2, t2, t1");
    s("srai t2, t2, 16");
    s("sub s7, s7, t2");
    s("li t3, 1");
    s("bge s7, t3, cal_lo_ok");
    s("mv s7, t3");
    s.label("cal_lo_ok");
    s("li t3, 32767");
    s("ble s7, t3, cal_hi_ok");
    s("mv s7, t3");
    s.label("cal_hi_ok");
    s("addi s10, s10, 16");
    s("addi s8, s8, 1");
    s("li t0, MAX_ITERS");
    s("blt s8, t0, cal_iter");
    s("li a0, 2");
    s("j cal_exit");
    s.label("cal_done");
    s("li a0, 0");
    s.label("cal_exit");
    s("li t0, DATA_BASE");
    s("sw s7, 0(t0)");
    s("sw s8, 4(t0)");
    s("ecall");
    s.comment("t0 = 4 * min(iteration, 3)");
    s.label("cal_index");
    s("mv t0, s8");
    s("li t1, 3");
    s("ble t0, t1, cal_index_ok");
    s("mv t0, t1");
    s.label("cal_index_ok");
    s("slli t0, t0, 2");
    s("ret");
    flip_block(s, c);
    s.label("cal_ks");
    s(".word {}, {}, {}, {}", kCalibrationSchedule[0], kCalibrationSchedule[1], kCalibrationSchedule[2],
      kCalibrationSchedule[3]);
    s.label("cal_gains");
    s(".word {}, {}, {}, {}", calibration_gain(kCalibrationSchedule[0]), calibration_gain(kCalibrationSchedule[1]),
      calibration_gain(kCalibrationSchedule[2]), calibration_gain(kCalibrationSchedule[3]));

    ExperimentScript sc;
    sc.name = "amplitude-calibration";
    sc.source = s.str();
    sc.needs_rv32m = true;
    add_envelopes(sc, c);
    const uint64_t per_iter = half * (block_shot_cycles(c, params.check_pulses) + block_shot_cycles(c, 16));
    sc.cycle_budget = 1000 + params.max_iters * (per_iter + 200);
    return sc;
}

ExperimentScript build_rabi_scan(const SystemConfig& cfg, const std::vector<int32_t>& amps, uint32_t shots_per_point,
                                 uint32_t window) {
    if (amps.empty()) throw std::invalid_argument("rabi scan needs at least one amplitude");
    if (shots_per_point == 0) throw std::invalid_argument("shots_per_point must be positive");
    for (int32_t a : amps) {
        if (a < -32768 || a > 32767) throw std::invalid_argument("rabi amplitude out of Q1.15 range");
    }
    const ProgramContext c = ProgramContext::from(cfg, window);
    Src s;
    s.comment("Rabi amplitude scan; result i = flips at amplitude i");
    equates(s, c);
    s(".equ POINTS, {}", amps.size());
    s(".equ SHOTS, {}", shots_per_point);
    s.label("start");
    decoder_setup(s);
    drive_setup(s);
    s("li a6, SHOTS");
    s("li s10, RESULTS");
    s("la s8, rabi_amps");
    s("li s11, POINTS");
    s.label("rabi_point");
    s("lw s7, 0(s8)");
    s("mv a2, s7");
    s("li a3, 1");
    s("call block");
    s("sw a0, 0(s10)");
    s("addi s10, s10, 4");
    s("addi s8, s8, 4");
    s("addi s11, s11, -1");
    s("bnez s11, rabi_point");
    s("li t0, DATA_BASE");
    s("li t1, RESULTS");
    s("sw t1, 0(t0)");
    s("li t1, POINTS");
    s("sw t1, 4(t0)");
    s("li t1, SHOTS");
    s("sw t1, 8(t0)");
    s("li a0, 0");
    s("ecall");
    flip_block(s, c);
    s.label("rabi_amps");
    for (int32_t a : amps) s(".word {}", a);

    ExperimentScript sc;
    sc.name = "rabi-scan";
    sc.source = s.str();
    add_envelopes(sc, c);
    sc.cycle_budget = 1000 + amps.size() * uint64_t{shots_per_point} * (block_shot_cycles(c, 1) + 20);
    return sc;
}

}  // namespace qcsoc

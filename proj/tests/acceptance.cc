// Acceptance run: one PASS/FAIL line per criterion. Tolerances and budgets
// are pinned below; the process exits non-zero if any criterion fails.
//
// usage: acceptance [out-dir]

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "qcsoc/config.h"
#include "qcsoc/experiment.h"
#include "qcsoc/hash.h"
#include "qcsoc/isa.h"
#include "qcsoc/programs.h"
#include "qcsoc/signal_generator.h"
#include "qcsoc/trig.h"
#include "random_program.h"
#include "test_util.h"

namespace fs = std::filesystem;
using namespace qcsoc;
using qcsoc::qtest::Gen;

namespace {

// Worst-case trig error against round(32767 * cos/sin), measured once per
// default backend and locked.
constexpr int kTrigToleranceLsb = 1;
// Width of the binomial interval for the noisy-readout check.
constexpr double kBinomialSigmas = 3.0;

struct Outcome {
    bool pass = false;
    std::string detail;
    // Everything the experiment produced, compared across reruns.
    std::string artifact;
};

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome(unsigned threads)> run;
};

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

// Runs body(i) for i in [0, n) on `threads` workers.
void parallel_for(size_t n, unsigned threads, const std::function<void(size_t)>& body) {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < std::max(1u, threads); ++t) {
        pool.emplace_back([&] {
            for (size_t i = next++; i < n; i = next++) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

// ---------------------------------------------------------------- 1

Outcome configuration_fidelity(unsigned threads) {
    RunConfig rc = parse_run_config({{"program", "builtin:readout"}});
    const LoadedProgram lp = load_program(rc);
    RunOptions o;
    o.shots = 4;
    o.seed = rc.seed;
    o.threads = threads;
    const RunResult r = run_shots(rc.system, lp, o);
    const std::string m = format_manifest(make_manifest(rc, lp, r));
    Outcome out{true, "", m};
    for (const char* line : {"system_clock=500.0 MHz\n", "dac_channels=16\n", "adc_channels=8\n",
                             "samples_per_cycle_dac=16\n", "samples_per_cycle_adc=4\n", "dac_rate=8.0 GHz\n",
                             "adc_rate=2.0 GHz\n", "reftime_bits=32\n"}) {
        if (m.find(line) == std::string::npos) {
            out.pass = false;
            out.detail += fmt::format("missing '{}' ", std::string_view(line).substr(0, std::string_view(line).size() - 1));
        }
    }
    if (out.pass) out.detail = "manifest lists 500 MHz, 16/8 channels, 16/4 samples per cycle, 32-bit RefTime";
    return out;
}

// ---------------------------------------------------------------- 2

// Register-level model of one channel: each port holds the latest value whose
// t0 has been reached, the window starts at S*t0 of the latest duration write,
// and the carrier phase is f*g + phi on the global sample index g.
class HopReference {
   public:
    HopReference(int spc, std::vector<int16_t> env, TrigBackend trig) : spc_(spc), env_(std::move(env)), trig_(trig) {}

    void write(Port p, uint32_t t0, uint32_t value) { ports_[static_cast<int>(p)][t0] = value; }

    int16_t sample(uint64_t g) const {
        const auto c = static_cast<uint32_t>(g / spc_);
        const auto& dur = ports_[static_cast<int>(Port::kDuration)];
        auto it = dur.upper_bound(c);
        if (it == dur.begin()) return 0;
        --it;
        const uint64_t start = uint64_t{it->first} * spc_;
        const uint32_t len = it->second & 0xFFFFu;
        if (len == 0 || g < start || g >= start + len) return 0;
        const uint64_t idx = g - start + (value(Port::kEnvStart, c) & 0xFFFFu);
        const int16_t e = idx < env_.size() ? env_[idx] : int16_t{0};
        const int16_t bb = mul_q15(e, static_cast<int16_t>(value(Port::kAmp, c) & 0xFFFFu));
        if (bb == 0) return 0;
        const uint32_t theta = value(Port::kFreq, c) * static_cast<uint32_t>(g) + value(Port::kPhase, c);
        return mul_q15(bb, trig_.eval(theta).c);
    }

   private:
    uint32_t value(Port p, uint32_t c) const {
        const auto& m = ports_[static_cast<int>(p)];
        auto it = m.upper_bound(c);
        return it == m.begin() ? 0u : std::prev(it)->second;
    }

    int spc_;
    std::vector<int16_t> env_;
    std::array<std::map<uint32_t, uint32_t>, kNumPorts> ports_;
    TrigUnit trig_;
};

struct Write {
    uint32_t t0;
    bool pulse;  // all five ports, else a single port
    Port port;
    uint32_t value;
    PulseParams params;
};

Outcome phase_coherence(unsigned) {
    Gen g(2002);
    const int schedules = 100;
    uint64_t samples = 0, hops = 0;
    std::string digest;
    for (int trial = 0; trial < schedules; ++trial) {
        GeneratorConfig cfg;
        cfg.samples_per_cycle = static_cast<int>(g.pick(std::vector<int>{1, 4, 16}));
        cfg.trig = g.coin() ? TrigBackend::lut(12) : TrigBackend::cordic(16);
        for (auto& l : cfg.port_latency) l = static_cast<uint32_t>(g.range(0, 12));
        cfg.envelope_capacity = 512;
        SignalGenerator sg(cfg);
        for (auto& v : sg.envelope()) v = static_cast<int16_t>(g.range(-32767, 32767));
        HopReference ref(cfg.samples_per_cycle, sg.envelope(), cfg.trig);

        std::vector<Write> plan;
        uint32_t t = sg.max_latency() + 1;
        for (int k = 0; k < 40; ++k) {
            Write w{t, false, Port::kFreq, g.u32(), {}};
            if (k % 8 == 0) {
                w.pulse = true;
                w.params = PulseParams{g.u32(), g.u32(), static_cast<int16_t>(g.range(-32767, 32767)),
                                       static_cast<uint16_t>(g.range(0, 300)),
                                       static_cast<uint16_t>(g.range(16, 40) * cfg.samples_per_cycle)};
            } else {
                // Frequency or phase hop inside the running window.
                w.port = g.coin(0.7) ? Port::kFreq : Port::kPhase;
                ++hops;
            }
            plan.push_back(w);
            t += static_cast<uint32_t>(g.range(1, 6));
        }
        for (const Write& w : plan) {
            if (!w.pulse) {
                ref.write(w.port, w.t0, w.value);
                continue;
            }
            for (int p = 0; p < kNumPorts; ++p) ref.write(static_cast<Port>(p), w.t0, w.params.port_value(static_cast<Port>(p)));
        }

        const uint64_t end = t + 60;
        size_t next = 0;
        for (uint64_t c = 0; c < end; ++c) {
            const auto now = static_cast<uint32_t>(c);
            while (next < plan.size() && plan[next].t0 <= c + sg.max_latency() + 20) {
                const Write& w = plan[next];
                const ScheduleStatus st = w.pulse ? sg.schedule_pulse(0, w.params, w.t0, now)
                                                  : sg.schedule_param(0, w.port, w.t0, w.value, now);
                if (st == ScheduleStatus::kFull) break;
                if (st != ScheduleStatus::kOk) return {false, fmt::format("schedule {} rejected an entry", trial), {}};
                ++next;
            }
            sg.tick(c);
            for (int k = 0; k < cfg.samples_per_cycle; ++k) {
                const uint64_t gi = c * cfg.samples_per_cycle + k;
                const int16_t want = ref.sample(gi);
                if (sg.samples()[k] != want) {
                    return {false, fmt::format("schedule {} sample {}: {} vs reference {}", trial, gi, sg.samples()[k], want), {}};
                }
                digest += fmt::format("{}\n", want);
                ++samples;
            }
        }
        if (next != plan.size()) return {false, fmt::format("schedule {} left entries unqueued", trial), {}};
    }
    return {true, fmt::format("{} schedules, {} hops, {} samples bit-identical", schedules, hops, samples), sha1_hex(digest)};
}

// ---------------------------------------------------------------- 3

Outcome fifo_alignment(unsigned) {
    Gen g(3003);
    const int draws = 200;
    int pulses = 0;
    std::string artifact;
    for (int trial = 0; trial < draws; ++trial) {
        GeneratorConfig cfg;
        cfg.trig = g.coin() ? TrigBackend::lut(12) : TrigBackend::cordic(16);
        for (auto& l : cfg.port_latency) l = static_cast<uint32_t>(g.range(0, 12));
        SignalGenerator sg(cfg);
        std::fill(sg.envelope().begin(), sg.envelope().end(), int16_t{0x7FFF});
        const int spc = cfg.samples_per_cycle;

        std::vector<uint32_t> t0s;
        uint32_t t = sg.max_latency() + static_cast<uint32_t>(g.range(0, 10));
        for (int k = 0; k < 6; ++k) {
            t0s.push_back(t);
            t += static_cast<uint32_t>(g.range(4, 20));  // pulses last 2 cycles
        }
        std::vector<uint64_t> edges;
        size_t next = 0;
        int16_t prev = 0;
        for (uint64_t c = 0; c < t + 10; ++c) {
            while (next < t0s.size() && sg.schedule_pulse(0, PulseParams{0, 0, 0x7FFF, 0, static_cast<uint16_t>(2 * spc)},
                                                          t0s[next], static_cast<uint32_t>(c)) == ScheduleStatus::kOk) {
                ++next;
            }
            sg.tick(c);
            for (int k = 0; k < spc; ++k) {
                const int16_t v = sg.samples()[k];
                if (v != 0 && prev == 0) edges.push_back(c * spc + k);
                prev = v;
            }
        }
        artifact += fmt::format("{} {} {} {} {}:", cfg.port_latency[0], cfg.port_latency[1], cfg.port_latency[2],
                                cfg.port_latency[3], cfg.port_latency[4]);
        for (auto e : edges) artifact += fmt::format(" {}", e);
        artifact += '\n';
        if (next != t0s.size() || edges.size() != t0s.size()) {
            return {false, fmt::format("draw {}: {} of {} pulses seen", trial, edges.size(), t0s.size()), artifact};
        }
        for (size_t k = 0; k < t0s.size(); ++k) {
            if (edges[k] != uint64_t{t0s[k]} * spc) {
                return {false, fmt::format("draw {}: first sample {} != S*t0 = {}", trial, edges[k], uint64_t{t0s[k]} * spc), artifact};
            }
        }
        pulses += static_cast<int>(t0s.size());
    }
    return {true, fmt::format("{} latency draws, {} pulses start at S*t0", draws, pulses), artifact};
}

// ---------------------------------------------------------------- 4

Outcome trig_equivalence(unsigned) {
    auto oracle = [](double v) { return static_cast<int>(std::lround(std::clamp(32767.0 * v, -32767.0, 32767.0))); };
    Outcome out{true, "", ""};
    for (const TrigBackend b : {TrigBackend::lut(12), TrigBackend::cordic(16)}) {
        const TrigUnit t(b);
        int worst = 0;
        for (uint32_t k = 0; k < 65536; ++k) {
            const uint32_t theta = k << 16;
            const double a = 2.0 * M_PI * theta / kTurn;
            const CosSin cs = t.eval(theta);
            worst = std::max({worst, std::abs(cs.c - oracle(std::cos(a))), std::abs(cs.s - oracle(std::sin(a)))});
        }
        out.pass &= worst <= kTrigToleranceLsb;
        out.detail += fmt::format("{} worst {} LSB; ", format_trig_backend(b), worst);
        out.artifact += fmt::format("{} {}\n", format_trig_backend(b), worst);
    }
    out.detail += fmt::format("tolerance {} LSB", kTrigToleranceLsb);
    return out;
}

// ---------------------------------------------------------------- 5

Outcome noiseless_readout(unsigned threads) {
    RunConfig rc;
    rc.program = "builtin:readout";
    rc.system.plant.noise_sigma = 0.0;
    const LoadedProgram lp = load_program(rc);
    RunOptions o;
    o.shots = 1000;
    o.seed = 5005;
    o.threads = threads;
    const RunResult r = run_shots(rc.system, lp, o, [](uint64_t shot, Soc& soc) { soc.plant()->set_theta(shot % 2 ? M_PI : 0.0); });
    int correct = 0;
    for (const auto& rec : r.records) correct += rec.halt == HaltReason::kProgramExit && rec.state == static_cast<int>(rec.shot % 2);
    return {correct == 1000, fmt::format("{}/1000 alternating shots classified correctly", correct), format_shots_csv(r.records)};
}

// ---------------------------------------------------------------- 6

// Normal-tail model of one integrated readout. The state point sits at
// radius r*T/2 and angle phi_s (plant phase after delay compensation), the
// discriminator projects onto the axis at `rotation`, and per-sample noise of
// standard deviation sigma mixed with a unit carrier integrates to
// sigma*sqrt(T/2) on that axis.
double misclassification_oracle(const PlantConfig& pc, uint32_t window, uint32_t rotation) {
    const double axis = phase_word_to_radians(rotation);
    const double radius = pc.reflect_amp * window / 2.0;
    const double spread = pc.noise_sigma * std::sqrt(window / 2.0);
    auto tail = [](double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); };
    const double m0 = radius * std::cos(phase_word_to_radians(pc.phase0) - axis);  // classified 0 when >= 0
    const double m1 = radius * std::cos(phase_word_to_radians(pc.phase1) - axis);
    return 0.5 * (tail(m0 / spread) + tail(-m1 / spread));
}

Outcome noisy_readout(unsigned threads) {
    const uint64_t shots = 100000;
    const uint32_t window = 256;
    Outcome out{true, "", ""};
    for (double sigma : {2000.0, 4000.0, 6000.0}) {
        RunConfig rc;
        rc.program = "builtin:readout";
        rc.program_args.window = window;
        rc.system.plant.reflect_amp = 500;
        rc.system.plant.noise_sigma = sigma;
        const LoadedProgram lp = load_program(rc);
        RunOptions o;
        o.shots = shots;
        o.seed = 6006;
        o.threads = threads;
        const RunResult r =
            run_shots(rc.system, lp, o, [](uint64_t shot, Soc& soc) { soc.plant()->set_theta(shot % 2 ? M_PI : 0.0); });
        uint64_t wrong = 0;
        for (const auto& rec : r.records) wrong += rec.state != static_cast<int>(rec.shot % 2);
        const double p = misclassification_oracle(rc.system.plant, window, 0x4000'0000u);
        const double half_width = kBinomialSigmas * std::sqrt(p * (1 - p) / shots);
        const double rate = static_cast<double>(wrong) / shots;
        const bool ok = std::abs(rate - p) <= half_width;
        out.pass &= ok;
        out.detail += fmt::format("sigma={:.0f}: {:.5f} vs {:.5f}+-{:.5f}; ", sigma, rate, p, half_width);
        out.artifact += format_shots_csv(r.records);
    }
    out.detail.resize(out.detail.size() - 2);
    return out;
}

// ---------------------------------------------------------------- 7

Outcome conditional_codesign(unsigned threads) {
    const uint64_t shots = 10000;
    Outcome out{true, "", ""};
    std::map<FastResetVariant, std::vector<std::pair<int, uint64_t>>> seen;  // first outcome, section cycles
    SystemConfig base = SystemConfig::defaults();
    const uint32_t penalty = base.pipeline.branch_taken_penalty;
    const uint64_t cost_lw = base.pipeline.cost(OpClass::kLoad, false, RegionKind::kMmio);
    const uint64_t cost_sw = base.pipeline.cost(OpClass::kStore, false, RegionKind::kRam);
    const uint64_t cost_branch = base.pipeline.cost(OpClass::kBranch, false, RegionKind::kRam);
    for (auto v : {FastResetVariant::kBranchless, FastResetVariant::kBranch}) {
        SystemConfig cfg = base;
        cfg.plant.initial_theta = M_PI / 2;  // P(1) = 0.5
        const ExperimentScript sc = build_fast_reset(v, cfg);
        apply_requirements(sc, cfg);
        const LoadedProgram lp = load_script(sc, cfg);
        RunOptions o;
        o.shots = shots;
        o.seed = 7007;
        o.threads = threads;
        o.log_events = true;
        std::vector<std::pair<int, uint64_t>> rows(shots, {-1, 0});
        run_shots(cfg, lp, o, {}, [&](uint64_t shot, const Soc& soc, ShotRecord&) {
            int first = -1;
            for (const auto& e : soc.events()) {
                if (e.kind == EventKind::kCollapse) {
                    first = static_cast<int>(e.a);
                    break;
                }
            }
            rows[shot] = {first, section_cycles(soc, lp.installed).value_or(0)};
        });
        seen[v] = rows;
        for (const auto& [state, cyc] : rows) out.artifact += fmt::format("{} {}\n", state, cyc);
    }

    // Branchless: lw + sw every shot.
    const uint64_t bl = cost_lw + cost_sw;
    for (const auto& [state, cyc] : seen[FastResetVariant::kBranchless]) {
        if (cyc != bl) return {false, fmt::format("branchless section took {} cycles, expected {}", cyc, bl), out.artifact};
    }
    // Branch: taken (no X, state 0) pays the penalty; not taken equals lw + branch.
    uint64_t taken = 0, sum = 0;
    for (const auto& [state, cyc] : seen[FastResetVariant::kBranch]) {
        if (state < 0) return {false, "shot without a collapse", out.artifact};
        const bool t = state == 0;
        const uint64_t want = cost_lw + cost_branch + (t ? penalty : 0);
        if (cyc != want) return {false, fmt::format("branch section took {} cycles, expected {}", cyc, want), out.artifact};
        if (t && cyc - bl != penalty) return {false, "taken path does not exceed branchless by the penalty", out.artifact};
        taken += t;
        sum += cyc;
    }
    // Mean difference equals penalty * (taken fraction) exactly; the fraction
    // itself is the sampled outcome of P(1) = 0.5.
    const bool mean_exact = (sum - shots * bl) * shots == uint64_t{penalty} * taken * shots;
    const double frac = static_cast<double>(taken) / shots;
    const bool frac_ok = std::abs(frac - 0.5) <= kBinomialSigmas * std::sqrt(0.25 / shots);
    out.pass = mean_exact && frac_ok;
    out.detail = fmt::format("branchless {} cycles every shot; branch {}/{} taken at +{}; mean difference {:.4f} = {}*{:.4f}",
                             bl, taken, shots, penalty, static_cast<double>(sum) / shots - bl, penalty, frac);
    return out;
}

// ---------------------------------------------------------------- 8

struct CalibrationTrial {
    uint32_t iterations = 0;
    int32_t final_amp = 0;
    int32_t exit_code = -1;
};

CalibrationTrial run_calibration(int32_t initial_amp, double sigma, uint64_t seed) {
    SystemConfig cfg = SystemConfig::defaults();
    cfg.plant.noise_sigma = sigma;
    CalibrationParams p;
    p.initial_amp = initial_amp;
    p.shots_per_iter = 100;
    p.max_iters = 50;
    const ExperimentScript sc = build_amplitude_calibration(cfg, p);
    apply_requirements(sc, cfg);
    Soc soc(cfg);
    install(sc, soc);
    soc.reset(seed);
    const HaltReport h = soc.run(sc.cycle_budget);
    CalibrationTrial t;
    t.exit_code = h.reason == HaltReason::kProgramExit ? h.exit_code : -1;
    t.final_amp = static_cast<int32_t>(qtest::read_word(soc, kDataBase));
    t.iterations = qtest::read_word(soc, kDataBase + 4);
    return t;
}

Outcome onchip_calibration(unsigned threads) {
    const int trials = 100;
    // Readout noise for the seeded trials; keeps misclassification near 1e-3
    // so the quantum projection noise dominates.
    const double sigma = 7000;
    auto converged = [](const CalibrationTrial& t, uint32_t max_iters) {
        return t.exit_code == 0 && t.iterations <= max_iters && std::abs(t.final_amp - kDefaultPiAmp) * 100 < kDefaultPiAmp;
    };
    auto start_amp = [](int k) {
        return static_cast<int32_t>(std::lround(kDefaultPiAmp * (k % 2 ? 0.9 : 1.1)));
    };
    std::vector<CalibrationTrial> noisy(trials), quiet(trials);
    parallel_for(2 * trials, threads, [&](size_t i) {
        const int k = static_cast<int>(i % trials);
        if (i < static_cast<size_t>(trials)) noisy[k] = run_calibration(start_amp(k), sigma, 8000 + k);
        else quiet[k] = run_calibration(start_amp(k), 0.0, 8000 + k);
    });
    int ok = 0, quiet_ok = 0;
    uint32_t worst_quiet = 0;
    std::string artifact;
    for (int k = 0; k < trials; ++k) {
        ok += converged(noisy[k], 50);
        quiet_ok += converged(quiet[k], 10);
        worst_quiet = std::max(worst_quiet, quiet[k].iterations);
        artifact += fmt::format("{} {} {} {} | {} {} {}\n", start_amp(k), noisy[k].exit_code, noisy[k].iterations,
                                noisy[k].final_amp, quiet[k].exit_code, quiet[k].iterations, quiet[k].final_amp);
    }
    return {ok * 100 >= 95 * trials && quiet_ok == trials,
            fmt::format("{}/{} trials within 1% in <=50 iterations (sigma={:.0f}); noiseless {}/{} within 10 (worst {})",
                        ok, trials, sigma, quiet_ok, trials, worst_quiet),
            artifact};
}

// ---------------------------------------------------------------- 9

Outcome isa_conformance(unsigned) {
    Gen g(9009);
    uint64_t executed = 0;
    int programs = 0;
    std::string artifact;
    while (executed < 100000) {
        const auto words = qtest::random_program(g, 400);
        const auto r = qtest::run_lockstep(g, words, 4000);
        if (!r.mismatch.empty()) return {false, fmt::format("program {}: {}", programs, r.mismatch), artifact};
        executed += r.executed;
        artifact += fmt::format("{}\n", r.executed);
        ++programs;
    }
    return {true, fmt::format("{} instructions over {} programs match the reference", executed, programs), artifact};
}

// ---------------------------------------------------------------- driver

void write_file(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "qcsoc_acceptance";
    const std::vector<Criterion> criteria = {
        {1, "configuration fidelity", 1.0, configuration_fidelity},
        {2, "phase coherence", 10.0, phase_coherence},
        {3, "timed-FIFO alignment", 10.0, fifo_alignment},
        {4, "trig backend equivalence", 30.0, trig_equivalence},
        {5, "noiseless readout fidelity", 10.0, noiseless_readout},
        {6, "noisy readout", 120.0, noisy_readout},
        {7, "conditional-gate co-design", 30.0, conditional_codesign},
        {8, "on-chip calibration", 120.0, onchip_calibration},
        {9, "ISA conformance", 30.0, isa_conformance},
    };
    // Second pass of criterion 10 uses a different thread count, so equal
    // bytes also show the results do not depend on scheduling.
    const unsigned threads[2] = {worker_count(), worker_count() == 1 ? 3u : 1u};
    int failures = 0;
    bool identical = true;
    std::string mismatches;
    for (int pass = 0; pass < 2; ++pass) {
        const fs::path dir = root / fmt::format("run{}", pass);
        fs::remove_all(dir);
        fs::create_directories(dir);
        for (const Criterion& c : criteria) {
            const auto t0 = std::chrono::steady_clock::now();
            Outcome o;
            try {
                o = c.run(threads[pass]);
            } catch (const std::exception& e) {
                o = {false, fmt::format("exception: {}", e.what()), {}};
            }
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            write_file(dir / fmt::format("criterion{}.txt", c.id), o.artifact);
            if (pass == 0) {
                const bool ok = o.pass && secs < c.budget_s;
                failures += !ok;
                fmt::print("{} criterion {} ({}): {} [{:.2f} s, budget {:.0f} s]\n", ok ? "PASS" : "FAIL", c.id, c.name,
                           o.detail, secs, c.budget_s);
                std::fflush(stdout);
            }
        }
    }
    for (const Criterion& c : criteria) {
        const std::string name = fmt::format("criterion{}.txt", c.id);
        const std::string a = read_file(root / "run0" / name);
        if (a.empty() || a != read_file(root / "run1" / name)) {
            identical = false;
            mismatches += fmt::format(" {}", c.id);
        }
    }
    failures += !identical;
    fmt::print("{} criterion 10 (determinism): {}\n", identical ? "PASS" : "FAIL",
               identical ? fmt::format("reruns with {} and {} threads wrote byte-identical outputs for criteria 1-9",
                                       threads[0], threads[1])
                         : fmt::format("outputs differ for criteria{}", mismatches));
    return failures == 0 ? 0 : 1;
}

#include <cmath>

#include <gtest/gtest.h>

#include "qcsoc/experiment.h"
#include "qcsoc/programs.h"
#include "test_util.h"

using namespace qcsoc;
using qcsoc::qtest::Gen;
using qcsoc::qtest::read_word;

namespace {

// One shot of `script` on a fresh SoC configured for it.
struct Shot {
    std::unique_ptr<Soc> soc;
    InstalledProgram prog;
    HaltReport halt;
};

Shot run_once(const ExperimentScript& script, SystemConfig cfg, uint64_t seed, double theta = 0.0) {
    apply_requirements(script, cfg);
    cfg.plant.initial_theta = theta;
    Shot s;
    s.soc = std::make_unique<Soc>(cfg);
    s.prog = install(script, *s.soc);
    s.soc->reset(seed);
    s.soc->set_event_logging(true);
    s.halt = s.soc->run(script.cycle_budget);
    return s;
}

std::vector<int16_t> drive_trace(const ExperimentScript& script, SystemConfig cfg, double theta) {
    apply_requirements(script, cfg);
    cfg.plant.initial_theta = theta;
    Soc soc(cfg);
    install(script, soc);
    soc.reset(1);
    soc.set_trace_channels({cfg.plant.drive_channel});
    soc.run(script.cycle_budget);
    std::vector<int16_t> out;
    for (const auto& w : soc.waveform()) out.push_back(w.value);
    return out;
}

int count_events(const Soc& soc, EventKind kind) {
    int n = 0;
    for (const auto& e : soc.events()) n += e.kind == kind;
    return n;
}

}  // namespace

TEST(Programs, ReadoutReportsPreparedState) {
    const SystemConfig cfg = SystemConfig::defaults();
    const ExperimentScript sc = build_readout(cfg);
    for (int state : {0, 1}) {
        const Shot s = run_once(sc, cfg, 3, state ? M_PI : 0.0);
        ASSERT_EQ(s.halt.reason, HaltReason::kProgramExit);
        EXPECT_EQ(s.halt.exit_code, state);
        const uint32_t ptr = read_word(*s.soc, kDataBase);
        EXPECT_EQ(ptr, kMailboxResults);
        EXPECT_EQ(read_word(*s.soc, kDataBase + 4), 1u);
        EXPECT_EQ(read_word(*s.soc, ptr), 0x8000'0000u | static_cast<uint32_t>(state));
    }
}

// With P(1) = 1 both variants flip the qubit back; with P(1) = 0 the drive
// channel stays silent.
TEST(Programs, FastResetReturnsToGround) {
    const SystemConfig cfg = SystemConfig::defaults();
    for (auto v : {FastResetVariant::kBranch, FastResetVariant::kBranchless}) {
        const ExperimentScript sc = build_fast_reset(v, cfg);
        const Shot one = run_once(sc, cfg, 5, M_PI);
        ASSERT_EQ(one.halt.reason, HaltReason::kProgramExit) << sc.name;
        EXPECT_EQ(read_word(*one.soc, kMailboxResults), 0x8000'0001u) << sc.name;
        EXPECT_EQ(read_word(*one.soc, kMailboxResults + 4), 0x8000'0000u) << sc.name;
        EXPECT_EQ(one.halt.exit_code, 0);
        EXPECT_EQ(count_events(*one.soc, EventKind::kPulseDropped), 0);
        EXPECT_EQ(count_events(*one.soc, EventKind::kCollapse), 2);

        const Shot zero = run_once(sc, cfg, 5, 0.0);
        EXPECT_EQ(read_word(*zero.soc, kMailboxResults), 0x8000'0000u);
        EXPECT_EQ(read_word(*zero.soc, kMailboxResults + 4), 0x8000'0000u);
        for (int16_t x : drive_trace(sc, cfg, 0.0)) ASSERT_EQ(x, 0) << sc.name;
        int active = 0;
        for (int16_t x : drive_trace(sc, cfg, M_PI)) active += x != 0;
        EXPECT_GT(active, 0);
    }
}

// Section cost: lw + sw for branchless whatever the outcome; lw + branch
// for the branch variant, plus the taken penalty when no X is needed.
TEST(Programs, ConditionalSectionCycles) {
    const SystemConfig cfg = SystemConfig::defaults();
    const uint32_t penalty = cfg.pipeline.branch_taken_penalty;
    const uint32_t lw = 1 + cfg.pipeline.mmio_load_latency;
    for (double theta : {0.0, M_PI}) {
        const ExperimentScript bl = build_fast_reset(FastResetVariant::kBranchless, cfg);
        const Shot a = run_once(bl, cfg, 1, theta);
        EXPECT_EQ(section_cycles(*a.soc, a.prog), std::optional<uint64_t>(lw + 1));

        const ExperimentScript br = build_fast_reset(FastResetVariant::kBranch, cfg);
        const Shot b = run_once(br, cfg, 1, theta);
        const uint64_t expect = lw + 1 + (theta == 0.0 ? penalty : 0);
        EXPECT_EQ(section_cycles(*b.soc, b.prog), std::optional<uint64_t>(expect));
    }
}

TEST(Programs, BranchlessNeedsMultiplex) {
    const SystemConfig cfg = SystemConfig::defaults();
    const ExperimentScript sc = build_fast_reset(FastResetVariant::kBranchless, cfg);
    EXPECT_FALSE(unmet_requirements(sc, cfg).empty());
    Soc soc(cfg);
    EXPECT_THROW(install(sc, soc), std::invalid_argument);
    SystemConfig ok = cfg;
    apply_requirements(sc, ok);
    EXPECT_TRUE(unmet_requirements(sc, ok).empty());
}

TEST(Programs, CalibrationGainTable) {
    for (int k : kCalibrationSchedule) {
        EXPECT_EQ(calibration_gain(k), std::lround(65536.0 / ((k + 0.5) * M_PI)));
    }
}

// Host model of one estimation update, mirroring the integer arithmetic.
int32_t host_update(int32_t a, int32_t n, int32_t f, int k) {
    const int32_t step = static_cast<int32_t>((static_cast<int64_t>(a) * (n - 2 * f) / n * calibration_gain(k)) >> 16);
    return std::clamp(a - step, 1, 32767);
}

// Every logged record is reproduced by the host model of the update law,
// and the noiseless loop converges.
TEST(Programs, CalibrationLogFollowsUpdateLaw) {
    SystemConfig cfg = SystemConfig::defaults();
    for (double err : {-0.1, -0.05, 0.07, 0.1}) {
        CalibrationParams p;
        p.initial_amp = static_cast<int32_t>(std::lround(kDefaultPiAmp * (1 + err)));
        const ExperimentScript sc = build_amplitude_calibration(cfg, p);
        const Shot s = run_once(sc, cfg, 11);
        ASSERT_EQ(s.halt.reason, HaltReason::kProgramExit);
        EXPECT_EQ(s.halt.exit_code, 0) << err;
        const uint32_t iters = read_word(*s.soc, kDataBase + 4);
        EXPECT_LE(iters, 10u) << err;
        const int32_t n = static_cast<int32_t>(p.shots_per_iter / 2);
        int32_t a = p.initial_amp;
        for (uint32_t it = 0; it < iters; ++it) {
            const uint32_t rec = kMailboxResults + 16 * it;
            EXPECT_EQ(static_cast<int32_t>(read_word(*s.soc, rec)), a);
            const int k = static_cast<int>(read_word(*s.soc, rec + 8));
            const auto f = static_cast<int32_t>(read_word(*s.soc, rec + 12));
            a = host_update(a, n, f, k);
        }
        const auto final_amp = static_cast<int32_t>(read_word(*s.soc, kDataBase));
        EXPECT_EQ(final_amp, a);
        EXPECT_LT(std::abs(final_amp - kDefaultPiAmp), kDefaultPiAmp / 100) << err;
    }
}

TEST(Programs, CalibrationRejectsBadParameters) {
    const SystemConfig cfg = SystemConfig::defaults();
    CalibrationParams p;
    p.shots_per_iter = 101;
    EXPECT_THROW(build_amplitude_calibration(cfg, p), std::invalid_argument);
    p = {};
    p.check_pulses = 4;
    EXPECT_THROW(build_amplitude_calibration(cfg, p), std::invalid_argument);
}

// Flip probability sin^2(pi a / (2 a_pi)); a least-squares grid fit of a_pi
// lands within 2% of the true pi amplitude.
TEST(Programs, RabiScanRecoversPiAmplitude) {
    const SystemConfig cfg = SystemConfig::defaults();
    std::vector<int32_t> amps;
    for (int i = 1; i <= 16; ++i) amps.push_back(i * 32767 / 16);  // up to about 2 pi
    const uint32_t shots = 200;
    const ExperimentScript sc = build_rabi_scan(cfg, amps, shots);
    const Shot s = run_once(sc, cfg, 21);
    ASSERT_EQ(s.halt.reason, HaltReason::kProgramExit);
    ASSERT_EQ(read_word(*s.soc, kDataBase + 4), amps.size());
    ASSERT_EQ(read_word(*s.soc, kDataBase + 8), shots);
    const uint32_t ptr = read_word(*s.soc, kDataBase);
    std::vector<double> frac;
    for (size_t i = 0; i < amps.size(); ++i) frac.push_back(read_word(*s.soc, ptr + 4 * static_cast<uint32_t>(i)) / double(shots));
    double best = 0, best_err = 1e300;
    for (double api = 0.5 * kDefaultPiAmp; api < 1.5 * kDefaultPiAmp; api += 1.0) {
        double e = 0;
        for (size_t i = 0; i < amps.size(); ++i) {
            const double m = std::pow(std::sin(M_PI * amps[i] / (2 * api)), 2);
            e += (m - frac[i]) * (m - frac[i]);
        }
        if (e < best_err) {
            best_err = e;
            best = api;
        }
    }
    EXPECT_NEAR(best, kDefaultPiAmp, 0.02 * kDefaultPiAmp);
}

TEST(Programs, EveryBuiltinHaltsWithinBudget) {
    for (const std::string& name : builtin_program_names()) {
        RunConfig rc;
        rc.program = "builtin:" + name;
        rc.program_args.amps = {0x1000, 0x4000};
        rc.program_args.shots_per_point = 20;
        const LoadedProgram lp = load_program(rc);
        RunOptions o;
        o.shots = 3;
        o.seed = 7;
        o.log_events = true;
        uint32_t flags = 0;
        const RunResult r = run_shots(rc.system, lp, o, {}, [&](uint64_t, const Soc& soc, ShotRecord&) {
            for (int ch = 0; ch < soc.config().dac_channels; ++ch) flags |= soc.generator(ch).error_flags();
            for (int ch = 0; ch < soc.config().adc_channels; ++ch) flags |= soc.decoder(ch).error_flags();
        });
        EXPECT_EQ(flags, 0u) << name;
        for (const auto& rec : r.records) {
            EXPECT_EQ(rec.halt, HaltReason::kProgramExit) << name;
            EXPECT_LT(rec.cycles, lp.script.cycle_budget) << name;
        }
        for (const auto& e : r.events) EXPECT_NE(e.kind, EventKind::kPulseDropped) << name << " " << format_event(e);
    }
}

// Randomized timing configurations: the built-ins still schedule every
// pulse in the future and report the prepared state.
TEST(Programs, RobustToPortLatencies) {
    Gen g(601);
    for (int trial = 0; trial < 30; ++trial) {
        SystemConfig cfg = SystemConfig::defaults();
        for (auto& gen : cfg.generators) {
            for (auto& l : gen.port_latency) l = static_cast<uint32_t>(g.range(0, 12));
        }
        cfg.plant.delay = static_cast<uint32_t>(g.range(0, 40));
        const auto v = g.coin() ? FastResetVariant::kBranch : FastResetVariant::kBranchless;
        const ExperimentScript sc = build_fast_reset(v, cfg);
        const Shot s = run_once(sc, cfg, 2, M_PI);
        ASSERT_EQ(s.halt.reason, HaltReason::kProgramExit);
        EXPECT_EQ(count_events(*s.soc, EventKind::kPulseDropped), 0) << trial;
        EXPECT_EQ(read_word(*s.soc, kMailboxResults), 0x8000'0001u) << trial;
        EXPECT_EQ(s.halt.exit_code, 0) << trial;
    }
}

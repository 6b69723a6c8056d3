#include <gtest/gtest.h>

#include "qcsoc/assembler.h"
#include "qcsoc/isa.h"
#include "qcsoc/soc.h"
#include "random_program.h"
#include "test_util.h"

using namespace qcsoc;
using qcsoc::qtest::Gen;

namespace {

std::vector<uint32_t> words_of(std::string_view src, const AsmOptions& o = {}) { return assemble(src, kProgBase, o).words(); }

// Runs `src` on a bare SoC and returns a0.
int32_t run_a0(const std::string& src) {
    Soc soc(qtest::bare_config());
    qtest::load_asm(soc, src);
    const HaltReport r = soc.run(100000);
    EXPECT_EQ(r.reason, HaltReason::kProgramExit) << src;
    return r.exit_code;
}

int first_error_line(std::string_view src) {
    try {
        assemble(src);
    } catch (const AssemblyError& e) {
        return e.diagnostics().empty() ? -1 : e.diagnostics().front().line;
    }
    return 0;
}

}  // namespace

TEST(Assembler, BaseEncodings) {
    EXPECT_EQ(words_of("addi a0, zero, -7"), std::vector<uint32_t>{encode_i(kOpcodeOpImm, 0, 10, 0, -7)});
    EXPECT_EQ(words_of("sw t1, 8(s0)"), std::vector<uint32_t>{encode_s(kOpcodeStore, 2, 8, 6, 8)});
    EXPECT_EQ(words_of("ecall"), std::vector<uint32_t>{0x00000073u});
    EXPECT_EQ(words_of("mul a0, a1, a2"), std::vector<uint32_t>{encode_r(kOpcodeOp, 0, 1, 10, 11, 12)});
}

TEST(Assembler, LabelsResolveForwardAndBackward) {
    const auto u = assemble(R"(
    top:
        beq a0, a1, done
        j top
    done:
        ecall
    )");
    EXPECT_EQ(u.labels.at("top"), 0u);
    EXPECT_EQ(u.labels.at("done"), 8u);
    EXPECT_EQ(u.words()[0], encode_b(0, 10, 11, 8));
    EXPECT_EQ(u.words()[1], encode_j(0, -4));
}

TEST(Assembler, NumericBranchTargetsArePcRelative) {
    EXPECT_EQ(words_of("nop\nbeq a0, a1, 8"), (std::vector<uint32_t>{0x00000013u, encode_b(0, 10, 11, 8)}));
}

// li expands to the shortest sequence and always produces the value.
TEST(Assembler, LiLoadsEveryValue) {
    Gen g(501);
    std::vector<int64_t> values = {0, 1, -1, 2047, -2048, 2048, -2049, 0x7FFFFFFF, -0x80000000LL, 0xFFFFFFFF, 0x800, 0xFFFFF800,
                                   0x12345678};
    for (int i = 0; i < 200; ++i) values.push_back(static_cast<int64_t>(g.interesting()));
    for (int64_t v : values) {
        const auto w = words_of(fmt::format("li a0, {}", v));
        const auto s = static_cast<int32_t>(static_cast<uint32_t>(v));
        const bool one = (s >= -2048 && s <= 2047) || (s & 0xFFF) == 0;
        EXPECT_EQ(w.size(), one ? 1u : 2u) << v;
        EXPECT_EQ(static_cast<uint32_t>(run_a0(fmt::format("li a0, {}\necall", v))), static_cast<uint32_t>(v)) << v;
    }
}

TEST(Assembler, LaAndAddressMacros) {
    const auto u = assemble(R"(
        la a0, data
        li a1, RD_RES_ADDR(7)
        li a2, SG_PHASE_ADDR(15)
        ecall
        .align 4
    data:
        .word 1, 2, 0xdeadbeef
    )");
    EXPECT_EQ(u.labels.at("data") % 16, 0u);
    ASSERT_EQ(u.mmio_refs.size(), 2u);
    EXPECT_EQ(u.mmio_refs[0].name, "RD_RES_ADDR(7)");
    EXPECT_EQ(u.mmio_refs[0].address, 0x41000710u);
    EXPECT_EQ(u.mmio_refs[1].address, 0x40000F08u);
    const auto w = u.words();
    EXPECT_EQ(w[u.labels.at("data") / 4 + 2], 0xDEADBEEFu);
}

TEST(Assembler, DirectivesAndExpressions) {
    const auto u = assemble(R"(
        .equ N, 3
        .equ M, (N << 4) | 1
        .set N, N + 1
        li a0, M * 2 - N
        .org 0x40
    here:
        .space 8
    after:
        .zero 4
        .word here, after - here, 'A'
    )");
    EXPECT_EQ(u.constants.at("M"), 49);
    EXPECT_EQ(u.constants.at("N"), 4);
    EXPECT_EQ(u.labels.at("here"), 0x40u);
    EXPECT_EQ(u.labels.at("after"), 0x48u);
    const auto w = u.words();
    EXPECT_EQ(w[0], encode_i(kOpcodeOpImm, 0, 10, 0, 94));
    EXPECT_EQ(w[0x4C / 4], 0x40u);
    EXPECT_EQ(w[0x50 / 4], 8u);
    EXPECT_EQ(w[0x54 / 4], static_cast<uint32_t>('A'));
}

TEST(Assembler, PseudoInstructionsBehave) {
    EXPECT_EQ(run_a0("li a1, 5\nmv a0, a1\necall"), 5);
    EXPECT_EQ(run_a0("li a1, 5\nneg a0, a1\necall"), -5);
    EXPECT_EQ(run_a0("li a1, 5\nnot a0, a1\necall"), ~5);
    EXPECT_EQ(run_a0("li a1, 0\nseqz a0, a1\necall"), 1);
    EXPECT_EQ(run_a0("li a1, 3\nsnez a0, a1\necall"), 1);
    EXPECT_EQ(run_a0("li a1, -3\nsltz a0, a1\necall"), 1);
    EXPECT_EQ(run_a0("li a1, 3\nsgtz a0, a1\necall"), 1);
    EXPECT_EQ(run_a0("li a0, 1\nli a1, 2\nbgt a1, a0, yes\nli a0, 9\nyes: ecall"), 1);
    EXPECT_EQ(run_a0("li a0, 1\nli a1, 2\nble a1, a0, no\nli a0, 7\nno: ecall"), 7);
    EXPECT_EQ(run_a0("li a0, 1\nli a1, -1\nbgtu a1, a0, yes\nli a0, 9\nyes: ecall"), 1);
    EXPECT_EQ(run_a0("li a0, 4\nblez a0, no\nbgtz a0, yes\nno: li a0, 9\nyes: ecall"), 4);
    EXPECT_EQ(run_a0("li a0, 0\ncall f\naddi a0, a0, 1\necall\nf: li a0, 10\nret"), 11);
    EXPECT_EQ(run_a0("la t0, tgt\nli a0, 3\njr t0\nli a0, 9\ntgt: ecall"), 3);
}

TEST(Assembler, ErrorsCarryLineNumbers) {
    EXPECT_EQ(first_error_line("nop\nnop\nbogus a0"), 3);
    EXPECT_EQ(first_error_line("nop\naddi a0, a0, 5000"), 2);
    EXPECT_EQ(first_error_line("beq a0, a1, nowhere"), 1);
    EXPECT_EQ(first_error_line("x: nop\nx: nop"), 2);
    EXPECT_EQ(first_error_line("nop\n\nli a0, RD_RES_ADDR(8)"), 3);  // 8 ADC channels
    EXPECT_EQ(first_error_line("pulse 16, 0, 0, 0, 0, 0"), 1);
    EXPECT_EQ(first_error_line(".org 8\n.org 4"), 2);
    EXPECT_EQ(first_error_line("lw a0, 3"), 1);
    AsmOptions no_m;
    no_m.rv32m = false;
    EXPECT_THROW(assemble("mul a0, a0, a0", kProgBase, no_m), AssemblyError);
}

TEST(Assembler, ReportsEveryDiagnostic) {
    try {
        assemble("bogus\nnop\naddi a0, a0, 99999\nfoo a1");
        FAIL();
    } catch (const AssemblyError& e) {
        ASSERT_EQ(e.diagnostics().size(), 3u);
        EXPECT_EQ(e.diagnostics()[0].line, 1);
        EXPECT_EQ(e.diagnostics()[1].line, 3);
        EXPECT_EQ(e.diagnostics()[2].line, 4);
    }
}

// Random images (including pulse words and data) survive disasm -> asm.
TEST(Assembler, DisassemblyReassemblesToSameImage) {
    Gen g(502);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<uint32_t> w = qtest::random_program(g, 150);
        // Sprinkle pulses, settime and raw data words.
        for (int k = 0; k < 10; ++k) {
            Instruction in;
            in.op = Op::kPulse;
            in.words = kPulseWords;
            in.pulse = PulseInstruction{static_cast<uint8_t>(g.range(0, 15)), static_cast<uint8_t>(g.range(0, 15)),
                                        static_cast<uint16_t>(g.u32()), g.u32(), g.u32(),
                                        static_cast<int16_t>(g.u32()), static_cast<uint16_t>(g.u32())};
            std::array<uint32_t, 4> pw{};
            encode(in, pw);
            const auto at = w.begin() + g.range(0, static_cast<int64_t>(w.size()));
            w.insert(at, pw.begin(), pw.end());
        }
        for (int k = 0; k < 5; ++k) w.insert(w.begin() + g.range(0, static_cast<int64_t>(w.size())), g.u32());
        const std::string text = disassemble_words(w);
        std::vector<uint32_t> back;
        AsmOptions wide;
        wide.dac_channels = 32;  // a data word may decode as a pulse to any 5-bit id
        try {
            back = assemble(text, kProgBase, wide).words();
        } catch (const AssemblyError& e) {
            FAIL() << "line " << e.diagnostics().front().line << ": " << e.diagnostics().front().message;
        }
        ASSERT_EQ(back, w) << text;
    }
}

TEST(Assembler, DisassemblerComments) {
    const std::string s = disassemble_words(std::vector<uint32_t>{0x00000073u}, 0x100, DisasmOptions{true, true});
    EXPECT_NE(s.find("ecall"), std::string::npos);
    EXPECT_NE(s.find("0x00000100"), std::string::npos);
    EXPECT_NE(s.find("00000073"), std::string::npos);
}

TEST(Assembler, SymbolsSortedByAddress) {
    const auto u = assemble("b: nop\na: nop\n.equ Z, 0");
    EXPECT_EQ(format_symbols(u).find("b "), 0u);
    EXPECT_LT(format_symbols(u).find("b "), format_symbols(u).find("a "));
}

TEST(Assembler, UnmappedMmioReferencesAreReported) {
    AsmOptions o;
    o.adc_channels = 8;
    const auto u = assemble("li a0, RD_RES_ADDR(7)\nli a1, SG_T0_ADDR(3)", kProgBase, o);
    SystemConfig small = qtest::bare_config();
    small.adc_channels = 4;
    small.normalize();
    Soc soc(small);
    const auto bad = unmapped_mmio_refs(u, soc.bus().map());
    ASSERT_EQ(bad.size(), 1u);
    EXPECT_EQ(bad[0].name, "RD_RES_ADDR(7)");
    EXPECT_EQ(bad[0].line, 1);
}

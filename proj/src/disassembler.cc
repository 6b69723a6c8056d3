#include <array>

#include <fmt/format.h>

#include "qcsoc/assembler.h"
#include "qcsoc/isa.h"

namespace qcsoc {
namespace {

std::string x(uint8_t r) { return fmt::format("x{}", r); }

std::string format_instruction(const Instruction& in) {
    const std::string_view m = mnemonic(in.op);
    switch (op_class(in.op)) {
        case OpClass::kAlu:
        case OpClass::kMulDiv:
            switch (in.op) {
                case Op::kLui:
                case Op::kAuipc:
                    return fmt::format("{} {}, 0x{:x}", m, x(in.rd), static_cast<uint32_t>(in.imm) >> 12);
                case Op::kAddi: case Op::kSlti: case Op::kSltiu: case Op::kXori: case Op::kOri: case Op::kAndi:
                case Op::kSlli: case Op::kSrli: case Op::kSrai:
                    return fmt::format("{} {}, {}, {}", m, x(in.rd), x(in.rs1), in.imm);
                default: return fmt::format("{} {}, {}, {}", m, x(in.rd), x(in.rs1), x(in.rs2));
            }
        case OpClass::kBranch: return fmt::format("{} {}, {}, {}", m, x(in.rs1), x(in.rs2), in.imm);
        case OpClass::kJump:
            if (in.op == Op::kJal) return fmt::format("jal {}, {}", x(in.rd), in.imm);
            return fmt::format("jalr {}, {}({})", x(in.rd), in.imm, x(in.rs1));
        case OpClass::kLoad: return fmt::format("{} {}, {}({})", m, x(in.rd), in.imm, x(in.rs1));
        case OpClass::kStore: return fmt::format("{} {}, {}({})", m, x(in.rs2), in.imm, x(in.rs1));
        case OpClass::kSystem: return std::string(m);
        case OpClass::kSettime: return fmt::format("settime {}", x(in.rs1));
        case OpClass::kPulse: {
            const PulseInstruction& p = in.pulse;
            return fmt::format("pulse {}, 0x{:08x}, 0x{:08x}, 0x{:04x}, {}, {}, {}", p.id, p.freq, p.phase,
                               static_cast<uint16_t>(p.amp), p.env_start, p.duration, p.flags);
        }
    }
    return ".word ?";
}

}  // namespace

std::string disassemble_words(std::span<const uint32_t> words, uint32_t origin, const DisasmOptions& options) {
    std::string out;
    size_t i = 0;
    while (i < words.size()) {
        const size_t avail = std::min<size_t>(words.size() - i, is_pulse_word(words[i]) ? kPulseWords : 1);
        const auto dec = decode(words.subspan(i, avail), options.rv32m);
        size_t used = 1;
        std::string text;
        if (dec) {
            std::array<uint32_t, 4> re{};
            const int n = encode(*dec, re);
            bool same = true;
            for (int k = 0; k < n; ++k) same = same && re[k] == words[i + k];
            if (same) {
                text = format_instruction(*dec);
                used = static_cast<size_t>(n);
            }
        }
        if (text.empty()) text = fmt::format(".word 0x{:08x}", words[i]);
        if (options.comments) {
            std::string raw;
            for (size_t k = 0; k < used; ++k) raw += fmt::format("{}{:08x}", k ? " " : "", words[i + k]);
            text = fmt::format("{:<56} # 0x{:08x}: {}", text, origin + 4 * static_cast<uint32_t>(i), raw);
        }
        out += text;
        out += '\n';
        i += used;
    }
    return out;
}

std::string disassemble(std::span<const uint8_t> image, uint32_t origin, const DisasmOptions& options) {
    if (image.size() % 4 != 0) throw std::invalid_argument("image length must be a multiple of 4");
    std::vector<uint32_t> words(image.size() / 4);
    for (size_t i = 0; i < image.size(); ++i) words[i / 4] |= uint32_t{image[i]} << (8 * (i % 4));
    return disassemble_words(words, origin, options);
}

}  // namespace qcsoc

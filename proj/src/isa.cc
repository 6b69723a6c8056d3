#include "qcsoc/isa.h"

#include <array>

namespace qcsoc {
namespace {

constexpr int32_t sign_extend(uint32_t v, int bits) {
    const uint32_t m = 1u << (bits - 1);
    return static_cast<int32_t>((v ^ m) - m);
}

constexpr uint32_t bits(uint32_t w, int hi, int lo) { return (w >> lo) & ((1u << (hi - lo + 1)) - 1u); }

int32_t imm_i(uint32_t w) { return sign_extend(w >> 20, 12); }
int32_t imm_s(uint32_t w) { return sign_extend((bits(w, 31, 25) << 5) | bits(w, 11, 7), 12); }
int32_t imm_b(uint32_t w) {
    return sign_extend((bits(w, 31, 31) << 12) | (bits(w, 7, 7) << 11) | (bits(w, 30, 25) << 5) | (bits(w, 11, 8) << 1),
                       13);
}
int32_t imm_j(uint32_t w) {
    return sign_extend(
        (bits(w, 31, 31) << 20) | (bits(w, 19, 12) << 12) | (bits(w, 20, 20) << 11) | (bits(w, 30, 21) << 1), 21);
}

struct Encoding {
    uint32_t opcode;
    uint32_t funct3;
    uint32_t funct7;
};

Encoding encoding_of(Op op) {
    switch (op) {
        case Op::kLui: return {kOpcodeLui, 0, 0};
        case Op::kAuipc: return {kOpcodeAuipc, 0, 0};
        case Op::kJal: return {kOpcodeJal, 0, 0};
        case Op::kJalr: return {kOpcodeJalr, 0, 0};
        case Op::kBeq: return {kOpcodeBranch, 0, 0};
        case Op::kBne: return {kOpcodeBranch, 1, 0};
        case Op::kBlt: return {kOpcodeBranch, 4, 0};
        case Op::kBge: return {kOpcodeBranch, 5, 0};
        case Op::kBltu: return {kOpcodeBranch, 6, 0};
        case Op::kBgeu: return {kOpcodeBranch, 7, 0};
        case Op::kLb: return {kOpcodeLoad, 0, 0};
        case Op::kLh: return {kOpcodeLoad, 1, 0};
        case Op::kLw: return {kOpcodeLoad, 2, 0};
        case Op::kLbu: return {kOpcodeLoad, 4, 0};
        case Op::kLhu: return {kOpcodeLoad, 5, 0};
        case Op::kSb: return {kOpcodeStore, 0, 0};
        case Op::kSh: return {kOpcodeStore, 1, 0};
        case Op::kSw: return {kOpcodeStore, 2, 0};
        case Op::kAddi: return {kOpcodeOpImm, 0, 0};
        case Op::kSlti: return {kOpcodeOpImm, 2, 0};
        case Op::kSltiu: return {kOpcodeOpImm, 3, 0};
        case Op::kXori: return {kOpcodeOpImm, 4, 0};
        case Op::kOri: return {kOpcodeOpImm, 6, 0};
        case Op::kAndi: return {kOpcodeOpImm, 7, 0};
        case Op::kSlli: return {kOpcodeOpImm, 1, 0};
        case Op::kSrli: return {kOpcodeOpImm, 5, 0};
        case Op::kSrai: return {kOpcodeOpImm, 5, 0x20};
        case Op::kAdd: return {kOpcodeOp, 0, 0};
        case Op::kSub: return {kOpcodeOp, 0, 0x20};
        case Op::kSll: return {kOpcodeOp, 1, 0};
        case Op::kSlt: return {kOpcodeOp, 2, 0};
        case Op::kSltu: return {kOpcodeOp, 3, 0};
        case Op::kXor: return {kOpcodeOp, 4, 0};
        case Op::kSrl: return {kOpcodeOp, 5, 0};
        case Op::kSra: return {kOpcodeOp, 5, 0x20};
        case Op::kOr: return {kOpcodeOp, 6, 0};
        case Op::kAnd: return {kOpcodeOp, 7, 0};
        case Op::kMul: return {kOpcodeOp, 0, 1};
        case Op::kMulh: return {kOpcodeOp, 1, 1};
        case Op::kMulhsu: return {kOpcodeOp, 2, 1};
        case Op::kMulhu: return {kOpcodeOp, 3, 1};
        case Op::kDiv: return {kOpcodeOp, 4, 1};
        case Op::kDivu: return {kOpcodeOp, 5, 1};
        case Op::kRem: return {kOpcodeOp, 6, 1};
        case Op::kRemu: return {kOpcodeOp, 7, 1};
        case Op::kFence: return {kOpcodeMiscMem, 0, 0};
        case Op::kEcall: return {kOpcodeSystem, 0, 0};
        case Op::kEbreak: return {kOpcodeSystem, 0, 0};
        case Op::kPulse: return {kOpcodeCustom0, 0, 0};
        case Op::kSettime: return {kOpcodeCustom1, 0, 0};
    }
    return {0, 0, 0};
}

}  // namespace

std::string_view mnemonic(Op op) {
    static constexpr std::array<std::string_view, 51> kNames = {
        "lui", "auipc", "jal", "jalr",
        "beq", "bne", "blt", "bge", "bltu", "bgeu",
        "lb", "lh", "lw", "lbu", "lhu",
        "sb", "sh", "sw",
        "addi", "slti", "sltiu", "xori", "ori", "andi", "slli", "srli", "srai",
        "add", "sub", "sll", "slt", "sltu", "xor", "srl", "sra", "or", "and",
        "mul", "mulh", "mulhsu", "mulhu", "div", "divu", "rem", "remu",
        "fence", "ecall", "ebreak",
        "pulse", "settime",
    };
    return kNames[static_cast<size_t>(op)];
}

OpClass op_class(Op op) {
    switch (op) {
        case Op::kBeq: case Op::kBne: case Op::kBlt: case Op::kBge: case Op::kBltu: case Op::kBgeu:
            return OpClass::kBranch;
        case Op::kJal: case Op::kJalr:
            return OpClass::kJump;
        case Op::kLb: case Op::kLh: case Op::kLw: case Op::kLbu: case Op::kLhu:
            return OpClass::kLoad;
        case Op::kSb: case Op::kSh: case Op::kSw:
            return OpClass::kStore;
        case Op::kMul: case Op::kMulh: case Op::kMulhsu: case Op::kMulhu:
        case Op::kDiv: case Op::kDivu: case Op::kRem: case Op::kRemu:
            return OpClass::kMulDiv;
        case Op::kFence: case Op::kEcall: case Op::kEbreak:
            return OpClass::kSystem;
        case Op::kPulse:
            return OpClass::kPulse;
        case Op::kSettime:
            return OpClass::kSettime;
        default:
            return OpClass::kAlu;
    }
}

std::optional<Instruction> decode(std::span<const uint32_t> window, bool allow_m) {
    if (window.empty()) return std::nullopt;
    const uint32_t w = window[0];
    const uint32_t opcode = w & 0x7Fu;
    const auto rd = static_cast<uint8_t>(bits(w, 11, 7));
    const uint32_t funct3 = bits(w, 14, 12);
    const auto rs1 = static_cast<uint8_t>(bits(w, 19, 15));
    const auto rs2 = static_cast<uint8_t>(bits(w, 24, 20));
    const uint32_t funct7 = bits(w, 31, 25);

    Instruction inst;
    inst.rd = rd;
    inst.rs1 = rs1;
    inst.rs2 = rs2;

    auto make = [&](Op op, int32_t imm, bool uses_rd, bool uses_rs1, bool uses_rs2) {
        inst.op = op;
        inst.imm = imm;
        if (!uses_rd) inst.rd = 0;
        if (!uses_rs1) inst.rs1 = 0;
        if (!uses_rs2) inst.rs2 = 0;
        return std::optional<Instruction>(inst);
    };

    switch (opcode) {
        case kOpcodeLui: return make(Op::kLui, static_cast<int32_t>(w & 0xFFFFF000u), true, false, false);
        case kOpcodeAuipc: return make(Op::kAuipc, static_cast<int32_t>(w & 0xFFFFF000u), true, false, false);
        case kOpcodeJal: return make(Op::kJal, imm_j(w), true, false, false);
        case kOpcodeJalr:
            if (funct3 != 0) return std::nullopt;
            return make(Op::kJalr, imm_i(w), true, true, false);
        case kOpcodeBranch: {
            static constexpr Op kOps[8] = {Op::kBeq, Op::kBne, Op::kEcall, Op::kEcall,
                                           Op::kBlt, Op::kBge, Op::kBltu, Op::kBgeu};
            if (funct3 == 2 || funct3 == 3) return std::nullopt;
            return make(kOps[funct3], imm_b(w), false, true, true);
        }
        case kOpcodeLoad: {
            static constexpr Op kOps[8] = {Op::kLb, Op::kLh, Op::kLw, Op::kEcall,
                                           Op::kLbu, Op::kLhu, Op::kEcall, Op::kEcall};
            if (funct3 == 3 || funct3 > 5) return std::nullopt;
            return make(kOps[funct3], imm_i(w), true, true, false);
        }
        case kOpcodeStore: {
            static constexpr Op kOps[3] = {Op::kSb, Op::kSh, Op::kSw};
            if (funct3 > 2) return std::nullopt;
            return make(kOps[funct3], imm_s(w), false, true, true);
        }
        case kOpcodeOpImm:
            switch (funct3) {
                case 0: return make(Op::kAddi, imm_i(w), true, true, false);
                case 2: return make(Op::kSlti, imm_i(w), true, true, false);
                case 3: return make(Op::kSltiu, imm_i(w), true, true, false);
                case 4: return make(Op::kXori, imm_i(w), true, true, false);
                case 6: return make(Op::kOri, imm_i(w), true, true, false);
                case 7: return make(Op::kAndi, imm_i(w), true, true, false);
                case 1:
                    if (funct7 != 0) return std::nullopt;
                    return make(Op::kSlli, rs2, true, true, false);
                case 5:
                    if (funct7 == 0) return make(Op::kSrli, rs2, true, true, false);
                    if (funct7 == 0x20) return make(Op::kSrai, rs2, true, true, false);
                    return std::nullopt;
            }
            return std::nullopt;
        case kOpcodeOp: {
            if (funct7 == 0) {
                static constexpr Op kOps[8] = {Op::kAdd, Op::kSll, Op::kSlt, Op::kSltu,
                                               Op::kXor, Op::kSrl, Op::kOr, Op::kAnd};
                return make(kOps[funct3], 0, true, true, true);
            }
            if (funct7 == 0x20) {
                if (funct3 == 0) return make(Op::kSub, 0, true, true, true);
                if (funct3 == 5) return make(Op::kSra, 0, true, true, true);
                return std::nullopt;
            }
            if (funct7 == 1 && allow_m) {
                static constexpr Op kOps[8] = {Op::kMul, Op::kMulh, Op::kMulhsu, Op::kMulhu,
                                               Op::kDiv, Op::kDivu, Op::kRem, Op::kRemu};
                return make(kOps[funct3], 0, true, true, true);
            }
            return std::nullopt;
        }
        case kOpcodeMiscMem:
            if (funct3 != 0) return std::nullopt;
            return make(Op::kFence, 0, false, false, false);
        case kOpcodeSystem:
            if (w == 0x00000073u) return make(Op::kEcall, 0, false, false, false);
            if (w == 0x00100073u) return make(Op::kEbreak, 0, false, false, false);
            return std::nullopt;
        case kOpcodeCustom0: {
            if (window.size() < kPulseWords) return std::nullopt;
            inst = Instruction{};
            inst.op = Op::kPulse;
            inst.words = kPulseWords;
            inst.pulse.id = static_cast<uint8_t>(bits(w, 11, 7));
            inst.pulse.flags = static_cast<uint8_t>(bits(w, 15, 12));
            inst.pulse.duration = static_cast<uint16_t>(w >> 16);
            inst.pulse.freq = window[1];
            inst.pulse.phase = window[2];
            inst.pulse.amp = static_cast<int16_t>(window[3] & 0xFFFFu);
            inst.pulse.env_start = static_cast<uint16_t>(window[3] >> 16);
            return inst;
        }
        case kOpcodeCustom1:
            if ((w & ~(0x1Fu << 15)) != kOpcodeCustom1) return std::nullopt;
            return make(Op::kSettime, 0, false, true, false);
        default:
            return std::nullopt;
    }
}

uint32_t encode_r(uint32_t opcode, uint32_t funct3, uint32_t funct7, uint32_t rd, uint32_t rs1, uint32_t rs2) {
    return (funct7 << 25) | ((rs2 & 31u) << 20) | ((rs1 & 31u) << 15) | (funct3 << 12) | ((rd & 31u) << 7) | opcode;
}

uint32_t encode_i(uint32_t opcode, uint32_t funct3, uint32_t rd, uint32_t rs1, int32_t imm) {
    return (static_cast<uint32_t>(imm & 0xFFF) << 20) | ((rs1 & 31u) << 15) | (funct3 << 12) | ((rd & 31u) << 7) |
           opcode;
}

uint32_t encode_s(uint32_t opcode, uint32_t funct3, uint32_t rs1, uint32_t rs2, int32_t imm) {
    const auto u = static_cast<uint32_t>(imm);
    return (bits(u, 11, 5) << 25) | ((rs2 & 31u) << 20) | ((rs1 & 31u) << 15) | (funct3 << 12) |
           (bits(u, 4, 0) << 7) | opcode;
}

uint32_t encode_b(uint32_t funct3, uint32_t rs1, uint32_t rs2, int32_t offset) {
    const auto u = static_cast<uint32_t>(offset);
    return (bits(u, 12, 12) << 31) | (bits(u, 10, 5) << 25) | ((rs2 & 31u) << 20) | ((rs1 & 31u) << 15) |
           (funct3 << 12) | (bits(u, 4, 1) << 8) | (bits(u, 11, 11) << 7) | kOpcodeBranch;
}

uint32_t encode_u(uint32_t opcode, uint32_t rd, int32_t imm20) {
    return (static_cast<uint32_t>(imm20) << 12) | ((rd & 31u) << 7) | opcode;
}

uint32_t encode_j(uint32_t rd, int32_t offset) {
    const auto u = static_cast<uint32_t>(offset);
    return (bits(u, 20, 20) << 31) | (bits(u, 10, 1) << 21) | (bits(u, 11, 11) << 20) | (bits(u, 19, 12) << 12) |
           ((rd & 31u) << 7) | kOpcodeJal;
}

int encode(const Instruction& inst, std::span<uint32_t, 4> out) {
    const Encoding e = encoding_of(inst.op);
    switch (inst.op) {
        case Op::kLui:
        case Op::kAuipc:
            out[0] = (static_cast<uint32_t>(inst.imm) & 0xFFFFF000u) | (uint32_t{inst.rd} << 7) | e.opcode;
            return 1;
        case Op::kJal: out[0] = encode_j(inst.rd, inst.imm); return 1;
        case Op::kFence: out[0] = 0x0FF0000Fu; return 1;
        case Op::kEcall: out[0] = 0x00000073u; return 1;
        case Op::kEbreak: out[0] = 0x00100073u; return 1;
        case Op::kSettime: out[0] = (uint32_t{inst.rs1} << 15) | kOpcodeCustom1; return 1;
        case Op::kPulse: {
            const PulseInstruction& p = inst.pulse;
            out[0] = (uint32_t{p.duration} << 16) | (uint32_t{p.flags & 0xFu} << 12) | (uint32_t{p.id & 31u} << 7) |
                     kOpcodeCustom0;
            out[1] = p.freq;
            out[2] = p.phase;
            out[3] = (uint32_t{p.env_start} << 16) | static_cast<uint16_t>(p.amp);
            return 4;
        }
        default: break;
    }
    switch (op_class(inst.op)) {
        case OpClass::kBranch: out[0] = encode_b(e.funct3, inst.rs1, inst.rs2, inst.imm); return 1;
        case OpClass::kStore: out[0] = encode_s(e.opcode, e.funct3, inst.rs1, inst.rs2, inst.imm); return 1;
        case OpClass::kLoad:
        case OpClass::kJump: out[0] = encode_i(e.opcode, e.funct3, inst.rd, inst.rs1, inst.imm); return 1;
        case OpClass::kAlu:
            if (e.opcode == kOpcodeOpImm) {
                if (inst.op == Op::kSlli || inst.op == Op::kSrli || inst.op == Op::kSrai) {
                    out[0] = encode_r(e.opcode, e.funct3, e.funct7, inst.rd, inst.rs1, static_cast<uint32_t>(inst.imm) & 31u);
                } else {
                    out[0] = encode_i(e.opcode, e.funct3, inst.rd, inst.rs1, inst.imm);
                }
                return 1;
            }
            [[fallthrough]];
        default:
            out[0] = encode_r(e.opcode, e.funct3, e.funct7, inst.rd, inst.rs1, inst.rs2);
            return 1;
    }
}

}  // namespace qcsoc

#ifndef QCSOC_ISA_H
#define QCSOC_ISA_H

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace qcsoc {

inline constexpr uint32_t kOpcodeLui = 0x37;
inline constexpr uint32_t kOpcodeAuipc = 0x17;
inline constexpr uint32_t kOpcodeJal = 0x6F;
inline constexpr uint32_t kOpcodeJalr = 0x67;
inline constexpr uint32_t kOpcodeBranch = 0x63;
inline constexpr uint32_t kOpcodeLoad = 0x03;
inline constexpr uint32_t kOpcodeStore = 0x23;
inline constexpr uint32_t kOpcodeOpImm = 0x13;
inline constexpr uint32_t kOpcodeOp = 0x33;
inline constexpr uint32_t kOpcodeMiscMem = 0x0F;
inline constexpr uint32_t kOpcodeSystem = 0x73;
inline constexpr uint32_t kOpcodeCustom0 = 0x0B;  // 128-bit pulse
inline constexpr uint32_t kOpcodeCustom1 = 0x2B;  // settime

enum class Op : uint8_t {
    kLui, kAuipc, kJal, kJalr,
    kBeq, kBne, kBlt, kBge, kBltu, kBgeu,
    kLb, kLh, kLw, kLbu, kLhu,
    kSb, kSh, kSw,
    kAddi, kSlti, kSltiu, kXori, kOri, kAndi, kSlli, kSrli, kSrai,
    kAdd, kSub, kSll, kSlt, kSltu, kXor, kSrl, kSra, kOr, kAnd,
    kMul, kMulh, kMulhsu, kMulhu, kDiv, kDivu, kRem, kRemu,
    kFence, kEcall, kEbreak,
    kPulse, kSettime,
};

enum class OpClass : uint8_t { kAlu, kBranch, kJump, kLoad, kStore, kMulDiv, kSystem, kPulse, kSettime };

std::string_view mnemonic(Op op);
OpClass op_class(Op op);

/// Pulse parameters carried by the four words of a custom-0 instruction.
///
/// word0 = [duration 16][flags 4][id 5][opcode 7], word1 = freq, word2 = phase,
/// word3 = [env_start 16][amp 16].
struct PulseInstruction {
    uint8_t id = 0;
    uint8_t flags = 0;  // bit0 selects the multiplexed FIFO bank
    uint16_t duration = 0;
    uint32_t freq = 0;
    uint32_t phase = 0;
    int16_t amp = 0;
    uint16_t env_start = 0;

    bool operator==(const PulseInstruction&) const = default;
};

struct Instruction {
    Op op = Op::kAddi;
    uint8_t rd = 0;
    uint8_t rs1 = 0;
    uint8_t rs2 = 0;
    int32_t imm = 0;
    uint8_t words = 1;
    PulseInstruction pulse;

    bool operator==(const Instruction&) const = default;
};

inline constexpr uint32_t kPulseWords = 4;

// True if the word begins a 4-word pulse instruction.
constexpr bool is_pulse_word(uint32_t word) { return (word & 0x7Fu) == kOpcodeCustom0; }

/// Decodes the instruction beginning at window[0]. A pulse needs all four
/// words of the window; other instructions read only window[0]. Returns
/// nullopt for words that are not RV32I/RV32M or one of the two custom
/// instructions, including M-extension words when `allow_m` is false.
std::optional<Instruction> decode(std::span<const uint32_t> window, bool allow_m = true);

// Encoders used by the assembler and by tests.
uint32_t encode_r(uint32_t opcode, uint32_t funct3, uint32_t funct7, uint32_t rd, uint32_t rs1, uint32_t rs2);
uint32_t encode_i(uint32_t opcode, uint32_t funct3, uint32_t rd, uint32_t rs1, int32_t imm);
uint32_t encode_s(uint32_t opcode, uint32_t funct3, uint32_t rs1, uint32_t rs2, int32_t imm);
uint32_t encode_b(uint32_t funct3, uint32_t rs1, uint32_t rs2, int32_t offset);
uint32_t encode_u(uint32_t opcode, uint32_t rd, int32_t imm20);
uint32_t encode_j(uint32_t rd, int32_t offset);

// Encodes any decoded instruction back to words; returns the word count (1 or 4).
int encode(const Instruction& inst, std::span<uint32_t, 4> out);

}  // namespace qcsoc

#endif  // QCSOC_ISA_H

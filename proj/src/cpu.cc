#include "qcsoc/cpu.h"

#include <limits>

namespace qcsoc {

const char* halt_reason_name(HaltReason reason) {
    switch (reason) {
        case HaltReason::kNone: return "running";
        case HaltReason::kProgramExit: return "program-exit";
        case HaltReason::kBreakpoint: return "breakpoint";
        case HaltReason::kBusFault: return "bus-fault";
        case HaltReason::kMisaligned: return "misaligned";
        case HaltReason::kIllegalInstruction: return "illegal-instruction";
        case HaltReason::kTimeout: return "timeout";
    }
    return "?";
}

void Cpu::halt(HaltReason reason, uint32_t addr) {
    state_.halt = reason;
    state_.fault_addr = addr;
}

StepReport Cpu::step(Bus& bus, PulseSink* sink) {
    StepReport report;
    report.pc = state_.pc;
    if (state_.halted()) return report;

    const uint32_t pc = state_.pc;
    auto consume = [&](uint32_t cycles) {
        report.cycles = cycles;
        state_.cycle += cycles;
    };

    if (pc % 4 != 0) {
        halt(HaltReason::kMisaligned, pc);
        consume(1);
        return report;
    }
    const Region* fetch_region = bus.region_at(pc);
    if (fetch_region == nullptr || fetch_region->kind == RegionKind::kMmio) {
        halt(HaltReason::kBusFault, pc);
        consume(1);
        return report;
    }

    uint32_t window[kPulseWords] = {};
    BusResult first = bus.read32(pc);
    if (first.status != BusStatus::kOk) {
        halt(HaltReason::kBusFault, pc);
        consume(1);
        return report;
    }
    window[0] = first.value;
    size_t window_len = 1;
    if (is_pulse_word(first.value)) {
        for (uint32_t i = 1; i < kPulseWords; ++i) {
            BusResult w = bus.read32(pc + 4 * i);
            if (w.status != BusStatus::kOk) {
                halt(HaltReason::kBusFault, pc + 4 * i);
                consume(1);
                return report;
            }
            window[i] = w.value;
        }
        window_len = kPulseWords;
    }

    const auto decoded = decode(std::span<const uint32_t>(window, window_len), rv32m_);
    if (!decoded) {
        state_.fault_word = window[0];
        halt(HaltReason::kIllegalInstruction, pc);
        consume(1);
        return report;
    }
    const Instruction& in = *decoded;
    report.op = in.op;

    auto& x = state_.regs;
    const uint32_t a = x[in.rs1];
    const uint32_t b = x[in.rs2];
    const auto imm = static_cast<uint32_t>(in.imm);
    uint32_t next_pc = pc + 4u * in.words;
    bool taken = false;
    RegionKind load_region = RegionKind::kRam;

    auto branch_to = [&](uint32_t target) -> bool {
        if (target % 4 != 0) {
            halt(HaltReason::kMisaligned, target);
            return false;
        }
        next_pc = target;
        taken = true;
        return true;
    };

    switch (in.op) {
        case Op::kLui: write_reg(in.rd, imm); break;
        case Op::kAuipc: write_reg(in.rd, pc + imm); break;
        case Op::kJal:
            if (!branch_to(pc + imm)) break;
            write_reg(in.rd, pc + 4);
            break;
        case Op::kJalr:
            if (!branch_to((a + imm) & ~1u)) break;
            write_reg(in.rd, pc + 4);
            break;
        case Op::kBeq: if (a == b) branch_to(pc + imm); break;
        case Op::kBne: if (a != b) branch_to(pc + imm); break;
        case Op::kBlt: if (static_cast<int32_t>(a) < static_cast<int32_t>(b)) branch_to(pc + imm); break;
        case Op::kBge: if (static_cast<int32_t>(a) >= static_cast<int32_t>(b)) branch_to(pc + imm); break;
        case Op::kBltu: if (a < b) branch_to(pc + imm); break;
        case Op::kBgeu: if (a >= b) branch_to(pc + imm); break;
        case Op::kLb: case Op::kLh: case Op::kLw: case Op::kLbu: case Op::kLhu: {
            const int size = (in.op == Op::kLw) ? 4 : (in.op == Op::kLh || in.op == Op::kLhu) ? 2 : 1;
            const uint32_t addr = a + imm;
            if (addr % static_cast<uint32_t>(size) != 0) {
                halt(HaltReason::kMisaligned, addr);
                break;
            }
            const Region* r = bus.region_at(addr);
            if (r != nullptr) load_region = r->kind;
            BusResult res = bus.read(addr, size);
            if (res.status != BusStatus::kOk) {
                halt(HaltReason::kBusFault, addr);
                break;
            }
            uint32_t v = res.value;
            if (in.op == Op::kLb) v = static_cast<uint32_t>(static_cast<int32_t>(static_cast<int8_t>(v)));
            if (in.op == Op::kLh) v = static_cast<uint32_t>(static_cast<int32_t>(static_cast<int16_t>(v)));
            write_reg(in.rd, v);
            break;
        }
        case Op::kSb: case Op::kSh: case Op::kSw: {
            const int size = in.op == Op::kSw ? 4 : in.op == Op::kSh ? 2 : 1;
            const uint32_t addr = a + imm;
            if (addr % static_cast<uint32_t>(size) != 0) {
                halt(HaltReason::kMisaligned, addr);
                break;
            }
            const BusStatus st = bus.write(addr, size, b);
            if (st == BusStatus::kBusy) {
                report.stalled = true;
                consume(1);
                return report;
            }
            if (st != BusStatus::kOk) halt(HaltReason::kBusFault, addr);
            break;
        }
        case Op::kAddi: write_reg(in.rd, a + imm); break;
        case Op::kSlti: write_reg(in.rd, static_cast<int32_t>(a) < in.imm ? 1 : 0); break;
        case Op::kSltiu: write_reg(in.rd, a < imm ? 1 : 0); break;
        case Op::kXori: write_reg(in.rd, a ^ imm); break;
        case Op::kOri: write_reg(in.rd, a | imm); break;
        case Op::kAndi: write_reg(in.rd, a & imm); break;
        case Op::kSlli: write_reg(in.rd, a << (imm & 31)); break;
        case Op::kSrli: write_reg(in.rd, a >> (imm & 31)); break;
        case Op::kSrai: write_reg(in.rd, static_cast<uint32_t>(static_cast<int32_t>(a) >> (imm & 31))); break;
        case Op::kAdd: write_reg(in.rd, a + b); break;
        case Op::kSub: write_reg(in.rd, a - b); break;
        case Op::kSll: write_reg(in.rd, a << (b & 31)); break;
        case Op::kSlt: write_reg(in.rd, static_cast<int32_t>(a) < static_cast<int32_t>(b) ? 1 : 0); break;
        case Op::kSltu: write_reg(in.rd, a < b ? 1 : 0); break;
        case Op::kXor: write_reg(in.rd, a ^ b); break;
        case Op::kSrl: write_reg(in.rd, a >> (b & 31)); break;
        case Op::kSra: write_reg(in.rd, static_cast<uint32_t>(static_cast<int32_t>(a) >> (b & 31))); break;
        case Op::kOr: write_reg(in.rd, a | b); break;
        case Op::kAnd: write_reg(in.rd, a & b); break;
        case Op::kMul: write_reg(in.rd, a * b); break;
        case Op::kMulh: {
            const int64_t p = int64_t{static_cast<int32_t>(a)} * int64_t{static_cast<int32_t>(b)};
            write_reg(in.rd, static_cast<uint32_t>(static_cast<uint64_t>(p) >> 32));
            break;
        }
        case Op::kMulhsu: {
            const int64_t p = int64_t{static_cast<int32_t>(a)} * static_cast<int64_t>(uint64_t{b});
            write_reg(in.rd, static_cast<uint32_t>(static_cast<uint64_t>(p) >> 32));
            break;
        }
        case Op::kMulhu: write_reg(in.rd, static_cast<uint32_t>((uint64_t{a} * uint64_t{b}) >> 32)); break;
        case Op::kDiv: {
            const auto sa = static_cast<int32_t>(a);
            const auto sb = static_cast<int32_t>(b);
            if (sb == 0) write_reg(in.rd, 0xFFFFFFFFu);
            else if (sa == std::numeric_limits<int32_t>::min() && sb == -1) write_reg(in.rd, a);
            else write_reg(in.rd, static_cast<uint32_t>(sa / sb));
            break;
        }
        case Op::kDivu: write_reg(in.rd, b == 0 ? 0xFFFFFFFFu : a / b); break;
        case Op::kRem: {
            const auto sa = static_cast<int32_t>(a);
            const auto sb = static_cast<int32_t>(b);
            if (sb == 0) write_reg(in.rd, a);
            else if (sa == std::numeric_limits<int32_t>::min() && sb == -1) write_reg(in.rd, 0);
            else write_reg(in.rd, static_cast<uint32_t>(sa % sb));
            break;
        }
        case Op::kRemu: write_reg(in.rd, b == 0 ? a : a % b); break;
        case Op::kFence: break;
        case Op::kEcall:
            state_.exit_code = static_cast<int32_t>(x[10]);
            halt(HaltReason::kProgramExit);
            break;
        case Op::kEbreak: halt(HaltReason::kBreakpoint, pc); break;
        case Op::kSettime: state_.treg = a; break;
        case Op::kPulse: {
            const PulseStatus st = sink ? sink->issue_pulse(in.pulse, state_.treg) : PulseStatus::kRejected;
            if (st == PulseStatus::kBusy) {
                report.stalled = true;
                consume(1);
                return report;
            }
            if (st == PulseStatus::kRejected) {
                state_.fault_word = window[0];
                halt(HaltReason::kIllegalInstruction, pc);
            }
            break;
        }
    }

    report.taken = taken;
    consume(model_.cost(op_class(in.op), taken, load_region));
    if (state_.halt == HaltReason::kNone || state_.halt == HaltReason::kProgramExit ||
        state_.halt == HaltReason::kBreakpoint) {
        report.retired = true;
    }
    if (!state_.halted()) state_.pc = next_pc;
    state_.regs[0] = 0;
    return report;
}

}  // namespace qcsoc

#include "qcsoc/assembler.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "qcsoc/isa.h"

namespace qcsoc {

AssemblyError::AssemblyError(std::vector<AsmDiagnostic> diagnostics)
    : std::runtime_error([&] {
          std::string msg;
          for (const auto& d : diagnostics) msg += fmt::format("line {}: {}\n", d.line, d.message);
          if (!msg.empty()) msg.pop_back();
          return msg;
      }()),
      diagnostics_(std::move(diagnostics)) {}

std::vector<uint32_t> AssemblyUnit::words() const {
    std::vector<uint32_t> out((image.size() + 3) / 4, 0);
    for (size_t i = 0; i < image.size(); ++i) out[i / 4] |= uint32_t{image[i]} << (8 * (i % 4));
    return out;
}

namespace {

struct LineError {
    std::string message;
};
struct Unresolved {
    std::string symbol;
};

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '$'; }
bool ident_char(char c) { return ident_start(c) || std::isdigit(static_cast<unsigned char>(c)); }

std::string_view strip_comment(std::string_view line) {
    size_t cut = line.size();
    for (size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '#' || line[i] == ';') {
            cut = i;
            break;
        }
        if (line[i] == '/' && i + 1 < line.size() && line[i + 1] == '/') {
            cut = i;
            break;
        }
    }
    return line.substr(0, cut);
}

std::vector<std::string> split_operands(std::string_view s) {
    std::vector<std::string> out;
    s = trim(s);
    if (s.empty()) return out;
    int depth = 0;
    size_t start = 0;
    for (size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '(') ++depth;
        if (s[i] == ')') --depth;
        if (s[i] == ',' && depth == 0) {
            out.emplace_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    out.emplace_back(trim(s.substr(start)));
    return out;
}

std::optional<uint8_t> parse_register(std::string_view s) {
    static const std::map<std::string, uint8_t> kAbi = [] {
        std::map<std::string, uint8_t> m = {{"zero", 0}, {"ra", 1}, {"sp", 2}, {"gp", 3}, {"tp", 4},
                                            {"t0", 5},   {"t1", 6}, {"t2", 7}, {"s0", 8}, {"fp", 8},
                                            {"s1", 9},   {"t3", 28}, {"t4", 29}, {"t5", 30}, {"t6", 31}};
        for (int i = 0; i < 8; ++i) m["a" + std::to_string(i)] = static_cast<uint8_t>(10 + i);
        for (int i = 2; i < 12; ++i) m["s" + std::to_string(i)] = static_cast<uint8_t>(16 + i);
        for (int i = 0; i < 32; ++i) m["x" + std::to_string(i)] = static_cast<uint8_t>(i);
        return m;
    }();
    auto it = kAbi.find(lower(trim(s)));
    if (it == kAbi.end()) return std::nullopt;
    return it->second;
}

const std::map<std::string, Op>& op_table() {
    static const std::map<std::string, Op> kOps = [] {
        std::map<std::string, Op> m;
        for (int i = 0; i <= static_cast<int>(Op::kSettime); ++i) {
            m[std::string(mnemonic(static_cast<Op>(i)))] = static_cast<Op>(i);
        }
        return m;
    }();
    return kOps;
}

struct Context {
    const std::map<std::string, uint32_t>* labels;
    const std::map<std::string, int64_t>* constants;
    const AsmOptions* options;
    std::vector<MmioReference>* mmio_refs;  // null while sizing
    int line;
};

struct Value {
    int64_t v = 0;
    bool symbolic = false;
};

/// Integer expression evaluator over labels, constants and address macros.
class ExprParser {
   public:
    ExprParser(std::string_view text, const Context& ctx) : s_(text), ctx_(ctx) {}

    Value parse() {
        Value v = parse_or();
        skip_ws();
        if (pos_ != s_.size()) throw LineError{fmt::format("unexpected '{}' in expression", s_.substr(pos_))};
        return v;
    }

   private:
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(std::string_view tok) {
        skip_ws();
        if (s_.substr(pos_, tok.size()) == tok) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }
    static Value combine(Value a, Value b, int64_t v) { return {v, a.symbolic || b.symbolic}; }

    Value parse_or() {
        Value a = parse_xor();
        while (true) {
            skip_ws();
            if (pos_ < s_.size() && s_[pos_] == '|') {
                ++pos_;
                Value b = parse_xor();
                a = combine(a, b, a.v | b.v);
            } else {
                return a;
            }
        }
    }
    Value parse_xor() {
        Value a = parse_and();
        while (eat("^")) {
            Value b = parse_and();
            a = combine(a, b, a.v ^ b.v);
        }
        return a;
    }
    Value parse_and() {
        Value a = parse_shift();
        while (eat("&")) {
            Value b = parse_shift();
            a = combine(a, b, a.v & b.v);
        }
        return a;
    }
    Value parse_shift() {
        Value a = parse_add();
        while (true) {
            if (eat("<<")) {
                Value b = parse_add();
                if (b.v < 0 || b.v > 63) throw LineError{"shift amount out of range"};
                a = combine(a, b, static_cast<int64_t>(static_cast<uint64_t>(a.v) << b.v));
            } else if (eat(">>")) {
                Value b = parse_add();
                if (b.v < 0 || b.v > 63) throw LineError{"shift amount out of range"};
                a = combine(a, b, a.v >> b.v);
            } else {
                return a;
            }
        }
    }
    Value parse_add() {
        Value a = parse_mul();
        while (true) {
            if (eat("+")) {
                Value b = parse_mul();
                a = combine(a, b, a.v + b.v);
            } else if (eat("-")) {
                Value b = parse_mul();
                a = combine(a, b, a.v - b.v);
            } else {
                return a;
            }
        }
    }
    Value parse_mul() {
        Value a = parse_unary();
        while (true) {
            skip_ws();
            if (eat("*")) {
                Value b = parse_unary();
                a = combine(a, b, a.v * b.v);
            } else if (eat("/")) {
                Value b = parse_unary();
                if (b.v == 0) throw LineError{"division by zero"};
                a = combine(a, b, a.v / b.v);
            } else if (pos_ < s_.size() && s_[pos_] == '%' && !lookahead_reloc()) {
                ++pos_;
                Value b = parse_unary();
                if (b.v == 0) throw LineError{"division by zero"};
                a = combine(a, b, a.v % b.v);
            } else {
                return a;
            }
        }
    }
    bool lookahead_reloc() const {
        return s_.substr(pos_, 4) == "%hi(" || s_.substr(pos_, 4) == "%lo(";
    }
    Value parse_unary() {
        if (eat("-")) {
            Value v = parse_unary();
            return {-v.v, v.symbolic};
        }
        if (eat("+")) return parse_unary();
        if (eat("~")) {
            Value v = parse_unary();
            return {~v.v, v.symbolic};
        }
        return parse_primary();
    }
    Value parse_paren_arg() {
        Value v = parse_or();
        if (!eat(")")) throw LineError{"missing ')'"};
        return v;
    }
    Value parse_primary() {
        skip_ws();
        if (pos_ >= s_.size()) throw LineError{"missing operand"};
        if (eat("%hi(")) {
            Value v = parse_paren_arg();
            return {((v.v + 0x800) >> 12) & 0xFFFFF, v.symbolic};
        }
        if (eat("%lo(")) {
            Value v = parse_paren_arg();
            int64_t lo = v.v & 0xFFF;
            if (lo >= 0x800) lo -= 0x1000;
            return {lo, v.symbolic};
        }
        if (eat("(")) return parse_paren_arg();
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) return {parse_number(), false};
        if (c == '\'') {
            if (pos_ + 2 < s_.size() && s_[pos_ + 2] == '\'') {
                const int64_t v = static_cast<unsigned char>(s_[pos_ + 1]);
                pos_ += 3;
                return {v, false};
            }
            throw LineError{"bad character literal"};
        }
        if (ident_start(c)) {
            const size_t start = pos_;
            while (pos_ < s_.size() && ident_char(s_[pos_])) ++pos_;
            const std::string name(s_.substr(start, pos_ - start));
            skip_ws();
            if (pos_ < s_.size() && s_[pos_] == '(') return macro_call(name);
            return symbol(name);
        }
        throw LineError{fmt::format("unexpected '{}' in expression", c)};
    }
    int64_t parse_number() {
        int base = 10;
        if (s_.substr(pos_, 2) == "0x" || s_.substr(pos_, 2) == "0X") {
            base = 16;
            pos_ += 2;
        } else if (s_.substr(pos_, 2) == "0b" || s_.substr(pos_, 2) == "0B") {
            base = 2;
            pos_ += 2;
        }
        uint64_t v = 0;
        size_t digits = 0;
        while (pos_ < s_.size()) {
            const char ch = s_[pos_];
            int d;
            if (ch == '_') {
                ++pos_;
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(ch))) d = ch - '0';
            else if (std::isxdigit(static_cast<unsigned char>(ch))) d = std::tolower(ch) - 'a' + 10;
            else break;
            if (d >= base) throw LineError{fmt::format("bad digit '{}' in number", ch)};
            v = v * static_cast<uint64_t>(base) + static_cast<uint64_t>(d);
            if (v > (uint64_t{1} << 40)) throw LineError{"number too large"};
            ++digits;
            ++pos_;
        }
        if (digits == 0) throw LineError{"malformed number"};
        if (pos_ < s_.size() && ident_char(s_[pos_])) throw LineError{"malformed number"};
        return static_cast<int64_t>(v);
    }
    Value macro_call(const std::string& name) {
        ++pos_;  // '('
        Value arg = parse_paren_arg();
        const auto& macros = address_macros();
        auto it = macros.find(name);
        if (it == macros.end()) throw LineError{fmt::format("unknown address macro '{}'", name)};
        const AddressMacro& m = it->second;
        const int limit = m.is_sg ? ctx_.options->dac_channels : ctx_.options->adc_channels;
        if (arg.v < 0 || arg.v >= limit) {
            throw LineError{fmt::format("{}({}) channel out of range [0, {})", name, arg.v, limit)};
        }
        const uint32_t addr = m.base + static_cast<uint32_t>(arg.v) * m.stride + m.offset;
        if (ctx_.mmio_refs) ctx_.mmio_refs->push_back({ctx_.line, fmt::format("{}({})", name, arg.v), addr});
        return {addr, true};
    }
    Value symbol(const std::string& name) {
        if (auto it = ctx_.constants->find(name); it != ctx_.constants->end()) return {it->second, true};
        if (auto it = ctx_.labels->find(name); it != ctx_.labels->end()) return {it->second, true};
        if (auto it = ctx_.options->predefined.find(name); it != ctx_.options->predefined.end()) {
            return {it->second, true};
        }
        static const std::map<std::string, uint32_t> kBuiltins = mmio_symbols(0, 0);
        if (auto it = kBuiltins.find(name); it != kBuiltins.end()) {
            if (ctx_.mmio_refs && it->second >= kSgBase) ctx_.mmio_refs->push_back({ctx_.line, name, it->second});
            return {it->second, true};
        }
        throw Unresolved{name};
    }

    std::string_view s_;
    size_t pos_ = 0;
    const Context& ctx_;
};

struct Statement {
    int line = 0;
    std::string mnemonic;
    std::vector<std::string> operands;
    uint32_t addr = 0;
    uint32_t size = 0;
};

bool fits_signed(int64_t v, int bits) { return v >= -(int64_t{1} << (bits - 1)) && v < (int64_t{1} << (bits - 1)); }

class Assembler {
   public:
    Assembler(uint32_t origin, const AsmOptions& options) : origin_(origin), options_(options) {}

    AssemblyUnit run(std::string_view text) {
        std::vector<Statement> stmts = pass1(text);
        AssemblyUnit unit;
        unit.origin = origin_;
        unit.image.assign(end_ - origin_, 0);
        for (const Statement& st : stmts) {
            try {
                emit(st, unit);
            } catch (const LineError& e) {
                diag(st.line, e.message);
            } catch (const Unresolved& u) {
                diag(st.line, fmt::format("undefined symbol '{}'", u.symbol));
            }
        }
        if (!diags_.empty()) {
            // Both passes report; present them in source order.
            std::stable_sort(diags_.begin(), diags_.end(),
                             [](const AsmDiagnostic& a, const AsmDiagnostic& b) { return a.line < b.line; });
            throw AssemblyError(diags_);
        }
        unit.labels = labels_;
        unit.constants = constants_;
        unit.mmio_refs = std::move(mmio_refs_);
        return unit;
    }

   private:
    void diag(int line, std::string msg) { diags_.push_back({line, std::move(msg)}); }

    Context ctx(int line, bool record) {
        return Context{&labels_, &constants_, &options_, record ? &mmio_refs_ : nullptr, line};
    }

    Value eval(std::string_view text, int line, bool record) {
        Context c = ctx(line, record);
        ExprParser p(text, c);
        return p.parse();
    }

    std::optional<int64_t> try_eval(std::string_view text, int line) {
        try {
            return eval(text, line, false).v;
        } catch (const Unresolved&) {
            return std::nullopt;
        }
    }

    void define_label(const std::string& name, int line) {
        if (labels_.count(name) || constants_.count(name)) {
            diag(line, fmt::format("duplicate label '{}'", name));
            return;
        }
        labels_[name] = addr_;
    }

    std::vector<Statement> pass1(std::string_view text) {
        std::vector<Statement> out;
        addr_ = origin_;
        end_ = origin_;
        int line_no = 0;
        size_t pos = 0;
        while (pos <= text.size()) {
            size_t nl = text.find('\n', pos);
            if (nl == std::string_view::npos) nl = text.size();
            std::string_view raw = text.substr(pos, nl - pos);
            pos = nl + 1;
            ++line_no;
            try {
                pass1_line(raw, line_no, out);
            } catch (const LineError& e) {
                diag(line_no, e.message);
            } catch (const Unresolved& u) {
                diag(line_no, fmt::format("undefined symbol '{}'", u.symbol));
            }
            if (nl == text.size()) break;
        }
        return out;
    }

    void pass1_line(std::string_view raw, int line_no, std::vector<Statement>& out) {
        std::string_view s = trim(strip_comment(raw));
        // Leading labels.
        while (!s.empty()) {
            size_t i = 0;
            if (!ident_start(s[0])) break;
            while (i < s.size() && ident_char(s[i])) ++i;
            size_t j = i;
            while (j < s.size() && std::isspace(static_cast<unsigned char>(s[j]))) ++j;
            if (j < s.size() && s[j] == ':') {
                define_label(std::string(s.substr(0, i)), line_no);
                s = trim(s.substr(j + 1));
            } else {
                break;
            }
        }
        if (s.empty()) return;
        size_t sp = 0;
        while (sp < s.size() && !std::isspace(static_cast<unsigned char>(s[sp]))) ++sp;
        Statement st;
        st.line = line_no;
        st.mnemonic = lower(s.substr(0, sp));
        st.operands = split_operands(s.substr(sp));
        for (const auto& o : st.operands) {
            if (o.empty()) throw LineError{"empty operand"};
        }

        if (st.mnemonic == ".equ" || st.mnemonic == ".set") {
            expect_count(st, 2);
            const std::string& name = st.operands[0];
            if (name.empty() || !ident_start(name[0]) ||
                !std::all_of(name.begin(), name.end(), [](char c) { return ident_char(c); })) {
                throw LineError{fmt::format("bad symbol name '{}'", name)};
            }
            if (labels_.count(name) || (st.mnemonic == ".equ" && constants_.count(name))) {
                throw LineError{fmt::format("duplicate symbol '{}'", name)};
            }
            constants_[name] = eval(st.operands[1], line_no, false).v;
            return;
        }
        if (st.mnemonic == ".org") {
            expect_count(st, 1);
            const int64_t target = eval(st.operands[0], line_no, false).v;
            if (target < addr_) throw LineError{".org moves the location counter backwards"};
            set_addr(target);
            return;
        }
        if (st.mnemonic == ".align") {
            expect_count(st, 1);
            const int64_t p = eval(st.operands[0], line_no, false).v;
            if (p < 0 || p > 12) throw LineError{".align power out of range [0, 12]"};
            const int64_t a = int64_t{1} << p;
            set_addr((int64_t{addr_} + a - 1) / a * a);
            return;
        }
        if (st.mnemonic == ".space" || st.mnemonic == ".zero") {
            expect_count(st, 1);
            const int64_t n = eval(st.operands[0], line_no, false).v;
            if (n < 0) throw LineError{".space size must be non-negative"};
            set_addr(int64_t{addr_} + n);
            return;
        }
        if (st.mnemonic == ".word") {
            if (st.operands.empty()) throw LineError{".word needs at least one value"};
            if (addr_ % 4 != 0) throw LineError{".word at unaligned address"};
            st.size = 4 * static_cast<uint32_t>(st.operands.size());
        } else if (!st.mnemonic.empty() && st.mnemonic[0] == '.') {
            throw LineError{fmt::format("unknown directive '{}'", st.mnemonic)};
        } else {
            if (addr_ % 4 != 0) throw LineError{"instruction at unaligned address"};
            st.size = instruction_size(st);
        }
        st.addr = addr_;
        out.push_back(st);
        set_addr(int64_t{addr_} + st.size);
    }

    void set_addr(int64_t a) {
        if (a > int64_t{origin_} + kProgSize) throw LineError{"image exceeds program memory"};
        addr_ = static_cast<uint32_t>(a);
        end_ = std::max(end_, addr_);
    }

    uint32_t instruction_size(const Statement& st) {
        if (st.mnemonic == "pulse") return 16;
        if (st.mnemonic == "la") return 8;
        if (st.mnemonic == "li") {
            expect_count(st, 2);
            std::optional<int64_t> v = try_eval(st.operands[1], st.line);
            if (!v || *v < -(int64_t{1} << 31) || *v > 0xFFFFFFFFll) return 8;
            // Values are taken modulo 2^32, so 0xFFFFFFFF is a one-word li of -1.
            const auto s = static_cast<int32_t>(static_cast<uint32_t>(*v));
            return (fits_signed(s, 12) || (s & 0xFFF) == 0) ? 4 : 8;
        }
        if (!op_table().count(st.mnemonic) && !is_pseudo(st.mnemonic)) {
            throw LineError{fmt::format("unknown mnemonic '{}'", st.mnemonic)};
        }
        return 4;
    }

    static bool is_pseudo(const std::string& m) {
        static const std::array<const char*, 22> kPseudo = {
            "nop",  "mv",   "not",  "neg",  "j",    "jr",   "ret",  "call", "beqz", "bnez", "bltz",
            "bgez", "blez", "bgtz", "bgt",  "ble",  "bgtu", "bleu", "seqz", "snez", "sltz", "sgtz"};
        return std::any_of(kPseudo.begin(), kPseudo.end(), [&](const char* p) { return m == p; });
    }

    static void expect_count(const Statement& st, size_t n) {
        if (st.operands.size() != n) {
            throw LineError{fmt::format("'{}' expects {} operand{}, got {}", st.mnemonic, n, n == 1 ? "" : "s",
                                        st.operands.size())};
        }
    }

    uint8_t reg(const std::string& s) {
        auto r = parse_register(s);
        if (!r) throw LineError{fmt::format("expected register, got '{}'", s)};
        return *r;
    }

    int64_t value(const Statement& st, const std::string& s) { return eval(s, st.line, true).v; }

    int64_t ranged(const Statement& st, const std::string& s, int64_t lo, int64_t hi, const char* what) {
        const int64_t v = value(st, s);
        if (v < lo || v > hi) throw LineError{fmt::format("{} {} out of range [{}, {}]", what, v, lo, hi)};
        return v;
    }

    int32_t imm12(const Statement& st, const std::string& s) {
        return static_cast<int32_t>(ranged(st, s, -2048, 2047, "immediate"));
    }

    // Branch/jump target: symbolic expressions are absolute, plain numbers relative.
    int32_t target_offset(const Statement& st, const std::string& s, int bits) {
        const Value v = eval(s, st.line, true);
        const int64_t off = v.symbolic ? v.v - int64_t{st.addr} : v.v;
        if (off % 2 != 0) throw LineError{fmt::format("branch offset {} is not even", off)};
        if (!fits_signed(off, bits)) throw LineError{fmt::format("branch offset {} out of range", off)};
        return static_cast<int32_t>(off);
    }

    // "off(reg)" or "(reg)".
    std::pair<int32_t, uint8_t> mem_operand(const Statement& st, const std::string& s) {
        std::string_view t = trim(s);
        if (t.empty() || t.back() != ')') throw LineError{fmt::format("expected offset(register), got '{}'", s)};
        const size_t open = t.rfind('(');
        if (open == std::string_view::npos) throw LineError{fmt::format("expected offset(register), got '{}'", s)};
        const uint8_t base = reg(std::string(t.substr(open + 1, t.size() - open - 2)));
        const std::string_view off = trim(t.substr(0, open));
        const int32_t imm = off.empty() ? 0 : imm12(st, std::string(off));
        return {imm, base};
    }

    void put(AssemblyUnit& unit, uint32_t addr, uint32_t word) {
        const uint32_t o = addr - origin_;
        for (int i = 0; i < 4; ++i) unit.image[o + i] = static_cast<uint8_t>(word >> (8 * i));
    }

    void put_inst(AssemblyUnit& unit, uint32_t addr, const Instruction& in) {
        if (!options_.rv32m && op_class(in.op) == OpClass::kMulDiv) {
            throw LineError{fmt::format("'{}' needs the M extension", mnemonic(in.op))};
        }
        std::array<uint32_t, 4> w{};
        const int n = encode(in, w);
        for (int i = 0; i < n; ++i) put(unit, addr + 4 * static_cast<uint32_t>(i), w[i]);
    }

    static Instruction make(Op op, uint8_t rd = 0, uint8_t rs1 = 0, uint8_t rs2 = 0, int32_t imm = 0) {
        Instruction in;
        in.op = op;
        in.rd = rd;
        in.rs1 = rs1;
        in.rs2 = rs2;
        in.imm = imm;
        return in;
    }

    void emit_li(AssemblyUnit& unit, const Statement& st, uint8_t rd, int64_t v) {
        if (v < -(int64_t{1} << 31) || v > 0xFFFFFFFFll) throw LineError{fmt::format("li value {} out of 32-bit range", v)};
        const auto u = static_cast<uint32_t>(v);
        if (st.size == 4) {
            const auto s = static_cast<int32_t>(u);
            if (fits_signed(s, 12)) put_inst(unit, st.addr, make(Op::kAddi, rd, 0, 0, s));
            else put_inst(unit, st.addr, make(Op::kLui, rd, 0, 0, s));
            return;
        }
        int32_t lo = static_cast<int32_t>(u & 0xFFF);
        if (lo >= 0x800) lo -= 0x1000;
        const uint32_t hi = (u - static_cast<uint32_t>(lo)) & 0xFFFFF000u;
        put_inst(unit, st.addr, make(Op::kLui, rd, 0, 0, static_cast<int32_t>(hi)));
        put_inst(unit, st.addr + 4, make(Op::kAddi, rd, rd, 0, lo));
    }

    void emit(const Statement& st, AssemblyUnit& unit) {
        const auto& ops = st.operands;
        const std::string& m = st.mnemonic;
        if (m == ".word") {
            for (size_t i = 0; i < ops.size(); ++i) {
                const int64_t v = ranged(st, ops[i], -(int64_t{1} << 31), 0xFFFFFFFFll, ".word value");
                put(unit, st.addr + 4 * static_cast<uint32_t>(i), static_cast<uint32_t>(v));
            }
            return;
        }
        if (m == "li") {
            expect_count(st, 2);
            emit_li(unit, st, reg(ops[0]), value(st, ops[1]));
            return;
        }
        if (m == "la") {
            expect_count(st, 2);
            Statement wide = st;
            wide.size = 8;
            emit_li(unit, wide, reg(ops[0]), value(st, ops[1]));
            return;
        }
        if (m == "pulse") {
            if (ops.size() != 6 && ops.size() != 7) throw LineError{"'pulse' expects id, freq, phase, amp, env, dur[, flags]"};
            Instruction in = make(Op::kPulse);
            in.words = 4;
            in.pulse.id = static_cast<uint8_t>(ranged(st, ops[0], 0, options_.dac_channels - 1, "pulse id"));
            in.pulse.freq = static_cast<uint32_t>(ranged(st, ops[1], -(int64_t{1} << 31), 0xFFFFFFFFll, "frequency word"));
            in.pulse.phase = static_cast<uint32_t>(ranged(st, ops[2], -(int64_t{1} << 31), 0xFFFFFFFFll, "phase word"));
            in.pulse.amp = static_cast<int16_t>(static_cast<uint16_t>(ranged(st, ops[3], -32768, 0xFFFF, "amplitude")));
            in.pulse.env_start = static_cast<uint16_t>(ranged(st, ops[4], 0, 0xFFFF, "envelope start"));
            in.pulse.duration = static_cast<uint16_t>(ranged(st, ops[5], 0, 0xFFFF, "duration"));
            in.pulse.flags = ops.size() == 7 ? static_cast<uint8_t>(ranged(st, ops[6], 0, 15, "flags")) : 0;
            put_inst(unit, st.addr, in);
            return;
        }
        if (is_pseudo(m)) {
            put_inst(unit, st.addr, pseudo(st));
            return;
        }
        const Op op = op_table().at(m);
        Instruction in;
        switch (op_class(op)) {
            case OpClass::kAlu:
            case OpClass::kMulDiv:
                if (op == Op::kLui || op == Op::kAuipc) {
                    expect_count(st, 2);
                    const int64_t v = ranged(st, ops[1], -(int64_t{1} << 19), 0xFFFFF, "upper immediate");
                    in = make(op, reg(ops[0]), 0, 0, static_cast<int32_t>(static_cast<uint32_t>(v & 0xFFFFF) << 12));
                } else if (op == Op::kSlli || op == Op::kSrli || op == Op::kSrai) {
                    expect_count(st, 3);
                    in = make(op, reg(ops[0]), reg(ops[1]), 0, static_cast<int32_t>(ranged(st, ops[2], 0, 31, "shift amount")));
                } else if (parse_register(ops.size() == 3 ? ops[2] : "") ||
                           op_class(op) == OpClass::kMulDiv || is_r_type(op)) {
                    expect_count(st, 3);
                    in = make(op, reg(ops[0]), reg(ops[1]), reg(ops[2]));
                } else {
                    expect_count(st, 3);
                    in = make(op, reg(ops[0]), reg(ops[1]), 0, imm12(st, ops[2]));
                }
                break;
            case OpClass::kBranch:
                expect_count(st, 3);
                in = make(op, 0, reg(ops[0]), reg(ops[1]), target_offset(st, ops[2], 13));
                break;
            case OpClass::kJump:
                if (op == Op::kJal) {
                    if (ops.size() == 1) in = make(op, 1, 0, 0, target_offset(st, ops[0], 21));
                    else {
                        expect_count(st, 2);
                        in = make(op, reg(ops[0]), 0, 0, target_offset(st, ops[1], 21));
                    }
                } else {
                    if (ops.size() == 1) {
                        in = make(op, 1, reg(ops[0]), 0, 0);
                    } else if (ops.size() == 2) {
                        auto [imm, base] = mem_operand(st, ops[1]);
                        in = make(op, reg(ops[0]), base, 0, imm);
                    } else {
                        expect_count(st, 3);
                        in = make(op, reg(ops[0]), reg(ops[1]), 0, imm12(st, ops[2]));
                    }
                }
                break;
            case OpClass::kLoad: {
                expect_count(st, 2);
                auto [imm, base] = mem_operand(st, ops[1]);
                in = make(op, reg(ops[0]), base, 0, imm);
                break;
            }
            case OpClass::kStore: {
                expect_count(st, 2);
                auto [imm, base] = mem_operand(st, ops[1]);
                in = make(op, 0, base, reg(ops[0]), imm);
                break;
            }
            case OpClass::kSystem:
                expect_count(st, 0);
                in = make(op);
                break;
            case OpClass::kSettime:
                expect_count(st, 1);
                in = make(op, 0, reg(ops[0]));
                break;
            case OpClass::kPulse: break;  // handled above
        }
        put_inst(unit, st.addr, in);
    }

    static bool is_r_type(Op op) {
        switch (op) {
            case Op::kAdd: case Op::kSub: case Op::kSll: case Op::kSlt: case Op::kSltu:
            case Op::kXor: case Op::kSrl: case Op::kSra: case Op::kOr: case Op::kAnd:
                return true;
            default: return false;
        }
    }

    Instruction pseudo(const Statement& st) {
        const auto& ops = st.operands;
        const std::string& m = st.mnemonic;
        if (m == "nop") {
            expect_count(st, 0);
            return make(Op::kAddi);
        }
        if (m == "mv") {
            expect_count(st, 2);
            return make(Op::kAddi, reg(ops[0]), reg(ops[1]));
        }
        if (m == "not") {
            expect_count(st, 2);
            return make(Op::kXori, reg(ops[0]), reg(ops[1]), 0, -1);
        }
        if (m == "neg") {
            expect_count(st, 2);
            return make(Op::kSub, reg(ops[0]), 0, reg(ops[1]));
        }
        if (m == "seqz") {
            expect_count(st, 2);
            return make(Op::kSltiu, reg(ops[0]), reg(ops[1]), 0, 1);
        }
        if (m == "snez") {
            expect_count(st, 2);
            return make(Op::kSltu, reg(ops[0]), 0, reg(ops[1]));
        }
        if (m == "sltz") {
            expect_count(st, 2);
            return make(Op::kSlt, reg(ops[0]), reg(ops[1]), 0);
        }
        if (m == "sgtz") {
            expect_count(st, 2);
            return make(Op::kSlt, reg(ops[0]), 0, reg(ops[1]));
        }
        if (m == "j") {
            expect_count(st, 1);
            return make(Op::kJal, 0, 0, 0, target_offset(st, ops[0], 21));
        }
        if (m == "call") {
            expect_count(st, 1);
            return make(Op::kJal, 1, 0, 0, target_offset(st, ops[0], 21));
        }
        if (m == "jr") {
            expect_count(st, 1);
            return make(Op::kJalr, 0, reg(ops[0]));
        }
        if (m == "ret") {
            expect_count(st, 0);
            return make(Op::kJalr, 0, 1);
        }
        // Branch pseudo-instructions.
        struct Zb {
            const char* name;
            Op op;
            bool zero_first;
        };
        static constexpr Zb kZero[] = {{"beqz", Op::kBeq, false}, {"bnez", Op::kBne, false}, {"bltz", Op::kBlt, false},
                                       {"bgez", Op::kBge, false}, {"blez", Op::kBge, true},  {"bgtz", Op::kBlt, true}};
        for (const Zb& z : kZero) {
            if (m == z.name) {
                expect_count(st, 2);
                const uint8_t r = reg(ops[0]);
                const int32_t off = target_offset(st, ops[1], 13);
                return z.zero_first ? make(z.op, 0, 0, r, off) : make(z.op, 0, r, 0, off);
            }
        }
        struct Sw {
            const char* name;
            Op op;
        };
        static constexpr Sw kSwap[] = {{"bgt", Op::kBlt}, {"ble", Op::kBge}, {"bgtu", Op::kBltu}, {"bleu", Op::kBgeu}};
        for (const Sw& s : kSwap) {
            if (m == s.name) {
                expect_count(st, 3);
                return make(s.op, 0, reg(ops[1]), reg(ops[0]), target_offset(st, ops[2], 13));
            }
        }
        throw LineError{fmt::format("unknown mnemonic '{}'", m)};
    }

    uint32_t origin_;
    AsmOptions options_;
    uint32_t addr_ = 0;
    uint32_t end_ = 0;
    std::map<std::string, uint32_t> labels_;
    std::map<std::string, int64_t> constants_;
    std::vector<MmioReference> mmio_refs_;
    std::vector<AsmDiagnostic> diags_;
};

}  // namespace

AssemblyUnit assemble(std::string_view text, uint32_t origin, const AsmOptions& options) {
    if (origin % 4 != 0) throw std::invalid_argument("assembly origin must be word aligned");
    return Assembler(origin, options).run(text);
}

std::string format_symbols(const AssemblyUnit& unit) {
    std::vector<std::pair<uint32_t, std::string>> rows;
    for (const auto& [name, addr] : unit.labels) rows.emplace_back(addr, name);
    std::sort(rows.begin(), rows.end());
    std::string out;
    for (const auto& [addr, name] : rows) out += fmt::format("{} 0x{:08x}\n", name, addr);
    return out;
}

std::vector<MmioReference> unmapped_mmio_refs(const AssemblyUnit& unit, const AddressMap& map) {
    std::vector<MmioReference> out;
    for (const auto& ref : unit.mmio_refs) {
        const Region* r = map.find(ref.address);
        if (r == nullptr) out.push_back(ref);
    }
    return out;
}

}  // namespace qcsoc

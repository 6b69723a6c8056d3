#ifndef QCSOC_ASSEMBLER_H
#define QCSOC_ASSEMBLER_H

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qcsoc/address_map.h"

namespace qcsoc {

struct AsmDiagnostic {
    int line = 0;
    std::string message;
};

class AssemblyError : public std::runtime_error {
   public:
    explicit AssemblyError(std::vector<AsmDiagnostic> diagnostics);
    const std::vector<AsmDiagnostic>& diagnostics() const { return diagnostics_; }

   private:
    std::vector<AsmDiagnostic> diagnostics_;
};

// A use of an address macro or MMIO constant in the source.
struct MmioReference {
    int line = 0;
    std::string name;  // e.g. "RD_RES_ADDR(7)"
    uint32_t address = 0;
};

struct AssemblyUnit {
    uint32_t origin = 0;
    std::vector<uint8_t> image;
    std::map<std::string, uint32_t> labels;
    std::map<std::string, int64_t> constants;  // .equ / .set
    std::vector<MmioReference> mmio_refs;

    std::vector<uint32_t> words() const;
};

struct AsmOptions {
    int dac_channels = 16;
    int adc_channels = 8;
    bool rv32m = true;
    std::map<std::string, int64_t> predefined;
};

/// Two-pass assembler for RV32I(M), pulse/settime and the directives .word,
/// .equ/.set, .org, .space and .align.
///
/// Branch and jump targets written as plain numbers are pc-relative byte
/// offsets; targets that mention a symbol are absolute addresses. Throws
/// AssemblyError listing every diagnostic.
AssemblyUnit assemble(std::string_view text, uint32_t origin = kProgBase, const AsmOptions& options = {});

// `name address` lines, sorted by address then name.
std::string format_symbols(const AssemblyUnit& unit);

// References whose address falls outside every mapped MMIO region.
std::vector<MmioReference> unmapped_mmio_refs(const AssemblyUnit& unit, const AddressMap& map);

struct DisasmOptions {
    bool comments = false;  // append "# address: word" to every line
    bool rv32m = true;
};

/// One line per instruction. Words that do not decode, or whose decoding
/// does not re-encode to the same bits, render as `.word 0x...`.
std::string disassemble(std::span<const uint8_t> image, uint32_t origin = kProgBase, const DisasmOptions& options = {});
std::string disassemble_words(std::span<const uint32_t> words, uint32_t origin = kProgBase,
                              const DisasmOptions& options = {});

}  // namespace qcsoc

#endif  // QCSOC_ASSEMBLER_H

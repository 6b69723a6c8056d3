#ifndef QCSOC_ADDRESS_MAP_H
#define QCSOC_ADDRESS_MAP_H

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace qcsoc {

// Fixed system address map. Peripheral blocks are per channel with a fixed stride.
inline constexpr uint32_t kProgBase = 0x0000'0000;
inline constexpr uint32_t kProgSize = 0x0001'0000;
inline constexpr uint32_t kDataBase = 0x0010'0000;
inline constexpr uint32_t kDataSize = 0x0001'0000;
inline constexpr uint32_t kEnvBase = 0x2000'0000;
inline constexpr uint32_t kEnvStride = 0x0001'0000;
inline constexpr uint32_t kRdBufBase = 0x3000'0000;
inline constexpr uint32_t kRdBufStride = 0x0001'0000;
inline constexpr uint32_t kSgBase = 0x4000'0000;
inline constexpr uint32_t kSgStride = 0x100;
inline constexpr uint32_t kRdBase = 0x4100'0000;
inline constexpr uint32_t kRdStride = 0x100;
inline constexpr uint32_t kSysBase = 0x4200'0000;
inline constexpr uint32_t kSysSize = 0x100;

// Signal-generator register file offsets.
namespace sg_reg {
inline constexpr uint32_t kFreq = 0x00;
inline constexpr uint32_t kFlags = 0x04;  // bank used by the T0 trigger
inline constexpr uint32_t kPhase = 0x08;
inline constexpr uint32_t kAmp = 0x0C;
inline constexpr uint32_t kEnvStart = 0x10;
inline constexpr uint32_t kDuration = 0x14;
inline constexpr uint32_t kT0 = 0x18;
inline constexpr uint32_t kErrFlags = 0x1C;
}  // namespace sg_reg

// Readout-decoder register file offsets.
namespace rd_reg {
inline constexpr uint32_t kDecFreq = 0x00;
inline constexpr uint32_t kDecPhase = 0x04;
inline constexpr uint32_t kWindow = 0x08;
inline constexpr uint32_t kThreshold = 0x0C;
inline constexpr uint32_t kResult = 0x10;
inline constexpr uint32_t kMultiplex = 0x14;
inline constexpr uint32_t kCaptureCtrl = 0x18;
inline constexpr uint32_t kRotation = 0x1C;
inline constexpr uint32_t kIView = 0x20;
inline constexpr uint32_t kQView = 0x24;
inline constexpr uint32_t kErrFlags = 0x28;
}  // namespace rd_reg

namespace sys_reg {
inline constexpr uint32_t kTreg = 0x00;
inline constexpr uint32_t kRefTime = 0x04;
inline constexpr uint32_t kCycleLo = 0x08;
inline constexpr uint32_t kCycleHi = 0x0C;
}  // namespace sys_reg

// CAPTURE_CTRL bits.
inline constexpr uint32_t kCaptureArm = 1u << 0;
inline constexpr uint32_t kCaptureRaw = 1u << 1;

constexpr uint32_t sg_reg_addr(uint32_t ch, uint32_t off) { return kSgBase + ch * kSgStride + off; }
constexpr uint32_t rd_reg_addr(uint32_t ch, uint32_t off) { return kRdBase + ch * kRdStride + off; }
constexpr uint32_t sg_phase_addr(uint32_t ch) { return sg_reg_addr(ch, sg_reg::kPhase); }
constexpr uint32_t rd_res_addr(uint32_t ch) { return rd_reg_addr(ch, rd_reg::kResult); }
constexpr uint32_t multiplex_reg_addr(uint32_t ch) { return rd_reg_addr(ch, rd_reg::kMultiplex); }
constexpr uint32_t env_addr(uint32_t ch) { return kEnvBase + ch * kEnvStride; }
constexpr uint32_t rdbuf_addr(uint32_t ch) { return kRdBufBase + ch * kRdBufStride; }

enum class RegionKind : uint8_t { kRam, kRom, kMmio };

const char* region_kind_name(RegionKind kind);

struct Region {
    uint32_t base = 0;
    uint32_t size = 0;
    RegionKind kind = RegionKind::kRam;
    int target = 0;
    std::string name;

    uint64_t end() const { return uint64_t{base} + size; }
    bool contains(uint32_t addr) const { return addr >= base && addr < end(); }
};

class OverlapError : public std::runtime_error {
   public:
    OverlapError(const Region& added, const Region& existing);
    const Region& existing() const { return existing_; }

   private:
    Region existing_;
};

/// Sorted, non-overlapping set of regions. Routing is a pure function of the map.
class AddressMap {
   public:
    // Throws OverlapError on overlap and std::invalid_argument when the base
    // is not aligned to the size or the size is zero.
    void map_region(Region region);
    void map_region(uint32_t base, uint32_t size, RegionKind kind, int target, std::string name = {});

    const Region* find(uint32_t addr) const;
    const std::vector<Region>& regions() const { return regions_; }

   private:
    std::vector<Region> regions_;
};

/// Named register addresses for the given channel counts, e.g.
/// "SG_PHASE_ADDR(7)" -> 0x40000708. Shared by the assembler and the map dump.
std::map<std::string, uint32_t> mmio_symbols(int dac_channels, int adc_channels);

// Function-like address macros understood by the assembler ("SG_PHASE_ADDR" ...)
// mapped to (block base, stride, register offset).
struct AddressMacro {
    uint32_t base;
    uint32_t stride;
    uint32_t offset;
    bool is_sg;  // channel bound: dac channels for SG, adc otherwise
};
const std::map<std::string, AddressMacro>& address_macros();

std::string format_map_table(const AddressMap& map);
std::string format_map_keyvalue(const AddressMap& map, int dac_channels, int adc_channels);

}  // namespace qcsoc

#endif  // QCSOC_ADDRESS_MAP_H

#include "qcsoc/address_map.h"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace qcsoc {
namespace {

std::string hex32(uint32_t v) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "0x%08x", v);
    return buf;
}

std::string describe(const Region& r) {
    return "'" + r.name + "' [" + hex32(r.base) + ", " + hex32(static_cast<uint32_t>(r.end() - 1)) + "]";
}

}  // namespace

const char* region_kind_name(RegionKind kind) {
    switch (kind) {
        case RegionKind::kRam: return "ram";
        case RegionKind::kRom: return "rom";
        case RegionKind::kMmio: return "mmio";
    }
    return "?";
}

OverlapError::OverlapError(const Region& added, const Region& existing)
    : std::runtime_error("region " + describe(added) + " overlaps " + describe(existing)), existing_(existing) {}

void AddressMap::map_region(Region region) {
    if (region.size == 0) throw std::invalid_argument("region size must be nonzero");
    if (region.base % region.size != 0) {
        throw std::invalid_argument("region " + describe(region) + " base is not aligned to its size");
    }
    if (region.end() > (uint64_t{1} << 32)) throw std::invalid_argument("region wraps the address space");
    auto it = std::lower_bound(regions_.begin(), regions_.end(), region.base,
                               [](const Region& r, uint32_t base) { return r.base < base; });
    if (it != regions_.end() && uint64_t{it->base} < region.end()) throw OverlapError(region, *it);
    if (it != regions_.begin()) {
        const Region& prev = *(it - 1);
        if (prev.end() > region.base) throw OverlapError(region, prev);
    }
    regions_.insert(it, std::move(region));
}

void AddressMap::map_region(uint32_t base, uint32_t size, RegionKind kind, int target, std::string name) {
    map_region(Region{base, size, kind, target, std::move(name)});
}

const Region* AddressMap::find(uint32_t addr) const {
    auto it = std::upper_bound(regions_.begin(), regions_.end(), addr,
                               [](uint32_t a, const Region& r) { return a < r.base; });
    if (it == regions_.begin()) return nullptr;
    --it;
    return it->contains(addr) ? &*it : nullptr;
}

const std::map<std::string, AddressMacro>& address_macros() {
    static const std::map<std::string, AddressMacro> kMacros = {
        {"SG_FREQ_ADDR", {kSgBase, kSgStride, sg_reg::kFreq, true}},
        {"SG_FLAGS_ADDR", {kSgBase, kSgStride, sg_reg::kFlags, true}},
        {"SG_PHASE_ADDR", {kSgBase, kSgStride, sg_reg::kPhase, true}},
        {"SG_AMP_ADDR", {kSgBase, kSgStride, sg_reg::kAmp, true}},
        {"SG_ENV_START_ADDR", {kSgBase, kSgStride, sg_reg::kEnvStart, true}},
        {"SG_DURATION_ADDR", {kSgBase, kSgStride, sg_reg::kDuration, true}},
        {"SG_T0_ADDR", {kSgBase, kSgStride, sg_reg::kT0, true}},
        {"SG_ERRFLAGS_ADDR", {kSgBase, kSgStride, sg_reg::kErrFlags, true}},
        {"SG_BASE_ADDR", {kSgBase, kSgStride, 0, true}},
        {"ENV_ADDR", {kEnvBase, kEnvStride, 0, true}},
        {"RD_DEC_FREQ_ADDR", {kRdBase, kRdStride, rd_reg::kDecFreq, false}},
        {"RD_DEC_PHASE_ADDR", {kRdBase, kRdStride, rd_reg::kDecPhase, false}},
        {"RD_WINDOW_ADDR", {kRdBase, kRdStride, rd_reg::kWindow, false}},
        {"RD_THRESHOLD_ADDR", {kRdBase, kRdStride, rd_reg::kThreshold, false}},
        {"RD_RES_ADDR", {kRdBase, kRdStride, rd_reg::kResult, false}},
        {"MULTIPLEX_REG_ADDR", {kRdBase, kRdStride, rd_reg::kMultiplex, false}},
        {"RD_CAPTURE_CTRL_ADDR", {kRdBase, kRdStride, rd_reg::kCaptureCtrl, false}},
        {"RD_ROTATION_ADDR", {kRdBase, kRdStride, rd_reg::kRotation, false}},
        {"RD_I_ADDR", {kRdBase, kRdStride, rd_reg::kIView, false}},
        {"RD_Q_ADDR", {kRdBase, kRdStride, rd_reg::kQView, false}},
        {"RD_ERRFLAGS_ADDR", {kRdBase, kRdStride, rd_reg::kErrFlags, false}},
        {"RD_BASE_ADDR", {kRdBase, kRdStride, 0, false}},
        {"RDBUF_ADDR", {kRdBufBase, kRdBufStride, 0, false}},
    };
    return kMacros;
}

std::map<std::string, uint32_t> mmio_symbols(int dac_channels, int adc_channels) {
    std::map<std::string, uint32_t> out;
    for (const auto& [name, m] : address_macros()) {
        const int n = m.is_sg ? dac_channels : adc_channels;
        for (int ch = 0; ch < n; ++ch) {
            out[name + "(" + std::to_string(ch) + ")"] = m.base + static_cast<uint32_t>(ch) * m.stride + m.offset;
        }
    }
    out["PROG_BASE"] = kProgBase;
    out["DATA_BASE"] = kDataBase;
    out["ENV_BASE"] = kEnvBase;
    out["RDBUF_BASE"] = kRdBufBase;
    out["SG_BASE"] = kSgBase;
    out["RD_BASE"] = kRdBase;
    out["SYS_BASE"] = kSysBase;
    out["SYS_TREG_ADDR"] = kSysBase + sys_reg::kTreg;
    out["SYS_REFTIME_ADDR"] = kSysBase + sys_reg::kRefTime;
    out["SYS_CYCLE_LO_ADDR"] = kSysBase + sys_reg::kCycleLo;
    out["SYS_CYCLE_HI_ADDR"] = kSysBase + sys_reg::kCycleHi;
    return out;
}

std::string format_map_table(const AddressMap& map) {
    std::ostringstream os;
    char line[160];
    std::snprintf(line, sizeof(line), "%-12s %-12s %-10s %-5s %s\n", "base", "end", "size", "kind", "name");
    os << line;
    for (const Region& r : map.regions()) {
        std::snprintf(line, sizeof(line), "0x%08x   0x%08x   0x%-8x %-5s %s\n", r.base,
                      static_cast<uint32_t>(r.end() - 1), r.size, region_kind_name(r.kind), r.name.c_str());
        os << line;
    }
    return os.str();
}

std::string format_map_keyvalue(const AddressMap& map, int dac_channels, int adc_channels) {
    std::ostringstream os;
    for (const Region& r : map.regions()) {
        os << "region." << r.name << "=" << hex32(r.base) << "," << hex32(r.size) << "," << region_kind_name(r.kind)
           << "\n";
    }
    for (const auto& [name, addr] : mmio_symbols(dac_channels, adc_channels)) {
        os << name << "=" << hex32(addr) << "\n";
    }
    return os.str();
}

}  // namespace qcsoc

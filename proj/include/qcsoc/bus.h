#ifndef QCSOC_BUS_H
#define QCSOC_BUS_H

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "qcsoc/address_map.h"

namespace qcsoc {

enum class BusStatus : uint8_t {
    kOk,
    kFault,  // unmapped, misaligned, out of bounds, or unsupported width
    kBusy,   // target applied back-pressure; retry next cycle
};

struct BusResult {
    BusStatus status = BusStatus::kOk;
    uint32_t value = 0;
};

/// A bus target. Offsets are relative to the region base; size is 1, 2 or 4.
class Device {
   public:
    virtual ~Device() = default;
    virtual BusStatus read(uint32_t offset, int size, uint32_t& value) = 0;
    virtual BusStatus write(uint32_t offset, int size, uint32_t value) = 0;
};

/// Byte-addressed little-endian storage. A limit below the region size
/// faults accesses past it.
class MemoryDevice : public Device {
   public:
    MemoryDevice(size_t bytes, bool writable);

    BusStatus read(uint32_t offset, int size, uint32_t& value) override;
    BusStatus write(uint32_t offset, int size, uint32_t value) override;

    std::span<uint8_t> bytes() { return bytes_; }
    std::span<const uint8_t> bytes() const { return bytes_; }

   private:
    std::vector<uint8_t> bytes_;
    bool writable_;
};

/// Base for word-only register files. Sub-word access faults.
class RegisterDevice : public Device {
   public:
    BusStatus read(uint32_t offset, int size, uint32_t& value) final;
    BusStatus write(uint32_t offset, int size, uint32_t value) final;

   protected:
    virtual BusStatus read_register(uint32_t offset, uint32_t& value) = 0;
    virtual BusStatus write_register(uint32_t offset, uint32_t value) = 0;
};

/// Single-master interconnect routing by address map.
class Bus {
   public:
    // Registers a device and returns its target id.
    int attach(std::shared_ptr<Device> device);
    void map_region(uint32_t base, uint32_t size, RegionKind kind, int target, std::string name = {});

    BusResult read(uint32_t addr, int size);
    BusStatus write(uint32_t addr, int size, uint32_t value);
    BusResult read32(uint32_t addr) { return read(addr, 4); }
    BusStatus write32(uint32_t addr, uint32_t value) { return write(addr, 4, value); }

    const AddressMap& map() const { return map_; }
    const Region* region_at(uint32_t addr) const { return map_.find(addr); }
    Device* device(int target) { return devices_.at(target).get(); }

   private:
    AddressMap map_;
    std::vector<std::shared_ptr<Device>> devices_;
};

}  // namespace qcsoc

#endif  // QCSOC_BUS_H

#include "qcsoc/bus.h"

#include <stdexcept>

namespace qcsoc {

MemoryDevice::MemoryDevice(size_t bytes, bool writable) : bytes_(bytes, 0), writable_(writable) {}

BusStatus MemoryDevice::read(uint32_t offset, int size, uint32_t& value) {
    if (uint64_t{offset} + static_cast<uint64_t>(size) > bytes_.size()) return BusStatus::kFault;
    uint32_t v = 0;
    for (int i = 0; i < size; ++i) v |= uint32_t{bytes_[offset + i]} << (8 * i);
    value = v;
    return BusStatus::kOk;
}

BusStatus MemoryDevice::write(uint32_t offset, int size, uint32_t value) {
    if (!writable_) return BusStatus::kFault;
    if (uint64_t{offset} + static_cast<uint64_t>(size) > bytes_.size()) return BusStatus::kFault;
    for (int i = 0; i < size; ++i) bytes_[offset + i] = static_cast<uint8_t>(value >> (8 * i));
    return BusStatus::kOk;
}

BusStatus RegisterDevice::read(uint32_t offset, int size, uint32_t& value) {
    if (size != 4) return BusStatus::kFault;
    return read_register(offset, value);
}

BusStatus RegisterDevice::write(uint32_t offset, int size, uint32_t value) {
    if (size != 4) return BusStatus::kFault;
    return write_register(offset, value);
}

int Bus::attach(std::shared_ptr<Device> device) {
    if (!device) throw std::invalid_argument("null bus device");
    devices_.push_back(std::move(device));
    return static_cast<int>(devices_.size()) - 1;
}

void Bus::map_region(uint32_t base, uint32_t size, RegionKind kind, int target, std::string name) {
    if (target < 0 || static_cast<size_t>(target) >= devices_.size()) {
        throw std::invalid_argument("region target is not an attached device");
    }
    map_.map_region(base, size, kind, target, std::move(name));
}

BusResult Bus::read(uint32_t addr, int size) {
    if (addr % static_cast<uint32_t>(size) != 0) return {BusStatus::kFault, 0};
    const Region* r = map_.find(addr);
    if (r == nullptr || uint64_t{addr} + static_cast<uint64_t>(size) > r->end()) return {BusStatus::kFault, 0};
    BusResult out;
    out.status = devices_[r->target]->read(addr - r->base, size, out.value);
    return out;
}

BusStatus Bus::write(uint32_t addr, int size, uint32_t value) {
    if (addr % static_cast<uint32_t>(size) != 0) return BusStatus::kFault;
    const Region* r = map_.find(addr);
    if (r == nullptr || uint64_t{addr} + static_cast<uint64_t>(size) > r->end()) return BusStatus::kFault;
    if (r->kind == RegionKind::kRom) return BusStatus::kFault;
    return devices_[r->target]->write(addr - r->base, size, value);
}

}  // namespace qcsoc

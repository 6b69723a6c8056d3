#include "qcsoc/soc.h"

#include <algorithm>
#include <cstring>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace qcsoc {

// ---------------------------------------------------------------------------
// SystemConfig

SystemConfig SystemConfig::defaults() {
    SystemConfig cfg;
    cfg.normalize();
    return cfg;
}

void SystemConfig::normalize() {
    if (dac_channels > 0) generators.resize(static_cast<size_t>(dac_channels));
    if (adc_channels > 0) decoders.resize(static_cast<size_t>(adc_channels));
    for (auto& g : generators) g.samples_per_cycle = dac_samples_per_cycle;
    for (auto& d : decoders) d.samples_per_cycle = adc_samples_per_cycle;
}

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

void check_trig(const TrigBackend& t, const std::string& field) {
    if (t.kind == TrigKind::kLut) require(t.param >= 4 && t.param <= 20, field + ": lut table bits must be in [4, 20]");
    else require(t.param >= 4 && t.param <= 30, field + ": cordic iterations must be in [4, 30]");
}

}  // namespace

void SystemConfig::validate() const {
    require(clock_hz > 0, "system_clock_hz must be positive");
    require(dac_channels >= 1 && dac_channels <= 32, "dac_channels must be in [1, 32]");
    require(adc_channels >= 1 && adc_channels <= 32, "adc_channels must be in [1, 32]");
    require(dac_samples_per_cycle >= 1 && dac_samples_per_cycle <= 64, "samples_per_cycle_dac must be in [1, 64]");
    require(adc_samples_per_cycle >= 1 && adc_samples_per_cycle <= 64, "samples_per_cycle_adc must be in [1, 64]");
    require(qubits_per_cpu >= 1 && qubits_per_cpu <= dac_channels, "qubits_per_cpu must be in [1, dac_channels]");
    require(generators.size() == static_cast<size_t>(dac_channels), "channels.dac: one block per DAC channel required");
    require(decoders.size() == static_cast<size_t>(adc_channels), "channels.adc: one block per ADC channel required");
    for (size_t i = 0; i < generators.size(); ++i) {
        const auto& g = generators[i];
        const std::string f = fmt::format("channels.dac[{}]", i);
        require(g.samples_per_cycle == dac_samples_per_cycle, f + ".samples_per_cycle disagrees with samples_per_cycle_dac");
        require(g.envelope_capacity >= 1 && g.envelope_capacity <= kEnvStride / 2,
                f + ".envelope_capacity must be in [1, 32768]");
        require(g.fifo_depth >= 1 && g.fifo_depth <= 4096, f + ".fifo_depth must be in [1, 4096]");
        for (uint32_t l : g.port_latency) require(l <= 1024, f + ".latency entries must be <= 1024");
        check_trig(g.trig, f + ".trig");
    }
    for (size_t i = 0; i < decoders.size(); ++i) {
        const auto& d = decoders[i];
        const std::string f = fmt::format("channels.adc[{}]", i);
        require(d.samples_per_cycle == adc_samples_per_cycle, f + ".samples_per_cycle disagrees with samples_per_cycle_adc");
        require(!d.readout_buffer || (d.readout_buffer_capacity >= 1 && d.readout_buffer_capacity <= kRdBufStride / 2),
                f + ".readout_buffer.capacity must be in [1, 32768]");
        check_trig(d.trig, f + ".trig");
    }
    if (plant_enabled) {
        require(dac_samples_per_cycle % adc_samples_per_cycle == 0,
                "plant needs samples_per_cycle_dac to be a multiple of samples_per_cycle_adc");
        require(plant.drive_channel >= 0 && plant.drive_channel < dac_channels, "plant.drive_channel out of range");
        require(plant.readout_channel >= 0 && plant.readout_channel < dac_channels, "plant.readout_channel out of range");
        require(plant.drive_channel != plant.readout_channel, "plant drive and readout channels must differ");
        require(plant.adc_channel >= 0 && plant.adc_channel < adc_channels, "plant.adc_channel out of range");
        require(plant.noise_sigma >= 0, "plant.noise_sigma must be non-negative");
        require(plant.delay <= 1u << 20, "plant.delay must be <= 2^20");
    }
}

// ---------------------------------------------------------------------------
// Events

const char* event_kind_name(EventKind kind) {
    switch (kind) {
        case EventKind::kInstruction: return "instr";
        case EventKind::kStall: return "stall";
        case EventKind::kPulseScheduled: return "pulse";
        case EventKind::kPulseDropped: return "pulse-dropped";
        case EventKind::kArm: return "arm";
        case EventKind::kResultValid: return "result";
        case EventKind::kMuxWrite: return "mux";
        case EventKind::kCollapse: return "collapse";
        case EventKind::kHalt: return "halt";
    }
    return "?";
}

std::string format_event(const Event& e) {
    switch (e.kind) {
        case EventKind::kInstruction:
            return fmt::format("{} instr pc=0x{:08x} {}", e.cycle, e.a, mnemonic(static_cast<Op>(e.b)));
        case EventKind::kStall: return fmt::format("{} stall pc=0x{:08x}", e.cycle, e.a);
        case EventKind::kPulseScheduled:
            return fmt::format("{} pulse ch={} t0={} bank={}", e.cycle, e.channel, e.a, e.b);
        case EventKind::kPulseDropped:
            return fmt::format("{} pulse-dropped ch={} t0={} status={}", e.cycle, e.channel, e.a, e.b);
        case EventKind::kArm: return fmt::format("{} arm ch={} t_start={} window={}", e.cycle, e.channel, e.a, e.b);
        case EventKind::kResultValid: return fmt::format("{} result ch={} value=0x{:08x}", e.cycle, e.channel, e.a);
        case EventKind::kMuxWrite: return fmt::format("{} mux ch={} bank={}", e.cycle, e.channel, e.a);
        case EventKind::kCollapse: return fmt::format("{} collapse state={}", e.cycle, e.a);
        case EventKind::kHalt:
            return fmt::format("{} halt {} exit={}", e.cycle, halt_reason_name(static_cast<HaltReason>(e.a)),
                               static_cast<int32_t>(e.b));
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Devices

// RAM that remembers the byte range written since the last restore.
class Soc::DataRam : public MemoryDevice {
   public:
    explicit DataRam(size_t bytes) : MemoryDevice(bytes, true) {}

    BusStatus write(uint32_t offset, int size, uint32_t value) override {
        const BusStatus st = MemoryDevice::write(offset, size, value);
        if (st == BusStatus::kOk) mark(offset, static_cast<uint32_t>(size));
        return st;
    }
    void mark(uint32_t offset, uint32_t len) {
        dirty_lo_ = std::min(dirty_lo_, offset);
        dirty_hi_ = std::max(dirty_hi_, offset + len);
    }
    void restore(const std::vector<uint8_t>& snapshot) {
        if (dirty_lo_ < dirty_hi_) {
            std::memcpy(bytes().data() + dirty_lo_, snapshot.data() + dirty_lo_, dirty_hi_ - dirty_lo_);
        }
        dirty_lo_ = UINT32_MAX;
        dirty_hi_ = 0;
    }

   private:
    uint32_t dirty_lo_ = UINT32_MAX;
    uint32_t dirty_hi_ = 0;
};

// Little-endian byte view of a sample vector owned by a peripheral.
class Soc::SpanDevice : public Device {
   public:
    SpanDevice(std::vector<int16_t>* samples, bool writable) : samples_(samples), writable_(writable) {}

    BusStatus read(uint32_t offset, int size, uint32_t& value) override {
        if (uint64_t{offset} + static_cast<uint64_t>(size) > samples_->size() * 2) return BusStatus::kFault;
        uint32_t v = 0;
        for (int i = 0; i < size; ++i) v |= uint32_t{byte(offset + i)} << (8 * i);
        value = v;
        return BusStatus::kOk;
    }
    BusStatus write(uint32_t offset, int size, uint32_t value) override {
        if (!writable_) return BusStatus::kFault;
        return poke(offset, size, value);
    }
    BusStatus poke(uint32_t offset, int size, uint32_t value) {
        if (uint64_t{offset} + static_cast<uint64_t>(size) > samples_->size() * 2) return BusStatus::kFault;
        for (int i = 0; i < size; ++i) {
            const uint32_t o = offset + i;
            auto u = static_cast<uint16_t>((*samples_)[o / 2]);
            const auto b = static_cast<uint16_t>((value >> (8 * i)) & 0xFF);
            u = (o % 2 == 0) ? static_cast<uint16_t>((u & 0xFF00) | b) : static_cast<uint16_t>((u & 0x00FF) | (b << 8));
            (*samples_)[o / 2] = static_cast<int16_t>(u);
        }
        return BusStatus::kOk;
    }

   private:
    uint8_t byte(uint32_t o) const {
        const auto u = static_cast<uint16_t>((*samples_)[o / 2]);
        return static_cast<uint8_t>(o % 2 == 0 ? u & 0xFF : u >> 8);
    }

    std::vector<int16_t>* samples_;
    bool writable_;
};

class Soc::SgRegisters : public RegisterDevice {
   public:
    SgRegisters(Soc* soc, int ch) : soc_(soc), ch_(ch) {}

    void reset() {
        params_ = PulseParams{};
        flags_ = 0;
    }

   protected:
    BusStatus read_register(uint32_t offset, uint32_t& value) override {
        SignalGenerator& g = soc_->generator(ch_);
        switch (offset) {
            case sg_reg::kFreq: value = params_.freq; break;
            case sg_reg::kFlags: value = flags_; break;
            case sg_reg::kPhase: value = params_.phase; break;
            case sg_reg::kAmp: value = static_cast<uint16_t>(params_.amp); break;
            case sg_reg::kEnvStart: value = params_.env_start; break;
            case sg_reg::kDuration: value = params_.duration; break;
            case sg_reg::kT0: value = soc_->cpu_.state().treg; break;
            case sg_reg::kErrFlags: value = g.error_flags(); break;
            default: return BusStatus::kFault;
        }
        return BusStatus::kOk;
    }

    BusStatus write_register(uint32_t offset, uint32_t value) override {
        SignalGenerator& g = soc_->generator(ch_);
        switch (offset) {
            case sg_reg::kFreq: params_.freq = value; break;
            case sg_reg::kFlags: flags_ = value & 0xF; break;
            case sg_reg::kPhase: params_.phase = value; break;
            case sg_reg::kAmp: params_.amp = static_cast<int16_t>(value & 0xFFFF); break;
            case sg_reg::kEnvStart: params_.env_start = static_cast<uint16_t>(value); break;
            case sg_reg::kDuration: params_.duration = static_cast<uint16_t>(value); break;
            case sg_reg::kT0:
                soc_->cpu_.state().treg = value;
                return soc_->schedule(ch_, static_cast<int>(flags_ & 1u), params_, value);
            case sg_reg::kErrFlags: g.clear_error_flags(value); break;
            default: return BusStatus::kFault;
        }
        return BusStatus::kOk;
    }

   private:
    Soc* soc_;
    int ch_;
    PulseParams params_;
    uint32_t flags_ = 0;
};

class Soc::RdRegisters : public RegisterDevice {
   public:
    RdRegisters(Soc* soc, int ch) : soc_(soc), ch_(ch) {}

    void reset() {
        settings_ = DecoderSettings{};
        capture_ctrl_ = 0;
    }

   protected:
    BusStatus read_register(uint32_t offset, uint32_t& value) override {
        const Decoder& d = soc_->decoder(ch_);
        switch (offset) {
            case rd_reg::kDecFreq: value = settings_.freq; break;
            case rd_reg::kDecPhase: value = settings_.phase; break;
            case rd_reg::kWindow: value = settings_.window; break;
            case rd_reg::kThreshold: value = static_cast<uint32_t>(settings_.threshold); break;
            case rd_reg::kResult: value = d.read_result(); break;
            case rd_reg::kMultiplex: value = mux_target() ? mux_target()->multiplex() : 0; break;
            case rd_reg::kCaptureCtrl: value = (d.armed() ? kCaptureArm : 0u) | (capture_ctrl_ & kCaptureRaw); break;
            case rd_reg::kRotation: value = settings_.rotation; break;
            case rd_reg::kIView: value = static_cast<uint32_t>(d.i_view()); break;
            case rd_reg::kQView: value = static_cast<uint32_t>(d.q_view()); break;
            case rd_reg::kErrFlags: value = d.error_flags(); break;
            default: return BusStatus::kFault;
        }
        return BusStatus::kOk;
    }

    BusStatus write_register(uint32_t offset, uint32_t value) override {
        Decoder& d = soc_->decoder(ch_);
        switch (offset) {
            case rd_reg::kDecFreq: settings_.freq = value; break;
            case rd_reg::kDecPhase: settings_.phase = value; break;
            case rd_reg::kWindow: settings_.window = value; break;
            case rd_reg::kThreshold: settings_.threshold = static_cast<int32_t>(value); break;
            case rd_reg::kRotation: settings_.rotation = value; break;
            case rd_reg::kResult:
            case rd_reg::kIView:
            case rd_reg::kQView: d.raise(rd_err::kReadOnlyWrite); break;
            case rd_reg::kMultiplex:
                if (SignalGenerator* g = mux_target()) {
                    g->set_multiplex(value);
                    soc_->log(EventKind::kMuxWrite, ch_, value & 1u);
                }
                break;
            case rd_reg::kCaptureCtrl:
                capture_ctrl_ = value;
                if (value & kCaptureArm) {
                    const uint32_t t_start = soc_->cpu_.state().treg;
                    d.arm(settings_, t_start, soc_->cycle(), (value & kCaptureRaw) != 0);
                    soc_->log(EventKind::kArm, ch_, t_start, settings_.window);
                }
                break;
            case rd_reg::kErrFlags: d.clear_error_flags(value); break;
            default: return BusStatus::kFault;
        }
        return BusStatus::kOk;
    }

   private:
    // MULTIPLEX of decoder block i selects the bank of signal generator i.
    SignalGenerator* mux_target() {
        return ch_ < soc_->cfg_.dac_channels ? &soc_->generator(ch_) : nullptr;
    }

    Soc* soc_;
    int ch_;
    DecoderSettings settings_;
    uint32_t capture_ctrl_ = 0;
};

class Soc::SysRegisters : public RegisterDevice {
   public:
    explicit SysRegisters(Soc* soc) : soc_(soc) {}

   protected:
    BusStatus read_register(uint32_t offset, uint32_t& value) override {
        switch (offset) {
            case sys_reg::kTreg: value = soc_->cpu_.state().treg; break;
            case sys_reg::kRefTime: value = soc_->ref_time(); break;
            case sys_reg::kCycleLo: value = static_cast<uint32_t>(soc_->cycle()); break;
            case sys_reg::kCycleHi: value = static_cast<uint32_t>(soc_->cycle() >> 32); break;
            default: return BusStatus::kFault;
        }
        return BusStatus::kOk;
    }
    BusStatus write_register(uint32_t offset, uint32_t value) override {
        if (offset != sys_reg::kTreg) return BusStatus::kFault;
        soc_->cpu_.state().treg = value;
        return BusStatus::kOk;
    }

   private:
    Soc* soc_;
};

// ---------------------------------------------------------------------------
// Soc

Soc::Soc(SystemConfig cfg) : cfg_(std::move(cfg)), cpu_(cfg_.pipeline, cfg_.rv32m) {
    cfg_.validate();
    prog_ = std::make_shared<DataRam>(kProgSize);
    data_ = std::make_shared<DataRam>(kDataSize);
    bus_.map_region(kProgBase, kProgSize, RegionKind::kRam, bus_.attach(prog_), "PROG");
    bus_.map_region(kDataBase, kDataSize, RegionKind::kRam, bus_.attach(data_), "DATA");

    for (int ch = 0; ch < cfg_.dac_channels; ++ch) {
        generators_.push_back(std::make_unique<SignalGenerator>(cfg_.generators[ch]));
        auto env = std::make_shared<SpanDevice>(&generators_.back()->envelope(), true);
        bus_.map_region(env_addr(ch), kEnvStride, RegionKind::kRam, bus_.attach(env), fmt::format("ENV({})", ch));
        sg_regs_.push_back(std::make_shared<SgRegisters>(this, ch));
        bus_.map_region(sg_reg_addr(ch, 0), kSgStride, RegionKind::kMmio, bus_.attach(sg_regs_.back()),
                        fmt::format("SG({})", ch));
    }
    for (int ch = 0; ch < cfg_.adc_channels; ++ch) {
        decoders_.push_back(std::make_unique<Decoder>(cfg_.decoders[ch]));
        if (cfg_.decoders[ch].readout_buffer) {
            // The decoder never reallocates its buffer, so the view stays valid.
            auto dev = std::make_shared<SpanDevice>(decoders_.back()->mutable_readout_buffer(), false);
            bus_.map_region(rdbuf_addr(ch), kRdBufStride, RegionKind::kRom, bus_.attach(dev),
                            fmt::format("RDBUF({})", ch));
        }
        rd_regs_.push_back(std::make_shared<RdRegisters>(this, ch));
        bus_.map_region(rd_reg_addr(ch, 0), kRdStride, RegionKind::kMmio, bus_.attach(rd_regs_.back()),
                        fmt::format("RD({})", ch));
    }
    bus_.map_region(kSysBase, kSysSize, RegionKind::kMmio, bus_.attach(std::make_shared<SysRegisters>(this)), "SYS");

    adc_.assign(static_cast<size_t>(cfg_.adc_channels),
                std::vector<int16_t>(static_cast<size_t>(cfg_.adc_samples_per_cycle), 0));
    if (cfg_.plant_enabled) {
        plant_ = std::make_unique<QubitPlant>(cfg_.plant, cfg_.dac_samples_per_cycle, cfg_.adc_samples_per_cycle);
    }
    snapshot_memory();
}

Soc::~Soc() = default;

void Soc::host_write(uint32_t addr, std::span<const uint8_t> bytes) {
    for (size_t i = 0; i < bytes.size(); ++i) {
        const uint32_t a = addr + static_cast<uint32_t>(i);
        const Region* r = bus_.region_at(a);
        if (r == nullptr || r->kind == RegionKind::kMmio) {
            throw std::out_of_range(fmt::format("host write to unmapped or MMIO address 0x{:08x}", a));
        }
        Device* dev = bus_.device(r->target);
        BusStatus st;
        if (auto* span_dev = dynamic_cast<SpanDevice*>(dev)) st = span_dev->poke(a - r->base, 1, bytes[i]);
        else st = dev->write(a - r->base, 1, bytes[i]);
        if (st != BusStatus::kOk) throw std::out_of_range(fmt::format("host write past end of {} at 0x{:08x}", r->name, a));
    }
}

std::vector<uint8_t> Soc::host_read(uint32_t addr, size_t len) {
    std::vector<uint8_t> out(len);
    for (size_t i = 0; i < len; ++i) {
        const uint32_t a = addr + static_cast<uint32_t>(i);
        const Region* r = bus_.region_at(a);
        if (r == nullptr || r->kind == RegionKind::kMmio) {
            throw std::out_of_range(fmt::format("host read from unmapped or MMIO address 0x{:08x}", a));
        }
        uint32_t v = 0;
        if (bus_.device(r->target)->read(a - r->base, 1, v) != BusStatus::kOk) {
            throw std::out_of_range(fmt::format("host read past end of {} at 0x{:08x}", r->name, a));
        }
        out[i] = static_cast<uint8_t>(v);
    }
    return out;
}

void Soc::load_program(std::span<const uint8_t> image, uint32_t origin) {
    if (uint64_t{origin} + image.size() > uint64_t{kProgBase} + kProgSize || origin < kProgBase) {
        throw std::out_of_range("program image does not fit in program RAM");
    }
    host_write(origin, image);
    snapshot_memory();
}

void Soc::load_program(std::span<const uint32_t> words, uint32_t origin) {
    std::vector<uint8_t> bytes;
    bytes.reserve(words.size() * 4);
    for (uint32_t w : words) {
        for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<uint8_t>(w >> (8 * i)));
    }
    load_program(std::span<const uint8_t>(bytes), origin);
}

void Soc::set_envelope(int channel, std::span<const int16_t> samples, uint32_t start) {
    auto& env = generator(channel).envelope();
    if (uint64_t{start} + samples.size() > env.size()) throw std::out_of_range("envelope exceeds channel capacity");
    std::copy(samples.begin(), samples.end(), env.begin() + start);
}

void Soc::snapshot_memory() {
    data_snapshot_.assign(data_->bytes().begin(), data_->bytes().end());
    prog_snapshot_.assign(prog_->bytes().begin(), prog_->bytes().end());
    data_->restore(data_snapshot_);
    prog_->restore(prog_snapshot_);
}

void Soc::reset(uint64_t plant_seed) {
    cpu_ = Cpu(cfg_.pipeline, cfg_.rv32m);
    data_->restore(data_snapshot_);
    prog_->restore(prog_snapshot_);
    for (auto& g : generators_) g->reset();
    for (auto& d : decoders_) d->reset();
    for (auto& r : sg_regs_) r->reset();
    for (auto& r : rd_regs_) r->reset();
    for (auto& a : adc_) std::fill(a.begin(), a.end(), 0);
    if (cfg_.plant_enabled) {
        plant_ = std::make_unique<QubitPlant>(cfg_.plant, cfg_.dac_samples_per_cycle, cfg_.adc_samples_per_cycle);
        plant_->seed(plant_seed);
    }
    events_.clear();
    waveform_.clear();
}

std::span<const int16_t> Soc::adc_samples(int ch) const { return adc_.at(ch); }

void Soc::set_trace_channels(std::vector<int> channels) {
    for (int ch : channels) {
        if (ch < 0 || ch >= cfg_.dac_channels) throw std::out_of_range(fmt::format("trace channel {} out of range", ch));
    }
    trace_channels_ = std::move(channels);
}

void Soc::log(EventKind kind, int32_t channel, uint32_t a, uint32_t b) {
    if (log_events_) events_.push_back(Event{cycle(), kind, channel, a, b});
}

BusStatus Soc::schedule(int channel, int bank, const PulseParams& params, uint32_t t0) {
    const ScheduleStatus st = generator(channel).schedule_pulse(bank, params, t0, ref_time());
    if (st == ScheduleStatus::kFull) return BusStatus::kBusy;
    if (st == ScheduleStatus::kOk) log(EventKind::kPulseScheduled, channel, t0, static_cast<uint32_t>(bank));
    else log(EventKind::kPulseDropped, channel, t0, static_cast<uint32_t>(st));
    return BusStatus::kOk;
}

PulseStatus Soc::issue_pulse(const PulseInstruction& pulse, uint32_t t0) {
    if (pulse.id >= cfg_.dac_channels) return PulseStatus::kRejected;
    PulseParams p;
    p.freq = pulse.freq;
    p.phase = pulse.phase;
    p.amp = pulse.amp;
    p.env_start = pulse.env_start;
    p.duration = pulse.duration;
    const BusStatus st = schedule(pulse.id, pulse.flags & 1, p, t0);
    return st == BusStatus::kBusy ? PulseStatus::kBusy : PulseStatus::kAccepted;
}

void Soc::tick(uint64_t c) {
    for (auto& g : generators_) g->tick(c);
    if (plant_) {
        const uint64_t before = plant_->collapses();
        plant_->absorb(*generators_[cfg_.plant.drive_channel], *generators_[cfg_.plant.readout_channel], c);
        plant_->emit(c, adc_[cfg_.plant.adc_channel]);
        if (log_events_ && plant_->collapses() != before) {
            events_.push_back(Event{c, EventKind::kCollapse, -1, static_cast<uint32_t>(plant_->state()), 0});
        }
    }
    for (size_t i = 0; i < decoders_.size(); ++i) {
        Decoder& d = *decoders_[i];
        if (d.idle()) continue;
        d.consume(adc_[i], c);
        if (log_events_ && d.valid_cycle() == c) {
            events_.push_back(Event{c, EventKind::kResultValid, static_cast<int32_t>(i), d.read_result(), 0});
        }
    }
    for (int ch : trace_channels_) {
        const auto s = generators_[ch]->samples();
        for (size_t k = 0; k < s.size(); ++k) waveform_.push_back({c, ch, static_cast<int32_t>(k), s[k]});
    }
}

StepReport Soc::step() {
    const uint64_t start = cycle();
    const size_t mark = events_.size();
    const StepReport rep = cpu_.step(bus_, this);
    if (log_events_) {
        const Event e = rep.stalled ? Event{start, EventKind::kStall, -1, rep.pc, 0}
                                    : Event{start, EventKind::kInstruction, -1, rep.pc, static_cast<uint32_t>(rep.op)};
        events_.insert(events_.begin() + static_cast<std::ptrdiff_t>(mark), e);
    }
    for (uint64_t c = start; c < start + rep.cycles; ++c) tick(c);
    if (cpu_.state().halted()) {
        log(EventKind::kHalt, -1, static_cast<uint32_t>(cpu_.state().halt),
            static_cast<uint32_t>(cpu_.state().exit_code));
    }
    return rep;
}

HaltReport Soc::run(uint64_t max_cycles) {
    while (!cpu_.state().halted() && cycle() < max_cycles) step();
    if (!cpu_.state().halted()) {
        cpu_.state().halt = HaltReason::kTimeout;
        log(EventKind::kHalt, -1, static_cast<uint32_t>(HaltReason::kTimeout), 0);
    }
    return report();
}

HaltReport Soc::report() const {
    const CpuState& s = cpu_.state();
    return HaltReport{s.halt, s.cycle, s.exit_code, s.pc, s.fault_addr};
}

}  // namespace qcsoc

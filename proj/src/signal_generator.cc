#include "qcsoc/signal_generator.h"

#include <algorithm>
#include <stdexcept>

namespace qcsoc {

const char* port_name(Port port) {
    switch (port) {
        case Port::kFreq: return "freq";
        case Port::kPhase: return "phase";
        case Port::kAmp: return "amp";
        case Port::kEnvStart: return "env";
        case Port::kDuration: return "dur";
    }
    return "?";
}

ScheduleStatus TimedFifo::check(uint32_t t0, uint32_t now) const {
    if (full()) return ScheduleStatus::kFull;
    if (time_before(release_time(t0), now)) return ScheduleStatus::kInPast;
    if (has_last_ && time_before(t0, last_t0_)) return ScheduleStatus::kOrderViolation;
    return ScheduleStatus::kOk;
}

void TimedFifo::push(FifoEntry e) {
    entries_.push_back(e);
    last_t0_ = e.t0;
    has_last_ = true;
}

void TimedFifo::clear() {
    entries_.clear();
    has_last_ = false;
    last_t0_ = 0;
}

bool TimedFifo::pop_due(uint32_t now, FifoEntry& out) {
    if (entries_.empty()) return false;
    if (time_before(now, release_time(entries_.front().t0))) return false;
    out = entries_.front();
    entries_.pop_front();
    return true;
}

uint32_t PulseParams::port_value(Port p) const {
    switch (p) {
        case Port::kFreq: return freq;
        case Port::kPhase: return phase;
        case Port::kAmp: return static_cast<uint16_t>(amp);
        case Port::kEnvStart: return env_start;
        case Port::kDuration: return duration;
    }
    return 0;
}

SignalGenerator::SignalGenerator(GeneratorConfig cfg) : cfg_(cfg), trig_(cfg.trig) {
    if (cfg_.samples_per_cycle <= 0) throw std::invalid_argument("samples_per_cycle must be positive");
    if (cfg_.fifo_depth == 0) throw std::invalid_argument("fifo depth must be positive");
    for (int b = 0; b < banks(); ++b) {
        fifos_.push_back({TimedFifo(cfg_.fifo_depth, latency(Port::kFreq)),
                          TimedFifo(cfg_.fifo_depth, latency(Port::kPhase)),
                          TimedFifo(cfg_.fifo_depth, latency(Port::kAmp)),
                          TimedFifo(cfg_.fifo_depth, latency(Port::kEnvStart)),
                          TimedFifo(cfg_.fifo_depth, latency(Port::kDuration))});
    }
    envelope_.assign(cfg_.envelope_capacity, 0);
    samples_.assign(cfg_.samples_per_cycle, 0);
    baseband_.assign(cfg_.samples_per_cycle, 0);
}

void SignalGenerator::reset() {
    for (auto& set : fifos_) {
        for (auto& f : set) f.clear();
    }
    for (auto& q : in_flight_) q.clear();
    std::fill(samples_.begin(), samples_.end(), 0);
    std::fill(baseband_.begin(), baseband_.end(), 0);
    mux_active_ = mux_pending_ = 0;
    err_ = 0;
    queued_ = 0;
    freq_ = phase_ = 0;
    amp_ = 0;
    env_start_ = 0;
    window_start_ = 0;
    window_len_ = 0;
    emitting_ = false;
    output_dirty_ = false;
}

uint32_t SignalGenerator::max_latency() const {
    uint32_t m = 0;
    for (int p = 0; p < kNumPorts; ++p) m = std::max(m, latency(static_cast<Port>(p)));
    return m;
}

ScheduleStatus SignalGenerator::schedule_param(int bank, Port port, uint32_t t0, uint32_t value, uint32_t now) {
    if (bank < 0 || bank >= banks()) {
        raise(sg_err::kBadBank);
        return ScheduleStatus::kBadBank;
    }
    TimedFifo& f = fifos_[bank][static_cast<int>(port)];
    const ScheduleStatus st = f.check(t0, now);
    if (st == ScheduleStatus::kInPast) raise(sg_err::kSchedInPast);
    if (st == ScheduleStatus::kOrderViolation) raise(sg_err::kOrderViolation);
    if (st == ScheduleStatus::kOk) {
        f.push({t0, value});
        ++queued_;
    }
    return st;
}

ScheduleStatus SignalGenerator::schedule_pulse(int bank, const PulseParams& params, uint32_t t0, uint32_t now) {
    if (bank < 0 || bank >= banks()) {
        raise(sg_err::kBadBank);
        return ScheduleStatus::kBadBank;
    }
    auto& set = fifos_[bank];
    ScheduleStatus worst = ScheduleStatus::kOk;
    for (int p = 0; p < kNumPorts; ++p) {
        const ScheduleStatus st = set[p].check(t0, now);
        if (st == ScheduleStatus::kFull) return ScheduleStatus::kFull;
        if (st != ScheduleStatus::kOk && worst == ScheduleStatus::kOk) worst = st;
    }
    if (worst == ScheduleStatus::kInPast) raise(sg_err::kSchedInPast);
    if (worst == ScheduleStatus::kOrderViolation) raise(sg_err::kOrderViolation);
    if (worst != ScheduleStatus::kOk) return worst;
    for (int p = 0; p < kNumPorts; ++p) set[p].push({t0, params.port_value(static_cast<Port>(p))});
    queued_ += kNumPorts;
    return ScheduleStatus::kOk;
}

bool SignalGenerator::set_multiplex(uint32_t bank_bit) {
    if (!cfg_.multiplex) {
        raise(sg_err::kMuxDisabled);
        return false;
    }
    mux_pending_ = bank_bit & 1u;
    return true;
}

void SignalGenerator::apply(Port p, const InFlight& e, uint64_t cycle) {
    switch (p) {
        case Port::kFreq: freq_ = e.value; break;
        case Port::kPhase: phase_ = e.value; break;
        case Port::kAmp: amp_ = static_cast<int16_t>(e.value & 0xFFFFu); break;
        case Port::kEnvStart: env_start_ = e.value & 0xFFFFu; break;
        case Port::kDuration:
            window_start_ = cycle * static_cast<uint64_t>(cfg_.samples_per_cycle);
            window_len_ = e.value & 0xFFFFu;
            if (window_len_ != 0 && env_start_ + window_len_ > cfg_.envelope_capacity) raise(sg_err::kEnvOverrun);
            break;
    }
}

void SignalGenerator::tick(uint64_t cycle) {
    const auto spc = static_cast<uint64_t>(cfg_.samples_per_cycle);
    const uint64_t g0 = cycle * spc;
    if (queued_ == 0 && !output_dirty_ && g0 >= window_start_ + window_len_) {
        mux_active_ = mux_pending_;
        emitting_ = false;
        return;
    }
    const auto now = static_cast<uint32_t>(cycle);
    for (int b = 0; b < banks(); ++b) {
        for (int p = 0; p < kNumPorts; ++p) {
            FifoEntry e;
            while (fifos_[b][p].pop_due(now, e)) {
                --queued_;
                if (static_cast<uint32_t>(b) == mux_active_) {
                    in_flight_[p].push_back({cycle + latency(static_cast<Port>(p)), e.t0, e.value});
                    ++queued_;
                }
            }
        }
    }
    for (int p = 0; p < kNumPorts; ++p) {
        auto& q = in_flight_[p];
        while (!q.empty() && q.front().effective_cycle <= cycle) {
            apply(static_cast<Port>(p), q.front(), cycle);
            q.pop_front();
            --queued_;
        }
    }
    mux_active_ = mux_pending_;

    const uint64_t win_end = window_start_ + window_len_;
    emitting_ = window_len_ != 0 && g0 + spc > window_start_ && g0 < win_end;
    if (!emitting_) {
        if (output_dirty_) {
            std::fill(samples_.begin(), samples_.end(), 0);
            std::fill(baseband_.begin(), baseband_.end(), 0);
            output_dirty_ = false;
        }
        return;
    }
    output_dirty_ = true;
    const auto cap = static_cast<uint64_t>(envelope_.size());
    for (uint64_t k = 0; k < spc; ++k) {
        const uint64_t g = g0 + k;
        if (g < window_start_ || g >= win_end) {
            samples_[k] = 0;
            baseband_[k] = 0;
            continue;
        }
        const uint64_t idx = g - window_start_ + env_start_;
        const int16_t env = idx < cap ? envelope_[idx] : int16_t{0};
        const int16_t bb = mul_q15(env, amp_);
        const uint32_t theta = freq_ * static_cast<uint32_t>(g) + phase_;
        baseband_[k] = bb;
        samples_[k] = bb == 0 ? int16_t{0} : mul_q15(bb, trig_.eval(theta).c);
    }
}

}  // namespace qcsoc

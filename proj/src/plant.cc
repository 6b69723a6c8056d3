#include "qcsoc/plant.h"

#include <cmath>
#include <stdexcept>

#include "qcsoc/fixed_point.h"
#include "qcsoc/rng.h"

namespace qcsoc {

double coupling_for_pi(int16_t amp, uint32_t duration_samples, int16_t envelope) {
    const int16_t bb = mul_q15(envelope, amp);
    if (bb == 0 || duration_samples == 0) throw std::invalid_argument("pi pulse needs nonzero area");
    return M_PI / (static_cast<double>(duration_samples) * static_cast<double>(bb) / kQ15One);
}

QubitPlant::QubitPlant(PlantConfig cfg, int dac_samples_per_cycle, int adc_samples_per_cycle)
    : cfg_(cfg), dac_spc_(dac_samples_per_cycle), adc_spc_(adc_samples_per_cycle) {
    if (adc_spc_ <= 0 || dac_spc_ % adc_spc_ != 0) {
        throw std::invalid_argument("DAC samples per cycle must be a multiple of ADC samples per cycle");
    }
    decimation_ = dac_spc_ / adc_spc_;
    coupling_ = cfg_.coupling != 0.0 ? cfg_.coupling : coupling_for_pi(kDefaultPiAmp, kDefaultPiDuration);
    theta_ = cfg_.initial_theta;
    size_t n = 1;
    while (n < uint64_t{cfg_.delay} + 2u * static_cast<uint64_t>(adc_spc_) + 1u) n <<= 1;
    history_.assign(n, 0);
    history_mask_ = n - 1;
    seed(0);
}

void QubitPlant::seed(uint64_t seed) {
    if (started_) throw std::logic_error("plant streams cannot be re-seeded after the run has started");
    collapse_rng_.seed(derive_seed(seed, "plant/collapse"));
    noise_rng_.seed(derive_seed(seed, "plant/noise"));
    normal_.reset();
}

double QubitPlant::p1() const {
    const double s = std::sin(theta_ / 2.0);
    return s * s;
}

void QubitPlant::set_theta(double theta) { theta_ = theta; }

bool QubitPlant::in_flight(uint64_t adc_index) const { return history_[adc_index & history_mask_] != 0; }

void QubitPlant::absorb(const SignalGenerator& drive, const SignalGenerator& readout, uint64_t cycle) {
    started_ = true;
    if (drive.emitting() && modular_distance(drive.active_freq(), cfg_.qubit_freq) <= cfg_.freq_tolerance) {
        int64_t area = 0;
        for (int16_t b : drive.baseband()) area += b;
        theta_ += coupling_ * static_cast<double>(area) / kQ15One;
    }
    const uint64_t g0 = cycle * static_cast<uint64_t>(adc_spc_);
    const auto bb = readout.baseband();
    const bool emitting = readout.emitting();
    for (int k = 0; k < adc_spc_; ++k) {
        history_[(g0 + k) & history_mask_] = (emitting && bb[k * decimation_] != 0) ? 1 : 0;
    }
}

void QubitPlant::emit(uint64_t cycle, std::span<int16_t> out) {
    started_ = true;
    const uint64_t g0 = cycle * static_cast<uint64_t>(adc_spc_);
    for (int k = 0; k < adc_spc_; ++k) {
        const uint64_t g = g0 + k;
        const bool reflecting = g >= cfg_.delay && in_flight(g - cfg_.delay);
        if (reflecting && !prev_reflecting_) {
            const double u = static_cast<double>(collapse_rng_() >> 11) * 0x1.0p-53;
            state_ = u < p1() ? 1 : 0;
            theta_ = state_ ? M_PI : 0.0;
            ++collapses_;
        }
        prev_reflecting_ = reflecting;
        double x = 0.0;
        if (reflecting) {
            const auto src = static_cast<uint32_t>(g - cfg_.delay);
            const uint32_t theta = cfg_.readout_freq * src + (state_ ? cfg_.phase1 : cfg_.phase0);
            x = cfg_.reflect_amp * std::cos(phase_word_to_radians(theta));
        }
        if (cfg_.noise_sigma > 0.0) x += cfg_.noise_sigma * normal_(noise_rng_);
        out[k] = saturate_q15(std::llround(x));
    }
}

}  // namespace qcsoc

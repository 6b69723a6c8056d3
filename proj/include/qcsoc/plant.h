#ifndef QCSOC_PLANT_H
#define QCSOC_PLANT_H

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "qcsoc/signal_generator.h"

namespace qcsoc {

/// Surrogate qubit and readout channel.
///
/// Drive: while the drive channel's active frequency is within tolerance of
/// the qubit, the Bloch angle accrues coupling * sum(baseband / 32767).
/// Readout: while the readout channel emits, the plant reflects
/// r*cos(readout_freq*(g - delay) + phi_state) on its ADC channel with
/// additive Gaussian noise. The state collapses at the first reflected
/// sample of each readout pulse.
struct PlantConfig {
    int drive_channel = 7;     // DAC
    int readout_channel = 15;  // DAC
    int adc_channel = 7;
    uint32_t qubit_freq = 0x0800'0000;      // per DAC sample
    uint32_t freq_tolerance = 0x0010'0000;
    double coupling = 0.0;                  // radians per unit baseband sample; 0 picks the default pi-pulse
    double initial_theta = 0.0;
    uint32_t delay = 8;                     // ADC samples
    int16_t reflect_amp = 8000;
    uint32_t phase0 = 0x2000'0000;          // +pi/4
    uint32_t phase1 = 0xE000'0000;          // -pi/4
    double noise_sigma = 0.0;               // LSB per ADC sample
    uint32_t readout_freq = 0x1000'0000;    // per ADC sample

    bool operator==(const PlantConfig&) const = default;
};

// Amplitude and duration of the default X pulse used by the built-in programs.
inline constexpr int16_t kDefaultPiAmp = 0x4000;
inline constexpr uint16_t kDefaultPiDuration = 64;

// Coupling that makes a rectangular pulse (envelope value `envelope`) of the
// given amplitude and duration rotate by exactly pi.
double coupling_for_pi(int16_t amp, uint32_t duration_samples, int16_t envelope = 32767);

class QubitPlant {
   public:
    QubitPlant(PlantConfig cfg, int dac_samples_per_cycle, int adc_samples_per_cycle);

    const PlantConfig& config() const { return cfg_; }

    // Resets every stochastic stream. Rejected with std::logic_error once the
    // plant has started absorbing or emitting.
    void seed(uint64_t seed);

    void absorb(const SignalGenerator& drive, const SignalGenerator& readout, uint64_t cycle);
    void emit(uint64_t cycle, std::span<int16_t> out);

    double theta() const { return theta_; }
    double p1() const;
    int state() const { return state_; }
    uint64_t collapses() const { return collapses_; }
    void set_theta(double theta);

   private:
    bool in_flight(uint64_t adc_index) const;

    PlantConfig cfg_;
    int dac_spc_;
    int adc_spc_;
    int decimation_;
    double coupling_;
    double theta_;
    int state_ = 0;
    uint64_t collapses_ = 0;
    bool started_ = false;
    bool prev_reflecting_ = false;
    std::vector<uint8_t> history_;  // readout in-flight flag per ADC sample, ring buffer
    uint64_t history_mask_ = 0;
    std::mt19937_64 collapse_rng_;
    std::mt19937_64 noise_rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace qcsoc

#endif  // QCSOC_PLANT_H

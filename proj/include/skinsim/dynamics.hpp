#pragma once

// Non-ideal sensor behavior layered on the ideal capacitance model:
// shielding-dependent Gaussian noise, first-order hysteresis, converter
// quantization/clamping and long-term gain drift. All state needed by one
// channel lives in ChannelDynamics; the free functions are pure.

#include <array>
#include <cstdint>
#include <random>

#include "skinsim/capmodel.hpp"

namespace skinsim {

enum class ShieldingMode { Unshielded, ActiveOnly, ActivePassive };

// Per-channel acquisition parameters. Noise fractions are peak-to-peak bands
// (6 sigma) as fractions of the measuring range.
struct SensorChannelConfig {
    ShieldingMode shielding = ShieldingMode::ActivePassive;
    std::array<double, 3> noise_fractions{0.142, 0.052, 0.032};
    double measuring_range_pf = 5.0;
    double clamp_pf = 15.0;
    double quantum_pf = 0.0005;
    double sample_rate_hz = 100.0;
    std::uint64_t rng_seed = 1;

    double noise_fraction(ShieldingMode mode) const {
        return noise_fractions[static_cast<int>(mode)];
    }
    double noise_fraction() const { return noise_fraction(shielding); }
    double noise_sigma_pf() const {
        return noise_fraction() * measuring_range_pf / 6.0;
    }

    // Throws std::domain_error on an invalid combination.
    void validate() const;
};

// Deterministic standard-normal stream: Box-Muller over mt19937_64. The
// engine is fully specified by the standard and the mapping is ours, so the
// stream is reproducible from the seed alone on any platform.
class GaussianRng {
public:
    explicit GaussianRng(std::uint64_t seed) : engine_(seed) {}

    double next();

private:
    std::mt19937_64 engine_;
};

// Derives decorrelated per-channel seeds from one master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// c plus zero-mean Gaussian noise with 6 sigma equal to the configured band.
double apply_noise(double c_pf, const SensorChannelConfig& cfg, GaussianRng& rng);

// First-order relaxation toward the commanded value. relaxation_rate_hz may
// be infinite, which makes the output track the target exactly.
struct HysteresisState {
    double current_output_pf = 0.0;
    double loop_gap_fraction = 0.054;
    double relaxation_rate_hz = kDefaultHysteresisRate;

    // Tuned so the standard press-release cycle (below) exhibits a
    // loading/unloading gap of 5.4% of the force range.
    static constexpr double kDefaultHysteresisRate = 5.437;
};

// Advances the state by dt toward target and returns the new output.
double apply_hysteresis(HysteresisState& state, double target_pf, double dt_s);

// The press-release cycle used for hysteresis tuning and characterization:
// a triangular force sweep 0 -> peak -> 0.
struct PressCycle {
    double peak_force_n = 40.0;
    double period_s = 10.0;
    double rate_hz = 200.0;
};

// Bisects the relaxation rate until the standard cycle, run through the ideal
// forward model and inverted back to force, shows a loading/unloading gap of
// gap_fraction * force_range_n. Returns +inf for a zero gap.
double tune_hysteresis_rate(const TaxelGeometry& geom,
                            const FittedCoefficients& coeffs,
                            const StiffnessProfile& stiffness,
                            double gap_fraction,
                            const PressCycle& cycle = PressCycle{},
                            double force_range_n = 55.0);

// Measures the loading/unloading force gap of the standard cycle for a given
// relaxation rate (same pipeline the tuner bisects over).
double hysteresis_cycle_gap(const TaxelGeometry& geom,
                            const FittedCoefficients& coeffs,
                            const StiffnessProfile& stiffness,
                            double relaxation_rate_hz,
                            const PressCycle& cycle = PressCycle{});

// Rounds to the nearest quantum multiple (ties to even) and clamps to
// [-clamp_pf, clamp_pf].
double quantize_clamp(double c_pf, const SensorChannelConfig& cfg);

// Multiplicative gain decay on capacitance change after repeated presses.
struct DriftState {
    std::int64_t interaction_count = 0;
    double gain_decay_per_1000 = 0.00054;
};

// Effective gain after the recorded interactions, floored at 0.9, applied to
// the supplied gain.
double apply_drift(const DriftState& state, double gain = 1.0);

// Which non-idealities participate in the acquisition chain.
struct DynamicsToggles {
    bool noise = true;
    bool hysteresis = true;
    bool quantization = true;
    bool drift = true;
};

// Full per-channel chain: hysteresis -> noise -> drift on the change from
// baseline -> quantize/clamp. With every toggle off the chain is the identity.
class ChannelDynamics {
public:
    ChannelDynamics(const SensorChannelConfig& cfg, const DynamicsToggles& toggles,
                    double baseline_pf, std::uint64_t seed,
                    double loop_gap_fraction = 0.054,
                    double relaxation_rate_hz =
                        HysteresisState::kDefaultHysteresisRate,
                    double gain_decay_per_1000 = 0.00054);

    double process(double true_c_pf, double dt_s);

    void add_interactions(std::int64_t n) { drift_.interaction_count += n; }
    std::int64_t interaction_count() const { return drift_.interaction_count; }
    double baseline_pf() const { return baseline_pf_; }

private:
    SensorChannelConfig cfg_;
    DynamicsToggles toggles_;
    HysteresisState hysteresis_;
    DriftState drift_;
    GaussianRng rng_;
    double baseline_pf_;
};

} // namespace skinsim

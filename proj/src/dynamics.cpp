#include "skinsim/dynamics.hpp"

#include <algorithm>
#include <cfenv>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace skinsim {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

void require(bool ok, const char* what) {
    if (!ok) {
        throw std::domain_error(what);
    }
}

} // namespace

void SensorChannelConfig::validate() const {
    require(noise_fractions[0] > noise_fractions[1] &&
                noise_fractions[1] > noise_fractions[2],
            "channel config: noise fractions must decrease with shielding");
    for (double f : noise_fractions) {
        require(f >= 0.0 && f <= 1.0,
                "channel config: noise fractions must lie in [0, 1]");
    }
    require(quantum_pf > 0.0, "channel config: quantum must be positive");
    require(measuring_range_pf > 0.0,
            "channel config: measuring range must be positive");
    require(clamp_pf > measuring_range_pf,
            "channel config: clamp must exceed the measuring range");
    require(sample_rate_hz >= 100.0 && sample_rate_hz <= 400.0,
            "channel config: sample rate must lie in [100, 400] Hz");
}

double GaussianRng::next() {
    // 53-bit uniforms; u1 shifted into (0, 1] so the log stays finite.
    const double u1 =
        1.0 - static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    // splitmix64 step over master + golden-ratio stride.
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double apply_noise(double c_pf, const SensorChannelConfig& cfg, GaussianRng& rng) {
    return c_pf + cfg.noise_sigma_pf() * rng.next();
}

double apply_hysteresis(HysteresisState& state, double target_pf, double dt_s) {
    require(dt_s > 0.0, "hysteresis: dt must be positive");
    if (std::isinf(state.relaxation_rate_hz)) {
        state.current_output_pf = target_pf;
        return target_pf;
    }
    const double blend = 1.0 - std::exp(-state.relaxation_rate_hz * dt_s);
    state.current_output_pf += (target_pf - state.current_output_pf) * blend;
    return state.current_output_pf;
}

namespace {

// Loading/unloading branches of one triangular press cycle run through the
// ideal forward model with a first-order lag, expressed back in force units.
struct CycleBranches {
    std::vector<double> forces;
    std::vector<double> loading;
    std::vector<double> unloading;
};

CycleBranches run_standard_cycle(const TaxelGeometry& geom,
                                 const FittedCoefficients& coeffs,
                                 const StiffnessProfile& stiffness,
                                 double relaxation_rate_hz,
                                 const PressCycle& cycle) {
    const double dt = 1.0 / cycle.rate_hz;
    const int half = static_cast<int>(std::lround(cycle.period_s / 2.0 / dt));
    const double slope = cycle.peak_force_n / (cycle.period_s / 2.0);

    HysteresisState state;
    state.relaxation_rate_hz = relaxation_rate_hz;
    state.current_output_pf = 0.0; // tracking the capacitance change

    std::vector<double> f_load, c_load, f_unload, c_unload;
    f_load.reserve(half);
    f_unload.reserve(half);
    for (int i = 1; i <= 2 * half; ++i) {
        const double t = i * dt;
        const double force = t <= cycle.period_s / 2.0
                                 ? slope * t
                                 : cycle.peak_force_n - slope * (t - cycle.period_s / 2.0);
        const double target =
            force_to_capacitance_change(geom, coeffs, stiffness, force);
        const double out = apply_hysteresis(state, target, dt);
        if (i <= half) {
            f_load.push_back(force);
            c_load.push_back(out);
        } else {
            f_unload.push_back(force);
            c_unload.push_back(out);
        }
    }

    // Compare the two branches on a common true-force grid, away from the
    // turnaround points where they meet by construction.
    const double f_lo = 0.05 * cycle.peak_force_n;
    const double f_hi = 0.95 * cycle.peak_force_n;
    const int grid_n = 200;

    auto interp_branch = [](const std::vector<double>& fs,
                            const std::vector<double>& cs, double f) {
        // fs is monotone (increasing for loading, decreasing for unloading).
        const bool increasing = fs.front() < fs.back();
        std::size_t lo = 0, hi = fs.size() - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            if ((fs[mid] <= f) == increasing) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        const double span = fs[hi] - fs[lo];
        const double w = span == 0.0 ? 0.0 : (f - fs[lo]) / span;
        return cs[lo] + w * (cs[hi] - cs[lo]);
    };

    CycleBranches out;
    out.forces.reserve(grid_n);
    for (int i = 0; i < grid_n; ++i) {
        const double f = f_lo + (f_hi - f_lo) * i / (grid_n - 1);
        const double c_l = interp_branch(f_load, c_load, f);
        const double c_u = interp_branch(f_unload, c_unload, f);
        out.forces.push_back(f);
        out.loading.push_back(
            capacitance_change_to_force(geom, coeffs, stiffness, std::max(0.0, c_l)));
        out.unloading.push_back(
            capacitance_change_to_force(geom, coeffs, stiffness, std::max(0.0, c_u)));
    }
    return out;
}

} // namespace

double hysteresis_cycle_gap(const TaxelGeometry& geom,
                            const FittedCoefficients& coeffs,
                            const StiffnessProfile& stiffness,
                            double relaxation_rate_hz, const PressCycle& cycle) {
    const CycleBranches b =
        run_standard_cycle(geom, coeffs, stiffness, relaxation_rate_hz, cycle);
    double gap = 0.0;
    for (std::size_t i = 0; i < b.forces.size(); ++i) {
        gap = std::max(gap, std::abs(b.unloading[i] - b.loading[i]));
    }
    return gap;
}

double tune_hysteresis_rate(const TaxelGeometry& geom,
                            const FittedCoefficients& coeffs,
                            const StiffnessProfile& stiffness, double gap_fraction,
                            const PressCycle& cycle, double force_range_n) {
    require(gap_fraction >= 0.0 && gap_fraction <= 0.2,
            "hysteresis tuning: gap fraction must lie in [0, 0.2]");
    if (gap_fraction == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    const double target_gap_n = gap_fraction * force_range_n;
    // Gap decreases monotonically with the rate.
    double lo = 1e-2, hi = 1e4;
    for (int iter = 0; iter < 80; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double gap = hysteresis_cycle_gap(geom, coeffs, stiffness, mid, cycle);
        if (gap > target_gap_n) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double quantize_clamp(double c_pf, const SensorChannelConfig& cfg) {
    // nearbyint in the default rounding mode resolves ties to even.
    const double steps = std::nearbyint(c_pf / cfg.quantum_pf);
    return std::clamp(steps * cfg.quantum_pf, -cfg.clamp_pf, cfg.clamp_pf);
}

double apply_drift(const DriftState& state, double gain) {
    require(state.interaction_count >= 0,
            "drift: interaction count must be non-negative");
    const double decayed =
        1.0 - state.gain_decay_per_1000 *
                  (static_cast<double>(state.interaction_count) / 1000.0);
    return gain * std::max(0.9, decayed);
}

ChannelDynamics::ChannelDynamics(const SensorChannelConfig& cfg,
                                 const DynamicsToggles& toggles, double baseline_pf,
                                 std::uint64_t seed, double loop_gap_fraction,
                                 double relaxation_rate_hz,
                                 double gain_decay_per_1000)
    : cfg_(cfg), toggles_(toggles), rng_(seed), baseline_pf_(baseline_pf) {
    cfg_.validate();
    require(loop_gap_fraction >= 0.0 && loop_gap_fraction <= 0.2,
            "hysteresis: loop gap fraction must lie in [0, 0.2]");
    hysteresis_.current_output_pf = baseline_pf;
    hysteresis_.loop_gap_fraction = loop_gap_fraction;
    hysteresis_.relaxation_rate_hz = relaxation_rate_hz;
    drift_.gain_decay_per_1000 = gain_decay_per_1000;
}

double ChannelDynamics::process(double true_c_pf, double dt_s) {
    double c = true_c_pf;
    if (toggles_.hysteresis) {
        c = apply_hysteresis(hysteresis_, c, dt_s);
    } else {
        hysteresis_.current_output_pf = c;
    }
    if (toggles_.noise) {
        c = apply_noise(c, cfg_, rng_);
    }
    if (toggles_.drift) {
        c = baseline_pf_ + apply_drift(drift_) * (c - baseline_pf_);
    }
    if (toggles_.quantization) {
        c = quantize_clamp(c, cfg_);
    }
    return c;
}

} // namespace skinsim

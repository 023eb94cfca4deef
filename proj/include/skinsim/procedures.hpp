#pragma once

// The standard characterization batteries: simulated press-release
// calibration, accuracy sweep, hysteresis cycle, noise runs per shielding
// mode, closed-loop durability and the smoothness evaluation. Shared by the
// characterize command and the acceptance suite; everything runs in virtual
// time and is deterministic given (config, seed).

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "skinsim/calib.hpp"
#include "skinsim/config.hpp"
#include "skinsim/metrics.hpp"

namespace skinsim {

// Simulated press-release cycles on the probe taxel through the configured
// acquisition chain; rows are (t, measured capacitance change, true force).
std::vector<PressReleaseTrace> simulate_press_cycles(const RunConfig& config,
                                                     std::uint64_t seed);

// Cycles -> calibration curve with the configured knot count.
CalibrationCurve calibrate_from_simulation(const RunConfig& config,
                                           std::uint64_t seed);

struct SweepResult {
    std::vector<double> truths_n;
    std::vector<double> estimates_n;
};

// Holds each force level until the chain settles, averages the configured
// window of frames and estimates force through the curve.
SweepResult run_accuracy_sweep(const RunConfig& config,
                               const CalibrationCurve& curve, std::uint64_t seed);

// Noise-only sample series at a constant input for one shielding mode.
std::vector<double> run_noise_series(const RunConfig& config, ShieldingMode mode,
                                     long samples, std::uint64_t seed);

// Loading/unloading branches of the standard cycle through the configured
// chain (noise disabled so the branch gap is the hysteresis signal).
HysteresisError run_hysteresis_battery(const RunConfig& config);

// Full-scale probe accuracy before and after the configured number of
// presses with gain drift enabled; returns the drop in percentage points.
double run_durability_battery(const RunConfig& config, std::uint64_t seed);

// Per-taxel maximum smoothness of estimated forces under a multi-taxel press.
SmoothnessStats run_smoothness_battery(const RunConfig& config,
                                       const CalibrationCurve& curve,
                                       std::uint64_t seed);

// Runs every battery and assembles the report.
CharacterizationReport characterize(const RunConfig& config, std::uint64_t seed);

nlohmann::json report_to_json(const CharacterizationReport& report,
                              const RunConfig& config);
nlohmann::json calibration_to_json(const CalibrationCurve& curve);
CalibrationCurve calibration_from_json(const nlohmann::json& doc);

} // namespace skinsim

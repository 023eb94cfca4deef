#pragma once

// Characterization statistics: relative error against the measuring range,
// loading/unloading hysteresis error, noise band, durability accuracy drop
// and the force-smoothness metric.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace skinsim {

inline constexpr double kForceRangeN = 55.0;

struct RelativeError {
    double mean_fraction;
    double max_fraction;
};

// mean/max of |estimate - truth| as fractions of the range.
RelativeError relative_error(const std::vector<double>& estimates_n,
                             const std::vector<double>& truths_n, double range_n);

// One branch of a press or release: pairs of (true force, estimated force).
using ForceBranch = std::vector<std::pair<double, double>>;

struct HysteresisError {
    double max_gap_n;
    double fraction_of_range;
};

// Max gap between the two branch estimates over a shared true-force grid
// (the union of both branches' abscissae within the overlapping range).
HysteresisError hysteresis_error(const ForceBranch& loading,
                                 const ForceBranch& unloading,
                                 double range_n = kForceRangeN);

struct NoiseBand {
    double band_pf; // 6 sigma, peak-to-peak convention
    double fraction_of_range;
};

// Needs at least 100 samples taken at a constant true input.
NoiseBand noise_band(const std::vector<double>& samples_pf, double range_pf);

struct SmoothnessResult {
    std::vector<double> per_sample; // one value per interior sample
    double max_value;
};

// Reciprocal of the central second difference of the force series, clamped
// at 1/epsilon where the series is locally affine.
SmoothnessResult smoothness(const std::vector<double>& force_n, double dt_s,
                            double epsilon = 1e-3);

// Accuracy drop in percentage points.
double durability_report(double accuracy_before, double accuracy_after);

struct SmoothnessStats {
    double mean = 0.0;
    double sd = 0.0;
    std::vector<std::pair<int, double>> per_taxel_max; // (taxel, max smoothness)
};

// Everything the characterization battery reports; serialized by the
// procedures layer together with the config echo.
struct CharacterizationReport {
    double relative_error_mean = 0.0;  // fraction of the force range
    double relative_error_max = 0.0;
    double hysteresis_error_n = 0.0;
    double hysteresis_fraction = 0.0;
    double noise_band_pf = 0.0;        // at the configured shielding
    double noise_fraction = 0.0;
    std::vector<std::pair<std::string, double>> noise_fraction_by_mode;
    double noise_reduction_fraction = 0.0; // unshielded -> full shielding
    double durability_drop_pp = 0.0;
    SmoothnessStats smoothness_stats;
    std::uint64_t seed = 0;
};

} // namespace skinsim

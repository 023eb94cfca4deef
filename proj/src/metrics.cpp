#include "skinsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace skinsim {

namespace {

void require(bool ok, const char* what) {
    if (!ok) {
        throw std::invalid_argument(what);
    }
}

// Linear interpolation of a branch at a true-force value; the branch must be
// sorted by true force.
double interp_branch(const ForceBranch& branch, double f) {
    const auto cmp = [](const std::pair<double, double>& p, double v) {
        return p.first < v;
    };
    const auto it = std::lower_bound(branch.begin(), branch.end(), f, cmp);
    if (it == branch.begin()) {
        return it->second;
    }
    if (it == branch.end()) {
        return (it - 1)->second;
    }
    const auto lo = it - 1;
    const double span = it->first - lo->first;
    if (span <= 0.0) {
        return lo->second;
    }
    const double w = (f - lo->first) / span;
    return lo->second + w * (it->second - lo->second);
}

} // namespace

RelativeError relative_error(const std::vector<double>& estimates_n,
                             const std::vector<double>& truths_n, double range_n) {
    require(estimates_n.size() == truths_n.size(),
            "relative error: series length mismatch");
    require(!estimates_n.empty(), "relative error: empty series");
    require(range_n > 0.0, "relative error: range must be positive");
    double sum = 0.0;
    double worst = 0.0;
    for (std::size_t i = 0; i < estimates_n.size(); ++i) {
        const double err = std::abs(estimates_n[i] - truths_n[i]);
        sum += err;
        worst = std::max(worst, err);
    }
    return RelativeError{sum / estimates_n.size() / range_n, worst / range_n};
}

HysteresisError hysteresis_error(const ForceBranch& loading,
                                 const ForceBranch& unloading, double range_n) {
    require(!loading.empty() && !unloading.empty(),
            "hysteresis error: empty branch");
    ForceBranch load = loading;
    ForceBranch unload = unloading;
    const auto by_force = [](const auto& a, const auto& b) {
        return a.first < b.first;
    };
    std::sort(load.begin(), load.end(), by_force);
    std::sort(unload.begin(), unload.end(), by_force);

    const double lo = std::max(load.front().first, unload.front().first);
    const double hi = std::min(load.back().first, unload.back().first);
    require(lo <= hi, "hysteresis error: branches do not overlap in force");

    // Common grid: the union of both branches' sampled forces in the overlap,
    // so clean synthetic branches are compared at their own samples.
    std::vector<double> grid;
    for (const auto& p : load) {
        if (p.first >= lo && p.first <= hi) grid.push_back(p.first);
    }
    for (const auto& p : unload) {
        if (p.first >= lo && p.first <= hi) grid.push_back(p.first);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    require(!grid.empty(), "hysteresis error: branches do not overlap in force");

    double gap = 0.0;
    for (double f : grid) {
        gap = std::max(gap, std::abs(interp_branch(load, f) - interp_branch(unload, f)));
    }
    return HysteresisError{gap, gap / range_n};
}

NoiseBand noise_band(const std::vector<double>& samples_pf, double range_pf) {
    require(samples_pf.size() >= 100, "noise band: need at least 100 samples");
    require(range_pf > 0.0, "noise band: range must be positive");
    double mean = 0.0;
    for (double s : samples_pf) {
        mean += s;
    }
    mean /= samples_pf.size();
    double var = 0.0;
    for (double s : samples_pf) {
        var += (s - mean) * (s - mean);
    }
    var /= (samples_pf.size() - 1);
    const double band = 6.0 * std::sqrt(var);
    return NoiseBand{band, band / range_pf};
}

SmoothnessResult smoothness(const std::vector<double>& force_n, double dt_s,
                            double epsilon) {
    require(force_n.size() >= 3, "smoothness: need at least 3 samples");
    require(dt_s > 0.0, "smoothness: dt must be positive");
    require(epsilon > 0.0, "smoothness: epsilon must be positive");
    SmoothnessResult result;
    result.per_sample.reserve(force_n.size() - 2);
    result.max_value = 0.0;
    const double dt2 = dt_s * dt_s;
    for (std::size_t i = 1; i + 1 < force_n.size(); ++i) {
        const double second =
            (force_n[i + 1] - 2.0 * force_n[i] + force_n[i - 1]) / dt2;
        const double value = 1.0 / std::max(std::abs(second), epsilon);
        result.per_sample.push_back(value);
        result.max_value = std::max(result.max_value, value);
    }
    return result;
}

double durability_report(double accuracy_before, double accuracy_after) {
    require(accuracy_before >= 0.0 && accuracy_before <= 1.0 &&
                accuracy_after >= 0.0 && accuracy_after <= 1.0,
            "durability: accuracies must lie in [0, 1]");
    return (accuracy_before - accuracy_after) * 100.0;
}

} // namespace skinsim

#include "skinsim/calib.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace skinsim {

namespace {

void check_samples(const SampleSet& samples, std::size_t min_distinct,
                   const char* op) {
    if (samples.x.size() != samples.c_pf.size()) {
        throw CalibrationError(std::string(op) + ": x/c length mismatch");
    }
    std::set<double> distinct;
    for (std::size_t i = 0; i < samples.x.size(); ++i) {
        if (!std::isfinite(samples.x[i]) || !std::isfinite(samples.c_pf[i])) {
            throw CalibrationError(std::string(op) + ": non-finite sample");
        }
        distinct.insert(samples.x[i]);
    }
    if (distinct.size() < min_distinct) {
        throw CalibrationError(std::string(op) +
                               ": design is rank deficient (too few distinct "
                               "abscissae)");
    }
}

// Gaussian elimination with partial pivoting; small systems only.
// Accumulation and elimination run in long double for headroom.
template <int N>
void solve_linear(long double a[N][N], long double b[N], double out[N],
                  const char* op) {
    int perm[N];
    for (int i = 0; i < N; ++i) perm[i] = i;
    for (int col = 0; col < N; ++col) {
        int pivot = col;
        for (int r = col + 1; r < N; ++r) {
            if (std::abs(a[perm[r]][col]) > std::abs(a[perm[pivot]][col])) {
                pivot = r;
            }
        }
        std::swap(perm[col], perm[pivot]);
        const long double p = a[perm[col]][col];
        if (std::abs(static_cast<double>(p)) < 1e-30) {
            throw CalibrationError(std::string(op) + ": design is rank deficient");
        }
        for (int r = col + 1; r < N; ++r) {
            const long double factor = a[perm[r]][col] / p;
            for (int c = col; c < N; ++c) {
                a[perm[r]][c] -= factor * a[perm[col]][c];
            }
            b[perm[r]] -= factor * b[perm[col]];
        }
    }
    for (int row = N - 1; row >= 0; --row) {
        long double acc = b[perm[row]];
        for (int c = row + 1; c < N; ++c) {
            acc -= a[perm[row]][c] * out[c];
        }
        out[row] = static_cast<double>(acc / a[perm[row]][row]);
    }
}

} // namespace

InverseLawCoeffs fit_inverse_law(const SampleSet& samples) {
    check_samples(samples, 2, "inverse-law fit");
    const std::size_t n = samples.x.size();
    long double su = 0, suu = 0, sy = 0, suy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (samples.x[i] <= 0.0) {
            throw CalibrationError("inverse-law fit: thickness must be positive");
        }
        const long double u = 1.0L / samples.x[i];
        const long double y = samples.c_pf[i];
        su += u;
        suu += u * u;
        sy += y;
        suy += u * y;
    }
    const long double denom = static_cast<long double>(n) * suu - su * su;
    if (std::abs(static_cast<double>(denom)) <=
        1e-12 * static_cast<double>(n) * static_cast<double>(suu)) {
        throw CalibrationError(
            "inverse-law fit: design is rank deficient (all thicknesses equal)");
    }
    const long double a = (static_cast<long double>(n) * suy - su * sy) / denom;
    const long double b = (sy - a * su) / static_cast<long double>(n);
    return InverseLawCoeffs{static_cast<double>(a), static_cast<double>(b)};
}

QuadCoeffs fit_poly2(const SampleSet& samples) {
    check_samples(samples, 3, "quadratic fit");
    long double s[5] = {0, 0, 0, 0, 0};
    long double t[3] = {0, 0, 0};
    for (std::size_t i = 0; i < samples.x.size(); ++i) {
        const long double x = samples.x[i];
        const long double y = samples.c_pf[i];
        long double p = 1.0L;
        for (int k = 0; k < 5; ++k) {
            s[k] += p;
            if (k < 3) {
                t[k] += y * p;
            }
            p *= x;
        }
    }
    long double a[3][3] = {{s[0], s[1], s[2]}, {s[1], s[2], s[3]}, {s[2], s[3], s[4]}};
    long double b[3] = {t[0], t[1], t[2]};
    double coef[3];
    solve_linear<3>(a, b, coef, "quadratic fit");
    return QuadCoeffs{coef[2], coef[1], coef[0]};
}

std::vector<double> isotonic_non_decreasing(const std::vector<double>& values) {
    // Pool adjacent violators, unit weights.
    std::vector<double> sum;
    std::vector<int> count;
    sum.reserve(values.size());
    count.reserve(values.size());
    for (double v : values) {
        sum.push_back(v);
        count.push_back(1);
        while (sum.size() > 1) {
            const std::size_t k = sum.size() - 1;
            if (sum[k - 1] / count[k - 1] <= sum[k] / count[k]) {
                break;
            }
            sum[k - 1] += sum[k];
            count[k - 1] += count[k];
            sum.pop_back();
            count.pop_back();
        }
    }
    std::vector<double> out;
    out.reserve(values.size());
    for (std::size_t block = 0; block < sum.size(); ++block) {
        const double level = sum[block] / count[block];
        for (int i = 0; i < count[block]; ++i) {
            out.push_back(level);
        }
    }
    return out;
}

CalibrationCurve fit_force_calibration(const std::vector<PressReleaseTrace>& cycles,
                                       int knots) {
    if (knots < 2) {
        throw CalibrationError("force calibration: need at least 2 knots");
    }
    std::vector<double> cs;
    std::vector<double> fs;
    for (const PressReleaseTrace& cycle : cycles) {
        if (cycle.c_pf.size() != cycle.f_n.size()) {
            throw CalibrationError("force calibration: c/f length mismatch");
        }
        cs.insert(cs.end(), cycle.c_pf.begin(), cycle.c_pf.end());
        fs.insert(fs.end(), cycle.f_n.begin(), cycle.f_n.end());
    }
    if (cs.size() < 4) {
        throw CalibrationError("force calibration: too few samples");
    }
    for (std::size_t i = 0; i < cs.size(); ++i) {
        if (!std::isfinite(cs[i]) || !std::isfinite(fs[i])) {
            throw CalibrationError("force calibration: non-finite sample");
        }
    }

    const auto [cmin_it, cmax_it] = std::minmax_element(cs.begin(), cs.end());
    const double c_min = *cmin_it;
    const double c_max = *cmax_it;
    if (c_max - c_min <= 0.0) {
        throw CalibrationError("force calibration: capacitance span is zero");
    }

    // Invertibility gate: capacitance must rise with force on average.
    {
        double mc = 0, mf = 0;
        for (std::size_t i = 0; i < cs.size(); ++i) {
            mc += cs[i];
            mf += fs[i];
        }
        mc /= cs.size();
        mf /= fs.size();
        double scc = 0, sff = 0, scf = 0;
        for (std::size_t i = 0; i < cs.size(); ++i) {
            scc += (cs[i] - mc) * (cs[i] - mc);
            sff += (fs[i] - mf) * (fs[i] - mf);
            scf += (cs[i] - mc) * (fs[i] - mf);
        }
        const double corr =
            scf / std::sqrt(std::max(scc, 1e-300) * std::max(sff, 1e-300));
        if (!(corr > 0.0)) {
            std::ostringstream msg;
            msg << "force calibration: capacitance is not monotone in force "
                   "on average (correlation "
                << corr << ")";
            throw CalibrationError(msg.str());
        }
    }

    // Bin by capacitance; loading and unloading branches average out inside
    // the shared bins.
    std::vector<double> bin_c(knots, 0.0), bin_f(knots, 0.0);
    std::vector<int> bin_n(knots, 0);
    const double width = (c_max - c_min) / knots;
    for (std::size_t i = 0; i < cs.size(); ++i) {
        int b = static_cast<int>((cs[i] - c_min) / width);
        b = std::clamp(b, 0, knots - 1);
        bin_c[b] += cs[i];
        bin_f[b] += fs[i];
        ++bin_n[b];
    }

    std::vector<double> kc, kf;
    for (int b = 0; b < knots; ++b) {
        if (bin_n[b] > 0) {
            kc.push_back(bin_c[b] / bin_n[b]);
            kf.push_back(bin_f[b] / bin_n[b]);
        }
    }
    if (kc.size() < 2) {
        throw CalibrationError("force calibration: degenerate binning");
    }

    // Extrapolated endpoint knots so the curve spans the observed range.
    auto extrapolate = [](double c, double c0, double f0, double c1, double f1) {
        return f0 + (c - c0) * (f1 - f0) / (c1 - c0);
    };
    if (kc.front() > c_min) {
        const double f = extrapolate(c_min, kc[0], kf[0], kc[1], kf[1]);
        kc.insert(kc.begin(), c_min);
        kf.insert(kf.begin(), f);
    }
    if (kc.back() < c_max) {
        const std::size_t n = kc.size();
        const double f =
            extrapolate(c_max, kc[n - 2], kf[n - 2], kc[n - 1], kf[n - 1]);
        kc.push_back(c_max);
        kf.push_back(f);
    }

    // Monotone projection, then one knot per constant block so both
    // coordinates end up strictly increasing.
    const std::vector<double> iso = isotonic_non_decreasing(kf);
    CalibrationCurve curve;
    std::size_t i = 0;
    while (i < iso.size()) {
        std::size_t j = i;
        double c_acc = 0.0;
        while (j < iso.size() && iso[j] == iso[i]) {
            c_acc += kc[j];
            ++j;
        }
        curve.knots_c_pf.push_back(c_acc / static_cast<double>(j - i));
        curve.knots_f_n.push_back(iso[i]);
        i = j;
    }
    if (curve.knots_c_pf.size() < 2) {
        throw CalibrationError(
            "force calibration: curve collapsed to a single level (data not "
            "invertible)");
    }
    curve.c_min_pf = curve.knots_c_pf.front();
    curve.c_max_pf = curve.knots_c_pf.back();

    long double sq = 0.0;
    double worst = 0.0;
    for (std::size_t k = 0; k < cs.size(); ++k) {
        const double err = estimate_force(curve, cs[k]).force_n - fs[k];
        sq += static_cast<long double>(err) * err;
        worst = std::max(worst, std::abs(err));
    }
    curve.residual_rms_n =
        std::sqrt(static_cast<double>(sq / static_cast<long double>(cs.size())));
    curve.residual_max_n = worst;
    return curve;
}

ForceEstimate estimate_force(const CalibrationCurve& curve, double c_pf) {
    const std::vector<double>& kc = curve.knots_c_pf;
    const std::vector<double>& kf = curve.knots_f_n;
    if (c_pf <= kc.front()) {
        return ForceEstimate{kf.front(), c_pf < kc.front()};
    }
    if (c_pf >= kc.back()) {
        return ForceEstimate{kf.back(), c_pf > kc.back()};
    }
    const auto it = std::upper_bound(kc.begin(), kc.end(), c_pf);
    const std::size_t hi = static_cast<std::size_t>(it - kc.begin());
    const std::size_t lo = hi - 1;
    const double w = (c_pf - kc[lo]) / (kc[hi] - kc[lo]);
    return ForceEstimate{kf[lo] + w * (kf[hi] - kf[lo]), false};
}

double model_filter(double analytical_pf, double measured_pf,
                    double analytical_weight, double measured_weight) {
    if (analytical_weight < 0.0 || measured_weight < 0.0 ||
        std::abs(analytical_weight + measured_weight - 1.0) > 1e-12) {
        throw std::domain_error("model filter: weights must be convex");
    }
    return analytical_weight * analytical_pf + measured_weight * measured_pf;
}

double joint_motion_offset(const FittedCoefficients& coeffs, double alpha,
                           double theta_rad) {
    return (lateral_capacitance(coeffs, alpha) - coeffs.lateral.c0) +
           (bending_capacitance(coeffs, theta_rad) - coeffs.bending.c0);
}

} // namespace skinsim

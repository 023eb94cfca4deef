#pragma once

// Fitting and estimation: inverse-law and quadratic least squares, press-
// release force calibration with isotonic monotonization, piecewise-linear
// force estimation, model-based filtering and joint-motion offset correction.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "skinsim/capmodel.hpp"

namespace skinsim {

// Raised when input data cannot support the requested fit.
class CalibrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SampleSet {
    std::vector<double> x;
    std::vector<double> c_pf;
    std::string units = "";      // e.g. "mm" or "ratio" or "rad"
    std::string source = "";     // "simulated" or a file path
    std::uint64_t seed = 0;
};

// OLS of C = a/h + b on the transformed variable u = 1/h. Needs two distinct
// positive abscissae.
InverseLawCoeffs fit_inverse_law(const SampleSet& samples);

// Least-squares quadratic c2*x^2 + c1*x + c0. Needs three distinct abscissae.
QuadCoeffs fit_poly2(const SampleSet& samples);

// One press-release trace; rows are simultaneous samples of capacitance
// change (pF) and true force (N).
struct PressReleaseTrace {
    std::vector<double> t_s;
    std::vector<double> c_pf;
    std::vector<double> f_n;
};

// Monotone capacitance-change -> force map.
struct CalibrationCurve {
    std::vector<double> knots_c_pf; // strictly increasing
    std::vector<double> knots_f_n;  // strictly increasing
    double residual_rms_n = 0.0;
    double residual_max_n = 0.0;
    double c_min_pf = 0.0;
    double c_max_pf = 0.0;
};

// Pools every cycle's samples, bins them by capacitance into at most `knots`
// knots (plus extrapolated endpoints), projects the knot forces onto a
// monotone sequence and reports residuals of the input samples against the
// final curve. Throws CalibrationError when capacitance does not increase
// with force on average.
CalibrationCurve fit_force_calibration(const std::vector<PressReleaseTrace>& cycles,
                                       int knots = 64);

struct ForceEstimate {
    double force_n;
    bool out_of_range; // clamped to an endpoint knot
};

// Piecewise-linear interpolation over the curve knots; inputs outside
// [c_min, c_max] clamp to the endpoint forces and set the flag.
ForceEstimate estimate_force(const CalibrationCurve& curve, double c_pf);

// Convex blend of the analytical prediction and the measurement.
double model_filter(double analytical_pf, double measured_pf,
                    double analytical_weight = 0.4, double measured_weight = 0.6);

// Baseline correction for taxels near a moving joint: the lateral and bending
// contributions relative to their rest terms.
double joint_motion_offset(const FittedCoefficients& coeffs, double alpha,
                           double theta_rad);

// Pool-adjacent-violators projection onto non-decreasing sequences
// (unit weights). Exposed for tests.
std::vector<double> isotonic_non_decreasing(const std::vector<double>& values);

} // namespace skinsim

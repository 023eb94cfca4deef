#pragma once

// Closed-form capacitance models for a single fabric taxel under axial
// compression, lateral compression and bending, plus the composition of the
// three into one predicted capacitance and a saturating force->deflection
// contact model.
//
// Units are fixed project-wide: lengths in mm, capacitance in pF, forces in N,
// angles in radians, compression/stretch ratios dimensionless.

#include <cstdint>

namespace skinsim {

// Physical parameters of one taxel. Immutable after construction; the
// constructor rejects degenerate values and enforces C0 == eps0 * L^2 / h0.
struct TaxelGeometry {
    double side_length_mm;          // electrode side length L
    double dielectric_thickness_mm; // rest thickness h0
    double permittivity_pf_per_mm;  // lumped eps0, so that C = eps0 * A / d is in pF
    double base_capacitance_pf;     // C0 at rest
    double bend_inner_radius_mm;    // Ra of the bent region
    double m_lateral;               // permittivity slope per unit compression ratio
    double m_bend;                  // permittivity slope per radian of bending

    TaxelGeometry(double side_length_mm, double dielectric_thickness_mm,
                  double permittivity_pf_per_mm, double base_capacitance_pf,
                  double bend_inner_radius_mm, double m_lateral, double m_bend);

    // C0 derived from the plate formula.
    static TaxelGeometry from_permittivity(double side_length_mm,
                                           double dielectric_thickness_mm,
                                           double permittivity_pf_per_mm,
                                           double bend_inner_radius_mm,
                                           double m_lateral, double m_bend);

    // eps0 derived so the plate formula reproduces the given C0.
    static TaxelGeometry from_base_capacitance(double side_length_mm,
                                               double dielectric_thickness_mm,
                                               double base_capacitance_pf,
                                               double bend_inner_radius_mm,
                                               double m_lateral, double m_bend);
};

// Instantaneous deformation of a taxel. Valid against a geometry when
// 0 <= x < h0, 0 <= alpha < 1, theta >= 0 and s >= 0.
struct DeformationState {
    double axial_deflection_mm = 0.0; // x
    double lateral_ratio = 0.0;       // alpha
    double bend_angle_rad = 0.0;      // theta
    double stretch_ratio = 0.0;       // s
};

// Throws std::domain_error when the state violates its bounds.
void validate_state(const TaxelGeometry& geom, const DeformationState& state);

struct InverseLawCoeffs {
    double a; // pF * mm
    double b; // pF
};

struct QuadCoeffs {
    double c2;
    double c1;
    double c0;
};

// Fitted per-deformation models for the reference sensor. Defaults are the
// fits measured for the 3 cm production taxel.
struct FittedCoefficients {
    InverseLawCoeffs axial{5.88, 2.16};
    QuadCoeffs lateral{0.44, 0.87, 5.99};
    QuadCoeffs bending{0.024, 0.041, 5.99};

    // Throws std::domain_error unless axial.a > 0 and both constant terms > 0.
    void validate() const;
};

// Default attenuation of capacitance change per unit of lateral stretch.
inline constexpr double kDefaultStretchSensitivity = 0.3;

// C = eps * A / d. All arguments strictly positive.
double parallel_plate_capacitance(double eps, double area_mm2, double dist_mm);

// C = 2*pi*eps*L / ln(Rb/Ra). Requires Rb > Ra > 0 and L > 0.
double cylindrical_capacitance(double eps, double length_mm, double ra_mm,
                               double rb_mm);

// C(h1) = a/h1 + b, strictly decreasing in h1 > 0.
double axial_capacitance(const FittedCoefficients& coeffs, double h1_mm);

// C(alpha) = c2*alpha^2 + c1*alpha + c0 for alpha in [0, 1).
double lateral_capacitance(const FittedCoefficients& coeffs, double alpha);

// C(theta) = c2*theta^2 + c1*theta + c0 for theta >= 0.
double bending_capacitance(const FittedCoefficients& coeffs, double theta_rad);

// Linear-region plus cylindrical-region bending model:
//   C = C0*(1 - m*theta) + eps0*L/ln(1 + h0/Ra) * (theta - m*theta^2)
// Valid while m_bend * theta < 1.
double bending_capacitance_physical(const TaxelGeometry& geom, double theta_rad);

// Coefficients of the quadratic expansion of bending_capacitance_physical,
// C(theta) = c2*theta^2 + c1*theta + c0.
QuadCoeffs bending_physical_quadratic(const TaxelGeometry& geom);

// Axial value at thickness h0 - x, plus the lateral and bending contributions
// as offsets from their zero-deformation constant terms. The deformation
// offsets are attenuated by (1 - k_s * s); the axial baseline is not.
double combined_capacitance(const TaxelGeometry& geom,
                            const FittedCoefficients& coeffs,
                            const DeformationState& state,
                            double stretch_sensitivity = kDefaultStretchSensitivity);

// Saturating contact model x(F) = x_max * (1 - exp(-F / F_c)), x_max < h0.
struct StiffnessProfile {
    double max_deflection_mm; // x_max
    double force_constant_n;  // F_c

    // F_c chosen in closed form so that target_force_n maps to an axial
    // deflection producing exactly target_dc_pf of capacitance change.
    static StiffnessProfile tuned(const TaxelGeometry& geom,
                                  const FittedCoefficients& coeffs,
                                  double target_dc_pf = 5.0,
                                  double target_force_n = 55.0,
                                  double max_deflection_fraction = 0.8);
};

// Deflection for a non-negative normal force. Strictly increasing, zero at
// zero force, saturating at max_deflection_mm.
double force_to_deflection(const StiffnessProfile& stiffness, double force_n);

// Closed-form inverse of the force -> capacitance-change composition:
// the capacitance change produced by pressing with force_n, and the force
// that produces a given capacitance change.
double force_to_capacitance_change(const TaxelGeometry& geom,
                                   const FittedCoefficients& coeffs,
                                   const StiffnessProfile& stiffness,
                                   double force_n);
double capacitance_change_to_force(const TaxelGeometry& geom,
                                   const FittedCoefficients& coeffs,
                                   const StiffnessProfile& stiffness,
                                   double dc_pf);

// Reference taxel: 30 mm square, rest thickness chosen so the axial baseline
// a/h0 + b coincides with the 5.99 pF constant term shared by the lateral and
// bending fits.
TaxelGeometry default_geometry();

// Geometry, fitted models and contact stiffness of one sensor build.
struct SensorModel {
    TaxelGeometry geometry;
    FittedCoefficients coeffs;
    StiffnessProfile stiffness;
    double stretch_sensitivity = kDefaultStretchSensitivity;

    // Reference build: default geometry and coefficients, stiffness tuned to
    // the 5 pF / 55 N endpoint.
    static SensorModel reference();

    double baseline_pf() const {
        return axial_capacitance(coeffs, geometry.dielectric_thickness_mm);
    }
};

} // namespace skinsim

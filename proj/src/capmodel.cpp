#include "skinsim/capmodel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace skinsim {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kConsistencyTol = 1e-9;

void require(bool ok, const char* what) {
    if (!ok) {
        throw std::domain_error(what);
    }
}

} // namespace

TaxelGeometry::TaxelGeometry(double side_length_mm, double dielectric_thickness_mm,
                             double permittivity_pf_per_mm, double base_capacitance_pf,
                             double bend_inner_radius_mm, double m_lateral,
                             double m_bend)
    : side_length_mm(side_length_mm),
      dielectric_thickness_mm(dielectric_thickness_mm),
      permittivity_pf_per_mm(permittivity_pf_per_mm),
      base_capacitance_pf(base_capacitance_pf),
      bend_inner_radius_mm(bend_inner_radius_mm),
      m_lateral(m_lateral),
      m_bend(m_bend) {
    require(side_length_mm > 0.0, "taxel geometry: side length must be positive");
    require(dielectric_thickness_mm > 0.0,
            "taxel geometry: dielectric thickness must be positive");
    require(permittivity_pf_per_mm > 0.0,
            "taxel geometry: permittivity must be positive");
    require(base_capacitance_pf > 0.0,
            "taxel geometry: base capacitance must be positive");
    require(bend_inner_radius_mm > 0.0,
            "taxel geometry: bend radius must be positive");
    require(m_lateral >= 0.0, "taxel geometry: m_lateral must be non-negative");
    require(m_bend >= 0.0, "taxel geometry: m_bend must be non-negative");

    const double plate = permittivity_pf_per_mm * side_length_mm * side_length_mm /
                         dielectric_thickness_mm;
    require(std::abs(plate - base_capacitance_pf) <=
                kConsistencyTol * base_capacitance_pf,
            "taxel geometry: C0 inconsistent with eps0 * L^2 / h0");
}

TaxelGeometry TaxelGeometry::from_permittivity(double side_length_mm,
                                               double dielectric_thickness_mm,
                                               double permittivity_pf_per_mm,
                                               double bend_inner_radius_mm,
                                               double m_lateral, double m_bend) {
    require(dielectric_thickness_mm > 0.0,
            "taxel geometry: dielectric thickness must be positive");
    const double c0 = permittivity_pf_per_mm * side_length_mm * side_length_mm /
                      dielectric_thickness_mm;
    return TaxelGeometry(side_length_mm, dielectric_thickness_mm,
                         permittivity_pf_per_mm, c0, bend_inner_radius_mm, m_lateral,
                         m_bend);
}

TaxelGeometry TaxelGeometry::from_base_capacitance(double side_length_mm,
                                                   double dielectric_thickness_mm,
                                                   double base_capacitance_pf,
                                                   double bend_inner_radius_mm,
                                                   double m_lateral, double m_bend) {
    require(side_length_mm > 0.0, "taxel geometry: side length must be positive");
    const double eps0 = base_capacitance_pf * dielectric_thickness_mm /
                        (side_length_mm * side_length_mm);
    return TaxelGeometry(side_length_mm, dielectric_thickness_mm, eps0,
                         base_capacitance_pf, bend_inner_radius_mm, m_lateral,
                         m_bend);
}

void validate_state(const TaxelGeometry& geom, const DeformationState& state) {
    require(state.axial_deflection_mm >= 0.0 &&
                state.axial_deflection_mm < geom.dielectric_thickness_mm,
            "deformation state: axial deflection must lie in [0, h0)");
    require(state.lateral_ratio >= 0.0 && state.lateral_ratio < 1.0,
            "deformation state: lateral ratio must lie in [0, 1)");
    require(state.bend_angle_rad >= 0.0,
            "deformation state: bend angle must be non-negative");
    require(state.stretch_ratio >= 0.0,
            "deformation state: stretch ratio must be non-negative");
}

void FittedCoefficients::validate() const {
    require(axial.a > 0.0, "fitted coefficients: axial slope must be positive");
    require(lateral.c0 > 0.0,
            "fitted coefficients: lateral constant term must be positive");
    require(bending.c0 > 0.0,
            "fitted coefficients: bending constant term must be positive");
}

double parallel_plate_capacitance(double eps, double area_mm2, double dist_mm) {
    require(eps > 0.0 && area_mm2 > 0.0 && dist_mm > 0.0,
            "parallel plate capacitance: all inputs must be positive");
    return eps * area_mm2 / dist_mm;
}

double cylindrical_capacitance(double eps, double length_mm, double ra_mm,
                               double rb_mm) {
    require(eps > 0.0, "cylindrical capacitance: permittivity must be positive");
    require(length_mm > 0.0, "cylindrical capacitance: length must be positive");
    require(ra_mm > 0.0, "cylindrical capacitance: inner radius must be positive");
    require(rb_mm > ra_mm,
            "cylindrical capacitance: outer radius must exceed inner radius");
    return 2.0 * kPi * eps * length_mm / std::log(rb_mm / ra_mm);
}

double axial_capacitance(const FittedCoefficients& coeffs, double h1_mm) {
    require(h1_mm > 0.0, "axial capacitance: thickness must be positive");
    return coeffs.axial.a / h1_mm + coeffs.axial.b;
}

double lateral_capacitance(const FittedCoefficients& coeffs, double alpha) {
    require(alpha >= 0.0 && alpha < 1.0,
            "lateral capacitance: ratio must lie in [0, 1)");
    const QuadCoeffs& q = coeffs.lateral;
    return (q.c2 * alpha + q.c1) * alpha + q.c0;
}

double bending_capacitance(const FittedCoefficients& coeffs, double theta_rad) {
    require(theta_rad >= 0.0, "bending capacitance: angle must be non-negative");
    const QuadCoeffs& q = coeffs.bending;
    return (q.c2 * theta_rad + q.c1) * theta_rad + q.c0;
}

double bending_capacitance_physical(const TaxelGeometry& geom, double theta_rad) {
    require(theta_rad >= 0.0, "bending capacitance: angle must be non-negative");
    require(geom.m_bend * theta_rad < 1.0,
            "bending capacitance: angle exceeds model validity (m*theta >= 1)");
    const double linear = geom.base_capacitance_pf * (1.0 - geom.m_bend * theta_rad);
    const double k = geom.permittivity_pf_per_mm * geom.side_length_mm /
                     std::log(1.0 + geom.dielectric_thickness_mm /
                                        geom.bend_inner_radius_mm);
    const double bent = k * (theta_rad - geom.m_bend * theta_rad * theta_rad);
    return linear + bent;
}

QuadCoeffs bending_physical_quadratic(const TaxelGeometry& geom) {
    const double k = geom.permittivity_pf_per_mm * geom.side_length_mm /
                     std::log(1.0 + geom.dielectric_thickness_mm /
                                        geom.bend_inner_radius_mm);
    return QuadCoeffs{-geom.m_bend * k, k - geom.m_bend * geom.base_capacitance_pf,
                      geom.base_capacitance_pf};
}

double combined_capacitance(const TaxelGeometry& geom,
                            const FittedCoefficients& coeffs,
                            const DeformationState& state,
                            double stretch_sensitivity) {
    validate_state(geom, state);
    const double baseline = axial_capacitance(coeffs, geom.dielectric_thickness_mm);
    const double axial = axial_capacitance(
        coeffs, geom.dielectric_thickness_mm - state.axial_deflection_mm);
    const double lateral_offset =
        lateral_capacitance(coeffs, state.lateral_ratio) - coeffs.lateral.c0;
    const double bending_offset =
        bending_capacitance(coeffs, state.bend_angle_rad) - coeffs.bending.c0;
    const double attenuation = 1.0 - stretch_sensitivity * state.stretch_ratio;
    const double delta = (axial - baseline) + lateral_offset + bending_offset;
    return baseline + attenuation * delta;
}

StiffnessProfile StiffnessProfile::tuned(const TaxelGeometry& geom,
                                         const FittedCoefficients& coeffs,
                                         double target_dc_pf, double target_force_n,
                                         double max_deflection_fraction) {
    require(target_dc_pf > 0.0, "stiffness profile: target dC must be positive");
    require(target_force_n > 0.0, "stiffness profile: target force must be positive");
    require(max_deflection_fraction > 0.0 && max_deflection_fraction < 1.0,
            "stiffness profile: deflection fraction must lie in (0, 1)");
    const double h0 = geom.dielectric_thickness_mm;
    const double x_max = max_deflection_fraction * h0;
    // dC(x) = a*x / (h0*(h0 - x)) inverted at the target change.
    const double x_target =
        target_dc_pf * h0 * h0 / (coeffs.axial.a + target_dc_pf * h0);
    require(x_target < x_max,
            "stiffness profile: target dC unreachable below the deflection cap");
    const double f_c = target_force_n / std::log(x_max / (x_max - x_target));
    return StiffnessProfile{x_max, f_c};
}

double force_to_deflection(const StiffnessProfile& stiffness, double force_n) {
    require(force_n >= 0.0, "force to deflection: force must be non-negative");
    return stiffness.max_deflection_mm *
           (1.0 - std::exp(-force_n / stiffness.force_constant_n));
}

double force_to_capacitance_change(const TaxelGeometry& geom,
                                   const FittedCoefficients& coeffs,
                                   const StiffnessProfile& stiffness,
                                   double force_n) {
    const double x = force_to_deflection(stiffness, force_n);
    const double h0 = geom.dielectric_thickness_mm;
    return coeffs.axial.a * x / (h0 * (h0 - x));
}

double capacitance_change_to_force(const TaxelGeometry& geom,
                                   const FittedCoefficients& coeffs,
                                   const StiffnessProfile& stiffness,
                                   double dc_pf) {
    require(dc_pf >= 0.0,
            "capacitance change to force: change must be non-negative");
    const double h0 = geom.dielectric_thickness_mm;
    const double x = dc_pf * h0 * h0 / (coeffs.axial.a + dc_pf * h0);
    require(x < stiffness.max_deflection_mm,
            "capacitance change to force: change exceeds the deflection cap");
    return -stiffness.force_constant_n *
           std::log(1.0 - x / stiffness.max_deflection_mm);
}

TaxelGeometry default_geometry() {
    const FittedCoefficients coeffs{};
    const double c0 = coeffs.lateral.c0;
    const double h0 = coeffs.axial.a / (c0 - coeffs.axial.b);
    return TaxelGeometry::from_base_capacitance(30.0, h0, c0, 40.0, 1.1452, 0.1);
}

SensorModel SensorModel::reference() {
    const TaxelGeometry geom = default_geometry();
    const FittedCoefficients coeffs{};
    return SensorModel{geom, coeffs, StiffnessProfile::tuned(geom, coeffs)};
}

} // namespace skinsim

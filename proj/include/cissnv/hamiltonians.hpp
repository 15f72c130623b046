// Hamiltonian builders. All terms are in angular-frequency units (rad/s).
#pragma once

#include "cissnv/constants.hpp"
#include "cissnv/spinmath.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cissnv {

struct HamiltonianTerm {
    std::string label;
    ComplexMatrix matrix;
};

/// Sum of term matrices; all terms must share one dimension.
ComplexMatrix sum_terms(const std::vector<HamiltonianTerm>& terms, int dim);

struct GFactorPair {
    double g1 = constants::g_e;
    double g2 = constants::g_e;

    double delta_g() const noexcept { return g2 - g1; }
    double gamma1() const noexcept { return constants::gamma_for(g1); }
    double gamma2() const noexcept { return constants::gamma_for(g2); }

    /// g1 = g_e - dg/2, g2 = g_e + dg/2 with dg = ppm * 1e-6 * g_e.
    static GFactorPair from_delta_ppm(double ppm);
};

struct RadicalPairGeometry {
    double separation = 2e-9; // m
    Vec3 axis = Vec3::UnitZ(); // unit vector from radical-1 to radical-2

    double theta_rp() const { return std::acos(std::clamp(axis.normalized().z(), -1.0, 1.0)); }

    static RadicalPairGeometry from_angle(double separation, double theta_rp);
    void validate() const;
};

enum class DipolarMode { Full, SecularOnly, SecularPlusPseudosecular };

/// Lab-frame radical-pair Zeeman term Bz (g1 Sz1 + g2 Sz2).
HamiltonianTerm zeeman_rp(double bz, const GFactorPair& g, const SpinRegister& reg = radical_pair_register());

/// Zeeman term in the frame rotating at gamma_e * Bz: only g-factor offsets survive.
HamiltonianTerm zeeman_rp_rotating(double bz, const GFactorPair& g,
                                   const SpinRegister& reg = radical_pair_register());

/// d = kappa12 (1 - 3 cos^2 theta_RP) / s^3.
double dipolar_d(const RadicalPairGeometry& geom, const GFactorPair& g);

HamiltonianTerm dipolar_rp(const RadicalPairGeometry& geom, const GFactorPair& g, DipolarMode mode,
                           const SpinRegister& reg = radical_pair_register());

/// Register [nv (spin 1), radical-1, radical-2].
SpinRegister nv_radical_pair_register();

/// D Tz^2 + gamma_nv Bz Tz on the spin-1 site labelled "nv".
HamiltonianTerm nv_ground(double bz, const SpinRegister& reg);

/// A = kappa (1 - 3 cos^2 theta) / r^3, the coefficient of Tz Sz.
double secular_coupling(double r, double theta, double gamma_target);

/// Shift of the |0> -> |+1> line for target <Sz> = m: A m. The |0> -> |-1> line moves by -A m.
double nv_line_shift(double r, double theta, double gamma_target, double m);

/// A Tz Sz between "nv" and `target_label`. The nv site may be spin 1, or a two-level
/// {|0>, |-1>} site stored as a spin-1/2 slot (Tz -> diag(0, -1)).
HamiltonianTerm nv_target_secular(double r, double theta, double gamma_target, const SpinRegister& reg,
                                  const std::string& target_label);

/// Tz restricted to {|0>, |-1>}.
ComplexMatrix nv_two_level_tz();

} // namespace cissnv

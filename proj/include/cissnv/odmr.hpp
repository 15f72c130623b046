// Pulsed ODMR of an NV centre coupled to one radical pair, and the four-line
// stick-spectrum predictor.
#pragma once

#include "cissnv/engine.hpp"

#include <string>
#include <vector>

namespace cissnv {

struct SensingGeometry {
    double r1 = 5e-9; // NV to radical-1 (m)
    double r2 = 7e-9; // NV to radical-2 (m)
    double theta1 = 0;
    double theta2 = 0;
    bool collinear = true;

    /// NV, radical-1 and radical-2 on one line along B: r2 = depth + s.
    static SensingGeometry collinear_stack(double depth, double separation);
    void validate() const;
    /// Radical-pair geometry implied by the layout (collinear only).
    RadicalPairGeometry pair() const;
};

struct StickLine {
    double position = 0; // rad/s, |0> -> |-1> transition
    double weight = 0;
    int zeeman_index = 0; // 0..3 = T+, P_R, P_S, T-
};

/// Four lines at -(A1 m1 + A2 m2) for every Zeeman state, weighted by its occupation.
/// lg_scaled divides positions by sqrt3.
std::vector<StickLine> stick_spectrum(const SensingGeometry& geom, const Occupations& cbar, bool lg_scaled,
                                      double gamma1 = constants::gamma_e, double gamma2 = constants::gamma_e);

struct Spectrum {
    std::vector<double> detunings; // rad/s, carrier minus bare |0> -> |-1> frequency
    std::vector<double> contrast;  // |0> population after the pulse
    std::vector<std::string> warnings;
};

struct OdmrConfig {
    InitialStateParams state{};
    bool radical_pair_present = true;
    SensingGeometry geom = SensingGeometry::collinear_stack(5e-9, 2e-9);
    GFactorPair g{};
    double bz = 40e-3;
    double omega1 = 50 * units::MHz;
    Decoupling decoupling = Decoupling::FSLG;
    double pulse_duration = 4e-6;
    std::vector<double> detunings;

    void validate() const;
};

/// Detunings -span..span inclusive in `step` increments.
std::vector<double> detuning_grid(double span, double step);

/// Rotating frames for both the NV (two-level {|0>, |-1>}) and the radical pair; piecewise-constant
/// and therefore cacheable.
Spectrum simulate_odmr(const OdmrConfig& cfg);

/// Circular: field rotating about z at the carrier frequency. Linear: 2*omega1*cos along x, which adds
/// the counter-rotating component and its Bloch-Siegert shift of the effective offset.
enum class LabDrive { Circular, Linear };

/// Radical pair in the laboratory frame with an explicitly time-dependent drive (Strang splitting, step dt).
Spectrum simulate_odmr_lab(const OdmrConfig& cfg, double dt = 0.05e-9, LabDrive drive = LabDrive::Circular);

/// Normalized first moment of (1 - contrast) about zero detuning; positive when the dip weight
/// sits at positive detuning. Needs a sweep symmetric about zero.
double spectrum_asymmetry(const Spectrum& spec);

struct Dip {
    double position = 0; // rad/s, parabola-refined
    double depth = 0;    // 1 - contrast at the grid minimum
};

/// Local minima of the contrast, deepest first.
std::vector<Dip> find_dips(const Spectrum& spec);

} // namespace cissnv

// Surface geometry: NV sensitivity maps, masked-monolayer frequency shifts and
// Monte Carlo estimates of achievable molecular densities.
#pragma once

#include "cissnv/constants.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace cissnv {

enum class Termination { Diamond001, Diamond111 };

/// NV axis to surface normal: magic angle for (001), 0 for the normal-aligned (111) NV.
double nv_axis_angle(Termination t);

/// Sign of the polarized pair: R has the spin nearer the NV up (P_R), S the opposite.
enum class Handedness : int { R = 1, S = -1 };

struct SurfaceModel {
    Termination termination = Termination::Diamond111;
    double theta_nv = 0;
    double depth = 10e-9;         // NV depth d (m)
    double mask_diameter = 20e-9; // patterned disk diameter (m)
    double linker = 1e-9;         // stand-off l between surface and the first radical (m)
    double separation = 2e-9;     // radical-pair separation s (m)
    double rho_mol = 0.15e18;     // molecules per m^2

    static SurfaceModel make(Termination t, double depth, double mask_diameter, double linker, double separation,
                             double rho_mol);
    double mask_radius() const noexcept { return mask_diameter / 2; }
    void validate() const;
};

struct SensitivityMap {
    std::vector<double> x_over_d, y_over_d;
    Eigen::MatrixXd values; // rows follow y, columns follow x; peak |value| = 1
};

/// (1 - 3 cos^2 theta) / r^3 on the surface plane above an NV at unit depth, theta measured
/// from the NV axis tilted by theta_nv about y.
SensitivityMap sensitivity_map(double theta_nv, const std::vector<double>& x_over_d,
                               const std::vector<double>& y_over_d);

/// 1 + 3 cos(2 theta), with roundoff below 1e-14 flushed to zero.
double angular_factor(double theta_nv);

struct MonolayerShift {
    double shift = 0;    // rad/s
    double shift_lg = 0; // cos(theta_LG) * shift
};

/// Closed-form shift of the |0> -> |-1> line from a disk-masked oriented monolayer.
MonolayerShift monolayer_shift_analytic(const SurfaceModel& m, Handedness h = Handedness::R);

/// Shift of the |0> -> |-1> line from one molecule standing normal to the surface at (x, y).
double molecule_shift(const SurfaceModel& m, double x, double y, Handedness h = Handedness::R);

struct NumericShift {
    double shift = 0;
    double relative_change = 0; // between this resolution and half of it
    bool converged = false;     // relative_change < 0.5%
};

/// Polar quadrature of molecule_shift over the mask disk (midpoint in radius,
/// uniform in angle).
NumericShift monolayer_shift_numeric(const SurfaceModel& m, Handedness h = Handedness::R,
                                     double radial_nodes_per_nm = 20.0, int angular_nodes = 64);

using Point2 = Eigen::Vector2d;

struct AnchorField {
    std::vector<Point2> positions;
    double width = 0, height = 0; // m
    double d_min = 0;

    double area() const noexcept { return width * height; }
    double density() const noexcept { return area() > 0 ? static_cast<double>(positions.size()) / area() : 0; }
    double min_pair_distance() const;
};

/// One trial: round(rho_anchor * area) uniform anchors in [0,w]x[0,h], visited in random order,
/// each kept iff no kept anchor lies closer than d_min.
AnchorField sample_anchor_field(double rho_anchor, double d_min, double width, double height, std::uint64_t seed);

struct DensityEstimate {
    double mean = 0;   // kept anchors per m^2
    double stddev = 0; // across trials
    std::size_t trials = 0;
    std::uint64_t seed = 0;
};

/// Trial k is seeded from (seed, k), so results do not depend on scheduling.
DensityEstimate sample_anchor_density(double rho_anchor, double d_min, double width, double height,
                                      std::size_t trials, std::uint64_t seed);

/// Anchors inside the disk of the given diameter around `center`.
std::vector<Point2> place_molecules(const AnchorField& field, double mask_diameter, const Point2& center);

/// Sum of molecule_shift over discrete positions measured relative to the NV's lateral position.
double discrete_shift(const SurfaceModel& m, const std::vector<Point2>& positions, const Point2& nv_xy,
                      Handedness h = Handedness::R);

} // namespace cissnv

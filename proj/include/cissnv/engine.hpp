// Density-matrix propagation under piecewise-constant schedules.
#pragma once

#include "cissnv/hamiltonians.hpp"
#include "cissnv/sequences.hpp"
#include "cissnv/states.hpp"

#include <optional>
#include <vector>

namespace cissnv {

struct TrajectoryDiagnostics {
    double max_trace_error = 0;
    double max_hermiticity_error = 0;
    double min_eigenvalue = 0;
    double max_unitarity_error = 0;
};

struct Trajectory {
    double dt = 0;
    double period = 0; // LG period of the attached schedule, 0 if none
    std::vector<double> times;
    /// Radical-pair observables at every step (empty when the register has no radical pair).
    std::vector<Occupations> occupations;
    std::vector<double> polarization;
    /// Full states retained every `state_stride` steps.
    std::vector<double> state_times;
    std::vector<SpinState> states;
    TrajectoryDiagnostics diagnostics;

    bool empty() const noexcept { return times.empty(); }
};

struct PropagateOptions {
    std::size_t state_stride = 0; // 0 keeps only the final state
    std::size_t check_stride = 50;
};

/// Steps rho(t + dt) = U rho U^dagger; step propagators are cached per distinct segment drive,
/// and steps straddling a segment boundary are split exactly at the boundary.
Trajectory propagate(const SpinState& rho0, const std::vector<HamiltonianTerm>& static_terms,
                     const Schedule& schedule, double dt, const PropagateOptions& opts = {});

/// Final state after the whole schedule, propagated segment by segment without time stepping.
SpinState evolve_final(const SpinState& rho0, const std::vector<HamiltonianTerm>& static_terms,
                       const Schedule& schedule);

/// Averaging window: largest multiple of the LG period within the trajectory, or all of it.
double averaging_window(const Trajectory& traj);

double time_averaged_polarization(const Trajectory& traj);
Occupations time_averaged_occupations(const Trajectory& traj);

/// (1/sqrt3)(a_RP . a_LG) p_CISS.
double analytic_pbar(const Vec3& a_rp, const LGParams& lg, double p_ciss);

/// Static radical-pair terms in the pair's rotating frame: g-offset Zeeman plus dipolar coupling.
std::vector<HamiltonianTerm> radical_pair_static_terms(const RadicalPairGeometry& geom, const GFactorPair& g,
                                                      double bz, DipolarMode mode);

enum class Decoupling { None, LG, FSLG };

Schedule decoupling_schedule(Decoupling kind, double omega1, double total);

struct SweepOptions {
    GFactorPair g;
    double bz = 40e-3;
    DipolarMode mode = DipolarMode::SecularPlusPseudosecular;
    Decoupling decoupling = Decoupling::FSLG;
};

struct SweepResult {
    std::vector<double> omega1;
    std::vector<double> pbar;
    std::vector<Occupations> cbar;
};

/// One propagation per drive amplitude; points run concurrently, results keep input order.
SweepResult decoupling_sweep(const SpinState& rho0, const RadicalPairGeometry& geom,
                             const std::vector<double>& omega1_list, double total, double dt,
                             const SweepOptions& opts = {});

} // namespace cissnv

#include "cissnv/engine.hpp"

#include "cissnv/parallel.hpp"

#include <cmath>
#include <numbers>

namespace cissnv {

namespace {

bool has_radical_pair(const SpinRegister& reg) {
    for (const auto& s : reg.sites())
        if (s.label == "radical-1") return true;
    return false;
}

/// Distinct-drive propagator cache for one register and static Hamiltonian.
class PropagatorCache {
public:
    PropagatorCache(const ComplexMatrix& h_static, const SpinRegister& reg) : h_static_(h_static), reg_(reg) {}

    const ComplexMatrix& hamiltonian(const Segment& seg) { return entry(seg).h; }

    /// exp(-i H_seg t), cached for the duration first requested with `cache_duration`.
    ComplexMatrix propagator(const Segment& seg, double t, double cache_duration) {
        Entry& e = entry(seg);
        if (t == cache_duration) {
            if (e.cached_duration != cache_duration) {
                e.u = expm_hermitian(e.h, cache_duration);
                e.cached_duration = cache_duration;
                note_unitarity(e.u);
            }
            return e.u;
        }
        ComplexMatrix u = expm_hermitian(e.h, t);
        note_unitarity(u);
        return u;
    }

    double max_unitarity_error() const noexcept { return max_unitarity_error_; }

private:
    struct Entry {
        Segment drive;
        ComplexMatrix h;
        ComplexMatrix u;
        double cached_duration = -1;
    };

    Entry& entry(const Segment& seg) {
        for (auto& e : entries_)
            if (e.drive.same_drive(seg)) return e;
        entries_.push_back({seg, h_static_ + drive_hamiltonian(seg, reg_), {}, -1});
        return entries_.back();
    }

    void note_unitarity(const ComplexMatrix& u) {
        const double err = (u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
        max_unitarity_error_ = std::max(max_unitarity_error_, err);
    }

    ComplexMatrix h_static_;
    SpinRegister reg_;
    std::vector<Entry> entries_;
    double max_unitarity_error_ = 0;
};

void check_static_terms(const std::vector<HamiltonianTerm>& terms, int dim) {
    for (const auto& t : terms)
        if (!is_hermitian(t.matrix))
            throw std::invalid_argument("static term '" + t.label + "' is not Hermitian");
    (void)sum_terms(terms, dim);
}

} // namespace

Trajectory propagate(const SpinState& rho0, const std::vector<HamiltonianTerm>& static_terms,
                     const Schedule& schedule, double dt, const PropagateOptions& opts) {
    if (!(dt > 0)) throw std::invalid_argument("time step must be positive");
    schedule.validate();
    if (schedule.segments.empty()) throw std::invalid_argument("schedule has no segments");
    for (std::size_t i = 0; i < schedule.segments.size(); ++i) {
        const bool partial_tail = schedule.partial_final_segment && i + 1 == schedule.segments.size();
        if (!partial_tail && dt > schedule.segments[i].duration * (1 + 1e-9))
            throw std::invalid_argument("time step exceeds the duration of segment '" +
                                        schedule.segments[i].label + "'");
    }
    check_physical(rho0.rho(), 1e-8);

    const SpinRegister& reg = rho0.reg();
    const int dim = rho0.dim();
    check_static_terms(static_terms, dim);
    PropagatorCache cache(sum_terms(static_terms, dim), reg);

    const bool track = has_radical_pair(reg) && rho0.basis() == Basis::Zeeman;
    const auto n_steps = static_cast<std::size_t>(std::floor(schedule.total_duration / dt * (1 + 1e-12)));

    Trajectory traj;
    traj.dt = dt;
    traj.period = schedule.period;
    traj.times.reserve(n_steps + 1);
    if (track) {
        traj.occupations.reserve(n_steps + 1);
        traj.polarization.reserve(n_steps + 1);
    }

    std::vector<double> seg_end(schedule.segments.size());
    {
        double acc = 0;
        for (std::size_t i = 0; i < seg_end.size(); ++i) seg_end[i] = acc += schedule.segments[i].duration;
    }

    ComplexMatrix rho = rho0.rho();
    auto& diag = traj.diagnostics;
    diag.min_eigenvalue = rho0.min_eigenvalue();

    auto record = [&](std::size_t k, double t) {
        traj.times.push_back(t);
        if (track) {
            const Occupations c = dim == 4 ? occupations(rho) : occupations(SpinState(rho, Basis::Zeeman, reg, false));
            traj.occupations.push_back(c);
            traj.polarization.push_back(c.polarization());
        }
        const bool last = k == n_steps;
        if ((opts.state_stride > 0 && k % opts.state_stride == 0) || last) {
            traj.state_times.push_back(t);
            traj.states.emplace_back(rho, rho0.basis(), reg, false);
        }
        if (opts.check_stride > 0 && (k % opts.check_stride == 0 || last)) {
            diag.max_trace_error = std::max(diag.max_trace_error, std::abs(rho.trace() - Complex(1, 0)));
            diag.max_hermiticity_error = std::max(diag.max_hermiticity_error, hermiticity_error(rho));
            Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho, Eigen::EigenvaluesOnly);
            diag.min_eigenvalue = std::min(diag.min_eigenvalue, es.eigenvalues().minCoeff());
        }
    };

    record(0, 0.0);
    const double eps = 1e-9 * dt;
    std::size_t seg = 0;
    for (std::size_t k = 0; k < n_steps; ++k) {
        const double t0 = static_cast<double>(k) * dt;
        const double t1 = static_cast<double>(k + 1) * dt;
        while (seg + 1 < seg_end.size() && seg_end[seg] <= t0 + eps) ++seg;

        ComplexMatrix u;
        if (seg_end[seg] >= t1 - eps || seg + 1 == seg_end.size()) {
            u = cache.propagator(schedule.segments[seg], dt, dt);
        } else {
            // Step crosses one or more segment boundaries.
            u = ComplexMatrix::Identity(dim, dim);
            double t = t0;
            std::size_t s = seg;
            while (t < t1 - eps) {
                const double end = (s + 1 == seg_end.size()) ? t1 : std::min(seg_end[s], t1);
                if (end > t + eps) u = cache.propagator(schedule.segments[s], end - t, dt) * u;
                t = end;
                if (s + 1 < seg_end.size() && seg_end[s] <= t + eps) ++s;
            }
        }
        rho = u * rho * u.adjoint();
        record(k + 1, t1);
    }
    diag.max_unitarity_error = cache.max_unitarity_error();
    return traj;
}

SpinState evolve_final(const SpinState& rho0, const std::vector<HamiltonianTerm>& static_terms,
                       const Schedule& schedule) {
    schedule.validate();
    check_physical(rho0.rho(), 1e-8);
    const int dim = rho0.dim();
    check_static_terms(static_terms, dim);
    PropagatorCache cache(sum_terms(static_terms, dim), rho0.reg());
    ComplexMatrix u = ComplexMatrix::Identity(dim, dim);
    for (const auto& seg : schedule.segments) u = cache.propagator(seg, seg.duration, seg.duration) * u;
    return SpinState(u * rho0.rho() * u.adjoint(), rho0.basis(), rho0.reg(), false);
}

double averaging_window(const Trajectory& traj) {
    if (traj.empty()) throw std::invalid_argument("empty trajectory");
    const double t_end = traj.times.back();
    if (traj.period <= 0) return t_end;
    const double n = std::floor(t_end / traj.period * (1 + 1e-12));
    return n >= 1 ? n * traj.period : t_end;
}

namespace {

/// Number of leading samples inside the averaging window.
std::size_t window_count(const Trajectory& traj, std::size_t available) {
    if (traj.empty() || available == 0) throw std::invalid_argument("empty trajectory");
    const double window = averaging_window(traj);
    const double eps = 1e-9 * traj.dt;
    std::size_t n = 0;
    while (n < available && traj.times[n] <= window + eps) ++n;
    return n;
}

} // namespace

double time_averaged_polarization(const Trajectory& traj) {
    const std::size_t n = window_count(traj, traj.polarization.size());
    double sum = 0;
    for (std::size_t i = 0; i < n; ++i) sum += traj.polarization[i];
    return sum / static_cast<double>(n);
}

Occupations time_averaged_occupations(const Trajectory& traj) {
    const std::size_t n = window_count(traj, traj.occupations.size());
    Occupations acc;
    for (std::size_t i = 0; i < n; ++i) {
        acc.t_plus += traj.occupations[i].t_plus;
        acc.p_r += traj.occupations[i].p_r;
        acc.p_s += traj.occupations[i].p_s;
        acc.t_minus += traj.occupations[i].t_minus;
    }
    const double w = 1.0 / static_cast<double>(n);
    return {acc.t_plus * w, acc.p_r * w, acc.p_s * w, acc.t_minus * w};
}

double analytic_pbar(const Vec3& a_rp, const LGParams& lg, double p_ciss) {
    if (std::abs(a_rp.norm() - 1.0) > 1e-9) throw std::invalid_argument("a_rp must be a unit vector");
    return (1.0 / std::numbers::sqrt3) * a_rp.dot(lg.axis) * p_ciss;
}

std::vector<HamiltonianTerm> radical_pair_static_terms(const RadicalPairGeometry& geom, const GFactorPair& g,
                                                      double bz, DipolarMode mode) {
    if (bz < 0) throw std::invalid_argument("Bz must be nonnegative");
    return {zeeman_rp_rotating(bz, g), dipolar_rp(geom, g, mode)};
}

Schedule decoupling_schedule(Decoupling kind, double omega1, double total) {
    switch (kind) {
    case Decoupling::None:
        return fslg_schedule(0.0, total);
    case Decoupling::LG:
        return lg_schedule(omega1, total);
    case Decoupling::FSLG:
        break;
    }
    return fslg_schedule(omega1, total);
}

SweepResult decoupling_sweep(const SpinState& rho0, const RadicalPairGeometry& geom,
                             const std::vector<double>& omega1_list, double total, double dt,
                             const SweepOptions& opts) {
    const auto terms = radical_pair_static_terms(geom, opts.g, opts.bz, opts.mode);
    SweepResult out;
    out.omega1 = omega1_list;
    out.pbar.resize(omega1_list.size());
    out.cbar.resize(omega1_list.size());
    parallel_for(omega1_list.size(), [&](std::size_t i) {
        const Schedule sched = decoupling_schedule(opts.decoupling, omega1_list[i], total);
        const Trajectory traj = propagate(rho0, terms, sched, dt, {.state_stride = 0, .check_stride = 0});
        out.pbar[i] = time_averaged_polarization(traj);
        out.cbar[i] = time_averaged_occupations(traj);
    });
    return out;
}

} // namespace cissnv

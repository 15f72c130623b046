#include "cissnv/odmr.hpp"

#include "cissnv/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cissnv {

SensingGeometry SensingGeometry::collinear_stack(double depth, double separation) {
    return {depth, depth + separation, 0.0, 0.0, true};
}

void SensingGeometry::validate() const {
    if (!(r1 > 0) || !(r2 > 0)) throw std::invalid_argument("NV-radical distances must be positive");
    if (collinear && !(r2 > r1)) throw std::invalid_argument("collinear layout needs r2 > r1");
}

RadicalPairGeometry SensingGeometry::pair() const {
    validate();
    if (!collinear) throw std::invalid_argument("pair geometry is only implied by a collinear layout");
    return RadicalPairGeometry::from_angle(r2 - r1, theta1);
}

std::vector<StickLine> stick_spectrum(const SensingGeometry& geom, const Occupations& cbar, bool lg_scaled,
                                      double gamma1, double gamma2) {
    geom.validate();
    if (std::abs(cbar.sum() - 1.0) > 1e-6) throw std::invalid_argument("stick_spectrum: weights must sum to 1");
    const double a1 = secular_coupling(geom.r1, geom.theta1, gamma1);
    const double a2 = secular_coupling(geom.r2, geom.theta2, gamma2);
    const double scale = lg_scaled ? 1.0 / std::numbers::sqrt3 : 1.0;
    const auto w = cbar.as_array();
    static constexpr double m1[4] = {0.5, 0.5, -0.5, -0.5};
    static constexpr double m2[4] = {0.5, -0.5, 0.5, -0.5};
    std::vector<StickLine> lines;
    for (int i = 0; i < 4; ++i) lines.push_back({-(a1 * m1[i] + a2 * m2[i]) * scale, w[i], i});
    return lines;
}

void OdmrConfig::validate() const {
    if (radical_pair_present) {
        state.validate();
        geom.validate();
    }
    if (bz < 0) throw std::invalid_argument("Bz must be nonnegative");
    if (omega1 < 0) throw std::invalid_argument("decoupling amplitude must be nonnegative");
    if (!(pulse_duration > 0)) throw std::invalid_argument("pulse duration must be positive");
    if (detunings.empty()) throw std::invalid_argument("detuning sweep is empty");
}

std::vector<double> detuning_grid(double span, double step) {
    if (!(step > 0) || span < 0) throw std::invalid_argument("detuning grid needs step > 0 and span >= 0");
    const auto n = static_cast<long>(std::llround(span / step));
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(2 * n + 1));
    for (long k = -n; k <= n; ++k) out.push_back(static_cast<double>(k) * step);
    return out;
}

namespace {

SpinRegister odmr_register(bool with_pair) {
    if (!with_pair) return SpinRegister({{"nv", Spin::Half}});
    return SpinRegister({{"nv", Spin::Half}, {"radical-1", Spin::Half}, {"radical-2", Spin::Half}});
}

SpinState odmr_initial_state(const OdmrConfig& cfg, const SpinRegister& reg) {
    ComplexMatrix nv0 = ComplexMatrix::Zero(2, 2);
    nv0(0, 0) = 1;
    if (!cfg.radical_pair_present) return SpinState(nv0, Basis::Zeeman, reg);
    return SpinState(kron(nv0, make_initial_state(cfg.state).rho()), Basis::Zeeman, reg);
}

/// NV-side terms shared by both paths, without the pi-pulse drive.
std::vector<HamiltonianTerm> coupling_terms(const OdmrConfig& cfg, const SpinRegister& reg) {
    std::vector<HamiltonianTerm> terms;
    if (!cfg.radical_pair_present) return terms;
    terms.push_back(nv_target_secular(cfg.geom.r1, cfg.geom.theta1, cfg.g.gamma1(), reg, "radical-1"));
    terms.push_back(nv_target_secular(cfg.geom.r2, cfg.geom.theta2, cfg.g.gamma2(), reg, "radical-2"));
    return terms;
}

double nv_zero_population(const ComplexMatrix& rho, const SpinRegister& reg) {
    return partial_trace(rho, reg, {reg.index_of("nv")})(0, 0).real();
}

void add_sweep_warnings(const OdmrConfig& cfg, Spectrum& spec) {
    const double rabi = std::numbers::pi / cfg.pulse_duration;
    const auto& d = cfg.detunings;
    for (std::size_t i = 1; i < d.size(); ++i)
        if (std::abs(d[i] - d[i - 1]) < rabi / 100) {
            spec.warnings.push_back("detuning step finer than 1% of the pulse bandwidth");
            break;
        }
}

} // namespace

Spectrum simulate_odmr(const OdmrConfig& cfg) {
    cfg.validate();
    const SpinRegister reg = odmr_register(cfg.radical_pair_present);
    const SpinState rho0 = odmr_initial_state(cfg, reg);

    std::vector<HamiltonianTerm> base = coupling_terms(cfg, reg);
    Schedule rp_schedule;
    if (cfg.radical_pair_present) {
        const RadicalPairGeometry pair = cfg.geom.pair();
        base.push_back(zeeman_rp_rotating(cfg.bz, cfg.g, reg));
        base.push_back(dipolar_rp(pair, cfg.g, DipolarMode::SecularPlusPseudosecular, reg));
        rp_schedule = decoupling_schedule(cfg.decoupling, cfg.omega1, cfg.pulse_duration);
    } else {
        rp_schedule = fslg_schedule(0.0, cfg.pulse_duration);
    }

    Spectrum spec;
    spec.detunings = cfg.detunings;
    spec.contrast.resize(cfg.detunings.size());
    add_sweep_warnings(cfg, spec);
    spec.warnings.insert(spec.warnings.end(), rp_schedule.warnings.begin(), rp_schedule.warnings.end());

    parallel_for(cfg.detunings.size(), [&](std::size_t i) {
        const Segment pulse = pi_pulse(cfg.pulse_duration, cfg.detunings[i]).segments.front();
        auto terms = base;
        terms.push_back({"pi_pulse", drive_hamiltonian(pulse, reg)});
        const SpinState out = evolve_final(rho0, terms, rp_schedule);
        spec.contrast[i] = std::clamp(nv_zero_population(out.rho(), reg), 0.0, 1.0);
    });
    return spec;
}

Spectrum simulate_odmr_lab(const OdmrConfig& cfg, double dt, LabDrive drive) {
    cfg.validate();
    if (!(dt > 0)) throw std::invalid_argument("time step must be positive");
    const SpinRegister reg = odmr_register(cfg.radical_pair_present);
    const SpinState rho0 = odmr_initial_state(cfg, reg);
    const int dim = reg.dim();

    std::vector<HamiltonianTerm> base = coupling_terms(cfg, reg);
    Schedule rp_schedule = fslg_schedule(0.0, cfg.pulse_duration);
    ComplexMatrix x_total = ComplexMatrix::Zero(dim, dim);
    Eigen::VectorXd z_total = Eigen::VectorXd::Zero(dim);
    if (cfg.radical_pair_present) {
        base.push_back(zeeman_rp(cfg.bz, cfg.g, reg));
        base.push_back(dipolar_rp(cfg.geom.pair(), cfg.g, DipolarMode::Full, reg));
        rp_schedule = decoupling_schedule(cfg.decoupling, cfg.omega1, cfg.pulse_duration);
        const auto ops = spin_operators(Spin::Half);
        const std::size_t r1 = reg.index_of("radical-1"), r2 = reg.index_of("radical-2");
        x_total = embed(ops.x, r1, reg) + embed(ops.x, r2, reg);
        z_total = (embed(ops.z, r1, reg) + embed(ops.z, r2, reg)).diagonal().real();
    }
    // The drive is always a z-rotation of a scaled x_total, so one eigendecomposition serves every step.
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> xes(x_total);
    const ComplexMatrix& v = xes.eigenvectors();
    const Eigen::VectorXd& xlam = xes.eigenvalues();
    auto x_propagator = [&](double angle) {
        ComplexMatrix m = v;
        for (int col = 0; col < dim; ++col) m.col(col) *= std::polar(1.0, -angle * xlam(col));
        return ComplexMatrix(m * v.adjoint());
    };

    // Segment start times and carrier phase accumulated at each start.
    const double w_ref = constants::gamma_e * cfg.bz;
    const auto& segs = rp_schedule.segments;
    std::vector<double> seg_start(segs.size()), theta_start(segs.size());
    std::vector<ComplexMatrix> circular(segs.size());
    {
        double t = 0, th = 0;
        for (std::size_t s = 0; s < segs.size(); ++s) {
            seg_start[s] = t;
            theta_start[s] = th;
            t += segs[s].duration;
            th += (w_ref - segs[s].offset) * segs[s].duration;
            circular[s] = x_propagator(segs[s].amplitude * dt);
        }
    }
    const auto n_steps = static_cast<std::size_t>(std::llround(cfg.pulse_duration / dt));

    Spectrum spec;
    spec.detunings = cfg.detunings;
    spec.contrast.resize(cfg.detunings.size());
    add_sweep_warnings(cfg, spec);

    parallel_for(cfg.detunings.size(), [&](std::size_t i) {
        const Segment pulse = pi_pulse(cfg.pulse_duration, cfg.detunings[i]).segments.front();
        auto terms = base;
        terms.push_back({"pi_pulse", drive_hamiltonian(pulse, reg)});
        const ComplexMatrix half = expm_hermitian(sum_terms(terms, dim), dt / 2);

        ComplexMatrix u = ComplexMatrix::Identity(dim, dim);
        Eigen::VectorXcd rz(dim);
        std::size_t s = 0;
        for (std::size_t k = 0; k < n_steps; ++k) {
            const double tm = (static_cast<double>(k) + 0.5) * dt;
            while (s + 1 < segs.size() && seg_start[s + 1] <= tm) ++s;
            const Segment& seg = segs[s];
            if (seg.target != DriveTarget::RadicalPair || seg.amplitude == 0) {
                u = half * half * u;
                continue;
            }
            const double theta = theta_start[s] + (w_ref - seg.offset) * (tm - seg_start[s]) + seg.phase;
            ComplexMatrix kick;
            if (drive == LabDrive::Circular) {
                // exp(-i theta Z) X exp(i theta Z) = cos(theta) X + sin(theta) Y
                for (int r = 0; r < dim; ++r) rz(r) = std::polar(1.0, -theta * z_total(r));
                kick = rz.asDiagonal() * circular[s] * rz.conjugate().asDiagonal();
            } else {
                kick = x_propagator(2 * seg.amplitude * std::cos(theta) * dt);
            }
            u = half * kick * half * u;
        }
        const ComplexMatrix out = u * rho0.rho() * u.adjoint();
        spec.contrast[i] = std::clamp(nv_zero_population(out, reg), 0.0, 1.0);
    });
    return spec;
}

double spectrum_asymmetry(const Spectrum& spec) {
    const auto& d = spec.detunings;
    const std::size_t n = d.size();
    if (n == 0 || spec.contrast.size() != n) throw std::invalid_argument("spectrum_asymmetry: malformed spectrum");
    double dmax = 0;
    for (double x : d) dmax = std::max(dmax, std::abs(x));
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(d[i] + d[n - 1 - i]) > 1e-6 * std::max(dmax, 1.0))
            throw std::invalid_argument("spectrum_asymmetry: detuning sweep is not symmetric about zero");
    if (dmax == 0) return 0;
    double num = 0, den = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = 1.0 - spec.contrast[i];
        num += d[i] * w;
        den += w;
    }
    return den > 0 ? num / (dmax * den) : 0.0;
}

std::vector<Dip> find_dips(const Spectrum& spec) {
    const auto& x = spec.detunings;
    const auto& c = spec.contrast;
    std::vector<Dip> dips;
    for (std::size_t i = 1; i + 1 < c.size(); ++i) {
        if (!(c[i] < c[i - 1] && c[i] <= c[i + 1])) continue;
        double pos = x[i];
        const double denom = c[i - 1] - 2 * c[i] + c[i + 1];
        if (denom > 0) {
            const double h = 0.5 * (x[i + 1] - x[i - 1]);
            pos += h * 0.5 * (c[i - 1] - c[i + 1]) / denom;
        }
        dips.push_back({pos, 1.0 - c[i]});
    }
    std::sort(dips.begin(), dips.end(), [](const Dip& a, const Dip& b) { return a.depth > b.depth; });
    return dips;
}

} // namespace cissnv

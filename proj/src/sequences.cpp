#include "cissnv/sequences.hpp"

#include "cissnv/constants.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace cissnv {

void Schedule::validate() const {
    double sum = 0;
    for (const auto& s : segments) {
        if (!(s.duration > 0)) throw std::invalid_argument("segment '" + s.label + "' has nonpositive duration");
        sum += s.duration;
    }
    if (std::abs(sum - total_duration) > 1e-12 * std::max(1.0, total_duration) + 1e-18)
        throw std::invalid_argument("schedule total duration does not equal the sum of its segments");
}

double LGParams::period() const { return omega_eff > 0 ? constants::two_pi / omega_eff : 0.0; }

LGParams lg_params(double omega1) {
    if (!(omega1 > 0)) throw std::invalid_argument("LG drive amplitude must be positive");
    LGParams p;
    p.omega1 = omega1;
    p.omega_off = omega1 / std::numbers::sqrt2;
    p.omega_eff = std::hypot(p.omega1, p.omega_off);
    p.axis = Vec3(p.omega1, 0.0, p.omega_off) / p.omega_eff;
    return p;
}

namespace {

Schedule free_schedule(double total) {
    Schedule s;
    s.segments.push_back({"free", total, DriveTarget::None, 0, 0, 0});
    s.total_duration = total;
    return s;
}

Schedule lg_like(double omega1, double total, bool switched) {
    if (!(total > 0)) throw std::invalid_argument("schedule duration must be positive");
    if (omega1 < 0) throw std::invalid_argument("LG drive amplitude must be nonnegative");
    if (omega1 == 0) return free_schedule(total);

    const LGParams lg = lg_params(omega1);
    const double tau = lg.period();
    Schedule s;
    s.period = tau;
    const auto n_full = static_cast<std::size_t>(std::floor(total / tau * (1 + 1e-12)));
    for (std::size_t k = 0; k < n_full; ++k) {
        const bool flipped = switched && (k % 2 == 1);
        s.segments.push_back({flipped ? "fslg-" : (switched ? "fslg+" : "lg"), tau, DriveTarget::RadicalPair,
                              lg.omega1, flipped ? -lg.omega_off : lg.omega_off,
                              flipped ? std::numbers::pi : 0.0});
    }
    const double rest = total - static_cast<double>(n_full) * tau;
    if (rest > 1e-9 * tau) {
        const bool flipped = switched && (n_full % 2 == 1);
        s.segments.push_back({(flipped ? "fslg-" : (switched ? "fslg+" : "lg")) + std::string("(partial)"), rest,
                              DriveTarget::RadicalPair, lg.omega1, flipped ? -lg.omega_off : lg.omega_off,
                              flipped ? std::numbers::pi : 0.0});
        s.partial_final_segment = true;
        if (n_full == 0) s.warnings.push_back("schedule shorter than one LG period");
    }
    s.total_duration = static_cast<double>(n_full) * tau + (s.partial_final_segment ? rest : 0.0);
    return s;
}

} // namespace

Schedule fslg_schedule(double omega1, double total) { return lg_like(omega1, total, true); }

Schedule lg_schedule(double omega1, double total) { return lg_like(omega1, total, false); }

Schedule pi_pulse(double duration, double detuning) {
    if (!(duration > 0)) throw std::invalid_argument("pi pulse duration must be positive");
    Schedule s;
    s.segments.push_back({"pi", duration, DriveTarget::Nv, std::numbers::pi / duration, detuning, 0.0});
    s.total_duration = duration;
    return s;
}

ComplexMatrix drive_hamiltonian(const Segment& seg, const SpinRegister& reg) {
    const int n = reg.dim();
    ComplexMatrix h = ComplexMatrix::Zero(n, n);
    switch (seg.target) {
    case DriveTarget::None:
        break;
    case DriveTarget::RadicalPair: {
        const auto s = spin_operators(Spin::Half);
        const ComplexMatrix local =
            seg.amplitude * (std::cos(seg.phase) * s.x + std::sin(seg.phase) * s.y) + seg.offset * s.z;
        for (const char* label : {"radical-1", "radical-2"}) h += embed(local, reg.index_of(label), reg);
        break;
    }
    case DriveTarget::Nv: {
        const std::size_t nv = reg.index_of("nv");
        const int d = reg.site_dim(nv);
        // Indices of |0> and |-1> within the nv site.
        const int i0 = d == 3 ? 1 : 0;
        const int im = d == 3 ? 2 : 1;
        ComplexMatrix local = ComplexMatrix::Zero(d, d);
        const Complex coupling = 0.5 * seg.amplitude * std::polar(1.0, -seg.phase);
        local(i0, im) = coupling;
        local(im, i0) = std::conj(coupling);
        local(im, im) = -seg.offset; // offset * Tz on the {|0>, |-1>} pair
        h += embed(local, nv, reg);
        break;
    }
    }
    return h;
}

std::string to_text(const Schedule& s) {
    std::ostringstream os;
    os << "# label duration_ns amplitude_MHz offset_MHz phase_rad\n";
    os << std::setprecision(10);
    for (const auto& seg : s.segments)
        os << seg.label << ' ' << seg.duration / units::ns << ' ' << seg.amplitude / units::MHz << ' '
           << seg.offset / units::MHz << ' ' << seg.phase << '\n';
    return os.str();
}

} // namespace cissnv

#include "cissnv/engine.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace cissnv;
using std::numbers::pi;

namespace {

const double mhz = oracle::two_pi * 1e6;
const RadicalPairGeometry fig_geom = RadicalPairGeometry::from_angle(2e-9, 0);

std::vector<HamiltonianTerm> pair_terms(DipolarMode mode = DipolarMode::SecularPlusPseudosecular,
                                        const GFactorPair& g = {}) {
    return radical_pair_static_terms(fig_geom, g, 40e-3, mode);
}

Trajectory run(const InitialStateParams& p, double omega1, double total, double dt,
               Decoupling kind = Decoupling::FSLG, const GFactorPair& g = {}) {
    return propagate(make_initial_state(p), pair_terms(DipolarMode::SecularPlusPseudosecular, g),
                     decoupling_schedule(kind, omega1, total), dt);
}

} // namespace

TEST_SUITE("engine") {

TEST_CASE("zero Hamiltonian keeps the state constant") {
    const SpinState rho0 = make_initial_state({0.3, 0.4, 0.8});
    const auto zero = std::vector<HamiltonianTerm>{{"zero", ComplexMatrix::Zero(4, 4)}};
    const Trajectory t = propagate(rho0, zero, fslg_schedule(0, 50e-9), 1e-9, {.state_stride = 10});
    REQUIRE(t.times.size() == 51);
    for (const auto& s : t.states) CHECK(oracle::max_abs_diff(s.rho(), rho0.rho()) < 1e-15);
    for (double p : t.polarization) CHECK(p == doctest::Approx(polarization(rho0)));
}

TEST_CASE("times are strictly increasing and states are kept at the requested stride") {
    const Trajectory t = propagate(make_initial_state({pi / 4, 0, 1}), pair_terms(), fslg_schedule(50 * mhz, 100e-9),
                                   0.05e-9, {.state_stride = 100});
    for (std::size_t i = 1; i < t.times.size(); ++i) REQUIRE(t.times[i] > t.times[i - 1]);
    CHECK(t.times.back() == doctest::Approx(100e-9));
    CHECK(t.states.size() == t.state_times.size());
    CHECK(t.states.size() == 21);
    CHECK(t.occupations.size() == t.times.size());
}

TEST_CASE("P_R under the secular term alone is stationary") {
    const Trajectory t = propagate(make_initial_state({pi / 4, 0, 1}), pair_terms(DipolarMode::SecularOnly),
                                   fslg_schedule(0, 200e-9), 0.05e-9);
    for (const auto& c : t.occupations) REQUIRE(c.p_r == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("free flip-flop oscillation runs at the inner eigenvalue gap") {
    const auto terms = pair_terms();
    const ComplexMatrix h = sum_terms(terms, 4);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(ComplexMatrix(h.block(1, 1, 2, 2)));
    const double gap = es.eigenvalues()(1) - es.eigenvalues()(0);

    const double dt = 0.05e-9, total = 1e-6;
    const Trajectory t = propagate(make_initial_state({pi / 4, 0, 1}), terms, fslg_schedule(0, total), dt);
    double lo = 1;
    for (const auto& c : t.occupations) lo = std::min(lo, c.p_r);
    CHECK(lo < 1e-4); // full interconversion into P_S

    // Peak of |sum c_PR(t) e^{-i w t}| scanned around the expected line.
    auto power = [&](double w) {
        Complex acc = 0;
        for (std::size_t k = 0; k < t.times.size(); ++k)
            acc += (t.occupations[k].p_r - 0.5) * std::polar(1.0, -w * t.times[k]);
        return std::abs(acc);
    };
    double best_w = 0, best = -1;
    for (double w = 0.5 * gap; w <= 1.5 * gap; w += 0.001 * gap)
        if (const double p = power(w); p > best) best = p, best_w = w;
    const double resolution = oracle::two_pi / total;
    CHECK(std::abs(best_w - gap) < resolution);
    CHECK(gap / oracle::two_pi == doctest::Approx(std::abs(dipolar_d(fig_geom, {})) / oracle::two_pi / 2).epsilon(1e-9));
}

TEST_CASE("propagate rejects bad inputs") {
    const SpinState rho0 = make_initial_state({pi / 4, 0, 1});
    CHECK_THROWS_AS(propagate(rho0, pair_terms(), fslg_schedule(50 * mhz, 1e-6), 0), std::invalid_argument);
    CHECK_THROWS_AS(propagate(rho0, pair_terms(), fslg_schedule(50 * mhz, 1e-6), 20e-9), std::invalid_argument);
    ComplexMatrix bad = rho0.rho();
    bad(0, 0) = 0.5;
    CHECK_THROWS_AS(propagate(SpinState(bad, Basis::Zeeman, radical_pair_register(), false), pair_terms(),
                              fslg_schedule(0, 1e-8), 1e-9),
                    std::invalid_argument);
    const auto wrong = std::vector<HamiltonianTerm>{{"x", ComplexMatrix::Zero(2, 2)}};
    CHECK_THROWS_AS(propagate(rho0, wrong, fslg_schedule(0, 1e-8), 1e-9), std::invalid_argument);
}

TEST_CASE("time averages") {
    SUBCASE("free evolution averages the polarization away") {
        CHECK(std::abs(time_averaged_polarization(run({pi / 4, 0, 1}, 0, 1e-6, 0.05e-9))) < 0.02);
    }
    SUBCASE("50 MHz FSLG retains a third") {
        CHECK(time_averaged_polarization(run({pi / 4, 0, 1}, 50 * mhz, 1e-6, 0.05e-9)) ==
              doctest::Approx(1.0 / 3).epsilon(0.06));
    }
    SUBCASE("an unpolarized singlet stays at zero") {
        CHECK(std::abs(time_averaged_polarization(run({0, 0, 1}, 0, 0.2e-6, 0.05e-9))) < 1e-12);
    }
    CHECK_THROWS_AS(time_averaged_polarization(Trajectory{}), std::invalid_argument);
}

TEST_CASE("averaging window snaps to whole LG periods") {
    const Trajectory t = run({pi / 4, 0, 1}, 50 * mhz, 1e-6, 0.05e-9);
    const double tau = lg_params(50 * mhz).period();
    CHECK(averaging_window(t) == doctest::Approx(61 * tau));
    CHECK(averaging_window(run({pi / 4, 0, 1}, 0, 0.3e-6, 0.05e-9)) == doctest::Approx(0.3e-6));
}

TEST_CASE("closed-form average polarization") {
    const LGParams lg = lg_params(50 * mhz);
    CHECK(analytic_pbar(Vec3::UnitZ(), lg, 1) == doctest::Approx(1.0 / 3));
    const Vec3 perp = lg.axis.cross(Vec3::UnitY()).normalized();
    CHECK(std::abs(analytic_pbar(perp, lg, 1)) < 1e-15);
    CHECK(analytic_pbar(Vec3::UnitZ(), lg, 0) == 0.0);
    CHECK_THROWS_AS(analytic_pbar(Vec3(0, 0, 2), lg, 1), std::invalid_argument);
}

TEST_CASE("decoupling sweep endpoints") {
    const SweepResult r = decoupling_sweep(make_initial_state({pi / 4, 0, 1}), fig_geom, {0.0, 50 * mhz}, 1e-6, 0.05e-9);
    REQUIRE(r.pbar.size() == 2);
    CHECK(std::abs(r.pbar[0]) < 0.02);
    CHECK(r.pbar[1] == doctest::Approx(1.0 / 3).epsilon(0.06));
    CHECK(std::abs(r.cbar[1].t_plus - r.cbar[1].t_minus) < 0.01);
    CHECK(r.omega1[1] == 50 * mhz);
}

TEST_CASE("sweep results keep input order") {
    const std::vector<double> w = {30 * mhz, 10 * mhz, 20 * mhz};
    const SpinState rho0 = make_initial_state({pi / 4, 0, 1});
    const SweepResult r = decoupling_sweep(rho0, fig_geom, w, 0.2e-6, 0.05e-9);
    for (std::size_t i = 0; i < w.size(); ++i) {
        const SweepResult one = decoupling_sweep(rho0, fig_geom, {w[i]}, 0.2e-6, 0.05e-9);
        CHECK(r.pbar[i] == one.pbar[0]);
    }
}

TEST_CASE("trajectories stay physical and propagators unitary") {
    for (double w : {0.0, 20.0, 50.0}) {
        const Trajectory t = run({0.4, 1.0, 0.7}, w * mhz, 1e-6, 0.05e-9);
        const auto& d = t.diagnostics;
        CHECK(d.max_trace_error < 1e-8);
        CHECK(d.max_hermiticity_error < 1e-8);
        CHECK(d.min_eigenvalue > -1e-8);
        CHECK(d.max_unitarity_error < 1e-9);
    }
}

TEST_CASE("halving the step leaves the average polarization unchanged") {
    const double a = time_averaged_polarization(run({pi / 4, 0, 1}, 50 * mhz, 1e-6, 0.05e-9));
    const double b = time_averaged_polarization(run({pi / 4, 0, 1}, 50 * mhz, 1e-6, 0.025e-9));
    CHECK(std::abs(a - b) < 1e-3);
}

TEST_CASE("the singlet does not evolve under FSLG") {
    const Trajectory t = run({0, 0, 1}, 50 * mhz, 1e-6, 0.05e-9);
    double worst = 0;
    for (const auto& c : t.occupations) {
        worst = std::max({worst, std::abs(c.t_plus), std::abs(c.p_r - 0.5), std::abs(c.p_s - 0.5), std::abs(c.t_minus)});
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("frequency switching averages out the double-quantum asymmetry from T0") {
    for (double w : {15.0, 25.0, 35.0}) {
        CAPTURE(w);
        const Occupations lg = time_averaged_occupations(run({pi / 2, 0, 1}, w * mhz, 1e-6, 0.05e-9, Decoupling::LG));
        const Occupations fs = time_averaged_occupations(run({pi / 2, 0, 1}, w * mhz, 1e-6, 0.05e-9, Decoupling::FSLG));
        CHECK(std::abs(fs.t_plus - fs.t_minus) < std::abs(lg.t_plus - lg.t_minus));
    }
}

TEST_CASE("a large g-factor difference suppresses P_R to P_S conversion") {
    auto swing = [](double ppm) {
        const Trajectory t = run({pi / 4, 0, 1}, 0, 150e-9, 0.1e-9, Decoupling::None, GFactorPair::from_delta_ppm(ppm));
        double lo = 1, hi = 0;
        for (const auto& c : t.occupations) lo = std::min(lo, c.p_r), hi = std::max(hi, c.p_r);
        return hi - lo;
    };
    const double full = swing(0), suppressed = swing(10000);
    CHECK(full > 0.99);
    CHECK(suppressed < 0.5 * full);
}

TEST_CASE("segment-wise final state agrees with stepping") {
    const SpinState rho0 = make_initial_state({0.3, 0.2, 0.9});
    const Schedule s = fslg_schedule(50 * mhz, 0.3e-6);
    const Trajectory t = propagate(rho0, pair_terms(), s, 0.05e-9);
    const SpinState f = evolve_final(rho0, pair_terms(), s);
    CHECK(occupations(f).p_r == doctest::Approx(t.occupations.back().p_r).epsilon(1e-9));
    CHECK(polarization(f) == doctest::Approx(t.polarization.back()).epsilon(1e-9));
}

}

#include "cissnv/odmr.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace cissnv;
using std::numbers::pi;

namespace {

const double khz = oracle::two_pi * 1e3;
const double mhz = oracle::two_pi * 1e6;

OdmrConfig config(InitialStateParams state, double span = 1000 * khz, double step = 10 * khz) {
    OdmrConfig c;
    c.state = state;
    c.detunings = detuning_grid(span, step);
    return c;
}

double mirror_error(const Spectrum& a, const Spectrum& b) {
    double worst = 0;
    const std::size_t n = a.contrast.size();
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(a.contrast[i] - b.contrast[n - 1 - i]));
    return worst;
}

/// LG-scaled |0> -> |-1> line of a product state from the literal coupling formula.
double stick_oracle(double r1, double r2, double m1, double m2) {
    const double a1 = -2 * oracle::kappa() / std::pow(r1, 3), a2 = -2 * oracle::kappa() / std::pow(r2, 3);
    return -(a1 * m1 + a2 * m2) / std::sqrt(3.0);
}

} // namespace

TEST_SUITE("odmr") {

TEST_CASE("stick spectrum of P_R is a single LG-scaled line") {
    const SensingGeometry g = SensingGeometry::collinear_stack(5e-9, 2e-9);
    const auto lines = stick_spectrum(g, {0, 1, 0, 0}, true);
    REQUIRE(lines.size() == 4);
    const auto& pr = lines[1];
    CHECK(pr.weight == 1.0);
    CHECK(pr.position == doctest::Approx(stick_oracle(5e-9, 7e-9, 0.5, -0.5)).epsilon(1e-9));
    CHECK(std::abs(pr.position) / khz == doctest::Approx((416 - 152) / std::sqrt(3.0)).epsilon(5e-3));
    const auto unscaled = stick_spectrum(g, {0, 1, 0, 0}, false);
    CHECK(unscaled[1].position == doctest::Approx(pr.position * std::sqrt(3.0)));
}

TEST_CASE("uniform weights give a symmetric stick spectrum") {
    const auto lines = stick_spectrum(SensingGeometry::collinear_stack(5e-9, 2e-9), {0.25, 0.25, 0.25, 0.25}, true);
    double first_moment = 0;
    for (const auto& l : lines) first_moment += l.weight * l.position;
    CHECK(std::abs(first_moment) < 1e-9 * khz);
    CHECK(lines[0].position == doctest::Approx(-lines[3].position));
}

TEST_CASE("singlet weights give a symmetric doublet") {
    const auto lines = stick_spectrum(SensingGeometry::collinear_stack(5e-9, 2e-9), {0, 0.5, 0.5, 0}, true);
    CHECK(lines[1].position == doctest::Approx(-lines[2].position));
    CHECK(lines[1].weight == lines[2].weight);
    CHECK(lines[0].weight == 0.0);
    CHECK_THROWS_AS(stick_spectrum(SensingGeometry::collinear_stack(5e-9, 2e-9), {0, 0.5, 0.4, 0}, true),
                    std::invalid_argument);
}

TEST_CASE("bare NV shows a single symmetric dip at zero") {
    OdmrConfig c = config({});
    c.radical_pair_present = false;
    const Spectrum s = simulate_odmr(c);
    const auto dips = find_dips(s);
    REQUIRE_FALSE(dips.empty());
    CHECK(std::abs(dips[0].position) < 1 * khz);
    CHECK(dips[0].depth > 0.999);
    CHECK(std::abs(spectrum_asymmetry(s)) < 1e-9);
    CHECK(mirror_error(s, s) < 1e-9);
}

TEST_CASE("contrast stays within [0, 1]") {
    const Spectrum s = simulate_odmr(config({0.3, 0.5, 0.6}));
    for (double c : s.contrast) {
        CHECK(c >= 0.0);
        CHECK(c <= 1.0);
    }
    CHECK(s.contrast.size() == s.detunings.size());
}

TEST_CASE("P_R and P_S shift the dip oppositely") {
    const Spectrum r = simulate_odmr(config({pi / 4, 0, 1}));
    const Spectrum s = simulate_odmr(config({-pi / 4, 0, 1}));
    CHECK(spectrum_asymmetry(r) > 0);
    CHECK(spectrum_asymmetry(s) < 0);
    CHECK(find_dips(r)[0].position > 0);
    CHECK(find_dips(s)[0].position < 0);
}

TEST_CASE("asymmetry sign does not depend on the coherence") {
    for (double l : {0.0, 0.5, 1.0}) {
        CAPTURE(l);
        CHECK(spectrum_asymmetry(simulate_odmr(config({pi / 4, 0, l}))) > 0);
    }
}

TEST_CASE("mirror symmetry is exact once the intra-pair coupling is negligible") {
    OdmrConfig r = config({pi / 4, 0, 1}), s = config({-pi / 4, 0, 1});
    r.geom = s.geom = SensingGeometry::collinear_stack(5e-9, 20e-9);
    CHECK(mirror_error(simulate_odmr(r), simulate_odmr(s)) < 1e-5);
}

TEST_CASE("mirror residual shrinks as the decoupling strengthens") {
    double prev = 1;
    for (double w : {50.0, 100.0, 200.0}) {
        OdmrConfig r = config({pi / 4, 0, 1}, 600 * khz, 20 * khz), s = config({-pi / 4, 0, 1}, 600 * khz, 20 * khz);
        r.omega1 = s.omega1 = w * mhz;
        const double e = mirror_error(simulate_odmr(r), simulate_odmr(s));
        CAPTURE(w);
        CHECK(e < 0.5 * prev);
        prev = e;
    }
    CHECK(prev < 0.01);
}

TEST_CASE("strong decoupling spectrum is the Rabi lineshape summed over LG-axis lines") {
    // Spins precess fast about the LG axis, so the NV sees each radical's projection on that axis:
    // m = +-1/2 with populations (1 +- cos theta_m)/2 and couplings scaled by cos theta_m.
    const double c = 1 / std::sqrt(3.0), up = (1 + c) / 2, T = 4e-6, rabi = pi / T;
    for (double a : {pi / 4, -pi / 4}) {
        const double s1 = a > 0 ? 0.5 : -0.5;
        OdmrConfig cfg = config({a, 0, 1});
        cfg.omega1 = 1000 * mhz;
        const Spectrum sim = simulate_odmr(cfg);
        double worst = 0;
        for (std::size_t i = 0; i < sim.detunings.size(); ++i) {
            double flip = 0;
            for (double m1 : {0.5, -0.5})
                for (double m2 : {0.5, -0.5}) {
                    const double w = (m1 == s1 ? up : 1 - up) * (m2 == -s1 ? up : 1 - up);
                    const double x = sim.detunings[i] - stick_oracle(5e-9, 7e-9, m1, m2);
                    const double eff = std::hypot(rabi, x);
                    flip += w * rabi * rabi / (eff * eff) * std::pow(std::sin(eff * T / 2), 2);
                }
            worst = std::max(worst, std::abs(sim.contrast[i] - (1 - flip)));
        }
        CAPTURE(a);
        CHECK(worst < 1e-3);
    }
}

TEST_CASE("asymmetry metric") {
    Spectrum s;
    s.detunings = {-2, -1, 0, 1, 2};
    s.contrast = {1, 0.5, 1, 0.5, 1};
    CHECK(spectrum_asymmetry(s) == 0.0);
    s.contrast = {1, 1, 1, 0.5, 1};
    CHECK(spectrum_asymmetry(s) == doctest::Approx(0.5));
    s.detunings = {-2, -1, 0, 1, 3};
    CHECK_THROWS_AS(spectrum_asymmetry(s), std::invalid_argument);
}

TEST_CASE("detuning grid and configuration errors") {
    const auto g = detuning_grid(1000 * khz, 10 * khz);
    CHECK(g.size() == 201);
    CHECK(g.front() == doctest::Approx(-1000 * khz));
    CHECK(g[100] == 0.0);
    CHECK_THROWS_AS(detuning_grid(1, 0), std::invalid_argument);
    OdmrConfig c = config({});
    c.detunings.clear();
    CHECK_THROWS_AS(simulate_odmr(c), std::invalid_argument);
    c = config({});
    c.geom.r1 = -1;
    CHECK_THROWS_AS(simulate_odmr(c), std::invalid_argument);
    c = config({});
    c.geom.r2 = c.geom.r1;
    CHECK_THROWS_AS(simulate_odmr(c), std::invalid_argument);
    c = config({});
    c.state.lambda = 2;
    CHECK_THROWS_AS(simulate_odmr(c), std::invalid_argument);
}

TEST_CASE("a sweep finer than the pulse can resolve is flagged") {
    CHECK(simulate_odmr(config({}, 10 * khz, 10 * khz)).warnings.empty());
    CHECK_FALSE(simulate_odmr(config({}, 2 * khz, 1 * khz)).warnings.empty());
}

TEST_CASE("dips are found deepest first with sub-step positions") {
    Spectrum s;
    for (int i = -10; i <= 10; ++i) {
        const double x = i;
        s.detunings.push_back(x);
        s.contrast.push_back(1 - 0.8 * std::exp(-(x - 3.3) * (x - 3.3)) - 0.3 * std::exp(-(x + 5) * (x + 5)));
    }
    const auto dips = find_dips(s);
    REQUIRE(dips.size() == 2);
    CHECK(dips[0].position == doctest::Approx(3.3).epsilon(0.05));
    CHECK(dips[1].position == doctest::Approx(-5).epsilon(0.02));
}

}

TEST_SUITE("odmr-lab-frame") {

TEST_CASE("laboratory-frame path reproduces the rotating-frame dips") {
    const double step = 20 * khz;
    for (InitialStateParams p : {InitialStateParams{pi / 4, 0, 1}, InitialStateParams{-pi / 4, pi / 2, 1}}) {
        const OdmrConfig c = config(p, 500 * khz, step);
        const auto fast = find_dips(simulate_odmr(c));
        const auto lab = find_dips(simulate_odmr_lab(c));
        CAPTURE(p.alpha);
        CAPTURE(p.beta);
        REQUIRE_FALSE(fast.empty());
        REQUIRE_FALSE(lab.empty());
        CHECK(std::abs(fast[0].position - lab[0].position) < step / 2);
    }
}

TEST_CASE("laboratory-frame path without the pair is the bare resonance") {
    OdmrConfig c = config({}, 300 * khz, 50 * khz);
    c.radical_pair_present = false;
    const Spectrum s = simulate_odmr_lab(c, 1e-9);
    const Spectrum f = simulate_odmr(c);
    for (std::size_t i = 0; i < s.contrast.size(); ++i) CHECK(s.contrast[i] == doctest::Approx(f.contrast[i]).epsilon(1e-9));
    CHECK_THROWS_AS(simulate_odmr_lab(c, 0), std::invalid_argument);
}

}

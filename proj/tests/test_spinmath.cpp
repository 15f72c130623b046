#include "cissnv/spinmath.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace cissnv;

TEST_SUITE("spinmath") {

TEST_CASE("spin-1/2 operators match the Pauli construction") {
    const auto s = spin_operators(Spin::Half);
    CHECK(oracle::max_abs_diff(s.x, oracle::sx()) == 0.0);
    CHECK(oracle::max_abs_diff(s.y, oracle::sy()) == 0.0);
    CHECK(oracle::max_abs_diff(s.z, oracle::sz()) == 0.0);
}

TEST_CASE("spin-1 Sz is diag(1, 0, -1)") {
    const auto s = spin_operators(Spin::One);
    ComplexMatrix expected = ComplexMatrix::Zero(3, 3);
    expected(0, 0) = 1;
    expected(2, 2) = -1;
    CHECK(oracle::max_abs_diff(s.z, expected) == 0.0);
}

TEST_CASE("raising operator takes down to up with unit coefficient") {
    const auto s = spin_operators(Spin::Half);
    const ComplexVector down = ComplexVector::Unit(2, 1);
    const ComplexVector up = ComplexVector::Unit(2, 0);
    CHECK((s.plus * down - up).norm() == doctest::Approx(0.0));
}

TEST_CASE("unsupported spin quantum numbers are rejected") {
    CHECK(spin_from_value(0.5) == Spin::Half);
    CHECK(spin_from_value(1.0) == Spin::One);
    CHECK_THROWS_AS(spin_from_value(1.5), std::invalid_argument);
    CHECK_THROWS_AS(spin_from_value(0.0), std::invalid_argument);
}

TEST_CASE("angular momentum commutation relations hold to 1e-12") {
    const Complex i(0, 1);
    for (Spin sp : {Spin::Half, Spin::One}) {
        CAPTURE(multiplicity(sp));
        const auto s = spin_operators(sp);
        CHECK(oracle::max_abs_diff(commutator(s.x, s.y), i * s.z) < 1e-12);
        CHECK(oracle::max_abs_diff(commutator(s.y, s.z), i * s.x) < 1e-12);
        CHECK(oracle::max_abs_diff(commutator(s.z, s.x), i * s.y) < 1e-12);
    }
}

TEST_CASE("register dimension and label uniqueness") {
    const SpinRegister reg({{"nv", Spin::One}, {"a", Spin::Half}, {"b", Spin::Half}});
    CHECK(reg.dim() == 12);
    CHECK(reg.index_of("b") == 2);
    CHECK_THROWS_AS(reg.index_of("c"), std::out_of_range);
    CHECK_THROWS_AS(SpinRegister({{"a", Spin::Half}, {"a", Spin::One}}), std::invalid_argument);
}

TEST_CASE("embed places the operator by register order") {
    const SpinRegister reg = radical_pair_register();
    const auto s = spin_operators(Spin::Half);
    CHECK(oracle::max_abs_diff(embed(s.z, 0, reg), oracle::kron(oracle::sz(), oracle::id2())) == 0.0);
    CHECK(oracle::max_abs_diff(embed(s.z, 1, reg), oracle::kron(oracle::id2(), oracle::sz())) == 0.0);
    ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
    expected.diagonal() << 0.5, 0.5, -0.5, -0.5;
    CHECK(oracle::max_abs_diff(embed(s.z, 0, reg), expected) == 0.0);
    CHECK(std::abs(embed(s.z, 1, reg).trace()) == 0.0);
    for (std::size_t site = 0; site < 2; ++site)
        CHECK(embed(ComplexMatrix::Identity(2, 2), site, reg).isIdentity());
}

TEST_CASE("embed rejects mismatched dimensions and bad sites") {
    const SpinRegister reg({{"nv", Spin::One}, {"a", Spin::Half}});
    CHECK_THROWS_AS(embed(spin_operators(Spin::Half).z, 0, reg), std::invalid_argument);
    CHECK_THROWS_AS(embed(spin_operators(Spin::Half).z, 2, reg), std::invalid_argument);
    CHECK_THROWS_AS(embed_pair(spin_operators(Spin::Half).z, 1, spin_operators(Spin::Half).z, 1, reg),
                    std::invalid_argument);
}

TEST_CASE("embed preserves Hermiticity and spectral norm") {
    std::mt19937_64 rng(7);
    const SpinRegister reg({{"nv", Spin::One}, {"a", Spin::Half}, {"b", Spin::Half}});
    for (std::size_t site = 0; site < reg.size(); ++site) {
        const ComplexMatrix h = oracle::random_hermitian(reg.site_dim(site), rng);
        const ComplexMatrix e = embed(h, site, reg);
        CHECK(is_hermitian(e, 1e-14));
        CHECK(spectral_norm(e) == doctest::Approx(spectral_norm(h)).epsilon(1e-12));
    }
}

TEST_CASE("expm of zero is identity") {
    CHECK(expm_hermitian(ComplexMatrix::Zero(4, 4), 3.7).isIdentity(1e-15));
}

TEST_CASE("spinor picks up a sign after a 2pi rotation") {
    const ComplexMatrix u = expm_hermitian(oracle::sz(), oracle::two_pi);
    CHECK(oracle::max_abs_diff(u, -oracle::id2()) < 1e-12);
}

TEST_CASE("expm is unitary and matches a Pade exponential") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexMatrix h = oracle::random_hermitian(4, rng);
        const ComplexMatrix u = expm_hermitian(h, 0.8);
        CHECK(oracle::max_abs_diff(u.adjoint() * u, ComplexMatrix::Identity(4, 4)) < 1e-10);
        CHECK(oracle::max_abs_diff(u, oracle::expm(h, 0.8)) < 1e-10);
    }
}

TEST_CASE("expm composes additively in time") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexMatrix h = oracle::random_hermitian(8, rng, 1e6);
        const double t1 = 1.3e-6, t2 = 0.4e-6;
        const ComplexMatrix lhs = expm_hermitian(h, t1) * expm_hermitian(h, t2);
        CHECK(oracle::max_abs_diff(lhs, expm_hermitian(h, t1 + t2)) < 1e-9);
    }
}

TEST_CASE("expm rejects non-Hermitian input") {
    ComplexMatrix a = oracle::sx();
    a(0, 1) = Complex(0.5, 0.1);
    CHECK_THROWS_AS(expm_hermitian(a, 1.0), std::invalid_argument);
}

TEST_CASE("partial trace of a product state returns the factor") {
    std::mt19937_64 rng(3);
    const SpinRegister reg({{"nv", Spin::One}, {"a", Spin::Half}, {"b", Spin::Half}});
    ComplexMatrix a = oracle::random_hermitian(3, rng), b = oracle::random_hermitian(2, rng),
                  c = oracle::random_hermitian(2, rng);
    const ComplexMatrix rho = oracle::kron(oracle::kron(a, b), c);
    CHECK(oracle::max_abs_diff(partial_trace(rho, reg, {0}), a * (b.trace() * c.trace())) < 1e-12);
    CHECK(oracle::max_abs_diff(partial_trace(rho, reg, {1, 2}), oracle::kron(b, c) * a.trace()) < 1e-12);
    CHECK_THROWS_AS(partial_trace(rho, reg, {2, 1}), std::invalid_argument);
    CHECK_THROWS_AS(partial_trace(ComplexMatrix::Identity(4, 4), reg, {0}), std::invalid_argument);
}

}

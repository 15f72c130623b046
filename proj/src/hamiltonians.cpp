#include "cissnv/hamiltonians.hpp"

#include <cmath>

namespace cissnv {

namespace {

struct PairSites {
    std::size_t a, b;
};

PairSites rp_sites(const SpinRegister& reg) {
    return {reg.index_of("radical-1"), reg.index_of("radical-2")};
}

ComplexMatrix nv_tz(const SpinRegister& reg, std::size_t site) {
    const int d = reg.site_dim(site);
    if (d == 3) return spin_operators(Spin::One).z;
    if (d == 2) return nv_two_level_tz();
    throw std::invalid_argument("nv site must be spin 1 or two-level");
}

} // namespace

ComplexMatrix sum_terms(const std::vector<HamiltonianTerm>& terms, int dim) {
    ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
    for (const auto& t : terms) {
        if (t.matrix.rows() != dim || t.matrix.cols() != dim)
            throw std::invalid_argument("Hamiltonian term '" + t.label + "' has the wrong dimension");
        h += t.matrix;
    }
    return h;
}

GFactorPair GFactorPair::from_delta_ppm(double ppm) {
    const double dg = ppm * 1e-6 * constants::g_e;
    return {constants::g_e - dg / 2, constants::g_e + dg / 2};
}

RadicalPairGeometry RadicalPairGeometry::from_angle(double separation, double theta_rp) {
    return {separation, Vec3(std::sin(theta_rp), 0.0, std::cos(theta_rp))};
}

void RadicalPairGeometry::validate() const {
    if (!(separation > 0)) throw std::invalid_argument("radical-pair separation must be positive");
    if (!(axis.norm() > 0)) throw std::invalid_argument("radical-pair axis must be nonzero");
}

HamiltonianTerm zeeman_rp(double bz, const GFactorPair& g, const SpinRegister& reg) {
    const auto [a, b] = rp_sites(reg);
    const auto sz = spin_operators(Spin::Half).z;
    return {"zeeman_rp", bz * (g.gamma1() * embed(sz, a, reg) + g.gamma2() * embed(sz, b, reg))};
}

HamiltonianTerm zeeman_rp_rotating(double bz, const GFactorPair& g, const SpinRegister& reg) {
    const auto [a, b] = rp_sites(reg);
    const auto sz = spin_operators(Spin::Half).z;
    const double w1 = bz * (g.gamma1() - constants::gamma_e);
    const double w2 = bz * (g.gamma2() - constants::gamma_e);
    return {"zeeman_rp_rotating", w1 * embed(sz, a, reg) + w2 * embed(sz, b, reg)};
}

double dipolar_d(const RadicalPairGeometry& geom, const GFactorPair& g) {
    geom.validate();
    const double c = std::cos(geom.theta_rp());
    return constants::dipolar_kappa(g.gamma1(), g.gamma2()) * (1 - 3 * c * c) / std::pow(geom.separation, 3);
}

HamiltonianTerm dipolar_rp(const RadicalPairGeometry& geom, const GFactorPair& g, DipolarMode mode,
                           const SpinRegister& reg) {
    geom.validate();
    const auto [a, b] = rp_sites(reg);
    const auto s = spin_operators(Spin::Half);
    const auto pair = [&](const ComplexMatrix& x, const ComplexMatrix& y) { return embed_pair(x, a, y, b, reg); };

    if (mode == DipolarMode::Full) {
        const double pref = constants::dipolar_kappa(g.gamma1(), g.gamma2()) / std::pow(geom.separation, 3);
        const Vec3 n = geom.axis.normalized();
        const ComplexMatrix* ops[3] = {&s.x, &s.y, &s.z};
        ComplexMatrix h = pair(s.x, s.x) + pair(s.y, s.y) + pair(s.z, s.z);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) h -= 3.0 * n(i) * n(j) * pair(*ops[i], *ops[j]);
        return {"dipolar_rp_full", pref * h};
    }

    const double d = dipolar_d(geom, g);
    ComplexMatrix h = d * pair(s.z, s.z);
    if (mode == DipolarMode::SecularPlusPseudosecular) h -= (d / 4) * (pair(s.plus, s.minus) + pair(s.minus, s.plus));
    return {mode == DipolarMode::SecularOnly ? "dipolar_rp_secular" : "dipolar_rp_secular_pseudosecular", h};
}

SpinRegister nv_radical_pair_register() {
    return SpinRegister({{"nv", Spin::One}, {"radical-1", Spin::Half}, {"radical-2", Spin::Half}});
}

HamiltonianTerm nv_ground(double bz, const SpinRegister& reg) {
    const std::size_t nv = reg.index_of("nv");
    if (reg.site_dim(nv) != 3) throw std::invalid_argument("nv_ground needs a spin-1 nv site");
    const auto t = spin_operators(Spin::One);
    const ComplexMatrix local = constants::d_zfs * t.z * t.z + constants::gamma_nv * bz * t.z;
    return {"nv_ground", embed(local, nv, reg)};
}

ComplexMatrix nv_two_level_tz() {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(1, 1) = -1;
    return m;
}

double secular_coupling(double r, double theta, double gamma_target) {
    if (!(r > 0)) throw std::invalid_argument("NV-target distance must be positive");
    const double c = std::cos(theta);
    return constants::dipolar_kappa(constants::gamma_nv, gamma_target) * (1 - 3 * c * c) / std::pow(r, 3);
}

double nv_line_shift(double r, double theta, double gamma_target, double m) {
    return secular_coupling(r, theta, gamma_target) * m;
}

HamiltonianTerm nv_target_secular(double r, double theta, double gamma_target, const SpinRegister& reg,
                                  const std::string& target_label) {
    const double a = secular_coupling(r, theta, gamma_target);
    const std::size_t nv = reg.index_of("nv");
    const std::size_t tgt = reg.index_of(target_label);
    return {"nv_secular_" + target_label,
            a * embed_pair(nv_tz(reg, nv), nv, spin_operators(Spin::Half).z, tgt, reg)};
}

} // namespace cissnv

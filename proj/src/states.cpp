#include "cissnv/states.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace cissnv {

namespace {

constexpr double kEps = 1e-12;

std::string range_message(const char* field, double value, const char* range) {
    std::ostringstream os;
    os << field << " = " << value << " outside accepted range " << range;
    return os.str();
}

} // namespace

void InitialStateParams::validate() const {
    constexpr double pi = std::numbers::pi;
    if (!(alpha >= -pi / 2 - kEps && alpha <= pi / 2 + kEps))
        throw std::invalid_argument(range_message("alpha", alpha, "[-pi/2, pi/2]"));
    if (!(beta >= -pi - kEps && beta <= pi + kEps))
        throw std::invalid_argument(range_message("beta", beta, "[-pi, pi]"));
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw std::invalid_argument(range_message("lambda", lambda, "[0, 1]"));
}

void check_physical(const ComplexMatrix& rho, double tol) {
    if (rho.rows() != rho.cols() || rho.rows() == 0) throw std::invalid_argument("density matrix must be square");
    if (!is_hermitian(rho, tol)) throw std::invalid_argument("density matrix is not Hermitian");
    if (std::abs(rho.trace().real() - 1.0) > tol || std::abs(rho.trace().imag()) > tol)
        throw std::invalid_argument("density matrix trace differs from 1");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol) throw std::invalid_argument("density matrix has a negative eigenvalue");
}

SpinState::SpinState(ComplexMatrix rho, Basis basis, SpinRegister reg, bool check)
    : rho_(std::move(rho)), basis_(basis), reg_(std::move(reg)) {
    if (rho_.rows() != reg_.dim()) throw std::invalid_argument("state dimension does not match register");
    if (check) check_physical(rho_);
}

double SpinState::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

ComplexMatrix singlet_triplet_to_zeeman() {
    const double r = std::numbers::sqrt2 / 2;
    ComplexMatrix m = ComplexMatrix::Zero(4, 4);
    m(0, 0) = 1;
    m(1, 1) = r;  // S = (|ud> - |du>)/sqrt2
    m(2, 1) = -r;
    m(1, 2) = r;  // T0 = (|ud> + |du>)/sqrt2
    m(2, 2) = r;
    m(3, 3) = 1;
    return m;
}

SpinState SpinState::in_basis(Basis target) const {
    if (target == basis_) return *this;
    if (dim() != 4) throw std::invalid_argument("basis change is defined for radical-pair (4x4) states only");
    const ComplexMatrix u = singlet_triplet_to_zeeman();
    ComplexMatrix r = target == Basis::Zeeman ? ComplexMatrix(u * rho_ * u.adjoint())
                                              : ComplexMatrix(u.adjoint() * rho_ * u);
    return SpinState(std::move(r), target, reg_, false);
}

std::pair<Complex, Complex> zq_amplitudes(double alpha, double beta) {
    const Complex phase = std::polar(1.0, beta);
    const double c = std::cos(alpha), s = std::sin(alpha);
    const double r = std::numbers::sqrt2 / 2;
    return {(c + phase * s) * r, -(c - phase * s) * r};
}

SpinState make_initial_state(const InitialStateParams& p) {
    p.validate();
    const auto [a_pr, a_ps] = zq_amplitudes(p.alpha, p.beta);
    ComplexMatrix rho = ComplexMatrix::Zero(4, 4);
    rho(1, 1) = std::norm(a_pr);
    rho(2, 2) = std::norm(a_ps);
    rho(1, 2) = p.lambda * a_pr * std::conj(a_ps);
    rho(2, 1) = std::conj(rho(1, 2));
    return SpinState(std::move(rho), Basis::Zeeman, radical_pair_register());
}

Occupations occupations(const ComplexMatrix& rho) {
    if (rho.rows() != 4 || rho.cols() != 4)
        throw std::invalid_argument("occupations: expected a 4x4 radical-pair state, got " +
                                    std::to_string(rho.rows()) + "x" + std::to_string(rho.cols()));
    return {rho(0, 0).real(), rho(1, 1).real(), rho(2, 2).real(), rho(3, 3).real()};
}

Occupations occupations(const SpinState& s) {
    if (s.dim() == 4) return occupations(s.in_basis(Basis::Zeeman).rho());
    if (s.basis() != Basis::Zeeman) throw std::invalid_argument("occupations: non-Zeeman basis on a larger register");
    const auto& reg = s.reg();
    const std::size_t r1 = reg.index_of("radical-1");
    const std::size_t r2 = reg.index_of("radical-2");
    if (r2 < r1) throw std::invalid_argument("occupations: radical-1 must precede radical-2");
    return occupations(partial_trace(s.rho(), reg, {r1, r2}));
}

double polarization(const SpinState& s) { return occupations(s).polarization(); }

double apparent_polarization(double p_ciss, double theta_rp) {
    if (std::abs(p_ciss) > 1) throw std::invalid_argument("p_ciss outside accepted range [-1, 1]");
    return p_ciss * std::cos(theta_rp);
}

SpinState rotate_to_axis(const SpinState& s, const Vec3& axis) {
    if (s.dim() != 4 || s.basis() != Basis::Zeeman)
        throw std::invalid_argument("rotate_to_axis: expected a Zeeman-basis radical-pair state");
    const Vec3 a = axis.normalized();
    const Vec3 z = Vec3::UnitZ();
    Vec3 n = z.cross(a);
    const double sin_t = n.norm();
    const double theta = std::atan2(sin_t, z.dot(a));
    if (sin_t < 1e-15) {
        if (z.dot(a) > 0) return s;
        n = Vec3::UnitX();
    } else {
        n /= sin_t;
    }
    const auto reg = radical_pair_register();
    const auto ops = spin_operators(Spin::Half);
    const ComplexMatrix gen = n.x() * (embed(ops.x, 0, reg) + embed(ops.x, 1, reg)) +
                              n.y() * (embed(ops.y, 0, reg) + embed(ops.y, 1, reg)) +
                              n.z() * (embed(ops.z, 0, reg) + embed(ops.z, 1, reg));
    const ComplexMatrix u = expm_hermitian(gen, theta);
    return SpinState(u * s.rho() * u.adjoint(), Basis::Zeeman, s.reg());
}

} // namespace cissnv

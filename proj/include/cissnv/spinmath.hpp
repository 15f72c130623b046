// Dense complex linear algebra and spin operators for small spin registers.
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cissnv {

template <typename Scalar>
using ComplexMatrixT = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using ComplexVectorT = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

using Complex = std::complex<double>;
using ComplexMatrix = ComplexMatrixT<double>;
using ComplexVector = ComplexVectorT<double>;
using Vec3 = Eigen::Vector3d;

/// Spin quantum number, stored as 2S so that 1/2 and 1 are exact.
enum class Spin : int { Half = 1, One = 2 };

constexpr int multiplicity(Spin s) noexcept { return static_cast<int>(s) + 1; }

inline Spin spin_from_value(double s) {
    if (s == 0.5) return Spin::Half;
    if (s == 1.0) return Spin::One;
    throw std::invalid_argument("unsupported spin quantum number " + std::to_string(s) +
                                " (accepted: 1/2, 1)");
}

template <typename Scalar>
struct SpinOperatorSet {
    ComplexMatrixT<Scalar> x, y, z, plus, minus;
};

/// Angular-momentum matrices (hbar = 1) in the |m = S, S-1, ..., -S> ordering.
template <typename Scalar = double>
SpinOperatorSet<Scalar> spin_operators(Spin s) {
    using C = std::complex<Scalar>;
    const int n = multiplicity(s);
    const Scalar S = static_cast<Scalar>(static_cast<int>(s)) / Scalar(2);
    SpinOperatorSet<Scalar> ops;
    ops.z = ComplexMatrixT<Scalar>::Zero(n, n);
    ops.plus = ComplexMatrixT<Scalar>::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        const Scalar m = S - static_cast<Scalar>(k);
        ops.z(k, k) = C(m, 0);
        if (k > 0) {
            // <m+1| S+ |m>
            ops.plus(k - 1, k) = C(std::sqrt(S * (S + 1) - m * (m + 1)), 0);
        }
    }
    ops.minus = ops.plus.adjoint();
    ops.x = (ops.plus + ops.minus) * C(Scalar(0.5), 0);
    ops.y = (ops.plus - ops.minus) * C(0, Scalar(-0.5));
    return ops;
}

/// Ordered list of named spins; the Hilbert space is the tensor product in list order.
class SpinRegister {
public:
    struct Site {
        std::string label;
        Spin spin;
    };

    SpinRegister() = default;
    explicit SpinRegister(std::vector<Site> sites) : sites_(std::move(sites)) {
        for (std::size_t i = 0; i < sites_.size(); ++i)
            for (std::size_t j = i + 1; j < sites_.size(); ++j)
                if (sites_[i].label == sites_[j].label)
                    throw std::invalid_argument("duplicate site label '" + sites_[i].label + "'");
    }

    std::size_t size() const noexcept { return sites_.size(); }
    const Site& site(std::size_t i) const { return sites_.at(i); }
    const std::vector<Site>& sites() const noexcept { return sites_; }

    int site_dim(std::size_t i) const { return multiplicity(site(i).spin); }

    int dim() const noexcept {
        return std::accumulate(sites_.begin(), sites_.end(), 1,
                               [](int acc, const Site& s) { return acc * multiplicity(s.spin); });
    }

    std::size_t index_of(const std::string& label) const {
        for (std::size_t i = 0; i < sites_.size(); ++i)
            if (sites_[i].label == label) return i;
        throw std::out_of_range("no site labelled '" + label + "'");
    }

    bool operator==(const SpinRegister& o) const {
        if (sites_.size() != o.sites_.size()) return false;
        for (std::size_t i = 0; i < sites_.size(); ++i)
            if (sites_[i].label != o.sites_[i].label || sites_[i].spin != o.sites_[i].spin) return false;
        return true;
    }

private:
    std::vector<Site> sites_;
};

/// Radical pair only: [radical-1, radical-2].
inline SpinRegister radical_pair_register() {
    return SpinRegister({{"radical-1", Spin::Half}, {"radical-2", Spin::Half}});
}

template <typename DA, typename DB>
auto kron(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
    using Scalar = typename DA::Scalar;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

/// Lifts a single-site operator to the full register (identity elsewhere).
template <typename Derived>
auto embed(const Eigen::MatrixBase<Derived>& op, std::size_t site, const SpinRegister& reg) {
    using Scalar = typename Derived::Scalar;
    using M = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    if (site >= reg.size())
        throw std::invalid_argument("site index " + std::to_string(site) + " outside register of size " +
                                    std::to_string(reg.size()));
    const int d = reg.site_dim(site);
    if (op.rows() != d || op.cols() != d)
        throw std::invalid_argument("operator dimension " + std::to_string(op.rows()) + "x" +
                                    std::to_string(op.cols()) + " does not match site dimension " +
                                    std::to_string(d));
    int left = 1, right = 1;
    for (std::size_t i = 0; i < site; ++i) left *= reg.site_dim(i);
    for (std::size_t i = site + 1; i < reg.size(); ++i) right *= reg.site_dim(i);
    return M(kron(kron(M::Identity(left, left), op), M::Identity(right, right)));
}

/// Product of two single-site operators on distinct sites.
template <typename DA, typename DB>
auto embed_pair(const Eigen::MatrixBase<DA>& a, std::size_t site_a, const Eigen::MatrixBase<DB>& b,
                std::size_t site_b, const SpinRegister& reg) {
    using M = Eigen::Matrix<typename DA::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    if (site_a == site_b) throw std::invalid_argument("embed_pair needs two distinct sites");
    return M(embed(a, site_a, reg) * embed(b, site_b, reg));
}

template <typename Derived>
typename Derived::RealScalar hermiticity_error(const Eigen::MatrixBase<Derived>& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& m, typename Derived::RealScalar rel_tol = 1e-10) {
    if (m.rows() != m.cols()) return false;
    if (m.size() == 0) return true;
    const auto scale = std::max<typename Derived::RealScalar>(1, m.cwiseAbs().maxCoeff());
    return hermiticity_error(m) <= rel_tol * scale;
}

/// U = exp(-i H t) for Hermitian H, via eigendecomposition.
template <typename Derived>
auto expm_hermitian(const Eigen::MatrixBase<Derived>& h, typename Derived::RealScalar t) {
    using Real = typename Derived::RealScalar;
    using C = std::complex<Real>;
    using M = Eigen::Matrix<C, Eigen::Dynamic, Eigen::Dynamic>;
    if (!is_hermitian(h)) throw std::invalid_argument("expm_hermitian: input is not Hermitian");
    if (h.rows() == 0) return M(0, 0);
    // Symmetrize to kill roundoff asymmetry before handing to the self-adjoint solver.
    const M hs = (h + h.adjoint()) * C(Real(0.5), 0);
    Eigen::SelfAdjointEigenSolver<M> es(hs);
    const auto phases = (es.eigenvalues().array() * (-t)).unaryExpr([](Real x) { return std::polar(Real(1), x); });
    return M(es.eigenvectors() * phases.matrix().asDiagonal() * es.eigenvectors().adjoint());
}

template <typename DA, typename DB>
auto commutator(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
    using M = Eigen::Matrix<typename DA::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    return M(a * b - b * a);
}

/// Largest singular value.
template <typename Derived>
typename Derived::RealScalar spectral_norm(const Eigen::MatrixBase<Derived>& m) {
    using M = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<M> svd{M(m)};
    return svd.singularValues()(0);
}

/// Partial trace keeping the listed sites (in register order).
ComplexMatrix partial_trace(const ComplexMatrix& rho, const SpinRegister& reg, const std::vector<std::size_t>& keep);

} // namespace cissnv

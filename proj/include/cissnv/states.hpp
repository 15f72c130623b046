// Radical-pair initial states and Zeeman-basis observables.
#pragma once

#include "cissnv/spinmath.hpp"

#include <array>

namespace cissnv {

enum class Basis { Zeeman, SingletTriplet };

/// Mixing angle alpha, S/T0 phase beta, coherence Lambda.
struct InitialStateParams {
    double alpha = 0.0;
    double beta = 0.0;
    double lambda = 1.0;

    void validate() const;
};

/// Density matrix tagged with its basis and register.
class SpinState {
public:
    SpinState(ComplexMatrix rho, Basis basis, SpinRegister reg, bool check = true);

    const ComplexMatrix& rho() const noexcept { return rho_; }
    Basis basis() const noexcept { return basis_; }
    const SpinRegister& reg() const noexcept { return reg_; }
    int dim() const noexcept { return static_cast<int>(rho_.rows()); }

    double trace() const { return rho_.trace().real(); }
    double purity() const { return (rho_ * rho_).trace().real(); }
    double min_eigenvalue() const;

    /// Same state expressed in the other radical-pair basis (4x4 states only).
    SpinState in_basis(Basis target) const;

private:
    ComplexMatrix rho_;
    Basis basis_;
    SpinRegister reg_;
};

/// Throws std::invalid_argument when rho is not a physical density matrix within tol.
void check_physical(const ComplexMatrix& rho, double tol = 1e-10);

/// Columns are {T+, S, T0, T-} written in the Zeeman basis {T+, P_R, P_S, T-}.
ComplexMatrix singlet_triplet_to_zeeman();

SpinState make_initial_state(const InitialStateParams& p);

/// Coefficients of P_R and P_S in the zero-quantum expansion of |psi0>.
std::pair<Complex, Complex> zq_amplitudes(double alpha, double beta);

/// Zeeman populations {T+, P_R, P_S, T-}.
struct Occupations {
    double t_plus = 0, p_r = 0, p_s = 0, t_minus = 0;

    double sum() const noexcept { return t_plus + p_r + p_s + t_minus; }
    std::array<double, 4> as_array() const noexcept { return {t_plus, p_r, p_s, t_minus}; }
    double polarization() const noexcept { return p_r - p_s; }
};

/// Zeeman occupations of a radical-pair state; larger registers are reduced to the
/// sites labelled radical-1 and radical-2 first.
Occupations occupations(const SpinState& s);
Occupations occupations(const ComplexMatrix& rho_rp_zeeman);

/// p = c_PR - c_PS, so that a state born as |P_R> carries p = +1.
double polarization(const SpinState& s);

/// Lab-frame projection p_CISS cos(theta_RP).
double apparent_polarization(double p_ciss, double theta_rp);

/// Rigid rotation of both radical spins taking the z axis onto `axis`.
SpinState rotate_to_axis(const SpinState& s, const Vec3& axis);

} // namespace cissnv

#pragma once

#include <numbers>

namespace cissnv::constants {

// CODATA 2018.
inline constexpr double mu0 = 1.25663706212e-6;       // T m / A
inline constexpr double hbar = 1.054571817e-34;       // J s
inline constexpr double mu_b = 9.2740100783e-24;      // J / T
inline constexpr double g_e = 2.00231930436256;       // free-electron g-factor (magnitude)
inline constexpr double gamma_e = mu_b * g_e / hbar;  // rad / s / T
inline constexpr double gamma_nv = gamma_e;
inline constexpr double d_zfs = 2.0 * std::numbers::pi * 2.87e9; // rad / s

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// 1 - 3 cos^2(theta) = 0.
inline const double magic_angle = 0.9553166181245093; // acos(1/sqrt(3))

/// Gyromagnetic ratio for a given g-factor.
constexpr double gamma_for(double g) noexcept { return mu_b * g / hbar; }

/// Dipolar prefactor mu0 hbar g1 g2 / 4pi, in rad/s * m^3.
constexpr double dipolar_kappa(double gamma1, double gamma2) noexcept {
    return mu0 * hbar * gamma1 * gamma2 / (4.0 * std::numbers::pi);
}

} // namespace cissnv::constants

namespace cissnv::units {
inline constexpr double nm = 1e-9;
inline constexpr double ns = 1e-9;
inline constexpr double us = 1e-6;
inline constexpr double mT = 1e-3;
inline constexpr double MHz = 2.0 * std::numbers::pi * 1e6; // rad/s per MHz
inline constexpr double kHz = 2.0 * std::numbers::pi * 1e3;
} // namespace cissnv::units

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>

#include "rydberg/lindblad.hpp"

namespace rydberg {

/// Inputs of the closed-form steady state: resonant drives and only the
/// probe-transition decay gamma_21. All in rad/us.
struct AnalyticContext {
    double omega_p = 0.0;
    double omega_c = 0.0;
    std::array<double, 4> rf_rabi{};
    double gamma_21 = 0.0;

    static AnalyticContext from_drive(const DriveConfig& drive, double gamma_21);

    double zeta() const;
    /// Omega_1^2 + ... + Omega_4^2
    double sigma_omega_sq() const;
    /// Common denominator of every element.
    double lambda() const;
};

/// Omega_1 Omega_3 - Omega_2 Omega_4, the coupling imbalance around the RF loop.
double zeta(const std::array<double, 4>& rf_rabi);

/// Probe coherence -i Omega_P gamma_21 zeta^2 / Lambda.
/// Throws DomainError when Lambda = 0.
Complex analytic_rho21(const AnalyticContext& ctx);

/// Full 6x6 closed-form steady state (Hermitian, unit trace).
/// Throws DomainError when Lambda = 0.
ComplexMatrix analytic_steady_state(const AnalyticContext& ctx);

}  // namespace rydberg

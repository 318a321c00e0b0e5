// SPDX-License-Identifier: Apache-2.0
#include "rydberg/analytic.hpp"

#include <cmath>

#include "rydberg/errors.hpp"

namespace rydberg {

AnalyticContext AnalyticContext::from_drive(const DriveConfig& drive, double gamma_21) {
    return {drive.omega_p, drive.omega_c, drive.rf_rabi, gamma_21};
}

double zeta(const std::array<double, 4>& o) { return o[0] * o[2] - o[1] * o[3]; }

double AnalyticContext::zeta() const { return rydberg::zeta(rf_rabi); }

double AnalyticContext::sigma_omega_sq() const {
    double s = 0.0;
    for (double o : rf_rabi) s += o * o;
    return s;
}

double AnalyticContext::lambda() const {
    const double z = zeta();
    const double p2 = omega_p * omega_p;
    const double c2 = omega_c * omega_c;
    const double o2 = rf_rabi[1] * rf_rabi[1];
    const double o3 = rf_rabi[2] * rf_rabi[2];
    return z * z * gamma_21 * gamma_21 + 2.0 * p2 * p2 * sigma_omega_sq() + 2.0 * ((o2 + o3) * c2 + z * z) * p2;
}

namespace {

double checked_lambda(const AnalyticContext& ctx) {
    const double lambda = ctx.lambda();
    if (!std::isfinite(lambda)) throw DomainError("analytic model: non-finite inputs");
    if (!(lambda > 0.0)) {
        throw DomainError("analytic model undefined: Lambda = 0 (zeta and Omega_P vanish together)");
    }
    return lambda;
}

}  // namespace

Complex analytic_rho21(const AnalyticContext& ctx) {
    const double lambda = checked_lambda(ctx);
    const double z = ctx.zeta();
    return {0.0, -ctx.omega_p * ctx.gamma_21 * z * z / lambda};
}

ComplexMatrix analytic_steady_state(const AnalyticContext& ctx) {
    const double lambda = checked_lambda(ctx);
    const double z = ctx.zeta();
    const double g = ctx.gamma_21;
    const double p = ctx.omega_p;
    const double c = ctx.omega_c;
    const auto& [o1, o2, o3, o4] = ctx.rf_rabi;
    const double p2 = p * p, p3 = p2 * p, p4 = p2 * p2, c2 = c * c;
    const Complex i(0.0, 1.0);

    ComplexMatrix rho = ComplexMatrix::Zero(6, 6);
    rho(0, 0) = z * z * g * g + ((o2 * o2 + o3 * o3) * c2 + z * z) * p2;
    rho(1, 1) = p2 * z * z;
    rho(2, 2) = p4 * (o2 * o2 + o3 * o3);
    rho(3, 3) = p2 * (p2 * (o3 * o3 + o4 * o4) + c2 * o3 * o3);
    rho(4, 4) = p4 * (o1 * o1 + o4 * o4);
    rho(5, 5) = p2 * (p2 * (o1 * o1 + o2 * o2) + c2 * o2 * o2);

    rho(1, 0) = -i * p * z * z * g;
    rho(2, 0) = -p3 * c * (o2 * o2 + o3 * o3);
    rho(3, 0) = i * p * c * o3 * z * g;
    rho(4, 0) = p3 * c * (o1 * o2 + o3 * o4);
    rho(5, 0) = -i * p * c * o2 * z * g;
    rho(3, 1) = -p2 * c * o3 * z;
    rho(5, 1) = p2 * c * o2 * z;
    rho(4, 2) = -p4 * (o1 * o2 + o3 * o4);
    rho(5, 3) = -p2 * (p2 * (o2 * o3 + o1 * o4) + c2 * o2 * o3);

    rho /= lambda;
    for (int col = 0; col < 6; ++col) {
        for (int row = col + 1; row < 6; ++row) rho(col, row) = std::conj(rho(row, col));
    }
    return rho;
}

}  // namespace rydberg

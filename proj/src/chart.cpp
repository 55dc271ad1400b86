#include "qps/chart.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qps {

double ChartGeometry::g_phi_phi() const {
    const double s = std::sin(theta);
    return s * s;
}

double ChartGeometry::omega_theta_phi() const { return std::sin(theta); }

double ChartGeometry::gamma_theta_phiphi() const { return -std::sin(theta) * std::cos(theta); }

double ChartGeometry::gamma_phi_thetaphi() const { return std::cos(theta) / std::sin(theta); }

double ChartGeometry::compatibility_residual() const {
    const double g[2][2] = {{g_theta_theta(), 0.0}, {0.0, g_phi_phi()}};
    const double ginv[2][2] = {{1.0, 0.0}, {0.0, 1.0 / g_phi_phi()}};
    const double w = omega_theta_phi();
    const double omega[2][2] = {{0.0, w}, {-w, 0.0}};
    double worst = 0.0;
    for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) {
            double acc = 0.0;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) acc += ginv[a][b] * omega[a][c] * omega[b][d];
            worst = std::max(worst, std::abs(acc - g[c][d]));
        }
    return worst;
}

KillingResidual killing_identity_residual_cp1(double theta, double h, double fd_step) {
    if (!(fd_step > 0)) throw std::invalid_argument("killing_identity_residual_cp1: step must be positive");
    if (theta < 2 * fd_step || theta > std::numbers::pi - 2 * fd_step)
        throw std::invalid_argument("killing_identity_residual_cp1: theta too close to a chart pole");

    // covector field of the generator: xi_theta = 0, xi_phi(theta) = 2 h sin^2(theta)
    auto xi_phi = [h](double th) {
        const double s = std::sin(th);
        return 2.0 * h * s * s;
    };
    const double d_theta_xi_phi = (xi_phi(theta + fd_step) - xi_phi(theta - fd_step)) / (2.0 * fd_step);
    // nothing depends on phi
    const double d_phi_xi_theta = 0.0;
    const double d_theta_xi_theta = 0.0;
    const double d_phi_xi_phi = 0.0;

    ChartGeometry chart{theta};
    const double gamma_p_tp = chart.gamma_phi_thetaphi();
    const double gamma_t_pp = chart.gamma_theta_phiphi();

    // grad_a xi_b = d_a xi_b - Gamma^c_ab xi_c
    const double grad_tt = d_theta_xi_theta;
    const double grad_tp = d_theta_xi_phi - gamma_p_tp * xi_phi(theta);
    const double grad_pt = d_phi_xi_theta - gamma_p_tp * xi_phi(theta);
    const double grad_pp = d_phi_xi_phi - gamma_t_pp * 0.0;

    KillingResidual out;
    out.symmetrized = std::abs(grad_tt);
    out.symmetrized = std::max(out.symmetrized, std::abs(0.5 * (grad_tp + grad_pt)));
    out.symmetrized = std::max(out.symmetrized, std::abs(grad_pp));

    // Omega^{ab} grad_a xi_b = (1/sin) (grad_tp - grad_pt); the Christoffel
    // parts cancel in the antisymmetric combination
    const double curl = (d_theta_xi_phi - d_phi_xi_theta) / std::sin(theta);
    out.divergence = std::abs(curl - 4.0 * h * std::cos(theta));
    return out;
}

}  // namespace qps

#pragma once

namespace qps {

// Polar chart of the two-level state sphere: metric ds^2 = dtheta^2 +
// sin^2(theta) dphi^2, symplectic area form Omega = sin(theta) dtheta^dphi,
// with the inverse convention Omega^{theta phi} = +1/sin(theta).
struct ChartGeometry {
    double theta = 0;

    double g_theta_theta() const { return 1.0; }
    double g_phi_phi() const;
    double omega_theta_phi() const;

    // Christoffel symbols of the round metric
    double gamma_theta_phiphi() const;   // -sin(theta) cos(theta)
    double gamma_phi_thetaphi() const;   // cot(theta)

    // max | g^{ab} Omega_ac Omega_bd - g_cd | over c, d; zero when the metric
    // and the area form fit together
    double compatibility_residual() const;
};

// Finite-difference residuals of the isometry generated by a level splitting
// of half-width h, evaluated at colatitude theta on the chart above. The
// generator is xi^phi = 2h; the energy function is h cos(theta).
struct KillingResidual {
    double symmetrized = 0;   // max component of the symmetrized derivative
    double divergence = 0;    // |Omega^{ab} grad_a xi_b - 4 h cos(theta)|
};
KillingResidual killing_identity_residual_cp1(double theta, double h, double fd_step = 1e-5);

}  // namespace qps

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "closed_form.hpp"
#include "grid.hpp"

namespace spreadadi {

/// Fourier-symbol coefficients of the scheme at one frozen point:
/// a = diffusion, b = convection, c1 = reaction, c2 = cross term (all scaled by dt).
struct AmplificationCoefficients {
    double a1 = 0.0;
    double a2 = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
};

/// Frozen-coefficient stability constants, evaluated at x = y = x_max.
struct StabilityReport {
    AmplificationCoefficients coeffs;
    double C = 0.0;      ///< a2 / a1
    double C_hat = 0.0;  ///< |c2| / a1
    double A = 0.0;      ///< admissible bound on a1
    double dt = 0.0;
    double dt_max = 0.0;
    bool satisfied = false;
};

/// Coefficients at node (x, y) for the given grid: a1 = dt s1^2 x^2/dx^2, b1 = dt r x/(2dx),
/// c1 = r dt/2, c2 = dt s1 s2 rho x y/(2 dx dy), and the y analogues.
inline AmplificationCoefficients amplification_coefficients(const Grid& g, const MarketParams& p, double x, double y) {
    AmplificationCoefficients c;
    c.a1 = g.dt * p.sigma1 * p.sigma1 * x * x / (g.dx * g.dx);
    c.a2 = g.dt * p.sigma2 * p.sigma2 * y * y / (g.dy * g.dy);
    c.b1 = g.dt * p.r * x / (2.0 * g.dx);
    c.b2 = g.dt * p.r * y / (2.0 * g.dy);
    c.c1 = 0.5 * p.r * g.dt;
    c.c2 = g.dt * p.sigma1 * p.sigma2 * p.rho * x * y / (2.0 * g.dx * g.dy);
    return c;
}

/// A = min{2/C_hat, 1/(1 + 2 C_hat), 1/(4 C_hat^2 + 2 C_hat)}; terms with C_hat = 0 drop out.
inline double admissible_a1(double c_hat) {
    double a = 1.0 / (1.0 + 2.0 * c_hat);
    if (c_hat > 0.0) a = std::min({a, 2.0 / c_hat, 1.0 / (4.0 * c_hat * c_hat + 2.0 * c_hat)});
    return a;
}

/// Sufficient condition dt <= A dx^2 / (max(s1^2, s2^2) x_max^2). A violated bound is
/// reported, not enforced.
inline StabilityReport stability_bound(const Grid& g, const MarketParams& p) {
    p.validate();
    StabilityReport rep;
    rep.coeffs = amplification_coefficients(g, p, g.x_max, g.y_max);
    // C and C_hat are grid independent at the frozen point x = y = x_max.
    rep.C = (p.sigma2 * p.sigma2) / (p.sigma1 * p.sigma1);
    rep.C_hat = std::abs(p.rho) * p.sigma2 / (2.0 * p.sigma1);
    rep.A = admissible_a1(rep.C_hat);
    const double s2max = std::max(p.sigma1 * p.sigma1, p.sigma2 * p.sigma2);
    rep.dt = g.dt;
    rep.dt_max = s2max > 0.0 ? rep.A * g.dx * g.dx / (s2max * g.x_max * g.x_max)
                             : std::numeric_limits<double>::infinity();
    rep.satisfied = rep.dt <= rep.dt_max;
    return rep;
}

/// |g(theta, phi)|^2 of the Peaceman-Rachford scheme with frozen coefficients.
inline double evaluate_amplification(double theta, double phi, const AmplificationCoefficients& c) {
    const double sh = std::sin(0.5 * theta);
    const double sp = std::sin(0.5 * phi);
    const double st = std::sin(theta);
    const double sf = std::sin(phi);
    const double cross = c.c2 * st * sf;
    const double ux = 1.0 - c.a1 * sh * sh - cross;
    const double uy = 1.0 - c.a2 * sp * sp - c.c1 - cross;
    const double dxp = 1.0 + c.a1 * sh * sh;
    const double dyp = 1.0 + c.a2 * sp * sp + c.c1;
    const double bx = c.b1 * c.b1 * st * st;
    const double by = c.b2 * c.b2 * sf * sf;
    return ((ux * ux + bx) * (uy * uy + by)) / ((dxp * dxp + bx) * (dyp * dyp + by));
}

/// Max of |g|^2 over an n x n grid of (theta, phi) in [-pi, pi]^2.
inline double max_amplification(const AmplificationCoefficients& c, int n = 101) {
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const double theta = -M_PI + 2.0 * M_PI * i / (n - 1);
        for (int j = 0; j < n; ++j) {
            const double phi = -M_PI + 2.0 * M_PI * j / (n - 1);
            worst = std::max(worst, evaluate_amplification(theta, phi, c));
        }
    }
    return worst;
}

}  // namespace spreadadi

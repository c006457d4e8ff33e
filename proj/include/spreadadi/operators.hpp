#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "closed_form.hpp"
#include "grid.hpp"
#include "tridiagonal.hpp"

namespace spreadadi {

/// Split of the -rV reaction term: theta goes to A_x, (1 - theta) to A_y.
/// The schemes and the stability constants here assume theta = 0.
struct OperatorConfig {
    double theta = 0.0;
};

/// Surface extended by one fictitious node on every side; indices run -1..M+1, -1..N+1.
class PaddedSurface {
public:
    PaddedSurface(std::size_t nx, std::size_t ny) : nx_(nx + 2), ny_(ny + 2), v_(nx_ * ny_, 0.0) {}

    double& operator()(std::ptrdiff_t m, std::ptrdiff_t n) { return v_[idx(m, n)]; }
    double operator()(std::ptrdiff_t m, std::ptrdiff_t n) const { return v_[idx(m, n)]; }

private:
    std::size_t idx(std::ptrdiff_t m, std::ptrdiff_t n) const {
        return static_cast<std::size_t>(m + 1) * ny_ + static_cast<std::size_t>(n + 1);
    }
    std::size_t nx_;
    std::size_t ny_;
    std::vector<double> v_;
};

/// Ghost nodes by linear extrapolation, V_{-1} = 2V_0 - V_1 and V_{M+1} = 2V_M - V_{M-1},
/// first along x for every n, then along y for every m including the ghost columns,
/// so corners are extrapolated twice (exact for bilinear data).
inline PaddedSurface ghost_extrapolate(const Surface& s) {
    const auto M = static_cast<std::ptrdiff_t>(s.nx()) - 1;
    const auto N = static_cast<std::ptrdiff_t>(s.ny()) - 1;
    if (M < 2 || N < 2)
        throw std::invalid_argument("ghost_extrapolate: need at least 3 nodes per axis");
    PaddedSurface p(s.nx(), s.ny());
    for (std::ptrdiff_t m = 0; m <= M; ++m)
        for (std::ptrdiff_t n = 0; n <= N; ++n)
            p(m, n) = s(static_cast<std::size_t>(m), static_cast<std::size_t>(n));
    for (std::ptrdiff_t n = 0; n <= N; ++n) {
        p(-1, n) = 2.0 * p(0, n) - p(1, n);
        p(M + 1, n) = 2.0 * p(M, n) - p(M - 1, n);
    }
    for (std::ptrdiff_t m = -1; m <= M + 1; ++m) {
        p(m, -1) = 2.0 * p(m, 0) - p(m, 1);
        p(m, N + 1) = 2.0 * p(m, N) - p(m, N - 1);
    }
    return p;
}

/// A_dx V: 1/2 s1^2 x^2 V_xx + r x V_x - r theta V with centered differences.
inline Surface apply_adx(const Surface& v, const Grid& g, const MarketParams& p, const OperatorConfig& cfg) {
    require_match(v, g, "apply_adx");
    const PaddedSurface e = ghost_extrapolate(v);
    Surface out(g, 0.0, v.time_index());
    const double inv_dx2 = 1.0 / (g.dx * g.dx);
    const double inv_2dx = 1.0 / (2.0 * g.dx);
    for (std::size_t m = 0; m <= g.M; ++m) {
        const double x = g.x(m);
        const double diff = 0.5 * p.sigma1 * p.sigma1 * x * x * inv_dx2;
        const double conv = p.r * x * inv_2dx;
        const auto i = static_cast<std::ptrdiff_t>(m);
        for (std::size_t n = 0; n <= g.N; ++n) {
            const auto j = static_cast<std::ptrdiff_t>(n);
            out(m, n) = diff * (e(i + 1, j) - 2.0 * e(i, j) + e(i - 1, j)) +
                        conv * (e(i + 1, j) - e(i - 1, j)) - p.r * cfg.theta * e(i, j);
        }
    }
    return out;
}

/// A_dy V: 1/2 s2^2 y^2 V_yy + r y V_y - r (1 - theta) V.
inline Surface apply_ady(const Surface& v, const Grid& g, const MarketParams& p, const OperatorConfig& cfg) {
    require_match(v, g, "apply_ady");
    const PaddedSurface e = ghost_extrapolate(v);
    Surface out(g, 0.0, v.time_index());
    const double inv_dy2 = 1.0 / (g.dy * g.dy);
    const double inv_2dy = 1.0 / (2.0 * g.dy);
    for (std::size_t m = 0; m <= g.M; ++m) {
        const auto i = static_cast<std::ptrdiff_t>(m);
        for (std::size_t n = 0; n <= g.N; ++n) {
            const double y = g.y(n);
            const double diff = 0.5 * p.sigma2 * p.sigma2 * y * y * inv_dy2;
            const double conv = p.r * y * inv_2dy;
            const auto j = static_cast<std::ptrdiff_t>(n);
            out(m, n) = diff * (e(i, j + 1) - 2.0 * e(i, j) + e(i, j - 1)) +
                        conv * (e(i, j + 1) - e(i, j - 1)) - p.r * (1.0 - cfg.theta) * e(i, j);
        }
    }
    return out;
}

/// A_dxdy V: s1 s2 rho x y V_xy with the four-point cross stencil.
inline Surface apply_adxdy(const Surface& v, const Grid& g, const MarketParams& p) {
    require_match(v, g, "apply_adxdy");
    Surface out(g, 0.0, v.time_index());
    if (p.rho == 0.0 || p.sigma1 == 0.0 || p.sigma2 == 0.0) return out;
    const PaddedSurface e = ghost_extrapolate(v);
    const double scale = p.sigma1 * p.sigma2 * p.rho / (4.0 * g.dx * g.dy);
    for (std::size_t m = 0; m <= g.M; ++m) {
        const auto i = static_cast<std::ptrdiff_t>(m);
        for (std::size_t n = 0; n <= g.N; ++n) {
            const auto j = static_cast<std::ptrdiff_t>(n);
            const double cross = e(i + 1, j + 1) - e(i + 1, j - 1) - e(i - 1, j + 1) + e(i - 1, j - 1);
            out(m, n) = scale * g.x(m) * g.y(n) * cross;
        }
    }
    return out;
}

/// Second derivatives of a surface, as used by the impact source term.
struct Curvature {
    Surface vxx;
    Surface vxy;
};

inline Curvature curvature(const Surface& v, const Grid& g) {
    require_match(v, g, "curvature");
    const PaddedSurface e = ghost_extrapolate(v);
    Curvature c{Surface(g, 0.0, v.time_index()), Surface(g, 0.0, v.time_index())};
    const double inv_dx2 = 1.0 / (g.dx * g.dx);
    const double inv_4dxdy = 1.0 / (4.0 * g.dx * g.dy);
    for (std::size_t m = 0; m <= g.M; ++m) {
        const auto i = static_cast<std::ptrdiff_t>(m);
        for (std::size_t n = 0; n <= g.N; ++n) {
            const auto j = static_cast<std::ptrdiff_t>(n);
            c.vxx(m, n) = (e(i + 1, j) - 2.0 * e(i, j) + e(i - 1, j)) * inv_dx2;
            c.vxy(m, n) = (e(i + 1, j + 1) - e(i + 1, j - 1) - e(i - 1, j + 1) + e(i - 1, j - 1)) * inv_4dxdy;
        }
    }
    return c;
}

/// One-dimensional operator along a grid line as a tridiagonal matrix, with the
/// ghost relations folded into the first and last rows. Row i applied to a line
/// equals the padded-stencil operator at node i.
struct LineOperator {
    std::vector<double> lower;
    std::vector<double> diag;
    std::vector<double> upper;

    std::size_t size() const { return diag.size(); }
};

/// Coefficients for 1/2 sigma^2 z^2 d2/dz2 + r z d/dz - reaction on nodes z_i = i h, i = 0..K.
inline LineOperator make_line_operator(std::size_t K, double h, double sigma, double r, double reaction) {
    LineOperator op{std::vector<double>(K + 1, 0.0), std::vector<double>(K + 1, 0.0),
                    std::vector<double>(K + 1, 0.0)};
    for (std::size_t i = 0; i <= K; ++i) {
        const double z = static_cast<double>(i) * h;
        const double d = 0.5 * sigma * sigma * z * z / (h * h);
        const double c = r * z / (2.0 * h);
        if (i == 0) {
            // V_{-1} = 2V_0 - V_1: diffusion cancels, convection becomes a one-sided difference
            op.diag[i] = -2.0 * c - reaction;
            op.upper[i] = 2.0 * c;
        } else if (i == K) {
            op.lower[i] = -2.0 * c;
            op.diag[i] = 2.0 * c - reaction;
        } else {
            op.lower[i] = d - c;
            op.diag[i] = -2.0 * d - reaction;
            op.upper[i] = d + c;
        }
    }
    return op;
}

inline LineOperator line_operator_x(const Grid& g, const MarketParams& p, const OperatorConfig& cfg) {
    return make_line_operator(g.M, g.dx, p.sigma1, p.r, p.r * cfg.theta);
}

inline LineOperator line_operator_y(const Grid& g, const MarketParams& p, const OperatorConfig& cfg) {
    return make_line_operator(g.N, g.dy, p.sigma2, p.r, p.r * (1.0 - cfg.theta));
}

/// Assemble (I - w A) for one line; `w` is dt/2 in the half-steps.
inline TridiagonalSystem implicit_system(const LineOperator& op, double w, std::span<const double> rhs) {
    const std::size_t n = op.size();
    if (rhs.size() != n) throw std::invalid_argument("implicit_system: rhs length mismatch");
    TridiagonalSystem sys(n);
    for (std::size_t i = 0; i < n; ++i) {
        sys.lower[i] = -w * op.lower[i];
        sys.diag[i] = 1.0 - w * op.diag[i];
        sys.upper[i] = -w * op.upper[i];
        sys.rhs[i] = rhs[i];
    }
    return sys;
}

}  // namespace spreadadi

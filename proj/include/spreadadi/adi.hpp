#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "closed_form.hpp"
#include "grid.hpp"
#include "impact.hpp"
#include "operators.hpp"
#include "tridiagonal.hpp"

namespace spreadadi {

/// Non-finite values appeared while marching; usually a grid far outside the stability bound.
class InstabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct AdiConfig {
    OperatorConfig op;
    /// Second V1 half-step applies the cross term to V0^{l+1/2} instead of V1^{l+1/2}.
    /// Off by default; only the V1 reading is consistent with the splitting of the
    /// forced equation. Kept for comparison runs.
    bool cross_term_from_v0 = false;
};

/// Impact forcing G on one time level.
struct SourceTerm {
    Surface values;
};

struct SolveResult {
    std::vector<Surface> v0_levels;  ///< index l = 0..L
    std::vector<Surface> v1_levels;
    Surface combined_t0;             ///< V0 + epsilon V1 at l = 0
    double epsilon = 0.0;
};

/// Prices read off the l = 0 surfaces at one spot.
struct SpotPrice {
    double s1 = 0.0;
    double s2 = 0.0;
    double v0 = 0.0;
    double excess = 0.0;  ///< epsilon V1
    double combined = 0.0;
};

namespace detail {

// (I - w A_dx) out = rhs, one system per y-line n.
inline void solve_x_lines(const LineOperator& ax, double w, const Surface& rhs, Surface& out) {
    const std::size_t nx = rhs.nx();
    const std::size_t ny = rhs.ny();
    std::vector<double> lo(nx), di(nx), up(nx), b(nx), x(nx), scratch(nx);
    for (std::size_t i = 0; i < nx; ++i) {
        lo[i] = -w * ax.lower[i];
        di[i] = 1.0 - w * ax.diag[i];
        up[i] = -w * ax.upper[i];
    }
    for (std::size_t n = 0; n < ny; ++n) {
        for (std::size_t m = 0; m < nx; ++m) b[m] = rhs(m, n);
        solve_tridiagonal(lo, di, up, b, x, scratch);
        for (std::size_t m = 0; m < nx; ++m) out(m, n) = x[m];
    }
}

// (I - w A_dy) out = rhs, one system per x-line m.
inline void solve_y_lines(const LineOperator& ay, double w, const Surface& rhs, Surface& out) {
    const std::size_t nx = rhs.nx();
    const std::size_t ny = rhs.ny();
    std::vector<double> lo(ny), di(ny), up(ny), b(ny), x(ny), scratch(ny);
    for (std::size_t j = 0; j < ny; ++j) {
        lo[j] = -w * ay.lower[j];
        di[j] = 1.0 - w * ay.diag[j];
        up[j] = -w * ay.upper[j];
    }
    for (std::size_t m = 0; m < nx; ++m) {
        for (std::size_t n = 0; n < ny; ++n) b[n] = rhs(m, n);
        solve_tridiagonal(lo, di, up, b, x, scratch);
        for (std::size_t n = 0; n < ny; ++n) out(m, n) = x[n];
    }
}

// rhs += w * A v, A acting along y (per x-line).
inline void add_y_explicit(const LineOperator& ay, double w, const Surface& v, Surface& rhs) {
    const std::size_t ny = v.ny();
    for (std::size_t m = 0; m < v.nx(); ++m) {
        for (std::size_t n = 0; n < ny; ++n) {
            double a = ay.diag[n] * v(m, n);
            if (n > 0) a += ay.lower[n] * v(m, n - 1);
            if (n + 1 < ny) a += ay.upper[n] * v(m, n + 1);
            rhs(m, n) += w * a;
        }
    }
}

// rhs += w * A v, A acting along x (per y-line).
inline void add_x_explicit(const LineOperator& ax, double w, const Surface& v, Surface& rhs) {
    const std::size_t nx = v.nx();
    for (std::size_t m = 0; m < nx; ++m) {
        for (std::size_t n = 0; n < v.ny(); ++n) {
            double a = ax.diag[m] * v(m, n);
            if (m > 0) a += ax.lower[m] * v(m - 1, n);
            if (m + 1 < nx) a += ax.upper[m] * v(m + 1, n);
            rhs(m, n) += w * a;
        }
    }
}

inline void add_scaled(double w, const Surface& s, Surface& rhs) {
    auto& r = rhs.values();
    const auto& v = s.values();
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += w * v[i];
}

inline void check_finite(const Surface& s, const char* what, std::size_t l) {
    if (!s.all_finite())
        throw InstabilityError(std::string(what) + ": non-finite values at time level " + std::to_string(l));
}

// (I - w A_dx) V^{l+1/2} = (I + w A_dy) V^{l+1} + w A_dxdy V^{l+1} - w G^{l+1}
inline Surface first_half_step(const Surface& v_next, const Grid& g, const MarketParams& p,
                               const OperatorConfig& op, const Surface* forcing) {
    const double w = 0.5 * g.dt;
    Surface rhs = v_next;
    add_y_explicit(line_operator_y(g, p, op), w, v_next, rhs);
    add_scaled(w, apply_adxdy(v_next, g, p), rhs);
    if (forcing) add_scaled(-w, *forcing, rhs);
    Surface half(g, 0.0, v_next.time_index());
    solve_x_lines(line_operator_x(g, p, op), w, rhs, half);
    return half;
}

// (I - w A_dy) V^l = (I + w A_dx) V^{l+1/2} + w A_dxdy C - w G^l
inline Surface second_half_step(const Surface& half, const Surface& cross_input, const Grid& g,
                                const MarketParams& p, const OperatorConfig& op, const Surface* forcing,
                                std::size_t level) {
    const double w = 0.5 * g.dt;
    Surface rhs = half;
    add_x_explicit(line_operator_x(g, p, op), w, half, rhs);
    add_scaled(w, apply_adxdy(cross_input, g, p), rhs);
    if (forcing) add_scaled(-w, *forcing, rhs);
    Surface out(g, 0.0, level);
    solve_y_lines(line_operator_y(g, p, op), w, rhs, out);
    return out;
}

inline std::size_t previous_level(const Surface& s, const char* who) {
    if (s.time_index() == 0)
        throw std::invalid_argument(std::string(who) + ": cannot step back from level 0");
    return s.time_index() - 1;
}

}  // namespace detail

/// Auxiliary level V0^{l+1/2} of the V0 scheme, implicit in x.
inline Surface half_step_v0(const Surface& v_next, const Grid& g, const MarketParams& p, const AdiConfig& cfg) {
    require_match(v_next, g, "half_step_v0");
    return detail::first_half_step(v_next, g, p, cfg.op, nullptr);
}

/// One Peaceman-Rachford step of the liquid equation, level l+1 -> l.
inline Surface step_v0(const Surface& v_next, const Grid& g, const MarketParams& p, const AdiConfig& cfg) {
    require_match(v_next, g, "step_v0");
    const std::size_t l = detail::previous_level(v_next, "step_v0");
    const Surface half = detail::first_half_step(v_next, g, p, cfg.op, nullptr);
    Surface out = detail::second_half_step(half, half, g, p, cfg.op, nullptr, l);
    detail::check_finite(out, "step_v0", l);
    return out;
}

/// Backward march from the payoff at l = L down to l = 0. Returns every level.
inline std::vector<Surface> solve_v0(const Grid& g, const MarketParams& p, const SpreadPayoff& payoff,
                                     const AdiConfig& cfg) {
    p.validate();
    std::vector<Surface> levels(g.L + 1);
    levels[g.L] = payoff_surface(g, payoff);
    for (std::size_t l = g.L; l-- > 0;)
        levels[l] = step_v0(levels[l + 1], g, p, cfg);
    return levels;
}

/// Same march as solve_v0 but keeps only the current level; returns l = 0.
inline Surface solve_v0_t0(const Grid& g, const MarketParams& p, const SpreadPayoff& payoff, const AdiConfig& cfg) {
    p.validate();
    Surface v = payoff_surface(g, payoff);
    for (std::size_t l = g.L; l-- > 0;)
        v = step_v0(v, g, p, cfg);
    return v;
}

/// G = -lambda_hat (2 rho s1 s2 x y Vxy Vxx + s1^2 x^2 Vxx^2 + s2^2 y^2 Vxy^2),
/// lambda_hat taken at (t_l, x_m).
inline SourceTerm compute_G(const Surface& v0, const Grid& g, const MarketParams& p, const ImpactParams& impact,
                            double t_l, double T) {
    require_match(v0, g, "compute_G");
    SourceTerm src{Surface(g, 0.0, v0.time_index())};
    std::vector<double> lam(g.nx());
    bool any = false;
    for (std::size_t m = 0; m <= g.M; ++m) {
        lam[m] = lambda_hat(t_l, g.x(m), T, impact);
        any = any || lam[m] != 0.0;
    }
    if (!any) return src;
    const Curvature c = curvature(v0, g);
    for (std::size_t m = 0; m <= g.M; ++m) {
        if (lam[m] == 0.0) continue;
        const double sx = p.sigma1 * g.x(m);
        for (std::size_t n = 0; n <= g.N; ++n) {
            const double a = sx * c.vxx(m, n);
            const double b = p.sigma2 * g.y(n) * c.vxy(m, n);
            // a^2 + b^2 + 2 rho a b written as a sum of squares so rounding cannot flip its sign
            const double u = a + p.rho * b;
            src.values(m, n) = -lam[m] * (u * u + (1.0 - p.rho * p.rho) * b * b);
        }
    }
    return src;
}

/// One Peaceman-Rachford step of the forced equation, level l+1 -> l.
/// `v0_half` (V0^{l+1/2}) is only read when cfg.cross_term_from_v0 is set.
inline Surface step_v1(const Surface& v1_next, const SourceTerm& g_next, const SourceTerm& g_cur, const Grid& g,
                       const MarketParams& p, const AdiConfig& cfg, const Surface* v0_half = nullptr) {
    require_match(v1_next, g, "step_v1");
    require_match(g_next.values, g, "step_v1");
    require_match(g_cur.values, g, "step_v1");
    const std::size_t l = detail::previous_level(v1_next, "step_v1");
    const Surface half = detail::first_half_step(v1_next, g, p, cfg.op, &g_next.values);
    const Surface* cross = &half;
    if (cfg.cross_term_from_v0) {
        if (!v0_half) throw std::invalid_argument("step_v1: cross term from V0 needs V0^{l+1/2}");
        cross = v0_half;
    }
    Surface out = detail::second_half_step(half, *cross, g, p, cfg.op, &g_cur.values, l);
    detail::check_finite(out, "step_v1", l);
    return out;
}

/// V0 march, G on every stored V0 level, V1 march, then V0 + epsilon V1 at t = 0.
inline SolveResult solve_full(const Grid& g, const MarketParams& p, const ImpactParams& impact,
                              const SpreadPayoff& payoff, const AdiConfig& cfg) {
    impact.validate();
    SolveResult res;
    res.epsilon = impact.epsilon;
    res.v0_levels = solve_v0(g, p, payoff, cfg);

    res.v1_levels.resize(g.L + 1);
    res.v1_levels[g.L] = Surface(g, 0.0, g.L);
    SourceTerm g_next = compute_G(res.v0_levels[g.L], g, p, impact, g.t(g.L), g.T);
    for (std::size_t l = g.L; l-- > 0;) {
        SourceTerm g_cur = compute_G(res.v0_levels[l], g, p, impact, g.t(l), g.T);
        if (cfg.cross_term_from_v0) {
            const Surface v0_half = half_step_v0(res.v0_levels[l + 1], g, p, cfg);
            res.v1_levels[l] = step_v1(res.v1_levels[l + 1], g_next, g_cur, g, p, cfg, &v0_half);
        } else {
            res.v1_levels[l] = step_v1(res.v1_levels[l + 1], g_next, g_cur, g, p, cfg);
        }
        g_next = std::move(g_cur);
    }

    res.combined_t0 = res.v0_levels[0];
    const auto& v1 = res.v1_levels[0].values();
    auto& out = res.combined_t0.values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += impact.epsilon * v1[i];
    return res;
}

inline SpotPrice price_at(const SolveResult& res, const Grid& g, double s1, double s2) {
    SpotPrice sp;
    sp.s1 = s1;
    sp.s2 = s2;
    sp.v0 = interpolate_at(res.v0_levels.front(), g, s1, s2);
    sp.excess = res.epsilon * interpolate_at(res.v1_levels.front(), g, s1, s2) + 0.0;  // no -0
    sp.combined = interpolate_at(res.combined_t0, g, s1, s2);
    return sp;
}

/// epsilon V1 at t = 0 as a surface.
inline Surface excess_surface(const SolveResult& res) {
    Surface s = res.v1_levels.front();
    for (double& v : s.values()) v *= res.epsilon;
    return s;
}

}  // namespace spreadadi

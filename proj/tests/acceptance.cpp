// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <spreadadi/spreadadi.hpp>

using namespace spreadadi;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool passed = true;
    std::ostringstream detail;
};

int failures = 0;

void report(int id, const std::string& title, Outcome& o) {
    std::printf("%s criterion %d (%s): %s\n", o.passed ? "PASS" : "FAIL", id, title.c_str(), o.detail.str().c_str());
    std::fflush(stdout);
    if (!o.passed) ++failures;
}

const std::array<double, 4> kRhos{0.1, 0.5, 0.7, 0.9};
const std::array<double, 5> kMaturities{0.1, 0.3, 0.5, 0.7, 1.0};

// Reference convergence table: rows per rho are (50,100), middle rung, (200,200), closed form.
const double kTable2[4][4][5] = {
    {{8.1979, 9.1570, 10.0519, 10.8369, 11.8622},
     {8.2110, 9.1892, 10.0930, 10.8757, 11.9579},
     {8.2153, 9.2373, 10.1607, 10.9727, 12.0041},
     {8.2323, 9.2462, 10.1723, 10.9892, 12.0666}},
    {{8.0088, 8.5425, 9.1276, 9.6662, 10.5095},
     {8.0591, 8.5983, 9.1961, 9.7205, 10.5405},
     {8.0687, 8.6222, 9.2209, 9.7843, 10.5636},
     {8.0692, 8.6235, 9.2294, 9.7949, 10.5648}},
    {{7.9195, 8.2199, 8.6180, 9.0019, 9.5315},
     {7.9734, 8.2509, 8.6296, 9.0929, 9.6244},
     {7.9950, 8.3023, 8.7106, 9.1035, 9.6728},
     {8.0186, 8.3128, 8.7115, 9.1110, 9.6775}},
    {{7.9252, 7.9803, 8.1740, 8.3417, 8.6412},
     {7.9310, 7.9852, 8.1894, 8.3532, 8.6498},
     {7.9938, 8.0515, 8.2032, 8.3686, 8.6571},
     {8.0005, 8.0588, 8.2015, 8.3799, 8.6675}},
};

const std::array<double, 8> kStrikes{-15, -5, -2, 0, 2, 5, 10, 20};
const double kTable3Price[4][8] = {
    {15.0929, 7.1600, 5.3275, 4.2936, 3.4027, 2.3395, 1.1267, 0.1905},
    {14.7992, 6.2972, 4.3645, 3.3368, 2.4486, 1.4909, 0.5435, 0.0426},
    {14.7085, 5.7956, 3.7731, 2.7085, 1.8642, 0.9981, 0.2593, 0.0055},
    {14.6833, 5.2299, 3.0523, 1.9601, 1.1531, 0.4387, 0.0088, 0.0029},
};
const double kTable3Excess[4][8] = {
    {0.0001, 0.0005, 0.0005, 0.0005, 0.0005, 0.0005, 0.0003, 0.00006},
    {0.0001, 0.0007, 0.0009, 0.0009, 0.0009, 0.0007, 0.0003, 0.00003},
    {0.00006, 0.0009, 0.0013, 0.0013, 0.0012, 0.0009, 0.0004, 0.00001},
    {0.00003, 0.0013, 0.0020, 0.0020, 0.0018, 0.0012, 0.0003, 0.00000},
};

MarketParams table_market(double rho) { return {0.15, 0.10, rho, 0.05}; }

// PDE value at (112, 104) for k = 0, indexed [rho][rung][T].
double pde_cell[4][3][5];

void criterion1() {
    Outcome o;
    const auto t0 = Clock::now();
    double vals[4][5];
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 5; ++j) vals[i][j] = margrabe_price(112, 104, table_market(kRhos[i]), kMaturities[j]);
    const double elapsed = seconds_since(t0);
    double worst = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 5; ++j) {
            const double e = std::abs(vals[i][j] - kTable2[i][3][j]);
            worst = std::max(worst, e);
            if (e > 5e-4) {
                o.passed = false;
                o.detail << "rho=" << kRhos[i] << " T=" << kMaturities[j] << " got " << vals[i][j] << "; ";
            }
        }
    if (elapsed >= 1e-3) o.passed = false;
    o.detail << "20 cells, max |err| = " << worst << " (tol 5e-4), time " << elapsed * 1e3 << " ms";
    report(1, "closed-form exchange values", o);
}

void solve_table2_grid() {
    const Table2Options opt;
    for (int i = 0; i < 4; ++i) {
        const auto ladder = opt.ladder(kRhos[i]);
        for (int r = 0; r < 3; ++r)
            for (int j = 0; j < 5; ++j) {
                const Grid g = build_grid(200, ladder[r].m, ladder[r].l, kMaturities[j]);
                const Surface v = solve_v0_t0(g, table_market(kRhos[i]), {0.0}, {});
                pde_cell[i][r][j] = interpolate_at(v, g, 112, 104);
            }
    }
}

void criterion2() {
    Outcome o;
    double slowest = 0.0;
    int bad = 0;
    double worst = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 5; ++j) {
            const auto t0 = Clock::now();
            const Grid g = build_grid(200, 200, 200, kMaturities[j]);
            const double v = interpolate_at(solve_v0_t0(g, table_market(kRhos[i]), {0.0}, {}), g, 112, 104);
            slowest = std::max(slowest, seconds_since(t0));
            const double e = std::abs(v - kTable2[i][2][j]);
            worst = std::max(worst, e);
            if (e > 5e-3) {
                ++bad;
                o.detail << "rho=" << kRhos[i] << " T=" << kMaturities[j] << " got " << v << " ref "
                         << kTable2[i][2][j] << "; ";
            }
        }
    o.passed = bad == 0 && slowest < 30.0;
    o.detail << bad << "/20 cells outside 5e-3, max |err| = " << worst << ", slowest solve " << slowest << " s";
    report(2, "finest-grid exchange values", o);
}

void criterion3() {
    Outcome o;
    int nonmono = 0;
    double e100 = 0.0, e200 = 0.0;
    double min_cell_order = HUGE_VAL;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 5; ++j) {
            const double exact = margrabe_price(112, 104, table_market(kRhos[i]), kMaturities[j]);
            const double e[3] = {std::abs(pde_cell[i][0][j] - exact), std::abs(pde_cell[i][1][j] - exact),
                                 std::abs(pde_cell[i][2][j] - exact)};
            if (!(e[1] < e[0] && e[2] < e[1])) {
                ++nonmono;
                o.detail << "rho=" << kRhos[i] << " T=" << kMaturities[j] << " errs " << e[0] << "," << e[1] << ","
                         << e[2] << "; ";
            }
            e100 = std::max(e100, e[1]);
            e200 = std::max(e200, e[2]);
            min_cell_order = std::min(min_cell_order, std::log2(e[1] / e[2]));
        }
    const double order = std::log2(e100 / e200);
    o.passed = nonmono == 0 && order >= 0.8;
    o.detail << nonmono << "/20 cells not strictly decreasing; max-norm order on finest pair " << order
             << " (need >= 0.8), smallest per-cell order " << min_cell_order;
    report(3, "convergence ladder", o);
}

void criterion4() {
    Outcome o;
    Table3Options opt;
    std::vector<double> ks(kStrikes.begin(), kStrikes.end());
    opt.strikes = ks;
    const auto cells = cmd_table3(opt);
    int bad_price = 0, bad_excess = 0, bad_sign = 0, negative = 0;
    double worst_p = 0.0, worst_e = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 8; ++j) {
            const Table3Cell& c = cells[static_cast<std::size_t>(i * 8 + j)];
            const double ep = std::abs(c.price - kTable3Price[i][j]);
            const double ee = std::abs(c.excess - kTable3Excess[i][j]);
            worst_p = std::max(worst_p, ep);
            worst_e = std::max(worst_e, ee);
            if (ep > 5e-3) ++bad_price;
            if (ee > 5e-4) ++bad_excess;
            if (kTable3Excess[i][j] > 0.0 && !(c.excess > 0.0)) ++bad_sign;
            if (c.excess < 0.0) {
                ++negative;
                o.detail << "negative excess rho=" << kRhos[i] << " k=" << kStrikes[j] << ": " << c.excess << "; ";
            }
        }
    o.passed = bad_price == 0 && bad_excess == 0 && bad_sign == 0 && negative == 0;
    o.detail << "price cells outside 5e-3: " << bad_price << "/32 (max " << worst_p << "); excess outside 5e-4: "
             << bad_excess << "/32 (max " << worst_e << "); sign flips " << bad_sign << "; negative excess "
             << negative << "/32";
    report(4, "illiquid prices and excess", o);
}

// Long-double Gaussian elimination for residual reference.
std::vector<double> dense_solve(const TridiagonalSystem& s) {
    const std::size_t n = s.size();
    std::vector<std::vector<long double>> a(n, std::vector<long double>(n + 1, 0.0L));
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) a[i][i - 1] = s.lower[i];
        a[i][i] = s.diag[i];
        if (i + 1 < n) a[i][i + 1] = s.upper[i];
        a[i][n] = s.rhs[i];
    }
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::fabs(a[r][c]) > std::fabs(a[p][c])) p = r;
        std::swap(a[c], a[p]);
        for (std::size_t r = c + 1; r < n; ++r) {
            const long double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k <= n; ++k) a[r][k] -= f * a[c][k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        long double acc = a[i][n];
        for (std::size_t k = i + 1; k < n; ++k) acc -= a[i][k] * x[k];
        x[i] = static_cast<double>(acc / a[i][i]);
    }
    return x;
}

void criterion5() {
    Outcome o;
    const MarketParams market{0.15, 0.10, 0.7, 0.04};
    const Grid g = build_grid(200, 100, 100, 0.4);
    const SpreadPayoff pay{0.0};

    // (a) liquid limit
    ImpactParams liquid;
    liquid.epsilon = 0.0;
    const SolveResult flat = solve_full(g, market, liquid, pay, {});
    const bool a = flat.combined_t0.values() == flat.v0_levels.front().values();

    // (b) source sign on random surfaces
    std::mt19937_64 rng(77);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    bool b = true;
    for (int trial = 0; trial < 100 && b; ++trial) {
        Surface s(g);
        for (double& v : s.values()) v = 20.0 * z(rng);
        const MarketParams p{0.05 + 0.4 * u(rng), 0.05 + 0.4 * u(rng), -1.0 + 2.0 * u(rng), 0.05};
        const ImpactParams imp{0.01, 1.0 + 200.0 * u(rng), 60, 140};
        const SourceTerm src = compute_G(s, g, p, imp, 0.4 * u(rng), 0.4);
        for (double v : src.values.values()) b = b && v <= 0.0;
    }

    // (c) lower bound on V1 and (d) terminal conditions, default market
    const SolveResult res = solve_full(g, market, ImpactParams{}, pay, {});
    const Surface payoff = payoff_surface(g, pay);
    const double floor = -1e-8 * payoff.max_abs();
    double min_v1 = HUGE_VAL;
    for (const Surface& s : res.v1_levels)
        for (double v : s.values()) min_v1 = std::min(min_v1, v);
    const bool c = min_v1 >= floor;
    const bool d = res.v0_levels.back().values() == payoff.values() && res.v1_levels.back().max_abs() == 0.0;

    // (e) linearity and polynomial exactness
    bool e = true;
    {
        Surface s1(g), s2(g), comb(g), quad(g), bil(g);
        for (std::size_t m = 0; m <= g.M; ++m)
            for (std::size_t n = 0; n <= g.N; ++n) {
                s1(m, n) = z(rng);
                s2(m, n) = z(rng);
                comb(m, n) = 1.5 * s1(m, n) - 2.0 * s2(m, n);
                quad(m, n) = g.x(m) * g.x(m) + g.y(n) * g.y(n);
                bil(m, n) = g.x(m) * g.y(n);
            }
        const std::function<Surface(const Surface&)> ops[3] = {
            [&](const Surface& s) { return apply_adx(s, g, market, {}); },
            [&](const Surface& s) { return apply_ady(s, g, market, {}); },
            [&](const Surface& s) { return apply_adxdy(s, g, market); }};
        for (const auto& op : ops) {
            const Surface f1 = op(s1), f2 = op(s2), fc = op(comb);
            for (std::size_t i = 0; i < fc.values().size(); ++i)
                e = e && std::abs(fc.values()[i] - (1.5 * f1.values()[i] - 2.0 * f2.values()[i])) <=
                             1e-10 * (1.0 + std::abs(fc.values()[i]));
        }
        const Surface ax = apply_adx(quad, g, market, {});
        const Surface ay = apply_ady(quad, g, market, {});
        const Surface axy = apply_adxdy(bil, g, market);
        const double s11 = market.sigma1 * market.sigma1, s22 = market.sigma2 * market.sigma2;
        for (std::size_t m = 1; m < g.M; ++m)
            for (std::size_t n = 1; n < g.N; ++n) {
                const double x = g.x(m), y = g.y(n);
                const double ex = s11 * x * x + 2.0 * market.r * x * x;
                const double ey = s22 * y * y + 2.0 * market.r * y * y - market.r * quad(m, n);
                const double exy = market.sigma1 * market.sigma2 * market.rho * x * y;
                e = e && std::abs(ax(m, n) - ex) <= 1e-9 * (1.0 + std::abs(ex));
                e = e && std::abs(ay(m, n) - ey) <= 1e-9 * (1.0 + std::abs(ey));
                e = e && std::abs(axy(m, n) - exy) <= 1e-9 * (1.0 + std::abs(exy));
            }
    }

    // (f) tridiagonal solver vs dense elimination
    double worst_rel = 0.0;
    {
        std::uniform_int_distribution<int> size(2, 64);
        for (int trial = 0; trial < 1000; ++trial) {
            const auto n = static_cast<std::size_t>(size(rng));
            TridiagonalSystem s(n);
            for (std::size_t i = 0; i < n; ++i) {
                s.lower[i] = i > 0 ? -1.0 + 2.0 * u(rng) : 0.0;
                s.upper[i] = i + 1 < n ? -1.0 + 2.0 * u(rng) : 0.0;
                s.diag[i] = (std::abs(s.lower[i]) + std::abs(s.upper[i]) + 0.1 + u(rng)) * (u(rng) < 0.5 ? -1 : 1);
                s.rhs[i] = 100.0 * z(rng);
            }
            const auto x = solve_tridiagonal(s);
            const auto ref = dense_solve(s);
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                num = std::max(num, std::abs(x[i] - ref[i]));
                den = std::max(den, std::abs(ref[i]));
            }
            worst_rel = std::max(worst_rel, num / den);
        }
    }
    const bool f = worst_rel <= 1e-10;

    o.passed = a && b && c && d && e && f;
    o.detail << "(a) liquid bitwise " << (a ? "ok" : "FAIL") << "; (b) G<=0 " << (b ? "ok" : "FAIL")
             << "; (c) min V1 " << min_v1 << " vs floor " << floor << (c ? " ok" : " FAIL") << "; (d) terminal "
             << (d ? "ok" : "FAIL") << "; (e) operators " << (e ? "ok" : "FAIL") << "; (f) tridiagonal rel "
             << worst_rel << (f ? " ok" : " FAIL");
    report(5, "property suite", o);
}

void criterion6() {
    Outcome o;
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        // r = 0 removes convection and reaction from the symbol.
        const MarketParams p{0.05 + 0.5 * u(rng), 0.05 + 0.5 * u(rng), -1.0 + 2.0 * u(rng), 0.0};
        Grid g = build_grid(200, 100, 1, 1.0);
        const StabilityReport rep = stability_bound(g, p);
        g.dt = trial == 0 ? rep.dt_max : rep.dt_max * u(rng);
        const AmplificationCoefficients c = amplification_coefficients(g, p, g.x_max, g.y_max);
        worst = std::max(worst, max_amplification(c, 201));
    }
    const MarketParams p{0.15, 0.10, 0.7, 0.04};
    const double d1 = stability_bound(build_grid(200, 100, 100, 0.4), p).dt_max;
    const double d2 = stability_bound(build_grid(200, 200, 100, 0.4), p).dt_max;
    const double d4 = stability_bound(build_grid(200, 400, 100, 0.4), p).dt_max;
    const bool scaling = std::abs(d1 / d2 - 4.0) <= 1e-12 && std::abs(d2 / d4 - 4.0) <= 1e-12;
    o.passed = worst <= 1.0 + 1e-12 && scaling;
    o.detail << "max |g|^2 over 100 sets = " << worst << "; dt_max ratios " << d1 / d2 << ", " << d2 / d4;
    report(6, "stability diagnostics", o);
}

void criterion7() {
    Outcome o;
    const MarketParams p{0.15, 0.10, 0.7, 0.05};
    const Grid g = build_grid(200, 200, 200, 0.4);
    const double pde = interpolate_at(solve_v0_t0(g, p, {5.0}, {}), g, 112, 104);
    const auto t0 = Clock::now();
    const McEstimate mc = mc_spread_price(112, 104, {5.0}, p, 0.4, McConfig{1'000'000, 20240531, false, 1});
    const double elapsed = seconds_since(t0);
    const double zscore = std::abs(pde - mc.price) / mc.std_error;
    o.passed = zscore <= 3.0 && elapsed < 10.0;
    o.detail << "pde " << pde << ", mc " << mc.price << " +- " << mc.std_error << ", z = " << zscore << ", mc time "
             << elapsed << " s";
    report(7, "Monte Carlo cross-check at k=5", o);
}

void criterion8() {
    Outcome o;
    // Surface: sigma = (0.3, 0.2), rho = 0.7, k = 5, T = 0.4, m = l = 100.
    const MarketParams p{0.3, 0.2, 0.7, 0.05};
    const Grid g = build_grid(200, 100, 100, 0.4);
    const SolveResult res = solve_full(g, p, ImpactParams{}, {5.0}, {});
    const Surface ex = excess_surface(res);
    double lo = HUGE_VAL, hi = -HUGE_VAL;
    std::size_t pm = 0, pn = 0;
    for (std::size_t m = 0; m <= g.M; ++m)
        for (std::size_t n = 0; n <= g.N; ++n) {
            lo = std::min(lo, ex(m, n));
            if (ex(m, n) > hi) {
                hi = ex(m, n);
                pm = m;
                pn = n;
            }
        }
    const bool nonneg = lo >= 0.0;
    const bool inside = g.x(pm) > 60.0 && g.x(pm) < 140.0 && pn > 0 && pn < g.N && hi > 0.0;

    // Strike ladder: excess rises to one peak then falls off on both sides toward zero.
    Table3Options opt;
    opt.rhos = {0.7};
    opt.strikes.assign(kStrikes.begin(), kStrikes.end());
    const auto cells = cmd_table3(opt);
    std::vector<double> e;
    for (const auto& c : cells) e.push_back(c.excess);
    const auto peak = static_cast<std::size_t>(std::max_element(e.begin(), e.end()) - e.begin());
    bool unimodal = peak > 0 && peak + 1 < e.size();
    for (std::size_t i = 0; i < peak; ++i) unimodal = unimodal && e[i] < e[i + 1];
    for (std::size_t i = peak; i + 1 < e.size(); ++i) unimodal = unimodal && e[i + 1] < e[i];
    unimodal = unimodal && std::abs(e.front()) < 0.25 * e[peak] && std::abs(e.back()) < 0.25 * e[peak];

    o.passed = nonneg && inside && unimodal;
    o.detail << "surface min " << lo << (nonneg ? " ok" : " FAIL") << "; peak " << hi << " at (" << g.x(pm) << ","
             << g.y(pn) << ")" << (inside ? " ok" : " FAIL") << "; strike ladder excess";
    for (double v : e) o.detail << ' ' << v;
    o.detail << (unimodal ? " ok" : " FAIL");
    report(8, "excess surface shape", o);
}

}  // namespace

int main() {
    criterion1();
    solve_table2_grid();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    std::printf("%d of 8 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}

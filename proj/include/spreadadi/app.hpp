#pragma once

// Driver-level commands behind the spreadadi CLI: pricing runs, table
// reproduction, convergence studies and the validation suite.

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <limits>
#include <locale>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "adi.hpp"
#include "closed_form.hpp"
#include "config.hpp"
#include "grid.hpp"
#include "mc.hpp"
#include "stability.hpp"

namespace spreadadi {

/// Ordered flat "key: value" block.
class Manifest {
public:
    void add(std::string key, std::string value) { entries_.emplace_back(std::move(key), std::move(value)); }
    void add(std::string key, double value) { add(std::move(key), format(value)); }
    void add(std::string key, std::size_t value) { add(std::move(key), std::to_string(value)); }
    void add(std::string key, bool value) { add(std::move(key), std::string(value ? "true" : "false")); }

    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

    std::optional<std::string> get(const std::string& key) const {
        for (const auto& [k, v] : entries_)
            if (k == key) return v;
        return std::nullopt;
    }

    void write(std::ostream& os) const {
        for (const auto& [k, v] : entries_) os << k << ": " << v << '\n';
    }

    /// Shortest text that parses back to the same double.
    static std::string format(double v) {
        char buf[64];
        const auto res = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, res.ptr);
    }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

inline void add_inputs(Manifest& mf, const RunConfig& cfg) {
    mf.add("market.sigma1", cfg.market.sigma1);
    mf.add("market.sigma2", cfg.market.sigma2);
    mf.add("market.rho", cfg.market.rho);
    mf.add("market.r", cfg.market.r);
    mf.add("impact.epsilon", cfg.impact.epsilon);
    mf.add("impact.beta", cfg.impact.beta);
    mf.add("impact.s_low", cfg.impact.s_low);
    mf.add("impact.s_high", cfg.impact.s_high);
    mf.add("payoff.strike", cfg.payoff.k);
    mf.add("solver.theta", cfg.solver.op.theta);
    mf.add("solver.cross_term", std::string(cfg.solver.cross_term_from_v0 ? "v0_half" : "v1"));
}

inline void add_grid(Manifest& mf, const Grid& g) {
    mf.add("grid.x_max", g.x_max);
    mf.add("grid.M", g.M);
    mf.add("grid.N", g.N);
    mf.add("grid.L", g.L);
    mf.add("grid.maturity", g.T);
    mf.add("grid.dx", g.dx);
    mf.add("grid.dt", g.dt);
}

inline void add_stability(Manifest& mf, const StabilityReport& rep) {
    mf.add("stability.a1", rep.coeffs.a1);
    mf.add("stability.a2", rep.coeffs.a2);
    mf.add("stability.b1", rep.coeffs.b1);
    mf.add("stability.b2", rep.coeffs.b2);
    mf.add("stability.c1", rep.coeffs.c1);
    mf.add("stability.c2", rep.coeffs.c2);
    mf.add("stability.C", rep.C);
    mf.add("stability.C_hat", rep.C_hat);
    mf.add("stability.A", rep.A);
    mf.add("stability.dt", rep.dt);
    mf.add("stability.dt_max", rep.dt_max);
    mf.add("stability.satisfied", rep.satisfied);
    if (!rep.satisfied)
        mf.add("stability.warning", std::string("dt exceeds the sufficient stability bound; results may still be finite"));
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

inline void write_surface_file(const std::filesystem::path& path, const Surface& s, const Grid& g) {
    std::ostringstream buf;
    write_surface_csv(buf, s, g);
    write_text_file(path, buf.str());
}

// ---------------------------------------------------------------- price

struct PriceRun {
    Manifest manifest;
    std::vector<SpotPrice> prices;
    StabilityReport stability;
};

/// Full solve; writes manifest.txt and the t = 0 surfaces (v0, v1, excess, combined)
/// into out_dir, plus every level of V0 and V1 when all_levels is set.
/// Nothing is written if the solve fails.
inline PriceRun cmd_price(const RunConfig& cfg, const std::optional<std::filesystem::path>& out_dir,
                          bool all_levels = false) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    const Grid g = cfg.grid.build();

    PriceRun run;
    run.stability = stability_bound(g, cfg.market);
    const SolveResult res = solve_full(g, cfg.market, cfg.impact, cfg.payoff, cfg.solver);
    for (const Spot& s : cfg.spots) run.prices.push_back(price_at(res, g, s.s1, s.s2));
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    Manifest& mf = run.manifest;
    mf.add("command", std::string("price"));
    add_inputs(mf, cfg);
    add_grid(mf, g);
    add_stability(mf, run.stability);
    mf.add("spots.count", run.prices.size());
    for (std::size_t i = 0; i < run.prices.size(); ++i) {
        const std::string p = "spot." + std::to_string(i) + ".";
        mf.add(p + "s1", run.prices[i].s1);
        mf.add(p + "s2", run.prices[i].s2);
        mf.add(p + "v0", run.prices[i].v0);
        mf.add(p + "excess", run.prices[i].excess);
        mf.add(p + "combined", run.prices[i].combined);
    }
    mf.add("wall_time_s", wall);

    if (out_dir) {
        namespace fs = std::filesystem;
        fs::create_directories(*out_dir);
        write_surface_file(*out_dir / "v0_t0.csv", res.v0_levels.front(), g);
        write_surface_file(*out_dir / "v1_t0.csv", res.v1_levels.front(), g);
        write_surface_file(*out_dir / "excess_t0.csv", excess_surface(res), g);
        write_surface_file(*out_dir / "combined_t0.csv", res.combined_t0, g);
        if (all_levels) {
            for (std::size_t l = 0; l <= g.L; ++l) {
                write_surface_file(*out_dir / ("v0_l" + std::to_string(l) + ".csv"), res.v0_levels[l], g);
                write_surface_file(*out_dir / ("v1_l" + std::to_string(l) + ".csv"), res.v1_levels[l], g);
            }
        }
        std::ostringstream text;
        mf.write(text);
        write_text_file(*out_dir / "manifest.txt", text.str());
    }
    return run;
}

// ---------------------------------------------------------------- table2

struct GridRung {
    std::size_t m = 0;
    std::size_t l = 0;
};

struct Table2Options {
    MarketParams market{0.15, 0.10, 0.0, 0.05};
    Spot spot{112.0, 104.0};
    double x_max = 200.0;
    std::vector<double> rhos{0.1, 0.5, 0.7, 0.9};
    std::vector<double> maturities{0.1, 0.3, 0.5, 0.7, 1.0};
    std::optional<std::size_t> m_override;
    std::optional<std::size_t> l_override;
    AdiConfig solver{};

    /// Grid ladder of one correlation block; the rho = 0.7 middle rung uses l = 210.
    std::vector<GridRung> ladder(double rho) const {
        std::vector<GridRung> rungs{{50, 100}, {100, std::abs(rho - 0.7) < 1e-12 ? 210u : 100u}, {200, 200}};
        for (auto& r : rungs) {
            if (m_override) r.m = *m_override;
            if (l_override) r.l = *l_override;
        }
        return rungs;
    }
};

struct Table2Row {
    bool closed_form = false;  ///< Margrabe row
    double rho = 0.0;
    std::size_t m = 0;
    std::size_t l = 0;
    std::vector<double> values;  ///< one per maturity
};

inline std::vector<Table2Row> cmd_table2(const Table2Options& opt) {
    std::vector<Table2Row> rows;
    for (double rho : opt.rhos) {
        MarketParams p = opt.market;
        p.rho = rho;
        p.validate();
        for (const GridRung& rung : opt.ladder(rho)) {
            Table2Row row{false, rho, rung.m, rung.l, {}};
            for (double T : opt.maturities) {
                const Grid g = build_grid(opt.x_max, rung.m, rung.l, T);
                const Surface v = solve_v0_t0(g, p, SpreadPayoff{0.0}, opt.solver);
                row.values.push_back(interpolate_at(v, g, opt.spot.s1, opt.spot.s2));
            }
            rows.push_back(std::move(row));
        }
        Table2Row mg{true, rho, 0, 0, {}};
        for (double T : opt.maturities) mg.values.push_back(margrabe_price(opt.spot.s1, opt.spot.s2, p, T));
        rows.push_back(std::move(mg));
    }
    return rows;
}

inline void write_table2_csv(std::ostream& os, const std::vector<Table2Row>& rows,
                             const std::vector<double>& maturities) {
    std::ostringstream s;
    s.imbue(std::locale::classic());
    s << "row,rho,m,l";
    for (double T : maturities) s << ",T=" << T;
    s << '\n';
    s.precision(17);
    for (const auto& r : rows) {
        s << (r.closed_form ? "margrabe" : "pde") << ',' << Manifest::format(r.rho) << ',';
        if (!r.closed_form) s << r.m << ',' << r.l;
        else s << ',';
        for (double v : r.values) s << ',' << v;
        s << '\n';
    }
    os << s.str();
}

// ---------------------------------------------------------------- table3

struct Table3Options {
    MarketParams market{0.15, 0.10, 0.0, 0.05};
    ImpactParams impact{};
    GridSpec grid{200.0, 100, 100, 0.4};
    Spot spot{100.0, 100.0};
    std::vector<double> rhos{0.1, 0.5, 0.7, 0.9};
    std::vector<double> strikes{-15.0, -5.0, -2.0, 0.0, 2.0, 5.0, 10.0, 20.0};
    AdiConfig solver{};
};

struct Table3Cell {
    double rho = 0.0;
    double k = 0.0;
    double v0 = 0.0;
    double excess = 0.0;
    double price = 0.0;
};

inline std::vector<Table3Cell> cmd_table3(const Table3Options& opt) {
    opt.impact.validate();
    const Grid g = opt.grid.build();
    std::vector<Table3Cell> cells;
    for (double rho : opt.rhos) {
        MarketParams p = opt.market;
        p.rho = rho;
        p.validate();
        for (double k : opt.strikes) {
            const SolveResult res = solve_full(g, p, opt.impact, SpreadPayoff{k}, opt.solver);
            const SpotPrice sp = price_at(res, g, opt.spot.s1, opt.spot.s2);
            cells.push_back({rho, k, sp.v0, sp.excess, sp.combined});
        }
    }
    return cells;
}

inline void write_table3_csv(std::ostream& os, const std::vector<Table3Cell>& cells,
                             const std::vector<double>& strikes) {
    std::ostringstream s;
    s.imbue(std::locale::classic());
    s << "rho,row";
    for (double k : strikes) s << ",k=" << k;
    s << '\n';
    s.precision(17);
    for (std::size_t i = 0; i < cells.size(); i += strikes.size()) {
        for (const char* what : {"price", "excess"}) {
            s << Manifest::format(cells[i].rho) << ',' << what;
            for (std::size_t j = 0; j < strikes.size(); ++j) {
                const Table3Cell& c = cells[i + j];
                s << ',' << (what[0] == 'p' ? c.price : c.excess);
            }
            s << '\n';
        }
    }
    os << s.str();
}

// ---------------------------------------------------------------- converge

struct ConvergeRow {
    std::size_t m = 0;
    std::size_t l = 0;
    Spot spot;
    double pde = 0.0;
    double margrabe = 0.0;
    double error = 0.0;           ///< |pde - margrabe|
    double observed_order = std::numeric_limits<double>::quiet_NaN();  ///< vs previous rung
};

/// Errors against Margrabe along a refinement ladder, order log2(e_prev / e_this).
/// Needs a zero strike; nonzero strikes have no closed-form benchmark.
inline std::vector<ConvergeRow> cmd_converge(const RunConfig& cfg, const std::vector<GridRung>& ladder) {
    cfg.validate();
    if (cfg.payoff.k != 0.0)
        throw ConfigError("converge: the Margrabe benchmark exists only for strike 0; "
                          "use 'validate' (Monte Carlo cross-check) for nonzero strikes");
    if (ladder.empty()) throw ConfigError("converge: empty refinement ladder");
    std::vector<ConvergeRow> rows;
    std::vector<double> prev_err;
    for (const GridRung& rung : ladder) {
        const Grid g = build_grid(cfg.grid.x_max, rung.m, rung.l, cfg.grid.maturity);
        const Surface v = solve_v0_t0(g, cfg.market, cfg.payoff, cfg.solver);
        std::vector<double> errs;
        for (std::size_t i = 0; i < cfg.spots.size(); ++i) {
            const Spot& s = cfg.spots[i];
            ConvergeRow row;
            row.m = rung.m;
            row.l = rung.l;
            row.spot = s;
            row.pde = interpolate_at(v, g, s.s1, s.s2);
            row.margrabe = margrabe_price(s.s1, s.s2, cfg.market, cfg.grid.maturity);
            row.error = std::abs(row.pde - row.margrabe);
            if (!prev_err.empty() && prev_err[i] > 0.0 && row.error > 0.0)
                row.observed_order = std::log2(prev_err[i] / row.error);
            errs.push_back(row.error);
            rows.push_back(row);
        }
        prev_err = std::move(errs);
    }
    return rows;
}

inline void write_converge_csv(std::ostream& os, const std::vector<ConvergeRow>& rows) {
    std::ostringstream s;
    s.imbue(std::locale::classic());
    s.precision(17);
    s << "m,l,s1,s2,pde,margrabe,abs_error,observed_order\n";
    for (const auto& r : rows) {
        s << r.m << ',' << r.l << ',' << Manifest::format(r.spot.s1) << ',' << Manifest::format(r.spot.s2) << ',' << r.pde << ',' << r.margrabe << ','
          << r.error << ',';
        if (!std::isnan(r.observed_order)) s << r.observed_order;
        s << '\n';
    }
    os << s.str();
}

// ---------------------------------------------------------------- validate

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Invariant suite on the configured market and grid: terminal conditions, G <= 0,
/// the V1 lower bound, liquid degeneration, and a Monte Carlo cross-check at k = 5.
inline std::vector<Check> cmd_validate(const RunConfig& cfg) {
    cfg.validate();
    const Grid g = cfg.grid.build();
    std::vector<Check> checks;
    auto fmt = [](double v) { return Manifest::format(v); };

    const SolveResult res = solve_full(g, cfg.market, cfg.impact, cfg.payoff, cfg.solver);
    const Surface payoff = payoff_surface(g, cfg.payoff);

    {
        const bool v0_ok = res.v0_levels.back().values() == payoff.values();
        const bool v1_ok = res.v1_levels.back().max_abs() == 0.0;
        checks.push_back({"terminal_conditions", v0_ok && v1_ok,
                          std::string("V0(T) == payoff: ") + (v0_ok ? "yes" : "no") +
                              ", V1(T) == 0: " + (v1_ok ? "yes" : "no")});
    }
    {
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t l = 0; l <= g.L; ++l) {
            const SourceTerm src = compute_G(res.v0_levels[l], g, cfg.market, cfg.impact, g.t(l), g.T);
            for (double v : src.values.values()) worst = std::max(worst, v);
        }
        checks.push_back({"source_nonpositive", worst <= 0.0, "max G = " + fmt(worst)});
    }
    {
        double worst = std::numeric_limits<double>::infinity();
        for (const Surface& s : res.v1_levels)
            for (double v : s.values()) worst = std::min(worst, v);
        const double floor = -1e-8 * payoff.max_abs();
        checks.push_back({"v1_lower_bound", worst >= floor, "min V1 = " + fmt(worst) + ", floor = " + fmt(floor)});
    }
    {
        ImpactParams liquid = cfg.impact;
        liquid.epsilon = 0.0;
        const SolveResult flat = solve_full(g, cfg.market, liquid, cfg.payoff, cfg.solver);
        const bool same = flat.combined_t0.values() == flat.v0_levels.front().values() &&
                          flat.v0_levels.front().values() == res.v0_levels.front().values();
        checks.push_back({"liquid_degeneration", same, "epsilon = 0 combined price equals V0 bitwise"});
    }
    {
        const SpreadPayoff k5{5.0};
        const Surface v0 = solve_v0_t0(g, cfg.market, k5, cfg.solver);
        bool ok = true;
        std::ostringstream d;
        d.imbue(std::locale::classic());
        for (const Spot& s : cfg.spots) {
            if (!(s.s1 > 0.0 && s.s2 > 0.0)) continue;
            const McEstimate mc = mc_spread_price(s.s1, s.s2, k5, cfg.market, g.T, cfg.mc);
            const double pde = interpolate_at(v0, g, s.s1, s.s2);
            const double z = std::abs(pde - mc.price) / mc.std_error;
            ok = ok && z <= 3.0;
            d << "(" << s.s1 << "," << s.s2 << "): pde " << fmt(pde) << " mc " << fmt(mc.price) << " +- "
              << fmt(mc.std_error) << " z " << fmt(z) << "; ";
        }
        checks.push_back({"mc_agreement_k5", ok, d.str()});
    }
    return checks;
}

}  // namespace spreadadi

// spreadadi: command-line driver for the two-asset spread option ADI engine.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <spreadadi/spreadadi.hpp>

namespace fs = std::filesystem;
using namespace spreadadi;

namespace {

struct Overrides {
    std::string config;
    std::string out;
    std::optional<std::size_t> m;
    std::optional<std::size_t> l;
    std::optional<double> rho;
    std::optional<double> strike;
    std::optional<double> epsilon;
    std::optional<double> r;
    std::optional<double> maturity;
    std::optional<double> s1;
    std::optional<double> s2;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config, "INI run configuration")->check(CLI::ExistingFile);
        cmd->add_option("--out", out, "output directory");
        cmd->add_option("--m", m, "spatial steps per axis");
        cmd->add_option("--l", l, "time steps");
        cmd->add_option("--rho", rho, "correlation");
        cmd->add_option("--strike", strike, "spread strike k");
        cmd->add_option("--epsilon", epsilon, "price impact magnitude");
        cmd->add_option("--r", r, "risk-free rate");
        cmd->add_option("--maturity", maturity, "maturity in years");
        cmd->add_option("--s1", s1, "spot of asset 1");
        cmd->add_option("--s2", s2, "spot of asset 2");
    }

    RunConfig run_config() const {
        RunConfig cfg = config.empty() ? RunConfig{} : load_config(config);
        if (m) cfg.grid.m = *m;
        if (l) cfg.grid.l = *l;
        if (rho) cfg.market.rho = *rho;
        if (strike) cfg.payoff.k = *strike;
        if (epsilon) cfg.impact.epsilon = *epsilon;
        if (r) cfg.market.r = *r;
        if (maturity) cfg.grid.maturity = *maturity;
        if (s1 || s2) cfg.spots = {{s1.value_or(cfg.spots.front().s1), s2.value_or(cfg.spots.front().s2)}};
        cfg.validate();
        return cfg;
    }

    std::optional<fs::path> out_dir() const {
        if (out.empty()) return std::nullopt;
        return fs::path(out);
    }
};

std::vector<GridRung> parse_ladder(const std::string& text) {
    std::vector<GridRung> ladder;
    std::stringstream all(text);
    std::string item;
    while (std::getline(all, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw ConfigError("ladder entries must be 'm:l', got '" + item + "'");
        try {
            ladder.push_back({std::stoul(item.substr(0, colon)), std::stoul(item.substr(colon + 1))});
        } catch (const std::exception&) {
            throw ConfigError("bad ladder entry '" + item + "'");
        }
    }
    return ladder;
}

void emit(const std::optional<fs::path>& dir, const std::string& file, const std::string& text) {
    std::cout << text;
    if (dir) {
        fs::create_directories(*dir);
        write_text_file(*dir / file, text);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spread option pricing with price impact (Peaceman-Rachford ADI)"};
    app.require_subcommand(1);

    Overrides price_o, t2_o, t3_o, conv_o, val_o;
    bool all_levels = false;
    std::string ladder_text = "50:100,100:100,200:200";

    auto* price = app.add_subcommand("price", "solve V0 and V1, report t0 prices and write surfaces");
    price_o.attach(price);
    price->add_flag("--all-levels", all_levels, "also write every time level of V0 and V1");

    auto* table2 = app.add_subcommand("table2", "convergence table against the Margrabe formula");
    t2_o.attach(table2);

    auto* table3 = app.add_subcommand("table3", "illiquid prices and excess prices over a strike ladder");
    t3_o.attach(table3);

    auto* converge = app.add_subcommand("converge", "errors vs Margrabe and observed orders along a ladder");
    conv_o.attach(converge);
    converge->add_option("--ladder", ladder_text, "comma-separated m:l rungs");

    auto* validate = app.add_subcommand("validate", "run the invariant suite; nonzero exit on failure");
    val_o.attach(validate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*price) {
            const RunConfig cfg = price_o.run_config();
            const PriceRun run = cmd_price(cfg, price_o.out_dir(), all_levels);
            run.manifest.write(std::cout);
            if (!run.stability.satisfied)
                std::cerr << "warning: dt = " << run.stability.dt << " exceeds the stability bound "
                          << run.stability.dt_max << "\n";
        } else if (*table2) {
            Table2Options opt;
            if (t2_o.r) opt.market.r = *t2_o.r;
            if (t2_o.rho) opt.rhos = {*t2_o.rho};
            if (t2_o.maturity) opt.maturities = {*t2_o.maturity};
            if (t2_o.s1) opt.spot.s1 = *t2_o.s1;
            if (t2_o.s2) opt.spot.s2 = *t2_o.s2;
            opt.m_override = t2_o.m;
            opt.l_override = t2_o.l;
            if (!t2_o.config.empty()) {
                const RunConfig cfg = load_config(t2_o.config);
                opt.market = cfg.market;
                if (t2_o.r) opt.market.r = *t2_o.r;
                opt.x_max = cfg.grid.x_max;
                opt.solver = cfg.solver;
            }
            const auto rows = cmd_table2(opt);
            std::ostringstream csv;
            write_table2_csv(csv, rows, opt.maturities);
            emit(t2_o.out_dir(), "table2.csv", csv.str());
        } else if (*table3) {
            Table3Options opt;
            if (!t3_o.config.empty()) {
                const RunConfig cfg = load_config(t3_o.config);
                opt.market = cfg.market;
                opt.impact = cfg.impact;
                opt.grid = cfg.grid;
                opt.spot = cfg.spots.front();
                opt.solver = cfg.solver;
            }
            if (t3_o.r) opt.market.r = *t3_o.r;
            if (t3_o.rho) opt.rhos = {*t3_o.rho};
            if (t3_o.strike) opt.strikes = {*t3_o.strike};
            if (t3_o.epsilon) opt.impact.epsilon = *t3_o.epsilon;
            if (t3_o.m) opt.grid.m = *t3_o.m;
            if (t3_o.l) opt.grid.l = *t3_o.l;
            if (t3_o.maturity) opt.grid.maturity = *t3_o.maturity;
            if (t3_o.s1) opt.spot.s1 = *t3_o.s1;
            if (t3_o.s2) opt.spot.s2 = *t3_o.s2;
            const auto cells = cmd_table3(opt);
            std::ostringstream csv;
            write_table3_csv(csv, cells, opt.strikes);
            emit(t3_o.out_dir(), "table3.csv", csv.str());
        } else if (*converge) {
            const RunConfig cfg = conv_o.run_config();
            const auto rows = cmd_converge(cfg, parse_ladder(ladder_text));
            std::ostringstream csv;
            write_converge_csv(csv, rows);
            emit(conv_o.out_dir(), "converge.csv", csv.str());
        } else if (*validate) {
            const RunConfig cfg = val_o.run_config();
            const auto checks = cmd_validate(cfg);
            std::ostringstream report;
            bool all = true;
            for (const auto& c : checks) {
                report << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
                all = all && c.passed;
            }
            emit(val_o.out_dir(), "validate.txt", report.str());
            return all ? 0 : 3;
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const InstabilityError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const SingularPivotError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

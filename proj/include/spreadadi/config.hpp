#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "adi.hpp"
#include "closed_form.hpp"
#include "grid.hpp"
#include "impact.hpp"
#include "mc.hpp"

namespace spreadadi {

/// Unparsable or out-of-domain run configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GridSpec {
    double x_max = 200.0;
    std::size_t m = 100;
    std::size_t l = 100;
    double maturity = 0.4;

    Grid build() const { return build_grid(x_max, m, l, maturity); }
};

struct Spot {
    double s1 = 0.0;
    double s2 = 0.0;
};

/// Everything a pricing run needs. Defaults: asset data S(t0) = (112, 104),
/// sigma = (0.15, 0.10), r = 0.04, truncation at 200, impact eps = 0.01,
/// beta = 100 on the band [60, 140].
struct RunConfig {
    MarketParams market{0.15, 0.10, 0.7, 0.04};
    ImpactParams impact{};
    SpreadPayoff payoff{0.0};
    GridSpec grid{};
    std::vector<Spot> spots{{112.0, 104.0}};
    McConfig mc{};
    AdiConfig solver{};

    void validate() const {
        try {
            market.validate();
            impact.validate();
            const Grid g = grid.build();
            if (!std::isfinite(payoff.k)) throw std::domain_error("strike must be finite");
            if (spots.empty()) throw std::domain_error("at least one spot is required");
            for (const Spot& s : spots)
                if (!(s.s1 >= 0.0 && s.s1 <= g.x_max && s.s2 >= 0.0 && s.s2 <= g.y_max))
                    throw std::domain_error("spot lies outside the truncated domain");
            if (mc.n_paths < 2) throw std::domain_error("mc paths must be >= 2");
        } catch (const std::domain_error& e) {
            throw ConfigError(std::string("invalid configuration: ") + e.what());
        }
    }
};

namespace detail {

inline double parse_number(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
        if (used != text.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: '" + key + "' is not a number: '" + text + "'");
    }
}

inline std::size_t parse_count(const std::string& key, const std::string& text) {
    const double v = parse_number(key, text);
    if (v < 0.0 || v != std::floor(v)) throw ConfigError("config: '" + key + "' must be a nonnegative integer");
    return static_cast<std::size_t>(v);
}

inline bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError("config: '" + key + "' must be true or false");
}

// "112 104; 100 100"
inline std::vector<Spot> parse_spots(const std::string& text) {
    std::vector<Spot> out;
    std::stringstream all(text);
    std::string item;
    while (std::getline(all, item, ';')) {
        std::stringstream one(item);
        std::string a, b, extra;
        if (!(one >> a)) continue;
        if (!(one >> b) || (one >> extra)) throw ConfigError("config: spot '" + item + "' must be 'S1 S2'");
        out.push_back({parse_number("spots.points", a), parse_number("spots.points", b)});
    }
    if (out.empty()) throw ConfigError("config: spots.points is empty");
    return out;
}

}  // namespace detail

/// INI sections [market] [impact] [grid] [payoff] [spots] [mc] [solver].
/// Missing keys keep their defaults; unknown sections or keys are rejected.
inline RunConfig parse_config(std::istream& is) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    RunConfig cfg;
    const std::set<std::string> sections{"market", "impact", "grid", "payoff", "spots", "mc", "solver"};
    for (const auto& [section, body] : tree) {
        if (!sections.count(section) || !body.data().empty())
            throw ConfigError("config: unknown section or stray key '" + section + "'");
        for (const auto& [key, node] : body) {
            const std::string full = section + "." + key;
            const std::string v = node.get_value<std::string>();
            auto num = [&] { return detail::parse_number(full, v); };
            auto cnt = [&] { return detail::parse_count(full, v); };

            if (full == "market.sigma1") cfg.market.sigma1 = num();
            else if (full == "market.sigma2") cfg.market.sigma2 = num();
            else if (full == "market.rho") cfg.market.rho = num();
            else if (full == "market.r") cfg.market.r = num();
            else if (full == "impact.epsilon") cfg.impact.epsilon = num();
            else if (full == "impact.beta") cfg.impact.beta = num();
            else if (full == "impact.s_low") cfg.impact.s_low = num();
            else if (full == "impact.s_high") cfg.impact.s_high = num();
            else if (full == "grid.x_max") cfg.grid.x_max = num();
            else if (full == "grid.m") cfg.grid.m = cnt();
            else if (full == "grid.l") cfg.grid.l = cnt();
            else if (full == "grid.maturity") cfg.grid.maturity = num();
            else if (full == "payoff.strike") cfg.payoff.k = num();
            else if (full == "spots.points") cfg.spots = detail::parse_spots(v);
            else if (full == "mc.paths") cfg.mc.n_paths = cnt();
            else if (full == "mc.seed") cfg.mc.seed = static_cast<std::uint64_t>(cnt());
            else if (full == "mc.antithetic") cfg.mc.antithetic = detail::parse_bool(full, v);
            else if (full == "mc.threads") cfg.mc.threads = static_cast<unsigned>(cnt());
            else if (full == "solver.cross_term") {
                if (v == "v1") cfg.solver.cross_term_from_v0 = false;
                else if (v == "v0_half") cfg.solver.cross_term_from_v0 = true;
                else throw ConfigError("config: solver.cross_term must be 'v1' or 'v0_half'");
            } else
                throw ConfigError("config: unknown key '" + full + "'");
        }
    }
    cfg.validate();
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    return parse_config(in);
}

}  // namespace spreadadi

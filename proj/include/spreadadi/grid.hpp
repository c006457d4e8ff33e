#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <locale>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spreadadi {

/// Uniform space-time lattice over [0, x_max] x [0, y_max] x [0, T].
/// Both spatial axes share extent and step count.
struct Grid {
    double x_max = 0.0;
    double y_max = 0.0;
    std::size_t M = 0;  ///< x steps; nodes m = 0..M
    std::size_t N = 0;  ///< y steps; nodes n = 0..N
    std::size_t L = 0;  ///< time steps; levels l = 0..L
    double T = 0.0;
    double dx = 0.0;
    double dy = 0.0;
    double dt = 0.0;

    double x(std::size_t m) const { return static_cast<double>(m) * dx; }
    double y(std::size_t n) const { return static_cast<double>(n) * dy; }
    double t(std::size_t l) const { return static_cast<double>(l) * dt; }
    std::size_t nx() const { return M + 1; }
    std::size_t ny() const { return N + 1; }
};

/// L = 0 is admitted so that a "solve" can degenerate to the terminal payoff.
inline Grid build_grid(double x_max, std::size_t M, std::size_t L, double T) {
    if (!(x_max > 0.0) || !std::isfinite(x_max))
        throw std::domain_error("build_grid: x_max must be positive");
    if (M < 2)
        throw std::domain_error("build_grid: need at least 2 spatial steps");
    if (!(T > 0.0) || !std::isfinite(T))
        throw std::domain_error("build_grid: maturity must be positive");
    Grid g;
    g.x_max = x_max;
    g.y_max = x_max;
    g.M = M;
    g.N = M;
    g.L = L;
    g.T = T;
    g.dx = x_max / static_cast<double>(M);
    g.dy = g.dx;
    g.dt = L == 0 ? 0.0 : T / static_cast<double>(L);
    return g;
}

/// Values of a function of (x, y) on one time level, indexed (m, n).
class Surface {
public:
    Surface() = default;
    Surface(std::size_t nx, std::size_t ny, double fill = 0.0, std::size_t time_index = 0)
        : nx_(nx), ny_(ny), time_index_(time_index), values_(nx * ny, fill) {}
    explicit Surface(const Grid& g, double fill = 0.0, std::size_t time_index = 0)
        : Surface(g.nx(), g.ny(), fill, time_index) {}

    double& operator()(std::size_t m, std::size_t n) { return values_[m * ny_ + n]; }
    double operator()(std::size_t m, std::size_t n) const { return values_[m * ny_ + n]; }

    std::size_t nx() const { return nx_; }
    std::size_t ny() const { return ny_; }
    std::size_t time_index() const { return time_index_; }
    void set_time_index(std::size_t l) { time_index_ = l; }

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    bool matches(const Grid& g) const { return nx_ == g.nx() && ny_ == g.ny(); }
    bool all_finite() const {
        return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
    }
    double max_abs() const {
        double a = 0.0;
        for (double v : values_) a = std::max(a, std::abs(v));
        return a;
    }

    friend bool operator==(const Surface&, const Surface&) = default;

private:
    std::size_t nx_ = 0;
    std::size_t ny_ = 0;
    std::size_t time_index_ = 0;
    std::vector<double> values_;
};

inline void require_match(const Surface& s, const Grid& g, const char* who) {
    if (!s.matches(g))
        throw std::invalid_argument(std::string(who) + ": surface dimensions do not match grid");
}

/// Spread call payoff (S1 - S2 - k)^+. Negative strikes are allowed.
struct SpreadPayoff {
    double k = 0.0;
    double operator()(double s1, double s2) const { return std::max(s1 - s2 - k, 0.0); }
};

inline Surface payoff_surface(const Grid& g, const SpreadPayoff& payoff) {
    if (!std::isfinite(payoff.k))
        throw std::domain_error("payoff_surface: strike must be finite");
    Surface s(g, 0.0, g.L);
    for (std::size_t m = 0; m <= g.M; ++m)
        for (std::size_t n = 0; n <= g.N; ++n)
            s(m, n) = payoff(g.x(m), g.y(n));
    return s;
}

/// Bilinear interpolation over the enclosing cell; exact at nodes.
inline double interpolate_at(const Surface& s, const Grid& g, double S1, double S2) {
    require_match(s, g, "interpolate_at");
    if (!(S1 >= 0.0 && S1 <= g.x_max) || !(S2 >= 0.0 && S2 <= g.y_max))
        throw std::domain_error("interpolate_at: query lies outside the truncated domain");

    auto locate = [](double v, double h, std::size_t last) {
        const double u = v / h;
        auto i = static_cast<std::size_t>(std::floor(u));
        if (i >= last) i = last - 1;
        double w = u - static_cast<double>(i);
        // Snap rounding noise so node queries return node values exactly.
        if (std::abs(w) < 1e-12) w = 0.0;
        if (std::abs(w - 1.0) < 1e-12) w = 1.0;
        return std::pair{i, w};
    };
    const auto [m, wx] = locate(S1, g.dx, g.M);
    const auto [n, wy] = locate(S2, g.dy, g.N);

    if (wx == 0.0 && wy == 0.0) return s(m, n);
    if (wx == 1.0 && wy == 0.0) return s(m + 1, n);
    if (wx == 0.0 && wy == 1.0) return s(m, n + 1);
    if (wx == 1.0 && wy == 1.0) return s(m + 1, n + 1);
    return (1.0 - wx) * (1.0 - wy) * s(m, n) + wx * (1.0 - wy) * s(m + 1, n) +
           (1.0 - wx) * wy * s(m, n + 1) + wx * wy * s(m + 1, n + 1);
}

// CSV surfaces: header "x\y,y_0,...,y_N", then one row per x node.

inline void write_surface_csv(std::ostream& os, const Surface& s, const Grid& g) {
    require_match(s, g, "write_surface_csv");
    std::ostringstream buf;
    buf.imbue(std::locale::classic());
    buf.precision(17);
    buf << "x\\y";
    for (std::size_t n = 0; n <= g.N; ++n) buf << ',' << g.y(n);
    buf << '\n';
    for (std::size_t m = 0; m <= g.M; ++m) {
        buf << g.x(m);
        for (std::size_t n = 0; n <= g.N; ++n) buf << ',' << s(m, n);
        buf << '\n';
    }
    os << buf.str();
}

/// Parsed CSV surface together with the node coordinates it was written with.
struct SurfaceCsv {
    std::vector<double> xs;
    std::vector<double> ys;
    Surface surface;
};

inline SurfaceCsv read_surface_csv(std::istream& is) {
    auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        return cells;
    };
    auto to_double = [](const std::string& cell) {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used != cell.size()) throw std::runtime_error("read_surface_csv: bad number '" + cell + "'");
        return v;
    };

    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("read_surface_csv: empty input");
    const auto header = split(line);
    if (header.size() < 2 || header[0] != "x\\y")
        throw std::runtime_error("read_surface_csv: malformed header");

    SurfaceCsv out;
    for (std::size_t i = 1; i < header.size(); ++i) out.ys.push_back(to_double(header[i]));
    std::vector<double> flat;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != header.size())
            throw std::runtime_error("read_surface_csv: ragged row");
        out.xs.push_back(to_double(cells[0]));
        for (std::size_t i = 1; i < cells.size(); ++i) flat.push_back(to_double(cells[i]));
    }
    out.surface = Surface(out.xs.size(), out.ys.size());
    out.surface.values() = std::move(flat);
    return out;
}

}  // namespace spreadadi

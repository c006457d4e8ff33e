#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace spreadadi {

/// Raised when elimination meets a zero (or non-finite) pivot.
class SingularPivotError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Row i reads lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i];
/// lower[0] and upper[n-1] are ignored.
struct TridiagonalSystem {
    std::vector<double> lower;
    std::vector<double> diag;
    std::vector<double> upper;
    std::vector<double> rhs;

    explicit TridiagonalSystem(std::size_t n = 0) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0), rhs(n, 0.0) {}
    std::size_t size() const { return diag.size(); }
};

/// Thomas algorithm into caller-provided storage. `scratch` needs size() entries.
inline void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                              std::span<const double> upper, std::span<const double> rhs,
                              std::span<double> x, std::span<double> scratch) {
    const std::size_t n = diag.size();
    if (lower.size() != n || upper.size() != n || rhs.size() != n || x.size() != n || scratch.size() < n)
        throw std::invalid_argument("solve_tridiagonal: inconsistent dimensions");
    if (n == 0) return;

    double pivot = diag[0];
    if (pivot == 0.0 || !std::isfinite(pivot))
        throw SingularPivotError("solve_tridiagonal: zero pivot in row 0");
    x[0] = rhs[0] / pivot;
    for (std::size_t i = 1; i < n; ++i) {
        scratch[i - 1] = upper[i - 1] / pivot;
        pivot = diag[i] - lower[i] * scratch[i - 1];
        if (pivot == 0.0 || !std::isfinite(pivot))
            throw SingularPivotError("solve_tridiagonal: zero pivot in row " + std::to_string(i));
        x[i] = (rhs[i] - lower[i] * x[i - 1]) / pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;)
        x[i] -= scratch[i] * x[i + 1];
}

inline std::vector<double> solve_tridiagonal(const TridiagonalSystem& sys) {
    const std::size_t n = sys.size();
    std::vector<double> x(n), scratch(n);
    solve_tridiagonal(sys.lower, sys.diag, sys.upper, sys.rhs, x, scratch);
    return x;
}

}  // namespace spreadadi

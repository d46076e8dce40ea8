#ifndef RICCATI_HJB_TRIDIAGONAL_HPP
#define RICCATI_HJB_TRIDIAGONAL_HPP

#include <vector>

namespace riccati {

/// lower[i] * x[i-1] + diag[i] * x[i] + upper[i] * x[i+1] = rhs[i]
/// (lower[0] and upper[n-1] are ignored).
struct TridiagonalSystem {
    std::vector<double> lower;
    std::vector<double> diag;
    std::vector<double> upper;
    std::vector<double> rhs;

    explicit TridiagonalSystem(std::size_t n = 0) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0), rhs(n, 0.0) {}
    std::size_t size() const { return diag.size(); }
};

/// Thomas algorithm. Throws SolverError naming the row where a pivot vanishes.
std::vector<double> solve_tridiagonal(const TridiagonalSystem& system);

}  // namespace riccati

#endif

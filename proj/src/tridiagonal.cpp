#include "riccati_hjb/tridiagonal.hpp"

#include <cmath>
#include <sstream>

#include "riccati_hjb/errors.hpp"

namespace riccati {

std::vector<double> solve_tridiagonal(const TridiagonalSystem& s) {
    const std::size_t n = s.size();
    std::vector<double> c_prime(n, 0.0);
    std::vector<double> d_prime(n, 0.0);
    std::vector<double> x(n, 0.0);
    if (n == 0) return x;

    auto check = [&](double pivot, std::size_t row) {
        if (!(std::abs(pivot) > 1e-300) || !std::isfinite(pivot)) {
            std::ostringstream msg;
            msg << "tridiagonal solve: zero pivot at row " << row << " (lower=" << s.lower[row]
                << ", diag=" << s.diag[row] << ", upper=" << s.upper[row] << ")";
            throw SolverError(msg.str());
        }
    };

    check(s.diag[0], 0);
    c_prime[0] = s.upper[0] / s.diag[0];
    d_prime[0] = s.rhs[0] / s.diag[0];
    for (std::size_t i = 1; i < n; ++i) {
        const double pivot = s.diag[i] - s.lower[i] * c_prime[i - 1];
        check(pivot, i);
        c_prime[i] = i + 1 < n ? s.upper[i] / pivot : 0.0;
        d_prime[i] = (s.rhs[i] - s.lower[i] * d_prime[i - 1]) / pivot;
    }
    x[n - 1] = d_prime[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d_prime[i] - c_prime[i] * x[i + 1];
    return x;
}

}  // namespace riccati

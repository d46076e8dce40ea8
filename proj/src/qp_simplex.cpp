#include "riccati_hjb/qp_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "riccati_hjb/errors.hpp"

namespace riccati::qp {
namespace {

constexpr double kStepTol = 1e-14;
constexpr double kCertificateTol = 1e-10;
constexpr int kEnumerationLimit = 20;

struct FaceSolution {
    Eigen::VectorXd theta_face;
    double multiplier = 0.0;
};

// Equality-constrained QP on a face:  Q_FF x - nu 1 = -c_F,  1'x = 1.
FaceSolution solve_face(const Eigen::MatrixXd& q, const Eigen::VectorXd& c,
                        const std::vector<int>& face) {
    const auto m = static_cast<Eigen::Index>(face.size());
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(m + 1, m + 1);
    Eigen::VectorXd rhs(m + 1);
    for (Eigen::Index a = 0; a < m; ++a) {
        for (Eigen::Index b = 0; b < m; ++b) kkt(a, b) = q(face[a], face[b]);
        kkt(a, m) = -1.0;
        kkt(m, a) = 1.0;
        rhs(a) = -c(face[a]);
    }
    rhs(m) = 1.0;
    const Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
    return {sol.head(m), sol(m)};
}

double objective(const Eigen::MatrixXd& q, const Eigen::VectorXd& c, const Eigen::VectorXd& theta) {
    return 0.5 * theta.dot(q * theta) + c.dot(theta);
}

std::vector<int> support_of(const Eigen::VectorXd& theta) {
    std::vector<int> s;
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        if (theta(i) > 0.0) s.push_back(static_cast<int>(i));
    }
    return s;
}

}  // namespace

double kkt_residual(const Eigen::MatrixXd& q, const Eigen::VectorXd& c, const Eigen::VectorXd& theta) {
    double residual = std::abs(theta.sum() - 1.0);
    residual = std::max(residual, std::max(0.0, -theta.minCoeff()));
    const Eigen::VectorXd g = q * theta + c;
    double nu = 0.0;
    int count = 0;
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        if (theta(i) > 1e-12) {
            nu += g(i);
            ++count;
        }
    }
    if (count == 0) return std::numeric_limits<double>::infinity();
    nu /= count;
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        if (theta(i) > 1e-12) {
            residual = std::max(residual, std::abs(g(i) - nu));
        } else {
            residual = std::max(residual, std::max(0.0, nu - g(i)));
        }
    }
    return residual;
}

SimplexQpSolution best_vertex(const Eigen::MatrixXd& q, const Eigen::VectorXd& c) {
    const auto n = c.size();
    Eigen::Index best = 0;
    double best_value = 0.5 * q(0, 0) + c(0);
    for (Eigen::Index i = 1; i < n; ++i) {
        const double v = 0.5 * q(i, i) + c(i);
        if (v < best_value) {
            best_value = v;
            best = i;
        }
    }
    SimplexQpSolution out;
    out.theta = Eigen::VectorXd::Zero(n);
    out.theta(best) = 1.0;
    out.value = best_value;
    out.support = {static_cast<int>(best)};
    out.budget_multiplier = q(best, best) + c(best);
    return out;
}

SimplexQpSolution solve_by_enumeration(const Eigen::MatrixXd& q, const Eigen::VectorXd& c) {
    const auto n = static_cast<int>(c.size());
    if (n > kEnumerationLimit) {
        throw SolverError("facet enumeration limited to " + std::to_string(kEnumerationLimit) +
                          " assets, got " + std::to_string(n));
    }
    SimplexQpSolution best;
    best.value = std::numeric_limits<double>::infinity();
    std::vector<int> face;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        face.clear();
        for (int i = 0; i < n; ++i) {
            if (mask & (1u << i)) face.push_back(i);
        }
        const FaceSolution fs = solve_face(q, c, face);
        if (!fs.theta_face.allFinite() || fs.theta_face.minCoeff() < -kStepTol) continue;
        Eigen::VectorXd theta = Eigen::VectorXd::Zero(n);
        for (std::size_t a = 0; a < face.size(); ++a) theta(face[a]) = std::max(0.0, fs.theta_face(a));
        const double v = objective(q, c, theta);
        if (v < best.value) {
            best.value = v;
            best.theta = theta;
            best.budget_multiplier = fs.multiplier;
        }
    }
    if (!std::isfinite(best.value)) throw SolverError("facet enumeration found no feasible face");
    best.support = support_of(best.theta);
    best.used_enumeration = true;
    return best;
}

SimplexQpSolution solve_active_set(const Eigen::MatrixXd& q, const Eigen::VectorXd& c) {
    const auto n = c.size();
    SimplexQpSolution start = best_vertex(q, c);
    Eigen::VectorXd theta = start.theta;
    std::vector<int> free_set = start.support;
    double nu = start.budget_multiplier;

    const double scale = std::max({q.cwiseAbs().maxCoeff(), c.cwiseAbs().maxCoeff(), 1e-300});
    const double multiplier_tol = 1e-13 * scale;
    const int max_iterations = 50 * static_cast<int>(n) + 50;

    bool converged = false;
    int it = 0;
    for (; it < max_iterations; ++it) {
        const FaceSolution fs = solve_face(q, c, free_set);
        nu = fs.multiplier;
        Eigen::VectorXd step(free_set.size());
        for (std::size_t a = 0; a < free_set.size(); ++a) step(a) = fs.theta_face(a) - theta(free_set[a]);

        if (step.cwiseAbs().maxCoeff() <= kStepTol) {
            const Eigen::VectorXd g = q * theta + c;
            int entering = -1;
            double most_negative = -multiplier_tol;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (std::find(free_set.begin(), free_set.end(), j) != free_set.end()) continue;
                const double lambda = g(j) - nu;
                if (lambda < most_negative) {
                    most_negative = lambda;
                    entering = static_cast<int>(j);
                }
            }
            if (entering < 0) {
                converged = true;
                break;
            }
            free_set.insert(std::upper_bound(free_set.begin(), free_set.end(), entering), entering);
            continue;
        }

        double t = 1.0;
        int blocking = -1;
        for (std::size_t a = 0; a < free_set.size(); ++a) {
            if (step(a) < 0.0) {
                const double ta = -theta(free_set[a]) / step(a);
                if (ta < t) {
                    t = ta;
                    blocking = static_cast<int>(a);
                }
            }
        }
        for (std::size_t a = 0; a < free_set.size(); ++a) theta(free_set[a]) += t * step(a);
        if (blocking >= 0) {
            theta(free_set[blocking]) = 0.0;
            free_set.erase(free_set.begin() + blocking);
        }
    }

    SimplexQpSolution out;
    out.theta = theta;
    out.value = objective(q, c, theta);
    out.support = support_of(theta);
    out.budget_multiplier = nu;
    out.iterations = it;

    if (converged && kkt_residual(q, c, theta) <= kCertificateTol) return out;
    if (n <= kEnumerationLimit) {
        SimplexQpSolution fallback = solve_by_enumeration(q, c);
        fallback.iterations = it;
        if (kkt_residual(q, c, fallback.theta) <= kCertificateTol) return fallback;
    }
    throw SolverError("simplex QP: active-set iteration did not produce a KKT point after " +
                      std::to_string(it) + " iterations");
}

}  // namespace riccati::qp

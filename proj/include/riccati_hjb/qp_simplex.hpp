#ifndef RICCATI_HJB_QP_SIMPLEX_HPP
#define RICCATI_HJB_QP_SIMPLEX_HPP

#include <vector>

#include <Eigen/Dense>

namespace riccati::qp {

/// Solution of  min 0.5 theta'Q theta + c'theta  over the unit simplex.
struct SimplexQpSolution {
    Eigen::VectorXd theta;
    double value = 0.0;
    /// Indices with strictly positive weight, ascending.
    std::vector<int> support;
    /// Multiplier of the budget constraint 1'theta = 1.
    double budget_multiplier = 0.0;
    int iterations = 0;
    bool used_enumeration = false;
};

/// Primal active-set method. Q must be positive definite. The result is
/// certified with kkt_residual and, when the certificate fails on a small
/// problem, recomputed by facet enumeration. Throws SolverError when no
/// certified minimiser can be produced.
SimplexQpSolution solve_active_set(const Eigen::MatrixXd& q, const Eigen::VectorXd& c);

/// Exhaustive search over all 2^n - 1 faces of the simplex; n <= 20.
SimplexQpSolution solve_by_enumeration(const Eigen::MatrixXd& q, const Eigen::VectorXd& c);

/// Best vertex, lowest index on ties. This is the exact minimiser whenever Q
/// is negative semidefinite (the objective is then concave).
SimplexQpSolution best_vertex(const Eigen::MatrixXd& q, const Eigen::VectorXd& c);

/// Largest violation among: budget constraint, nonnegativity, stationarity on
/// the support, and sign of the multipliers off the support.
double kkt_residual(const Eigen::MatrixXd& q, const Eigen::VectorXd& c, const Eigen::VectorXd& theta);

}  // namespace riccati::qp

#endif

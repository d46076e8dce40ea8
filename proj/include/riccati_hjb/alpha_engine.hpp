#ifndef RICCATI_HJB_ALPHA_ENGINE_HPP
#define RICCATI_HJB_ALPHA_ENGINE_HPP

#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "riccati_hjb/portfolio_model.hpp"

namespace riccati {

/// alpha(x, phi) = min over the decision set of  -mu(x, theta) + (phi/2) sigma(theta)^2.
struct AlphaResult {
    double value = 0.0;
    Eigen::VectorXd theta_hat;
    /// Envelope derivative d alpha / d phi = sigma(theta_hat)^2 / 2.
    double dvalue_dphi = 0.0;
    /// Indices with strictly positive weight.
    std::vector<int> active_set;
};

/// Slope bounds of alpha in phi, and the bound on |d_x sigma^2|.
struct LipschitzBounds {
    double omega = 0.0;
    double big_l = 0.0;
    double l0 = 0.0;
};

/// Piecewise closed form of alpha for two assets on the simplex:
///
///     E- phi + D-          for phi <= phi_minus
///     A - B/phi + C phi    for phi_minus < phi < phi_plus
///     E+ phi + D+          for phi >= phi_plus
///
/// phi_plus is +infinity when the minimum-variance portfolio is interior, and
/// phi_minus is 0 (or +infinity) when the means coincide.
struct ClosedFormN2 {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d_minus = 0.0;
    double d_plus = 0.0;
    double e_minus = 0.0;
    double e_plus = 0.0;
    double phi_minus = 0.0;
    double phi_plus = std::numeric_limits<double>::infinity();
    /// First-asset weight on the lower and upper linear branches.
    double theta_lower = 1.0;
    double theta_upper = 0.0;
    /// Unclamped interior weight theta_1(phi) = slope / phi + offset.
    double theta_slope = 0.0;
    double theta_offset = 0.0;

    double value(double phi) const;
    double derivative(double phi) const;
    /// Optimal first-asset weight at phi.
    double theta1(double phi) const;
};

/// Exact minimiser over the simplex (active-set QP with enumeration fallback)
/// or over a discrete menu. phi <= 0 is accepted: the objective is then
/// concave and the minimum sits at a vertex.
AlphaResult solve_alpha(const PortfolioModel& model, double x, double phi);

/// Minimum over a finite menu, ties resolved towards the lowest index.
/// Throws InputError when the model's decision set is the simplex.
AlphaResult alpha_discrete(const PortfolioModel& model, double x, double phi);

/// Requires two assets, the simplex, and the Markowitz drift convention.
ClosedFormN2 closed_form_n2(const PortfolioModel& model);

LipschitzBounds lipschitz_bounds(const PortfolioModel& model);

struct EnvelopeX {
    /// p(x) = max over theta of |d_x mu(x, theta)|
    double p_bound = 0.0;
    /// d_x alpha(x, phi) from the envelope theorem.
    double alpha_x = 0.0;
};
EnvelopeX envelope_gradient_x(const PortfolioModel& model, double x, double phi);

/// h(x) = alpha(x, 0) = -max over theta of mu(x, theta)
double h_value(const PortfolioModel& model, double x);

/// Stationarity/feasibility residual of a result, computed from scratch.
double alpha_kkt_residual(const PortfolioModel& model, double x, double phi, const AlphaResult& r);

struct WeightsRow {
    double phi = 0.0;
    Eigen::VectorXd theta;
    double alpha = 0.0;
    double dalpha_dphi = 0.0;
    std::vector<int> active_set;
};

/// Optimal weights along a strictly increasing positive phi grid (at x = 0).
std::vector<WeightsRow> weights_path(const PortfolioModel& model, const std::vector<double>& phi_grid);

/// Within a fixed active set the weights are affine in 1/phi. Returns the
/// largest deviation from that over consecutive same-support triples.
double inverse_phi_affinity_residual(const std::vector<WeightsRow>& path);

/// True when the active set at x differs anywhere in [phi - radius, phi + radius].
bool near_active_set_change(const PortfolioModel& model, double x, double phi, double radius = 1e-3);

}  // namespace riccati

#endif

#include "riccati_hjb/alpha_engine.hpp"

#include <algorithm>
#include <cmath>

#include "riccati_hjb/errors.hpp"
#include "riccati_hjb/qp_simplex.hpp"

namespace riccati {
namespace {

// Coefficient of theta'Sigma theta / 2 in the objective.
double curvature(const PortfolioModel& model, double phi) {
    return model.convention() == DriftConvention::LogWealth ? phi + 1.0 : phi;
}

AlphaResult finish(const PortfolioModel& model, double x, double phi, Eigen::VectorXd theta) {
    AlphaResult r;
    const double var = model.variance(theta);
    r.value = -drift(model, x, theta) + 0.5 * phi * var;
    r.dvalue_dphi = 0.5 * var;
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        if (theta(i) > 0.0) r.active_set.push_back(static_cast<int>(i));
    }
    r.theta_hat = std::move(theta);
    return r;
}

}  // namespace

AlphaResult alpha_discrete(const PortfolioModel& model, double x, double phi) {
    const DiscreteMenu* menu = model.menu();
    if (menu == nullptr) throw InputError("alpha_discrete: model has no discrete decision set");
    std::size_t best = 0;
    double best_value = 0.0;
    for (std::size_t i = 0; i < menu->points.size(); ++i) {
        const auto& theta = menu->points[i];
        const double v = -drift(model, x, theta) + 0.5 * phi * model.variance(theta);
        if (i == 0 || v < best_value) {
            best_value = v;
            best = i;
        }
    }
    return finish(model, x, phi, menu->points[best]);
}

AlphaResult solve_alpha(const PortfolioModel& model, double x, double phi) {
    if (!std::isfinite(phi) || !std::isfinite(x)) throw InputError("solve_alpha: x and phi must be finite");
    if (!model.is_simplex()) return alpha_discrete(model, x, phi);

    const double k = curvature(model, phi);
    const Eigen::MatrixXd q = k * model.sigma();
    const Eigen::VectorXd c = -model.mu();
    const qp::SimplexQpSolution sol = k > 0.0 ? qp::solve_active_set(q, c) : qp::best_vertex(q, c);
    return finish(model, x, phi, sol.theta);
}

double alpha_kkt_residual(const PortfolioModel& model, double x, double phi, const AlphaResult& r) {
    (void)x;  // sigma is x-independent and the inflow term does not depend on theta
    if (!model.is_simplex()) return 0.0;
    const double k = curvature(model, phi);
    if (k <= 0.0) {
        // Concave objective: optimality means no vertex does better.
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < model.mu().size(); ++i) {
            best = std::min(best, 0.5 * k * model.sigma()(i, i) - model.mu()(i));
        }
        const double own = 0.5 * k * model.variance(r.theta_hat) - model.mu().dot(r.theta_hat);
        return std::max(0.0, own - best);
    }
    return qp::kkt_residual(k * model.sigma(), -model.mu(), r.theta_hat);
}

double h_value(const PortfolioModel& model, double x) { return solve_alpha(model, x, 0.0).value; }

LipschitzBounds lipschitz_bounds(const PortfolioModel& model) {
    LipschitzBounds out;
    if (const DiscreteMenu* menu = model.menu()) {
        out.omega = std::numeric_limits<double>::infinity();
        for (const auto& theta : menu->points) {
            const double half_var = 0.5 * model.variance(theta);
            out.omega = std::min(out.omega, half_var);
            out.big_l = std::max(out.big_l, half_var);
        }
        return out;
    }
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(model.mu().size());
    out.omega = qp::solve_active_set(model.sigma(), zero).value;
    // A convex function on a polytope peaks at a vertex.
    out.big_l = 0.5 * model.sigma().diagonal().maxCoeff();
    return out;
}

double ClosedFormN2::value(double phi) const {
    if (phi <= phi_minus) return e_minus * phi + d_minus;
    if (phi >= phi_plus) return e_plus * phi + d_plus;
    return a - b / phi + c * phi;
}

double ClosedFormN2::derivative(double phi) const {
    if (phi <= phi_minus) return e_minus;
    if (phi >= phi_plus) return e_plus;
    return b / (phi * phi) + c;
}

double ClosedFormN2::theta1(double phi) const {
    if (phi <= phi_minus) return theta_lower;
    if (phi >= phi_plus) return theta_upper;
    return theta_slope / phi + theta_offset;
}

ClosedFormN2 closed_form_n2(const PortfolioModel& model) {
    if (model.n_assets() != 2 || !model.is_simplex()) {
        throw InputError("closed_form_n2: requires two assets on the simplex");
    }
    if (model.convention() != DriftConvention::Markowitz || model.inflow()) {
        throw InputError("closed_form_n2: requires the x-independent Markowitz drift");
    }
    const Eigen::MatrixXd& s = model.sigma();
    const double mu1 = model.mu()(0);
    const double mu2 = model.mu()(1);
    const double dmu = mu1 - mu2;
    const double d = s(0, 0) - 2.0 * s(0, 1) + s(1, 1);
    const double b = s(1, 1) - s(0, 1);
    const double offset = b / d;

    ClosedFormN2 cf;
    cf.theta_slope = dmu / d;
    cf.theta_offset = offset;
    cf.a = -mu2 - dmu * b / d;
    cf.b = dmu * dmu / (2.0 * d);
    cf.c = (s(0, 0) * s(1, 1) - s(0, 1) * s(0, 1)) / (2.0 * d);

    auto half_var = [&](double t) {
        return 0.5 * (t * t * s(0, 0) + 2.0 * t * (1.0 - t) * s(0, 1) + (1.0 - t) * (1.0 - t) * s(1, 1));
    };
    auto neg_mean = [&](double t) { return -(t * mu1 + (1.0 - t) * mu2); };
    // phi at which the interior weight reaches the vertex weight t, or +inf if never.
    auto crossing = [&](double t) {
        const double gap = d * (t - offset);
        if (dmu == 0.0 || gap == 0.0) return std::numeric_limits<double>::infinity();
        const double phi = dmu / gap;
        return phi > 0.0 ? phi : std::numeric_limits<double>::infinity();
    };
    const double inf = std::numeric_limits<double>::infinity();
    const bool interior_limit = offset > 0.0 && offset < 1.0;

    // Lower branch: the limit phi -> 0+.
    if (dmu > 0.0) cf.theta_lower = 1.0;
    else if (dmu < 0.0) cf.theta_lower = 0.0;
    else cf.theta_lower = std::clamp(offset, 0.0, 1.0);

    if (dmu == 0.0) {
        cf.phi_minus = interior_limit ? 0.0 : inf;
    } else {
        cf.phi_minus = crossing(cf.theta_lower);
    }
    cf.e_minus = half_var(cf.theta_lower);
    cf.d_minus = neg_mean(cf.theta_lower);

    // Upper branch: the limit phi -> infinity.
    if (interior_limit) {
        cf.theta_upper = offset;
        cf.phi_plus = inf;
        cf.e_plus = cf.c;
        cf.d_plus = cf.a;
    } else {
        cf.theta_upper = offset >= 1.0 ? 1.0 : 0.0;
        cf.phi_plus = cf.phi_minus == inf ? inf : crossing(cf.theta_upper);
        cf.e_plus = half_var(cf.theta_upper);
        cf.d_plus = neg_mean(cf.theta_upper);
    }
    return cf;
}

EnvelopeX envelope_gradient_x(const PortfolioModel& model, double x, double phi) {
    (void)phi;  // d_x mu does not depend on theta, so neither does the envelope value
    const double slope = inflow_drift_dx(model, x);
    return {std::abs(slope), -slope};
}

std::vector<WeightsRow> weights_path(const PortfolioModel& model, const std::vector<double>& phi_grid) {
    for (std::size_t i = 0; i < phi_grid.size(); ++i) {
        if (!(phi_grid[i] > 0.0) || (i > 0 && !(phi_grid[i] > phi_grid[i - 1]))) {
            throw InputError("weights_path: phi grid must be positive and strictly increasing");
        }
    }
    std::vector<WeightsRow> rows;
    rows.reserve(phi_grid.size());
    for (double phi : phi_grid) {
        AlphaResult r = solve_alpha(model, 0.0, phi);
        rows.push_back({phi, std::move(r.theta_hat), r.value, r.dvalue_dphi, std::move(r.active_set)});
    }
    return rows;
}

double inverse_phi_affinity_residual(const std::vector<WeightsRow>& path) {
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < path.size(); ++i) {
        const auto& lo = path[i - 1];
        const auto& mid = path[i];
        const auto& hi = path[i + 1];
        if (lo.active_set != mid.active_set || mid.active_set != hi.active_set) continue;
        const double u0 = 1.0 / lo.phi;
        const double u1 = 1.0 / mid.phi;
        const double u2 = 1.0 / hi.phi;
        const double w = (u1 - u0) / (u2 - u0);
        const Eigen::VectorXd interp = (1.0 - w) * lo.theta + w * hi.theta;
        worst = std::max(worst, (interp - mid.theta).cwiseAbs().maxCoeff());
    }
    return worst;
}

bool near_active_set_change(const PortfolioModel& model, double x, double phi, double radius) {
    const auto reference = solve_alpha(model, x, phi).active_set;
    constexpr int kProbes = 8;
    for (int k = -kProbes; k <= kProbes; ++k) {
        if (k == 0) continue;
        const double p = phi + radius * k / kProbes;
        if (solve_alpha(model, x, p).active_set != reference) return true;
    }
    return false;
}

}  // namespace riccati

#include "riccati_hjb/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "riccati_hjb/errors.hpp"
#include "riccati_hjb/sobolev.hpp"

namespace riccati {

void to_json(nlohmann::json& j, const CheckReport& r) {
    j = nlohmann::json{{"check_name", r.check_name},
                       {"bound_lhs", r.bound_lhs},
                       {"bound_rhs", r.bound_rhs},
                       {"worst_violation", r.worst_violation},
                       {"tolerance", r.tolerance},
                       {"pass", r.pass},
                       {"context", r.context}};
}

void to_json(nlohmann::json& j, const ContractionBudget& b) {
    j = nlohmann::json{{"omega", b.omega},
                       {"beta", b.beta},
                       {"beta_tilde", b.beta_tilde},
                       {"t0", b.t0},
                       {"horizon", b.horizon},
                       {"horizon_exceeds_t0", b.horizon_exceeds_t0},
                       {"continuation_windows", b.continuation_windows},
                       {"dimension", b.dimension}};
}

namespace {

CheckReport finalize(CheckReport r) {
    r.pass = r.worst_violation <= r.tolerance;
    r.context["tolerance"] = r.tolerance;
    return r;
}

double grid_h_sup(const PortfolioModel& model, const SpatialGrid& grid) {
    double sup = 0.0;
    for (std::size_t i = 0; i < grid.n_cells(); ++i) sup = std::max(sup, std::abs(h_value(model, grid.center(i))));
    return sup;
}

}  // namespace

ContractionBudget contraction_budget(const BudgetInputs& in) {
    if (!(in.bounds.omega > 0.0)) throw InputError("contraction budget: omega must be positive");
    ContractionBudget b;
    b.omega = in.bounds.omega;
    b.horizon = in.horizon;
    const double cap = in.cutoff_m * std::exp(in.lambda * in.horizon);
    const double phi_range = (cap + in.h_sup) / in.bounds.omega;
    b.beta = std::max(in.bounds.big_l, in.bounds.big_l * phi_range + cap);
    const double beta_tilde_sq = 2.0 * (1.0 + b.dimension) * b.beta * b.beta;
    b.beta_tilde = std::sqrt(beta_tilde_sq);
    b.t0 = 2.0 * b.omega / beta_tilde_sq;
    b.horizon_exceeds_t0 = b.horizon > b.t0;
    b.continuation_windows = b.horizon_exceeds_t0 ? 1.0 + std::ceil((b.horizon - b.t0) / (0.5 * b.t0)) : 1.0;
    return b;
}

ContractionBudget contraction_budget(const PortfolioModel& model, const SolutionField& solution) {
    BudgetInputs in;
    in.bounds = lipschitz_bounds(model);
    in.cutoff_m = solution.cutoff.m;
    in.lambda = solution.cutoff.lambda;
    in.horizon = solution.tau.back();
    in.h_sup = grid_h_sup(model, solution.grid);
    return contraction_budget(in);
}

std::vector<std::pair<double, double>> random_phi_pairs(std::size_t count, double lo, double hi,
                                                        std::uint64_t seed) {
    if (!(lo < hi)) throw InputError("random_phi_pairs: require lo < hi");
    std::mt19937_64 gen(seed);
    // 53-bit mantissa draw in (0, 1); mt19937_64 output is fixed by the standard
    auto unit = [&gen] {
        double u = 0.0;
        while (u == 0.0) u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
        return u;
    };
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(count);
    while (pairs.size() < count) {
        const double a = lo + (hi - lo) * unit();
        const double b = lo + (hi - lo) * unit();
        if (a != b) pairs.emplace_back(a, b);
    }
    return pairs;
}

CheckReport monotonicity_certificate(const PortfolioModel& model,
                                     std::span<const std::pair<double, double>> phi_pairs,
                                     std::span<const double> x_samples, double tolerance) {
    const LipschitzBounds bounds = lipschitz_bounds(model);
    CheckReport r;
    r.check_name = "monotonicity";
    r.tolerance = tolerance;
    double min_ratio = std::numeric_limits<double>::infinity();
    double max_ratio = -std::numeric_limits<double>::infinity();
    std::size_t violations = 0;
    nlohmann::json worst_at = nullptr;
    for (double x : x_samples) {
        for (const auto& [p1, p2] : phi_pairs) {
            if (p1 == p2) continue;
            const double ratio = (solve_alpha(model, x, p1).value - solve_alpha(model, x, p2).value) / (p1 - p2);
            min_ratio = std::min(min_ratio, ratio);
            max_ratio = std::max(max_ratio, ratio);
            const double violation = std::max({0.0, bounds.omega - ratio, ratio - bounds.big_l});
            if (violation > tolerance) ++violations;
            if (violation > r.worst_violation || worst_at.is_null()) {
                if (violation >= r.worst_violation) {
                    r.worst_violation = violation;
                    worst_at = {{"x", x}, {"phi1", p1}, {"phi2", p2}, {"ratio", ratio}};
                }
            }
        }
    }
    r.bound_lhs = min_ratio;
    r.bound_rhs = bounds.omega;
    r.context = {{"omega", bounds.omega},
                 {"L", bounds.big_l},
                 {"min_ratio", min_ratio},
                 {"max_ratio", max_ratio},
                 {"pairs", phi_pairs.size()},
                 {"x_samples", x_samples.size()},
                 {"violations", violations},
                 {"worst_at", worst_at}};
    return finalize(std::move(r));
}

CheckReport maximum_principle_report(const SolutionField& solution, const PortfolioModel& model,
                                     double tolerance) {
    const SpatialGrid& grid = solution.grid;
    const std::size_t n = grid.n_cells();
    double psi_lo = 0.0;
    double psi_hi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = solve_alpha(model, grid.center(i), solution.phi[0][i]).value;
        psi_lo = std::min(psi_lo, a);
        psi_hi = std::max(psi_hi, a);
    }
    const double lambda = inflow_drift_slope_sup(model);

    CheckReport r;
    r.check_name = "maximum_principle";
    r.tolerance = tolerance;
    nlohmann::json worst_at = nullptr;
    double alpha_min = std::numeric_limits<double>::infinity();
    double alpha_max = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < solution.phi.size(); ++k) {
        const double growth = std::exp(lambda * solution.tau[k]);
        const double lo = psi_lo * growth;
        const double hi = psi_hi * growth;
        for (std::size_t i = 0; i < n; ++i) {
            const double a = solve_alpha(model, grid.center(i), solution.phi[k][i]).value;
            alpha_min = std::min(alpha_min, a);
            alpha_max = std::max(alpha_max, a);
            const double below = lo - a;
            const double above = a - hi;
            const double violation = std::max({0.0, below, above});
            if (worst_at.is_null() || violation > r.worst_violation) {
                r.worst_violation = violation;
                r.bound_lhs = a;
                r.bound_rhs = below >= above ? lo : hi;
                worst_at = {{"step", k}, {"cell", i}, {"x", grid.center(i)}, {"tau", solution.tau[k]},
                            {"alpha", a}, {"side", below >= above ? "lower" : "upper"}};
            }
        }
    }
    r.context = {{"psi_lower", psi_lo}, {"psi_upper", psi_hi}, {"lambda", lambda},
                 {"alpha_min", alpha_min}, {"alpha_max", alpha_max}, {"worst_at", worst_at}};
    return finalize(std::move(r));
}

CheckReport linf_bound_report(const SolutionField& solution, const PortfolioModel& model, double tolerance) {
    const LipschitzBounds bounds = lipschitz_bounds(model);
    const double h_sup = grid_h_sup(model, solution.grid);
    CheckReport r;
    r.check_name = "linf_bound";
    r.tolerance = tolerance;
    for (const auto& level : solution.phi) {
        for (double v : level) r.bound_lhs = std::max(r.bound_lhs, std::abs(v));
    }
    r.bound_rhs = (solution.cutoff.limit() + h_sup) / bounds.omega;
    r.worst_violation = std::max(0.0, r.bound_lhs - r.bound_rhs);
    r.context = {{"M", solution.cutoff.m}, {"lambda", solution.cutoff.lambda}, {"h_sup", h_sup},
                 {"omega", bounds.omega}};
    return finalize(std::move(r));
}

CheckReport comparison_report(const SolutionField& upper, const SolutionField& lower, double tolerance) {
    if (upper.phi.size() != lower.phi.size() || upper.grid.n_cells() != lower.grid.n_cells() ||
        upper.grid.x_min() != lower.grid.x_min() || upper.grid.x_max() != lower.grid.x_max()) {
        throw InputError("comparison_report: solutions live on different grids");
    }
    CheckReport r;
    r.check_name = "comparison";
    r.tolerance = tolerance;
    nlohmann::json worst_at = nullptr;
    double worst_gap = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < upper.phi.size(); ++k) {
        for (std::size_t i = 0; i < upper.grid.n_cells(); ++i) {
            const double gap = lower.phi[k][i] - upper.phi[k][i];
            if (gap > worst_gap) {
                worst_gap = gap;
                r.bound_lhs = lower.phi[k][i];
                r.bound_rhs = upper.phi[k][i];
                worst_at = {{"step", k}, {"cell", i}, {"x", upper.grid.center(i)}, {"tau", upper.tau[k]}};
            }
        }
    }
    r.worst_violation = std::max(0.0, worst_gap);
    r.context = {{"max_lower_minus_upper", worst_gap}, {"worst_at", worst_at}};
    return finalize(std::move(r));
}

CheckReport conservation_report(const SolutionField& solution, double tolerance) {
    CheckReport r;
    r.check_name = "conservation";
    r.tolerance = tolerance;
    std::size_t worst_step = 0;
    for (std::size_t k = 0; k < solution.diagnostics.size(); ++k) {
        const double defect = std::abs(solution.diagnostics[k].conservation_defect);
        if (defect > r.worst_violation) {
            r.worst_violation = defect;
            worst_step = k;
        }
    }
    r.bound_lhs = r.worst_violation;
    r.context = {{"worst_step", worst_step}};
    return finalize(std::move(r));
}

CheckReport picard_report(const SolutionField& solution) {
    CheckReport r;
    r.check_name = "inner_iteration";
    r.tolerance = solution.picard_tol;
    int max_iterations = 0;
    for (const auto& d : solution.diagnostics) {
        r.bound_lhs = std::max(r.bound_lhs, d.picard_update);
        max_iterations = std::max(max_iterations, d.picard_iterations);
    }
    r.bound_rhs = solution.picard_tol;
    r.worst_violation = r.bound_lhs;
    r.context = {{"max_iterations", max_iterations}};
    return finalize(std::move(r));
}

CheckReport energy_estimate_report(const SolutionField& solution, const PortfolioModel& model) {
    const SpatialGrid& grid = solution.grid;
    const double dx = grid.dx();
    const std::size_t levels = solution.phi.size();

    double sup_hminus1 = 0.0;
    double l2_integral = 0.0;
    double previous_l2 = 0.0;
    double boundary_max = 0.0;
    double interior_max = 0.0;
    for (std::size_t k = 0; k < levels; ++k) {
        const auto& phi = solution.phi[k];
        const double hm1 = sobolev_norm(phi, dx, -1.0);
        const double l2 = sobolev_norm(phi, dx, 0.0);
        sup_hminus1 = std::max(sup_hminus1, hm1 * hm1);
        if (k > 0) l2_integral += 0.5 * (solution.tau[k] - solution.tau[k - 1]) * (previous_l2 + l2 * l2);
        previous_l2 = l2 * l2;
        boundary_max = std::max({boundary_max, std::abs(phi.front()), std::abs(phi.back())});
        for (double v : phi) interior_max = std::max(interior_max, std::abs(v));
    }

    const double horizon = solution.tau.back();
    std::vector<double> h(grid.n_cells());
    std::vector<double> h_xx(grid.n_cells());
    for (std::size_t i = 0; i < grid.n_cells(); ++i) {
        h[i] = h_value(model, grid.center(i));
        h_xx[i] = -inflow_drift_dxx(model, grid.center(i));
    }
    const double phi0_hm1 = sobolev_norm(solution.phi[0], dx, -1.0);
    const double h_l2 = sobolev_norm(h, dx, 0.0);
    const double hxx_l2 = sobolev_norm(h_xx, dx, 0.0);
    const double rhs = phi0_hm1 * phi0_hm1 + horizon * (h_l2 * h_l2 + hxx_l2 * hxx_l2);

    CheckReport r;
    r.check_name = "energy_estimate";
    r.bound_lhs = sup_hminus1 + l2_integral;
    r.bound_rhs = rhs;
    r.tolerance = 0.0;
    r.worst_violation = std::isfinite(r.bound_lhs) ? 0.0 : std::numeric_limits<double>::infinity();
    const double ratio = rhs > 0.0 ? r.bound_lhs / rhs : 0.0;
    r.context = {{"sup_hminus1_sq", sup_hminus1},
                 {"l2_time_integral", l2_integral},
                 {"phi0_hminus1_sq", phi0_hm1 * phi0_hm1},
                 {"h_l2_sq", h_l2 * h_l2},
                 {"h_xx_l2_sq", hxx_l2 * hxx_l2},
                 {"ratio", ratio},
                 {"boundary_decay", interior_max > 0.0 ? boundary_max / interior_max : 0.0}};
    return finalize(std::move(r));
}

CheckReport energy_refinement_report(const CheckReport& coarse, const CheckReport& fine, double growth) {
    CheckReport r;
    r.check_name = "energy_refinement";
    r.tolerance = 0.0;
    const double rc = coarse.context.value("ratio", 0.0);
    const double rf = fine.context.value("ratio", 0.0);
    r.bound_lhs = rf;
    r.bound_rhs = (1.0 + growth) * rc;
    r.worst_violation = std::max(0.0, r.bound_lhs - r.bound_rhs);
    if (!std::isfinite(rf) || !std::isfinite(rc)) r.worst_violation = std::numeric_limits<double>::infinity();
    r.context = {{"coarse_ratio", rc}, {"fine_ratio", rf}, {"allowed_growth", growth},
                 {"relative_change", rc > 0.0 ? rf / rc - 1.0 : 0.0}};
    return finalize(std::move(r));
}

}  // namespace riccati

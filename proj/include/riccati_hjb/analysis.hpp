#ifndef RICCATI_HJB_ANALYSIS_HPP
#define RICCATI_HJB_ANALYSIS_HPP

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "riccati_hjb/alpha_engine.hpp"
#include "riccati_hjb/portfolio_model.hpp"
#include "riccati_hjb/riccati_solver.hpp"

namespace riccati {

/// Outcome of one inequality check. pass == (worst_violation <= tolerance).
struct CheckReport {
    std::string check_name;
    double bound_lhs = 0.0;
    double bound_rhs = 0.0;
    double worst_violation = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    nlohmann::json context = nlohmann::json::object();
};

void to_json(nlohmann::json& j, const CheckReport& r);

/// Quantities of the fixed-point contraction argument in one space dimension.
struct ContractionBudget {
    double omega = 0.0;
    double beta = 0.0;
    double beta_tilde = 0.0;  // beta_tilde^2 = 2 (1 + d) beta^2
    double t0 = 0.0;          // beta_tilde^2 t0 / (2 omega) = 1
    double horizon = 0.0;
    bool horizon_exceeds_t0 = false;
    /// Overlapping windows of length t0 (advancing by t0/2) needed to cover the horizon.
    double continuation_windows = 1.0;
    int dimension = 1;
};

void to_json(nlohmann::json& j, const ContractionBudget& b);

struct BudgetInputs {
    LipschitzBounds bounds;
    double cutoff_m = 0.0;
    double lambda = 0.0;
    double horizon = 0.0;
    /// sup |h(x)|
    double h_sup = 0.0;
};

/// beta = max(L, L * Phi + M e^{lambda T}) with Phi = (M e^{lambda T} + sup|h|) / omega.
ContractionBudget contraction_budget(const BudgetInputs& inputs);
ContractionBudget contraction_budget(const PortfolioModel& model, const SolutionField& solution);

/// Seeded uniform pairs (phi1, phi2) with phi1 != phi2 drawn from (lo, hi).
std::vector<std::pair<double, double>> random_phi_pairs(std::size_t count, double lo, double hi,
                                                        std::uint64_t seed = 42);

/// Checks omega <= (alpha(x,phi1) - alpha(x,phi2)) / (phi1 - phi2) <= L on every pair and x.
CheckReport monotonicity_certificate(const PortfolioModel& model,
                                     std::span<const std::pair<double, double>> phi_pairs,
                                     std::span<const double> x_samples, double tolerance = 1e-10);

/// Pointwise bound  psi_lo e^{lambda tau} <= alpha(x, phi(x, tau)) <= psi_hi e^{lambda tau}
/// with psi_lo = min(0, inf alpha(x, phi0)), psi_hi = max(0, sup alpha(x, phi0)).
CheckReport maximum_principle_report(const SolutionField& solution, const PortfolioModel& model,
                                     double tolerance = 1e-8);

/// sup |phi| <= (M e^{lambda T} + sup |h|) / omega
CheckReport linf_bound_report(const SolutionField& solution, const PortfolioModel& model,
                              double tolerance = 1e-8);

/// upper >= lower - tolerance at every stored (x, tau); both fields on the same grid and levels.
CheckReport comparison_report(const SolutionField& upper, const SolutionField& lower, double tolerance = 1e-8);

/// Each step's change of the integral of phi matches its boundary and source fluxes.
CheckReport conservation_report(const SolutionField& solution, double tolerance = 1e-9);

/// Every stored step met the inner-iteration tolerance.
CheckReport picard_report(const SolutionField& solution);

/// Energy estimate diagnostic. LHS = sup_tau ||phi||_{H^-1}^2 + int ||phi||_{L2}^2 dtau,
/// RHS ingredients = ||phi0||_{H^-1}^2 + T ||h||_{L2}^2 + T ||h''||_{L2}^2.
/// Passes when the LHS is finite; the ratio is in context["ratio"].
CheckReport energy_estimate_report(const SolutionField& solution, const PortfolioModel& model);

/// The energy ratio must not grow by more than `growth` under refinement.
CheckReport energy_refinement_report(const CheckReport& coarse, const CheckReport& fine, double growth = 0.10);

}  // namespace riccati

#endif

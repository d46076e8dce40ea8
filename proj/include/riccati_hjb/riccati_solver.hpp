#ifndef RICCATI_HJB_RICCATI_SOLVER_HPP
#define RICCATI_HJB_RICCATI_SOLVER_HPP

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "riccati_hjb/grid.hpp"
#include "riccati_hjb/portfolio_model.hpp"

namespace riccati {

enum class BoundaryCondition { Neumann, Dirichlet };

/// Face value of the advective flux w(alpha) * phi.
///  - Central: arithmetic mean of the two cell values.
///  - Upwind: the cell the frozen velocity w comes from.
///  - Hybrid: central where the cell Peclet number |w| dx / alpha'_phi <= 2, upwind elsewhere.
enum class AdvectionScheme { Central, Upwind, Hybrid };

/// Source term s(x, tau) added to the right-hand side.
using SourceTerm = std::function<double(double x, double tau)>;

struct PDEConfig {
    SpatialGrid grid{-8.0, 8.0, 400};
    double t_final = 10.0;
    std::size_t n_steps = 400;
    double picard_tol = 1e-10;
    int picard_max = 100;
    /// Cut-off level M. Empty selects the automatic level sup |alpha(x, phi0(x))|;
    /// +infinity disables the cut-off.
    std::optional<double> cutoff_m;
    BoundaryCondition boundary = BoundaryCondition::Neumann;
    double dirichlet_left = 0.0;
    double dirichlet_right = 0.0;
    AdvectionScheme advection = AdvectionScheme::Hybrid;
    SourceTerm source;
    /// Worker threads for per-cell alpha evaluation; 0 reads RICCATI_HJB_THREADS (default 1).
    unsigned threads = 0;

    double dt() const { return t_final / static_cast<double>(n_steps); }
    void validate() const;
};

/// Clamp interval [-M e^{lambda T}, M e^{lambda T}] of the flux coefficient w.
struct CutoffBounds {
    double m = 0.0;
    double lambda = 0.0;
    double horizon = 0.0;

    double limit() const { return m * std::exp(lambda * horizon); }
    double apply(double alpha) const;
};

/// M = max over the grid of |alpha(x_i, phi0_i)| and lambda = sup_x p(x).
CutoffBounds cutoff_level(const PortfolioModel& model, const SpatialGrid& grid,
                          const std::vector<double>& phi0, double horizon);
CutoffBounds cutoff_level(const PortfolioModel& model, const UtilitySpec& utility,
                          const SpatialGrid& grid, double horizon);

struct StepDiagnostics {
    int picard_iterations = 0;
    double picard_update = 0.0;
    double alpha_min = 0.0;
    double alpha_max = 0.0;
    bool cutoff_clipped = false;
    /// Net flux through the two boundary faces over the step (into the domain positive).
    double boundary_inflow = 0.0;
    /// (integral of phi change) - (boundary inflow) - (integrated source).
    double conservation_defect = 0.0;
};

struct SolutionField {
    SpatialGrid grid;
    std::vector<double> tau;
    /// phi[k][i] at time tau[k] and cell centre i; phi[0] is the initial profile.
    std::vector<std::vector<double>> phi;
    /// diagnostics[k] describes the step from tau[k] to tau[k+1].
    std::vector<StepDiagnostics> diagnostics;
    CutoffBounds cutoff;
    double picard_tol = 0.0;

    std::size_t n_steps() const { return diagnostics.size(); }
    /// Index of the stored level closest to tau.
    std::size_t nearest_level(double tau) const;
};

/// One implicit Euler step with frozen-coefficient inner iterations.
/// tau_next is the time level being computed (used for the source term).
std::vector<double> step(const PortfolioModel& model, const std::vector<double>& state, double tau_next,
                         double dt, const PDEConfig& config, const CutoffBounds& cutoff,
                         StepDiagnostics* diagnostics = nullptr, std::size_t step_index = 0);

SolutionField solve(const PortfolioModel& model, const std::vector<double>& phi0, const PDEConfig& config);
SolutionField solve(const PortfolioModel& model, const UtilitySpec& utility, const PDEConfig& config);

/// Manufactured solution phi*(x, tau) = e^{-tau} cos(pi x / gamma) on [-gamma, gamma]
/// together with the source that makes it exact.
struct ManufacturedProblem {
    double gamma = 8.0;
    std::function<double(double, double)> exact;
    SourceTerm source;
};
ManufacturedProblem make_manufactured_problem(const PortfolioModel& model, double gamma);

struct MmsLevel {
    std::size_t n_cells = 0;
    std::size_t n_steps = 0;
    double dx = 0.0;
    double dt = 0.0;
    double max_error = 0.0;
};

struct MmsStudy {
    std::vector<MmsLevel> spatial;
    std::vector<MmsLevel> temporal;
    /// Smallest observed order across the refinement doublings.
    double spatial_order = 0.0;
    double temporal_order = 0.0;
};

struct MmsPlan {
    double gamma = 8.0;
    double t_final = 1.0;
    /// Spatial refinement: cells double and steps quadruple (dt ~ dx^2), so the
    /// first-order time error shrinks at the same rate as the spatial one.
    std::size_t spatial_base_cells = 20;
    std::size_t spatial_base_steps = 100;
    /// Temporal refinement: steps double on a fixed fine grid.
    std::size_t temporal_cells = 800;
    std::size_t temporal_base_steps = 10;
    int levels = 3;
    AdvectionScheme advection = AdvectionScheme::Central;
};

MmsLevel run_manufactured(const PortfolioModel& model, const ManufacturedProblem& problem,
                          std::size_t n_cells, std::size_t n_steps, double t_final,
                          AdvectionScheme advection);
MmsStudy run_mms_study(const PortfolioModel& model, const MmsPlan& plan);

}  // namespace riccati

#endif

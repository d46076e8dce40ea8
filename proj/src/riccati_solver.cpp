#include "riccati_hjb/riccati_solver.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>

#include "riccati_hjb/alpha_engine.hpp"
#include "riccati_hjb/errors.hpp"
#include "riccati_hjb/tridiagonal.hpp"

namespace riccati {

void PDEConfig::validate() const {
    if (!(t_final > 0.0) || !std::isfinite(t_final)) throw InputError("pde: t_final must be positive");
    if (n_steps < 1) throw InputError("pde: n_steps must be at least 1");
    if (!(picard_tol > 0.0)) throw InputError("pde: picard_tol must be positive");
    if (picard_max < 1) throw InputError("pde: picard_max must be at least 1");
    if (cutoff_m && !(*cutoff_m >= 0.0)) throw InputError("pde: cutoff level must be nonnegative");
}

double CutoffBounds::apply(double alpha) const {
    const double l = limit();
    // rounding in alpha may overshoot M by a few ulps; that is not a clip
    if (std::abs(alpha) <= l * (1.0 + 1e-12)) return alpha;
    return std::clamp(alpha, -l, l);
}

std::size_t SolutionField::nearest_level(double t) const {
    std::size_t best = 0;
    for (std::size_t k = 1; k < tau.size(); ++k) {
        if (std::abs(tau[k] - t) < std::abs(tau[best] - t)) best = k;
    }
    return best;
}

CutoffBounds cutoff_level(const PortfolioModel& model, const SpatialGrid& grid,
                          const std::vector<double>& phi0, double horizon) {
    CutoffBounds out;
    out.horizon = horizon;
    out.lambda = inflow_drift_slope_sup(model);
    for (std::size_t i = 0; i < grid.n_cells(); ++i) {
        out.m = std::max(out.m, std::abs(solve_alpha(model, grid.center(i), phi0[i]).value));
    }
    return out;
}

CutoffBounds cutoff_level(const PortfolioModel& model, const UtilitySpec& utility,
                          const SpatialGrid& grid, double horizon) {
    return cutoff_level(model, grid, phi0_profile(utility, grid), horizon);
}

namespace {

unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("RICCATI_HJB_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(std::min<long>(v, 256));
    }
    return 1;
}

template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads <= 1 || n < 64) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w * n / workers; i < (w + 1) * n / workers; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

// Frozen coefficients of one cell (interior or ghost) at the current iterate.
struct CellCoefficients {
    double alpha = 0.0;
    double slope = 0.0;  // alpha'_phi
    double w = 0.0;      // cut-off alpha
    double phi = 0.0;
};

// Total face flux  G = w-flux - d_x alpha  written as  cl * phi_left + cr * phi_right + k.
struct FaceFlux {
    double cl = 0.0;
    double cr = 0.0;
    double k = 0.0;
};

FaceFlux face_flux(const CellCoefficients& l, const CellCoefficients& r, double dx, AdvectionScheme scheme) {
    FaceFlux f;
    bool central = scheme == AdvectionScheme::Central;
    const double w_face = 0.5 * (l.w + r.w);
    if (scheme == AdvectionScheme::Hybrid) {
        const double diffusion = 0.5 * (l.slope + r.slope);
        central = std::abs(w_face) * dx <= 2.0 * diffusion;
    }
    if (central) {
        f.cl = 0.5 * l.w;
        f.cr = 0.5 * r.w;
    } else if (w_face >= 0.0) {
        f.cl = l.w;
    } else {
        f.cr = r.w;
    }
    // alpha_new ~ (alpha - slope * phi) + slope * phi_new
    f.cl += l.slope / dx;
    f.cr -= r.slope / dx;
    f.k = -((r.alpha - r.slope * r.phi) - (l.alpha - l.slope * l.phi)) / dx;
    return f;
}

double eval(const FaceFlux& f, double phi_l, double phi_r) { return f.cl * phi_l + f.cr * phi_r + f.k; }

}  // namespace

std::vector<double> step(const PortfolioModel& model, const std::vector<double>& state, double tau_next,
                         double dt, const PDEConfig& config, const CutoffBounds& cutoff,
                         StepDiagnostics* diagnostics, std::size_t step_index) {
    const SpatialGrid& grid = config.grid;
    const std::size_t n = grid.n_cells();
    if (state.size() != n) throw InputError("step: state size does not match the grid");
    for (double v : state) {
        if (!std::isfinite(v)) throw SolverError("step " + std::to_string(step_index) + ": state is not finite");
    }
    if (dt == 0.0) {
        if (diagnostics) *diagnostics = StepDiagnostics{};
        return state;
    }

    const double dx = grid.dx();
    const double ratio = dt / dx;
    const bool dirichlet = config.boundary == BoundaryCondition::Dirichlet;
    const unsigned threads = resolve_threads(config.threads);
    const double x_left_ghost = grid.x_min() - 0.5 * dx;
    const double x_right_ghost = grid.x_max() + 0.5 * dx;

    std::vector<double> source(n, 0.0);
    if (config.source) {
        for (std::size_t i = 0; i < n; ++i) source[i] = config.source(grid.center(i), tau_next);
    }

    // cells[0] and cells[n+1] are the ghosts
    std::vector<CellCoefficients> cells(n + 2);
    auto freeze = [&](std::size_t j, double x, double phi) {
        const AlphaResult r = solve_alpha(model, x, phi);
        cells[j] = {r.value, r.dvalue_dphi, cutoff.apply(r.value), phi};
    };

    std::vector<double> current = state;
    std::vector<double> next(n);
    std::vector<FaceFlux> faces(n + 1);
    TridiagonalSystem system(n);
    double update = std::numeric_limits<double>::infinity();
    int iteration = 0;

    while (iteration < config.picard_max) {
        ++iteration;
        parallel_for(n, threads, [&](std::size_t i) { freeze(i + 1, grid.center(i), current[i]); });
        freeze(0, x_left_ghost, dirichlet ? config.dirichlet_left : current.front());
        freeze(n + 1, x_right_ghost, dirichlet ? config.dirichlet_right : current.back());

        for (std::size_t f = 0; f <= n; ++f) faces[f] = face_flux(cells[f], cells[f + 1], dx, config.advection);

        for (std::size_t i = 0; i < n; ++i) {
            const FaceFlux& west = faces[i];
            const FaceFlux& east = faces[i + 1];
            system.diag[i] = 1.0 + ratio * (east.cl - west.cr);
            system.upper[i] = ratio * east.cr;
            system.lower[i] = -ratio * west.cl;
            system.rhs[i] = state[i] + dt * source[i] - ratio * (east.k - west.k);
        }
        // Ghost values: Neumann mirrors the boundary cell, Dirichlet is known.
        if (dirichlet) {
            system.rhs.front() += ratio * faces.front().cl * config.dirichlet_left;
            system.rhs.back() -= ratio * faces.back().cr * config.dirichlet_right;
        } else {
            system.diag.front() -= ratio * faces.front().cl;
            system.diag.back() += ratio * faces.back().cr;
        }
        system.lower.front() = 0.0;
        system.upper.back() = 0.0;

        next = solve_tridiagonal(system);
        update = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(next[i])) {
                throw SolverError("step " + std::to_string(step_index) + ": non-finite iterate at cell " +
                                  std::to_string(i));
            }
            update = std::max(update, std::abs(next[i] - current[i]));
        }
        current.swap(next);
        if (update <= config.picard_tol) break;
    }
    if (update > config.picard_tol) {
        std::ostringstream msg;
        msg << "step " << step_index << ": inner iteration did not converge in " << config.picard_max
            << " iterations (last update " << update << ")";
        throw SolverError(msg.str());
    }

    if (diagnostics) {
        StepDiagnostics& d = *diagnostics;
        d.picard_iterations = iteration;
        d.picard_update = update;
        d.alpha_min = std::numeric_limits<double>::infinity();
        d.alpha_max = -std::numeric_limits<double>::infinity();
        d.cutoff_clipped = false;
        for (std::size_t j = 0; j < n + 2; ++j) {
            if (cells[j].w != cells[j].alpha) d.cutoff_clipped = true;
            if (j == 0 || j == n + 1) continue;
            d.alpha_min = std::min(d.alpha_min, cells[j].alpha);
            d.alpha_max = std::max(d.alpha_max, cells[j].alpha);
        }
        const double left_ghost = dirichlet ? config.dirichlet_left : current.front();
        const double right_ghost = dirichlet ? config.dirichlet_right : current.back();
        const double west = eval(faces.front(), left_ghost, current.front());
        const double east = eval(faces.back(), current.back(), right_ghost);
        d.boundary_inflow = dt * (west - east);
        double mass_change = 0.0;
        double source_mass = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mass_change += (current[i] - state[i]) * dx;
            source_mass += source[i] * dx * dt;
        }
        d.conservation_defect = mass_change - d.boundary_inflow - source_mass;
    }
    return current;
}

SolutionField solve(const PortfolioModel& model, const std::vector<double>& phi0, const PDEConfig& config) {
    config.validate();
    const SpatialGrid& grid = config.grid;
    if (phi0.size() != grid.n_cells()) throw InputError("solve: initial profile size does not match the grid");

    SolutionField field{grid, {}, {}, {}, {}, config.picard_tol};
    if (config.cutoff_m) {
        field.cutoff.m = *config.cutoff_m;
        field.cutoff.lambda = inflow_drift_slope_sup(model);
        field.cutoff.horizon = config.t_final;
    } else {
        field.cutoff = cutoff_level(model, grid, phi0, config.t_final);
    }

    const double dt = config.dt();
    field.tau.reserve(config.n_steps + 1);
    field.phi.reserve(config.n_steps + 1);
    field.diagnostics.resize(config.n_steps);
    field.tau.push_back(0.0);
    field.phi.push_back(phi0);
    for (std::size_t k = 0; k < config.n_steps; ++k) {
        const double tau_next = static_cast<double>(k + 1) * dt;
        field.phi.push_back(step(model, field.phi.back(), tau_next, dt, config, field.cutoff,
                                 &field.diagnostics[k], k));
        field.tau.push_back(tau_next);
    }
    return field;
}

SolutionField solve(const PortfolioModel& model, const UtilitySpec& utility, const PDEConfig& config) {
    return solve(model, phi0_profile(utility, config.grid), config);
}

ManufacturedProblem make_manufactured_problem(const PortfolioModel& model, double gamma) {
    if (!(gamma > 0.0)) throw InputError("manufactured problem: gamma must be positive");
    ManufacturedProblem p;
    p.gamma = gamma;
    const double k = std::numbers::pi / gamma;
    p.exact = [k](double x, double tau) { return std::exp(-tau) * std::cos(k * x); };
    // alpha(x, phi) = alpha0(phi) - q(x) with q the inflow drift, so
    //   d_x alpha   = alpha0' phi_x - q'
    //   d_xx alpha  = alpha0'' phi_x^2 + alpha0' phi_xx - q''
    p.source = [model, k](double x, double tau) {
        const double decay = std::exp(-tau);
        const double phi = decay * std::cos(k * x);
        const double phi_t = -phi;
        const double phi_x = -decay * k * std::sin(k * x);
        const double phi_xx = -k * k * phi;
        const AlphaResult r = solve_alpha(model, x, phi);
        const double h = 1e-5 * std::max(1.0, std::abs(phi));
        const double curvature =
            (solve_alpha(model, x, phi + h).dvalue_dphi - solve_alpha(model, x, phi - h).dvalue_dphi) / (2.0 * h);
        const double alpha_x = r.dvalue_dphi * phi_x - inflow_drift_dx(model, x);
        const double alpha_xx = curvature * phi_x * phi_x + r.dvalue_dphi * phi_xx - inflow_drift_dxx(model, x);
        const double flux_x = alpha_x * phi + r.value * phi_x;
        return phi_t - alpha_xx + flux_x;
    };
    return p;
}

MmsLevel run_manufactured(const PortfolioModel& model, const ManufacturedProblem& problem,
                          std::size_t n_cells, std::size_t n_steps, double t_final,
                          AdvectionScheme advection) {
    PDEConfig config;
    config.grid = SpatialGrid(-problem.gamma, problem.gamma, n_cells);
    config.t_final = t_final;
    config.n_steps = n_steps;
    config.advection = advection;
    config.cutoff_m = std::numeric_limits<double>::infinity();
    config.source = problem.source;

    std::vector<double> phi0(n_cells);
    for (std::size_t i = 0; i < n_cells; ++i) phi0[i] = problem.exact(config.grid.center(i), 0.0);
    const SolutionField field = solve(model, phi0, config);

    MmsLevel level{n_cells, n_steps, config.grid.dx(), config.dt(), 0.0};
    for (std::size_t kk = 0; kk < field.phi.size(); ++kk) {
        for (std::size_t i = 0; i < n_cells; ++i) {
            const double err = std::abs(field.phi[kk][i] - problem.exact(config.grid.center(i), field.tau[kk]));
            level.max_error = std::max(level.max_error, err);
        }
    }
    return level;
}

MmsStudy run_mms_study(const PortfolioModel& model, const MmsPlan& plan) {
    const ManufacturedProblem problem = make_manufactured_problem(model, plan.gamma);
    MmsStudy study;
    study.spatial_order = std::numeric_limits<double>::infinity();
    study.temporal_order = std::numeric_limits<double>::infinity();
    for (int l = 0; l < plan.levels; ++l) {
        study.spatial.push_back(run_manufactured(model, problem, plan.spatial_base_cells << l,
                                                 plan.spatial_base_steps << (2 * l), plan.t_final, plan.advection));
        study.temporal.push_back(run_manufactured(model, problem, plan.temporal_cells,
                                                  plan.temporal_base_steps << l, plan.t_final, plan.advection));
    }
    for (int l = 1; l < plan.levels; ++l) {
        study.spatial_order = std::min(
            study.spatial_order, std::log2(study.spatial[l - 1].max_error / study.spatial[l].max_error));
        study.temporal_order = std::min(
            study.temporal_order, std::log2(study.temporal[l - 1].max_error / study.temporal[l].max_error));
    }
    return study;
}

}  // namespace riccati

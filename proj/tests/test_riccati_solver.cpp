#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "fixtures.hpp"
#include "riccati_hjb/alpha_engine.hpp"
#include "riccati_hjb/errors.hpp"
#include "riccati_hjb/riccati_solver.hpp"
#include "riccati_hjb/tridiagonal.hpp"

using namespace riccati;

namespace {

// One implicit Euler step of  phi_t + (alpha phi - alpha_x)_x = 0  for alpha = -m + c phi,
// central face values, ghost cells mirroring (Neumann) or fixed (Dirichlet),
// solved with dense Newton iterations.
struct LinearAlphaOracle {
    double m = 0.05;
    double c = 0.02;
    bool dirichlet = false;
    double left = 0.0;
    double right = 0.0;

    double alpha(double phi) const { return -m + c * phi; }

    std::vector<double> step(const std::vector<double>& old, double dt, double dx) const {
        const int n = static_cast<int>(old.size());
        Eigen::VectorXd phi = Eigen::Map<const Eigen::VectorXd>(old.data(), n);
        for (int it = 0; it < 50; ++it) {
            auto value = [&](int j) {
                if (j < 0) return dirichlet ? left : phi(0);
                if (j >= n) return dirichlet ? right : phi(n - 1);
                return phi(j);
            };
            // face j sits between cells j-1 and j
            auto flux = [&](int j) {
                const double pl = value(j - 1), pr = value(j);
                return 0.5 * (alpha(pl) * pl + alpha(pr) * pr) - (alpha(pr) - alpha(pl)) / dx;
            };
            // d flux(j) / d phi_l and / d phi_r
            auto dflux_l = [&](int j) { const double p = value(j - 1); return 0.5 * (alpha(p) + c * p) + c / dx; };
            auto dflux_r = [&](int j) { const double p = value(j); return 0.5 * (alpha(p) + c * p) - c / dx; };

            Eigen::VectorXd f(n);
            Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
            const double r = dt / dx;
            for (int i = 0; i < n; ++i) {
                f(i) = phi(i) - old[i] + r * (flux(i + 1) - flux(i));
                jac(i, i) += 1.0 + r * (dflux_l(i + 1) - dflux_r(i));
                if (i + 1 < n) jac(i, i + 1) += r * dflux_r(i + 1);
                if (i > 0) jac(i, i - 1) -= r * dflux_l(i);
            }
            if (!dirichlet) {
                // mirrored ghosts depend on the boundary cells themselves
                jac(0, 0) -= r * dflux_l(0);
                jac(n - 1, n - 1) += r * dflux_r(n);
            }
            const Eigen::VectorXd delta = jac.partialPivLu().solve(-f);
            phi += delta;
            if (delta.lpNorm<Eigen::Infinity>() < 1e-15) break;
        }
        return {phi.data(), phi.data() + n};
    }
};

PDEConfig small_config(std::size_t cells, std::size_t steps, double t_final) {
    PDEConfig c;
    c.grid = SpatialGrid(-4.0, 4.0, cells);
    c.n_steps = steps;
    c.t_final = t_final;
    c.picard_tol = 1e-13;
    c.advection = AdvectionScheme::Central;
    return c;
}

std::vector<double> bump(const SpatialGrid& g, double base) {
    std::vector<double> v(g.n_cells());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = base + std::exp(-g.center(i) * g.center(i));
    return v;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

}  // namespace

TEST_CASE("tridiagonal solve matches a dense solve") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 5 + trial;
        TridiagonalSystem s(n);
        Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
        Eigen::VectorXd rhs(n);
        for (std::size_t i = 0; i < n; ++i) {
            s.lower[i] = i ? u(gen) : 0.0;
            s.upper[i] = i + 1 < n ? u(gen) : 0.0;
            s.diag[i] = 3.0 + u(gen);
            s.rhs[i] = u(gen);
            dense(i, i) = s.diag[i];
            if (i) dense(i, i - 1) = s.lower[i];
            if (i + 1 < n) dense(i, i + 1) = s.upper[i];
            rhs(i) = s.rhs[i];
        }
        const auto x = solve_tridiagonal(s);
        const Eigen::VectorXd ref = dense.fullPivLu().solve(rhs);
        for (std::size_t i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(ref(i)).epsilon(1e-13));
    }
    TridiagonalSystem singular(3);
    singular.diag = {0.0, 1.0, 1.0};
    CHECK_THROWS_AS(solve_tridiagonal(singular), SolverError);
}

TEST_CASE("config validation") {
    PDEConfig c;
    CHECK_NOTHROW(c.validate());
    c.t_final = 0.0;
    CHECK_THROWS_AS(c.validate(), InputError);
    c = PDEConfig{};
    c.n_steps = 0;
    CHECK_THROWS_AS(c.validate(), InputError);
    c = PDEConfig{};
    c.picard_tol = 0.0;
    CHECK_THROWS_AS(c.validate(), InputError);
    CHECK(PDEConfig{}.dt() == doctest::Approx(10.0 / 400.0));
}

TEST_CASE("zero time step returns the state") {
    const PortfolioModel m = fixtures::pension_model();
    PDEConfig c;
    const std::vector<double> phi0 = phi0_profile(UtilitySpec{}, c.grid);
    const CutoffBounds cut = cutoff_level(m, c.grid, phi0, c.t_final);
    CHECK(step(m, phi0, 0.0, 0.0, c, cut) == phi0);
}

TEST_CASE("singleton set: scheme equals a dense Newton solve of the same discretisation") {
    const PortfolioModel m = fixtures::singleton_model(0.05, 0.04);
    SUBCASE("neumann") {
        const PDEConfig c = small_config(40, 20, 1.0);
        const LinearAlphaOracle oracle;
        const SolutionField sol = solve(m, bump(c.grid, 2.0), c);
        std::vector<double> ref = sol.phi[0];
        for (std::size_t k = 1; k < sol.phi.size(); ++k) {
            ref = oracle.step(ref, c.dt(), c.grid.dx());
            CHECK(max_abs_diff(sol.phi[k], ref) <= 1e-8);
        }
    }
    SUBCASE("dirichlet") {
        PDEConfig c = small_config(40, 20, 1.0);
        c.boundary = BoundaryCondition::Dirichlet;
        c.dirichlet_left = 3.0;
        c.dirichlet_right = 1.0;
        // the boundary data lie outside the automatic cut-off band
        c.cutoff_m = std::numeric_limits<double>::infinity();
        LinearAlphaOracle oracle;
        oracle.dirichlet = true;
        oracle.left = 3.0;
        oracle.right = 1.0;
        const SolutionField sol = solve(m, bump(c.grid, 2.0), c);
        std::vector<double> ref = sol.phi[0];
        for (std::size_t k = 1; k < sol.phi.size(); ++k) {
            ref = oracle.step(ref, c.dt(), c.grid.dx());
            CHECK(max_abs_diff(sol.phi[k], ref) <= 1e-8);
        }
    }
    SUBCASE("one step") {
        const PDEConfig c = small_config(64, 1, 0.3);
        const auto phi0 = bump(c.grid, 5.0);
        const CutoffBounds cut = cutoff_level(m, c.grid, phi0, c.t_final);
        const auto next = step(m, phi0, c.dt(), c.dt(), c, cut);
        CHECK(max_abs_diff(next, LinearAlphaOracle{}.step(phi0, c.dt(), c.grid.dx())) <= 1e-8);
    }
}

TEST_CASE("constant initial data is a steady state") {
    const PortfolioModel m = fixtures::pension_model();
    const PDEConfig c;
    const SolutionField sol = solve(m, UtilitySpec{DaraPairExponential{9, 9, 2}, 8.0}, c);
    CHECK(sol.phi.size() == 401);
    CHECK(sol.tau.back() == doctest::Approx(10.0));
    double worst = 0.0;
    for (const auto& level : sol.phi) {
        for (double v : level) worst = std::max(worst, std::abs(v - 9.0));
    }
    CHECK(worst <= 1e-10);
    for (const auto& d : sol.diagnostics) CHECK(d.picard_update <= c.picard_tol);
}

TEST_CASE("cut-off level") {
    const PortfolioModel m = fixtures::pension_model();
    const SpatialGrid g(-8.0, 8.0, 400);
    SUBCASE("constant 9") {
        const CutoffBounds b = cutoff_level(m, UtilitySpec{DaraPairExponential{9, 9, 2}, 8.0}, g, 10.0);
        CHECK(b.m == doctest::Approx(std::abs(closed_form_n2(m).value(9.0))).epsilon(1e-14));
        CHECK(b.lambda == 0.0);
        CHECK(b.limit() == b.m);
    }
    SUBCASE("zero initial data gives max |h|") {
        const CutoffBounds b = cutoff_level(m, g, std::vector<double>(g.n_cells(), 0.0), 10.0);
        CHECK(b.m == 0.1028);
    }
    SUBCASE("inflow sets lambda") {
        const PortfolioModel in(m.mu(), m.sigma(), Simplex{2}, InflowProfile{0.2, 1.0, 2.0});
        const CutoffBounds b = cutoff_level(in, g, std::vector<double>(g.n_cells(), 1.0), 2.0);
        CHECK(b.lambda == inflow_drift_slope_sup(in));
        CHECK(b.limit() == doctest::Approx(b.m * std::exp(2.0 * b.lambda)));
        CHECK(b.apply(10.0) == b.limit());
        CHECK(b.apply(-10.0) == -b.limit());
        CHECK(b.apply(0.01) == 0.01);
    }
}

TEST_CASE("inactive cut-off leaves the solution bitwise unchanged") {
    const PortfolioModel m = fixtures::pension_model();
    PDEConfig with;
    with.n_steps = 100;
    with.t_final = 2.5;
    PDEConfig without = with;
    without.cutoff_m = std::numeric_limits<double>::infinity();
    const UtilitySpec dara;
    const SolutionField a = solve(m, dara, with);
    const SolutionField b = solve(m, dara, without);
    for (const auto& d : a.diagnostics) CHECK_FALSE(d.cutoff_clipped);
    CHECK(a.phi == b.phi);
}

TEST_CASE("an active cut-off is reported") {
    const PortfolioModel m = fixtures::pension_model();
    PDEConfig c = small_config(40, 5, 0.5);
    c.cutoff_m = 1e-3;
    const SolutionField sol = solve(m, bump(c.grid, 2.0), c);
    CHECK(sol.diagnostics.front().cutoff_clipped);
}

TEST_CASE("inner iteration failure names the step") {
    const PortfolioModel m = fixtures::pension_model();
    PDEConfig c;
    c.picard_max = 1;
    try {
        solve(m, UtilitySpec{}, c);
        FAIL("expected a solver error");
    } catch (const SolverError& e) {
        CHECK(std::string(e.what()).find("step 0") != std::string::npos);
    }
}

TEST_CASE("threads do not change the result") {
    const PortfolioModel m = fixtures::pension_model();
    PDEConfig c;
    c.n_steps = 40;
    c.t_final = 1.0;
    c.threads = 1;
    const SolutionField serial = solve(m, UtilitySpec{}, c);
    c.threads = 4;
    const SolutionField parallel = solve(m, UtilitySpec{}, c);
    CHECK(serial.phi == parallel.phi);
}

TEST_CASE("DARA run: monotone in x, bounded by the initial values, conservative") {
    const PortfolioModel m = fixtures::pension_model();
    const SolutionField sol = solve(m, UtilitySpec{}, PDEConfig{});
    for (const auto& level : sol.phi) {
        for (std::size_t i = 1; i < level.size(); ++i) CHECK(level[i] <= level[i - 1] + 1e-12);
        for (double v : level) {
            CHECK(v <= 9.0 + 1e-12);
            CHECK(v >= 6.0 - 1e-12);
        }
    }
    for (const auto& d : sol.diagnostics) CHECK(std::abs(d.conservation_defect) <= 1e-12);
    CHECK(sol.nearest_level(5.01) == 200);
}

TEST_CASE("manufactured solution") {
    const PortfolioModel m = fixtures::pension_model();
    const ManufacturedProblem p = make_manufactured_problem(m, 8.0);
    CHECK(p.exact(0.0, 0.0) == 1.0);
    CHECK(p.exact(8.0, 0.0) == doctest::Approx(-1.0));

    SUBCASE("source makes the exact solution a discrete near-solution") {
        const MmsLevel coarse = run_manufactured(m, p, 40, 400, 1.0, AdvectionScheme::Central);
        const MmsLevel fine = run_manufactured(m, p, 80, 1600, 1.0, AdvectionScheme::Central);
        CHECK(coarse.max_error < 1e-3);
        CHECK(fine.max_error < coarse.max_error / 3.0);
    }
    SUBCASE("observed orders") {
        const MmsStudy s = run_mms_study(m, MmsPlan{});
        CHECK(s.spatial.size() == 3);
        CHECK(s.spatial_order >= 1.7);
        CHECK(s.temporal_order >= 0.7);
        CHECK(std::abs(s.spatial_order - 2.0) <= 0.3);
        CHECK(std::abs(s.temporal_order - 1.0) <= 0.3);
    }
    CHECK_THROWS_AS(make_manufactured_problem(m, 0.0), InputError);
}

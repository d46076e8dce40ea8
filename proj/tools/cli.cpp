#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "riccati_hjb/alpha_engine.hpp"
#include "riccati_hjb/analysis.hpp"
#include "riccati_hjb/config.hpp"
#include "riccati_hjb/errors.hpp"
#include "riccati_hjb/portfolio_model.hpp"
#include "riccati_hjb/riccati_solver.hpp"

#ifndef RICCATI_HJB_VERSION
#define RICCATI_HJB_VERSION "0.0.0"
#endif

namespace riccati::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::string slices;
    std::string mu_csv;
    std::string sigma_csv;
    std::optional<double> phi_min;
    std::optional<double> phi_max;
    std::optional<std::size_t> points;
    bool gnuplot = false;
    bool verify_inline = false;
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Collects emitted files and writes the run manifest.
class Run {
public:
    Run(std::string command, const Options& opts) : command_(std::move(command)), dir_(opts.out_dir) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw OutputError("cannot create output directory " + dir_.string() + ": " + ec.message());
    }

    std::ofstream open(const std::string& name) {
        std::ofstream f(dir_ / name, std::ios::binary);
        if (!f) throw OutputError("cannot write " + (dir_ / name).string());
        f << std::setprecision(17);
        files_.push_back(name);
        return f;
    }

    void write_json(const std::string& name, const json& j) {
        auto f = open(name);
        f << j.dump(2) << '\n';
        if (!f) throw OutputError("write failed for " + (dir_ / name).string());
    }

    void time(const std::string& label, double seconds) { timings_[label] = seconds; }
    json& extra() { return extra_; }

    void finish(const RunConfig* config, const json& checks = json::array()) {
        json manifest;
        manifest["command"] = command_;
        manifest["versions"] = {{"riccati_hjb", RICCATI_HJB_VERSION},
                                {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                                      std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                                      std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
        if (config) {
            manifest["config"] = config->document;
            manifest["config_source"] = config->source;
            manifest["effective"] = effective_settings(*config);
        }
        manifest["timings_seconds"] = timings_;
        manifest["outputs"] = files_;
        manifest["checks"] = checks;
        for (const auto& item : extra_.items()) manifest[item.key()] = item.value();
        std::ofstream f(dir_ / "manifest.json", std::ios::binary);
        if (!f) throw OutputError("cannot write " + (dir_ / "manifest.json").string());
        f << std::setprecision(17) << manifest.dump(2) << '\n';
    }

    const fs::path& dir() const { return dir_; }

private:
    std::string command_;
    fs::path dir_;
    std::vector<std::string> files_;
    json timings_ = json::object();
    json extra_ = json::object();
};

bool is_blank(const std::string& s) {
    return s.find_first_not_of(" \t\r\n") == std::string::npos;
}

/// Loads --config; a manifest is accepted in place of a config and its echo is used.
RunConfig load(const Options& opts) {
    if (opts.config_path.empty()) throw CLI::RequiredError("--config");
    std::ifstream in(opts.config_path, std::ios::binary);
    if (!in) throw InputError("cannot open config " + opts.config_path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (is_blank(buffer.str())) throw CLI::ValidationError("--config", "config file is empty");
    json document = parse_json_text(buffer.str(), opts.config_path);
    if (document.is_object() && document.empty()) throw CLI::ValidationError("--config", "config document is empty");
    if (document.is_object() && document.contains("command") && document.contains("config")) {
        document = document.at("config");
    }
    RunConfig config = parse_config(document, opts.config_path, fs::path(opts.config_path).parent_path());
    if (opts.seed) config.checks.seed = *opts.seed;
    if (!opts.slices.empty()) {
        config.slices = parse_slice_list(opts.slices);
        for (double t : config.slices) {
            if (!(t >= 0.0 && t <= config.pde.t_final)) {
                throw InputError("--slices: " + std::to_string(t) + " lies outside [0, t_final]");
            }
        }
    }
    return config;
}

bool closed_form_available(const PortfolioModel& m) {
    return m.n_assets() == 2 && m.is_simplex() && m.convention() == DriftConvention::Markowitz && !m.inflow();
}

json finite_or_null(double v) {
    return std::isfinite(v) ? json(v) : json(nullptr);
}

json closed_form_json(const ClosedFormN2& cf) {
    return {{"A", cf.a},          {"B", cf.b},
            {"C", cf.c},          {"E_minus", cf.e_minus},
            {"D_minus", cf.d_minus}, {"E_plus", cf.e_plus},
            {"D_plus", cf.d_plus},   {"phi_minus", finite_or_null(cf.phi_minus)},
            {"phi_plus", finite_or_null(cf.phi_plus)}};
}

json model_json(const PortfolioModel& m) {
    json sigma = json::array();
    for (Eigen::Index r = 0; r < m.sigma().rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.sigma().cols(); ++c) row.push_back(m.sigma()(r, c));
        sigma.push_back(row);
    }
    json mu = json::array();
    for (Eigen::Index i = 0; i < m.mu().size(); ++i) mu.push_back(m.mu()(i));
    const LipschitzBounds b = lipschitz_bounds(m);
    json j = {{"n_assets", m.n_assets()},
              {"mu", mu},
              {"covariance", sigma},
              {"decision_set", m.is_simplex() ? "simplex" : "menu"},
              {"drift_convention", m.convention() == DriftConvention::Markowitz ? "markowitz" : "log_wealth"},
              {"lipschitz", {{"omega", b.omega}, {"L", b.big_l}, {"L0", b.l0}}},
              {"inflow_slope_sup", inflow_drift_slope_sup(m)}};
    if (const DiscreteMenu* menu = m.menu()) {
        json points = json::array();
        for (const auto& p : menu->points) points.push_back(std::vector<double>(p.data(), p.data() + p.size()));
        j["menu"] = points;
    }
    if (m.inflow()) {
        j["inflow"] = {{"eps_rate", m.inflow()->eps_rate}, {"y_minus", m.inflow()->y_minus},
                       {"y_plus", m.inflow()->y_plus}};
    }
    if (closed_form_available(m)) j["closed_form"] = closed_form_json(closed_form_n2(m));
    return j;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return v;
}

void write_theta_header(std::ostream& f, std::size_t n) {
    for (std::size_t j = 1; j <= n; ++j) f << ",theta_" << j;
}

void write_theta(std::ostream& f, const Eigen::VectorXd& theta) {
    for (Eigen::Index j = 0; j < theta.size(); ++j) f << ',' << theta(j);
}

std::string active_set_text(const std::vector<int>& set) {
    std::string s;
    for (std::size_t i = 0; i < set.size(); ++i) s += (i ? ";" : "") + std::to_string(set[i] + 1);
    return s;
}

CurveSettings apply_curve_flags(CurveSettings c, const Options& opts) {
    if (opts.phi_min) c.phi_min = *opts.phi_min;
    if (opts.phi_max) c.phi_max = *opts.phi_max;
    if (opts.points) c.n_points = *opts.points;
    if (!(c.phi_min > 0.0 && c.phi_min < c.phi_max)) throw InputError("require 0 < phi_min < phi_max");
    if (c.n_points < 2) throw InputError("need at least two points");
    return c;
}

// ---------------------------------------------------------------------------

int cmd_ingest(const Options& opts, std::ostream& out) {
    const auto start = Clock::now();
    std::optional<RunConfig> config;
    std::optional<PortfolioModel> model;
    if (!opts.mu_csv.empty() || !opts.sigma_csv.empty()) {
        if (opts.mu_csv.empty() || opts.sigma_csv.empty()) {
            throw CLI::ValidationError("ingest", "--mu and --sigma go together");
        }
        std::ifstream mu_in(opts.mu_csv);
        if (!mu_in) throw InputError("cannot open " + opts.mu_csv);
        std::ifstream sigma_in(opts.sigma_csv);
        if (!sigma_in) throw InputError("cannot open " + opts.sigma_csv);
        try {
            model = ingest_market_data(mu_in, sigma_in);
        } catch (const InputError& e) {
            throw InputError(opts.mu_csv + " / " + opts.sigma_csv + ": " + e.what());
        }
    } else {
        config = load(opts);
        model = config->require_model();
    }
    Run run("ingest", opts);
    run.write_json("model.json", model_json(*model));
    run.time("total", seconds_since(start));
    run.finish(config ? &*config : nullptr);
    out << "ingested " << model->n_assets() << " assets -> " << (run.dir() / "model.json").string() << '\n';
    return kOk;
}

int cmd_alpha_curve(const Options& opts, std::ostream& out) {
    const auto start = Clock::now();
    const RunConfig config = load(opts);
    const PortfolioModel& model = config.require_model();
    const CurveSettings curve = apply_curve_flags(config.alpha_curve, opts);
    const bool closed = closed_form_available(model);
    std::optional<ClosedFormN2> cf;
    if (closed) cf = closed_form_n2(model);

    Run run("alpha-curve", opts);
    {
        auto f = run.open("alpha_curve.csv");
        f << "phi,alpha,dalpha_dphi";
        write_theta_header(f, model.n_assets());
        if (closed) f << ",alpha_closed,dalpha_closed";
        f << '\n';
        for (double phi : linspace(curve.phi_min, curve.phi_max, curve.n_points)) {
            const AlphaResult r = solve_alpha(model, curve.x, phi);
            f << phi << ',' << r.value << ',' << r.dvalue_dphi;
            write_theta(f, r.theta_hat);
            if (closed) f << ',' << cf->value(phi) << ',' << cf->derivative(phi);
            f << '\n';
        }
    }
    if (opts.gnuplot) {
        auto g = run.open("alpha_curve.gp");
        g << "set datafile separator ','\nset key autotitle columnhead\nset xlabel 'phi'\n"
          << "plot 'alpha_curve.csv' using 1:2 with lines, '' using 1:3 with lines axes x1y2\n";
    }
    if (cf) run.extra()["breakpoints"] = closed_form_json(*cf);
    run.extra()["curve"] = {{"phi_min", curve.phi_min}, {"phi_max", curve.phi_max},
                            {"n_points", curve.n_points}, {"x", curve.x}};
    run.time("total", seconds_since(start));
    run.finish(&config);
    out << "wrote " << curve.n_points << " rows to " << (run.dir() / "alpha_curve.csv").string() << '\n';
    return kOk;
}

int cmd_weights_path(const Options& opts, std::ostream& out) {
    const auto start = Clock::now();
    const RunConfig config = load(opts);
    const PortfolioModel& model = config.require_model();
    const CurveSettings curve = apply_curve_flags(config.weights_path, opts);
    const std::vector<WeightsRow> path = weights_path(model, linspace(curve.phi_min, curve.phi_max, curve.n_points));

    Run run("weights-path", opts);
    {
        auto f = run.open("weights_path.csv");
        f << "phi";
        write_theta_header(f, model.n_assets());
        f << ",alpha,dalpha_dphi,active_set\n";
        for (const auto& row : path) {
            f << row.phi;
            write_theta(f, row.theta);
            f << ',' << row.alpha << ',' << row.dalpha_dphi << ',' << active_set_text(row.active_set) << '\n';
        }
    }
    if (opts.gnuplot) {
        auto g = run.open("weights_path.gp");
        g << "set datafile separator ','\nset key autotitle columnhead\nset xlabel 'phi'\nplot ";
        for (std::size_t j = 0; j < model.n_assets(); ++j) {
            g << (j ? ", " : "") << "'weights_path.csv' using 1:" << j + 2 << " with lines";
        }
        g << '\n';
    }
    if (model.is_simplex()) run.extra()["inverse_phi_affinity_residual"] = inverse_phi_affinity_residual(path);
    run.time("total", seconds_since(start));
    run.finish(&config);
    out << "wrote " << path.size() << " rows to " << (run.dir() / "weights_path.csv").string() << '\n';
    return kOk;
}

std::string slice_name(std::size_t index, double tau) {
    std::ostringstream s;
    s << "slice_" << std::setw(3) << std::setfill('0') << index << "_tau_" << std::setprecision(6) << tau << ".csv";
    return s.str();
}

json diagnostics_summary(const SolutionField& sol) {
    int max_iterations = 0;
    double max_update = 0.0;
    double alpha_min = INFINITY;
    double alpha_max = -INFINITY;
    bool clipped = false;
    double max_defect = 0.0;
    for (const auto& d : sol.diagnostics) {
        max_iterations = std::max(max_iterations, d.picard_iterations);
        max_update = std::max(max_update, d.picard_update);
        alpha_min = std::min(alpha_min, d.alpha_min);
        alpha_max = std::max(alpha_max, d.alpha_max);
        clipped = clipped || d.cutoff_clipped;
        max_defect = std::max(max_defect, std::abs(d.conservation_defect));
    }
    return {{"steps", sol.n_steps()},
            {"max_picard_iterations", max_iterations},
            {"max_picard_update", max_update},
            {"alpha_min", finite_or_null(alpha_min)},
            {"alpha_max", finite_or_null(alpha_max)},
            {"cutoff_clipped", clipped},
            {"max_conservation_defect", max_defect}};
}

json bounds_json(const PortfolioModel& model, const SolutionField& sol) {
    const LipschitzBounds b = lipschitz_bounds(model);
    json cutoff = {{"M", finite_or_null(sol.cutoff.m)}, {"lambda", sol.cutoff.lambda},
                   {"horizon", sol.cutoff.horizon}, {"limit", finite_or_null(sol.cutoff.limit())}};
    json j = {{"omega", b.omega}, {"L", b.big_l}, {"L0", b.l0}, {"cutoff", cutoff}};
    if (std::isfinite(sol.cutoff.m)) j["contraction_budget"] = contraction_budget(model, sol);
    return j;
}

struct VerifyOutcome {
    json reports = json::array();
    bool pass = true;
    json budget;
};

VerifyOutcome run_checks(const RunConfig& config, const PortfolioModel& model, const SolutionField& sol, Run& run) {
    VerifyOutcome o;
    auto add = [&o](const CheckReport& r) {
        o.reports.push_back(r);
        o.pass = o.pass && r.pass;
    };
    const CheckSettings& c = config.checks;

    auto start = Clock::now();
    const auto pairs = random_phi_pairs(c.pairs, c.phi_lo, c.phi_hi, c.seed);
    const std::vector<double> xs =
        c.x_samples < 2 ? std::vector<double>{0.0}
                        : linspace(sol.grid.center(0), sol.grid.center(sol.grid.n_cells() - 1), c.x_samples);
    add(monotonicity_certificate(model, pairs, xs, c.monotonicity_tol));
    run.time("monotonicity", seconds_since(start));

    add(maximum_principle_report(sol, model, c.maximum_principle_tol));
    add(linf_bound_report(sol, model));
    add(conservation_report(sol, c.conservation_tol));
    add(picard_report(sol));

    start = Clock::now();
    const CheckReport energy = energy_estimate_report(sol, model);
    add(energy);
    if (c.energy_refinement) {
        PDEConfig fine = config.pde;
        fine.grid = SpatialGrid(config.pde.grid.x_min(), config.pde.grid.x_max(), 2 * config.pde.grid.n_cells());
        fine.n_steps = 2 * config.pde.n_steps;
        const SolutionField fine_sol = solve(model, config.utility, fine);
        add(energy_refinement_report(energy, energy_estimate_report(fine_sol, model), c.energy_growth));
    }
    run.time("energy", seconds_since(start));

    if (c.dominating_utility) {
        start = Clock::now();
        const SolutionField upper = solve(model, *c.dominating_utility, config.pde);
        add(comparison_report(upper, sol, c.comparison_tol));
        run.time("comparison", seconds_since(start));
    }
    if (std::isfinite(sol.cutoff.m)) o.budget = contraction_budget(model, sol);
    return o;
}

void print_summary(const VerifyOutcome& o, std::ostream& out) {
    for (const auto& r : o.reports) {
        out << (r.at("pass").get<bool>() ? "PASS " : "FAIL ") << r.at("check_name").get<std::string>()
            << "  worst_violation=" << r.at("worst_violation").dump() << " tol=" << r.at("tolerance").dump() << '\n';
    }
}

int cmd_solve(const Options& opts, std::ostream& out) {
    const auto start = Clock::now();
    const RunConfig config = load(opts);
    const PortfolioModel& model = config.require_model();

    const SolutionField sol = solve(model, config.utility, config.pde);
    Run run("solve", opts);
    run.time("solve", seconds_since(start));

    std::vector<double> slices = config.slices;
    if (slices.empty()) slices = linspace(0.0, config.pde.t_final, 5);
    json slice_index = json::array();
    for (std::size_t s = 0; s < slices.size(); ++s) {
        const std::size_t k = sol.nearest_level(slices[s]);
        const std::string name = slice_name(s, sol.tau[k]);
        auto f = run.open(name);
        f << "x,phi,alpha";
        write_theta_header(f, model.n_assets());
        f << '\n';
        for (std::size_t i = 0; i < sol.grid.n_cells(); ++i) {
            const double x = sol.grid.center(i);
            const AlphaResult r = solve_alpha(model, x, sol.phi[k][i]);
            f << x << ',' << sol.phi[k][i] << ',' << r.value;
            write_theta(f, r.theta_hat);
            f << '\n';
        }
        slice_index.push_back({{"file", name}, {"requested_tau", slices[s]}, {"tau", sol.tau[k]}, {"level", k}});
    }
    if (opts.gnuplot) {
        auto g = run.open("solution.gp");
        g << "set datafile separator ','\nset key autotitle columnhead\nset xlabel 'x'\nset ylabel 'phi'\nplot ";
        for (std::size_t s = 0; s < slice_index.size(); ++s) {
            g << (s ? ", " : "") << "'" << slice_index[s]["file"].get<std::string>() << "' using 1:2 with lines title 'tau="
              << slice_index[s]["tau"].get<double>() << "'";
        }
        g << '\n';
    }
    run.extra()["slices"] = slice_index;
    run.extra()["diagnostics"] = diagnostics_summary(sol);
    run.extra()["bounds"] = bounds_json(model, sol);

    int code = kOk;
    json checks = json::array();
    if (opts.verify_inline) {
        const VerifyOutcome o = run_checks(config, model, sol, run);
        checks = o.reports;
        print_summary(o, out);
        if (!o.pass) code = kCheckFailed;
    }
    run.time("total", seconds_since(start));
    run.finish(&config, checks);
    out << "solved " << sol.n_steps() << " steps on " << sol.grid.n_cells() << " cells; " << slices.size()
        << " slices in " << run.dir().string() << '\n';
    return code;
}

int cmd_verify(const Options& opts, std::ostream& out) {
    const auto start = Clock::now();
    const RunConfig config = load(opts);
    const PortfolioModel& model = config.require_model();
    Run run("verify", opts);
    const SolutionField sol = solve(model, config.utility, config.pde);
    run.time("solve", seconds_since(start));
    const VerifyOutcome o = run_checks(config, model, sol, run);

    json report = {{"pass", o.pass}, {"checks", o.reports}, {"contraction_budget", o.budget},
                   {"diagnostics", diagnostics_summary(sol)}};
    json failing = json::array();
    for (const auto& r : o.reports) {
        if (!r.at("pass").get<bool>()) failing.push_back(r);
    }
    report["failing"] = failing;
    run.write_json("verify_report.json", report);
    run.time("total", seconds_since(start));
    run.finish(&config, o.reports);
    print_summary(o, out);
    if (!o.pass) {
        out << failing.dump(2) << '\n';
        return kCheckFailed;
    }
    return kOk;
}

int cmd_mms(const Options& opts, std::ostream& out) {
    const auto start = Clock::now();
    const RunConfig config = load(opts);
    const PortfolioModel& model = config.require_model();
    const MmsStudy study = run_mms_study(model, config.mms);
    Run run("mms", opts);
    {
        auto f = run.open("mms_convergence.csv");
        f << "study,n_cells,n_steps,dx,dt,max_error,observed_order\n";
        auto rows = [&f](const char* name, const std::vector<MmsLevel>& levels) {
            for (std::size_t l = 0; l < levels.size(); ++l) {
                f << name << ',' << levels[l].n_cells << ',' << levels[l].n_steps << ',' << levels[l].dx << ','
                  << levels[l].dt << ',' << levels[l].max_error << ',';
                if (l > 0) {
                    f << std::log2(levels[l - 1].max_error / levels[l].max_error);
                }
                f << '\n';
            }
        };
        rows("spatial", study.spatial);
        rows("temporal", study.temporal);
    }
    const bool pass = study.spatial_order >= 1.7 && study.temporal_order >= 0.7;
    run.extra()["orders"] = {{"spatial", study.spatial_order}, {"temporal", study.temporal_order},
                             {"required_spatial", 1.7}, {"required_temporal", 0.7}, {"pass", pass}};
    run.time("total", seconds_since(start));
    run.finish(&config);
    out << std::setprecision(4) << "spatial order " << study.spatial_order << ", temporal order "
        << study.temporal_order << (pass ? "" : "  (below required 1.7 / 0.7)") << '\n';
    return pass ? kOk : kCheckFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Riccati-transformed HJB portfolio solver", "riccati_hjb"};
    app.fallthrough();
    app.require_subcommand(1);
    Options opts;
    app.add_option("--config", opts.config_path, "JSON config document or run manifest");
    app.add_option("--out", opts.out_dir, "Output directory");
    app.add_option("--seed", opts.seed, "Seed for randomized checks");
    app.add_option("--slices", opts.slices, "Comma-separated output times");
    app.add_flag("--gnuplot", opts.gnuplot, "Also emit a gnuplot script");

    auto* ingest = app.add_subcommand("ingest", "Validate market data and report model constants");
    ingest->add_option("--mu", opts.mu_csv, "Mean returns CSV");
    ingest->add_option("--sigma", opts.sigma_csv, "Covariance CSV");
    auto* curve = app.add_subcommand("alpha-curve", "Tabulate alpha, its phi-derivative and the optimal weights");
    auto* weights = app.add_subcommand("weights-path", "Optimal weights along a phi grid");
    for (auto* sub : {curve, weights}) {
        sub->add_option("--phi-min", opts.phi_min, "Lower end of the phi grid");
        sub->add_option("--phi-max", opts.phi_max, "Upper end of the phi grid");
        sub->add_option("--points", opts.points, "Number of grid points");
    }
    auto* solve_cmd = app.add_subcommand("solve", "Integrate the transformed Cauchy problem");
    solve_cmd->add_flag("--verify", opts.verify_inline, "Run the verification suite on the result");
    app.add_subcommand("verify", "Solve and run every analytic check; nonzero exit on failure");
    app.add_subcommand("mms", "Manufactured-solution convergence study");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        if (!reversed.empty()) reversed.pop_back();
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n' << app.help();
        return kUsage;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        if (name == "ingest") return cmd_ingest(opts, out);
        if (name == "alpha-curve") return cmd_alpha_curve(opts, out);
        if (name == "weights-path") return cmd_weights_path(opts, out);
        if (name == "solve") return cmd_solve(opts, out);
        if (name == "verify") return cmd_verify(opts, out);
        return cmd_mms(opts, out);
    } catch (const CLI::Error& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const InputError& e) {
        err << "input error: " << e.what() << '\n';
        return kInputError;
    } catch (const SolverError& e) {
        err << "solver error: " << e.what() << '\n';
        return kSolverError;
    } catch (const OutputError& e) {
        err << "output error: " << e.what() << '\n';
        return kOutputError;
    }
}

}  // namespace riccati::cli

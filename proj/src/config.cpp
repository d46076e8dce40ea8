#include "riccati_hjb/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "riccati_hjb/errors.hpp"

namespace riccati {
namespace {

using nlohmann::json;

/// Typed access to one JSON object with pointer-qualified error messages.
class Section {
public:
    Section(const json& node, std::string pointer, const std::string& source)
        : node_(node), pointer_(std::move(pointer)), source_(source) {
        if (!node_.is_object()) fail("", "expected an object");
    }

    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        throw InputError(source_ + ": " + path(key) + ": " + what);
    }
    std::string path(const std::string& key) const { return key.empty() ? pointer_ : pointer_ + "/" + key; }

    bool has(const std::string& key) const { return node_.contains(key) && !node_.at(key).is_null(); }
    const json& raw(const std::string& key) const { return node_.at(key); }
    Section child(const std::string& key) const { return Section(node_.at(key), path(key), source_); }

    void allow_only(std::initializer_list<const char*> keys) const {
        const std::set<std::string> allowed(keys.begin(), keys.end());
        for (const auto& item : node_.items()) {
            if (!allowed.contains(item.key())) fail(item.key(), "unknown key");
        }
    }

    double number(const std::string& key, double fallback) const {
        if (!has(key)) return fallback;
        return as_number(raw(key), path(key));
    }
    std::size_t count(const std::string& key, std::size_t fallback) const {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_number_integer() || v.get<long long>() < 0) fail(key, "expected a nonnegative integer");
        return v.get<std::size_t>();
    }
    std::string text(const std::string& key, const std::string& fallback) const {
        if (!has(key)) return fallback;
        if (!raw(key).is_string()) fail(key, "expected a string");
        return raw(key).get<std::string>();
    }
    bool flag(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        if (!raw(key).is_boolean()) fail(key, "expected true or false");
        return raw(key).get<bool>();
    }
    std::vector<double> numbers(const std::string& key) const {
        const json& v = raw(key);
        if (!v.is_array()) fail(key, "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], path(key) + "/" + std::to_string(i)));
        return out;
    }
    Eigen::MatrixXd matrix(const std::string& key) const {
        const json& v = raw(key);
        if (!v.is_array() || v.empty()) fail(key, "expected a nonempty array of rows");
        const std::size_t rows = v.size();
        const std::size_t cols = v[0].is_array() ? v[0].size() : 0;
        Eigen::MatrixXd m(rows, cols);
        for (std::size_t r = 0; r < rows; ++r) {
            const std::string row_path = path(key) + "/" + std::to_string(r);
            if (!v[r].is_array() || v[r].size() != cols) {
                throw InputError(source_ + ": " + row_path + ": expected a row of " + std::to_string(cols) + " numbers");
            }
            for (std::size_t c = 0; c < cols; ++c) m(r, c) = as_number(v[r][c], row_path + "/" + std::to_string(c));
        }
        return m;
    }

private:
    double as_number(const json& v, const std::string& where) const {
        if (!v.is_number()) throw InputError(source_ + ": " + where + ": expected a number");
        return v.get<double>();
    }

    const json& node_;
    std::string pointer_;
    const std::string& source_;
};

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::ifstream open_input(const std::filesystem::path& path, const Section& at, const std::string& key) {
    std::ifstream in(path);
    if (!in) at.fail(key, "cannot open " + path.string());
    return in;
}

Eigen::MatrixXd parse_covariance(const Section& model, std::size_t n) {
    if (model.raw("covariance").is_array()) return model.matrix("covariance");
    const Section cov = model.child("covariance");
    cov.allow_only({"volatilities", "correlation"});
    if (!cov.has("volatilities")) cov.fail("volatilities", "missing");
    const std::vector<double> vol = cov.numbers("volatilities");
    if (vol.size() != n) cov.fail("volatilities", "expected " + std::to_string(n) + " entries");
    Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(n, n);
    if (cov.has("correlation")) {
        if (cov.raw("correlation").is_number()) {
            if (n != 2) cov.fail("correlation", "a scalar correlation needs exactly two assets");
            corr(0, 1) = corr(1, 0) = cov.number("correlation", 0.0);
        } else {
            corr = cov.matrix("correlation");
        }
    }
    if (static_cast<std::size_t>(corr.rows()) != n || static_cast<std::size_t>(corr.cols()) != n) {
        cov.fail("correlation", "expected a " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
    }
    const Eigen::VectorXd s = Eigen::Map<const Eigen::VectorXd>(vol.data(), static_cast<Eigen::Index>(n));
    return s.asDiagonal() * corr * s.asDiagonal();
}

DecisionSet parse_decision_set(const Section& model, std::size_t n) {
    if (!model.has("decision_set")) return Simplex{n};
    const json& node = model.raw("decision_set");
    if (node.is_string()) {
        if (lower(node.get<std::string>()) != "simplex") model.fail("decision_set", "expected \"simplex\" or {\"menu\": [...]}");
        return Simplex{n};
    }
    const Section set = model.child("decision_set");
    set.allow_only({"menu"});
    if (!set.has("menu")) set.fail("menu", "missing");
    const Eigen::MatrixXd rows = set.matrix("menu");
    if (static_cast<std::size_t>(rows.cols()) != n) set.fail("menu", "menu points need " + std::to_string(n) + " weights");
    DiscreteMenu menu;
    for (Eigen::Index r = 0; r < rows.rows(); ++r) menu.points.emplace_back(rows.row(r).transpose());
    return menu;
}

PortfolioModel parse_model(const Section& model, const std::filesystem::path& base_dir) {
    model.allow_only({"assets", "covariance", "mu_csv", "sigma_csv", "decision_set", "inflow", "drift_convention"});

    std::optional<InflowProfile> inflow;
    if (model.has("inflow")) {
        const Section s = model.child("inflow");
        s.allow_only({"eps_rate", "y_minus", "y_plus"});
        inflow = InflowProfile{s.number("eps_rate", 0.0), s.number("y_minus", 1.0), s.number("y_plus", 2.0)};
    }

    const std::string convention_name = lower(model.text("drift_convention", "markowitz"));
    DriftConvention convention = DriftConvention::Markowitz;
    if (convention_name == "log_wealth") {
        convention = DriftConvention::LogWealth;
    } else if (convention_name != "markowitz") {
        model.fail("drift_convention", "expected \"markowitz\" or \"log_wealth\"");
    }

    if (model.has("mu_csv") || model.has("sigma_csv")) {
        if (model.has("assets") || model.has("covariance")) {
            model.fail("", "give either mu_csv/sigma_csv or assets/covariance, not both");
        }
        if (!model.has("mu_csv")) model.fail("mu_csv", "missing");
        if (!model.has("sigma_csv")) model.fail("sigma_csv", "missing");
        auto mu_in = open_input(base_dir / model.text("mu_csv", ""), model, "mu_csv");
        auto sigma_in = open_input(base_dir / model.text("sigma_csv", ""), model, "sigma_csv");
        PortfolioModel ingested = ingest_market_data(mu_in, sigma_in, Simplex{}, inflow, convention);
        return ingested.with_decision_set(parse_decision_set(model, ingested.n_assets()));
    }

    if (!model.has("assets")) model.fail("assets", "missing");
    if (!model.has("covariance")) model.fail("covariance", "missing");
    const json& assets = model.raw("assets");
    if (!assets.is_array() || assets.empty()) model.fail("assets", "expected a nonempty array");
    Eigen::VectorXd mu(static_cast<Eigen::Index>(assets.size()));
    for (std::size_t i = 0; i < assets.size(); ++i) {
        if (assets[i].is_number()) {
            mu(static_cast<Eigen::Index>(i)) = assets[i].get<double>();
            continue;
        }
        if (!assets[i].is_object() || !assets[i].contains("mu") || !assets[i]["mu"].is_number()) {
            model.fail("assets/" + std::to_string(i), "expected a number or {\"name\": ..., \"mu\": number}");
        }
        mu(static_cast<Eigen::Index>(i)) = assets[i]["mu"].get<double>();
    }
    const std::size_t n = assets.size();
    Eigen::MatrixXd sigma = parse_covariance(model, n);
    if (static_cast<std::size_t>(sigma.rows()) != n || static_cast<std::size_t>(sigma.cols()) != n) {
        model.fail("covariance", "expected a " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
    }
    try {
        return PortfolioModel(mu, sigma, parse_decision_set(model, n), inflow, convention);
    } catch (const InputError& e) {
        model.fail("", e.what());
    }
}

UtilityFamily parse_family(const Section& u) {
    const std::string family = lower(u.text("family", "dara"));
    if (family == "dara") {
        DaraPairExponential d;
        d.a0 = u.number("a0", d.a0);
        d.a1 = u.number("a1", d.a1);
        d.x_star = u.number("x_star", d.x_star);
        return d;
    }
    if (family == "constant") {
        if (!u.has("value")) u.fail("value", "missing");
        const double v = u.number("value", 0.0);
        return DaraPairExponential{v, v, 0.0};
    }
    if (family == "arctan") return ArctanUtility{};
    if (family == "tabulated") {
        if (!u.has("x")) u.fail("x", "missing");
        if (!u.has("phi")) u.fail("phi", "missing");
        return TabulatedPhi0{u.numbers("x"), u.numbers("phi")};
    }
    u.fail("family", "expected one of dara, constant, arctan, tabulated");
}

UtilitySpec parse_utility(const Section& u, double default_gamma) {
    u.allow_only({"family", "a0", "a1", "x_star", "value", "x", "phi", "truncation_gamma"});
    UtilitySpec spec;
    spec.family = parse_family(u);
    spec.truncation_gamma = u.number("truncation_gamma", default_gamma);
    try {
        spec.validate();
    } catch (const InputError& e) {
        u.fail("", e.what());
    }
    return spec;
}

AdvectionScheme parse_advection(const Section& s, const std::string& key, AdvectionScheme fallback) {
    if (!s.has(key)) return fallback;
    const std::string name = lower(s.text(key, ""));
    if (name == "central") return AdvectionScheme::Central;
    if (name == "upwind") return AdvectionScheme::Upwind;
    if (name == "hybrid") return AdvectionScheme::Hybrid;
    s.fail(key, "expected central, upwind or hybrid");
}

void parse_pde(const Section& s, double gamma, RunConfig& out) {
    s.allow_only({"x_min", "x_max", "n_cells", "t_final", "n_steps", "picard_tol", "picard_max", "cutoff",
                  "boundary", "dirichlet_left", "dirichlet_right", "advection", "threads", "slices"});
    PDEConfig& pde = out.pde;
    const double x_min = s.number("x_min", -gamma);
    const double x_max = s.number("x_max", gamma);
    const std::size_t n_cells = s.count("n_cells", pde.grid.n_cells());
    try {
        pde.grid = SpatialGrid(x_min, x_max, n_cells);
    } catch (const InputError& e) {
        s.fail("", e.what());
    }
    pde.t_final = s.number("t_final", pde.t_final);
    pde.n_steps = s.count("n_steps", pde.n_steps);
    pde.picard_tol = s.number("picard_tol", pde.picard_tol);
    pde.picard_max = static_cast<int>(s.count("picard_max", static_cast<std::size_t>(pde.picard_max)));
    if (s.has("cutoff")) {
        const json& c = s.raw("cutoff");
        if (c.is_string() && lower(c.get<std::string>()) == "auto") {
            pde.cutoff_m.reset();
        } else if (c.is_string() && lower(c.get<std::string>()) == "off") {
            pde.cutoff_m = std::numeric_limits<double>::infinity();
        } else if (c.is_number() && c.get<double>() > 0.0) {
            pde.cutoff_m = c.get<double>();
        } else {
            s.fail("cutoff", "expected \"auto\", \"off\" or a positive number");
        }
    }
    const std::string boundary = lower(s.text("boundary", "neumann"));
    if (boundary == "neumann") {
        pde.boundary = BoundaryCondition::Neumann;
    } else if (boundary == "dirichlet") {
        pde.boundary = BoundaryCondition::Dirichlet;
    } else {
        s.fail("boundary", "expected neumann or dirichlet");
    }
    pde.dirichlet_left = s.number("dirichlet_left", 0.0);
    pde.dirichlet_right = s.number("dirichlet_right", 0.0);
    pde.advection = parse_advection(s, "advection", pde.advection);
    pde.threads = static_cast<unsigned>(s.count("threads", 0));
    if (s.has("slices")) out.slices = s.numbers("slices");
    try {
        pde.validate();
    } catch (const InputError& e) {
        s.fail("", e.what());
    }
}

void parse_checks(const Section& s, double gamma, CheckSettings& c) {
    s.allow_only({"seed", "pairs", "phi_range", "x_samples", "monotonicity_tol", "maximum_principle_tol",
                  "comparison_tol", "conservation_tol", "energy_growth", "dominating_utility", "energy_refinement"});
    c.seed = s.count("seed", c.seed);
    c.pairs = s.count("pairs", c.pairs);
    if (s.has("phi_range")) {
        const std::vector<double> r = s.numbers("phi_range");
        if (r.size() != 2 || !(r[0] < r[1])) s.fail("phi_range", "expected [lo, hi] with lo < hi");
        c.phi_lo = r[0];
        c.phi_hi = r[1];
    }
    c.x_samples = s.count("x_samples", c.x_samples);
    c.monotonicity_tol = s.number("monotonicity_tol", c.monotonicity_tol);
    c.maximum_principle_tol = s.number("maximum_principle_tol", c.maximum_principle_tol);
    c.comparison_tol = s.number("comparison_tol", c.comparison_tol);
    c.conservation_tol = s.number("conservation_tol", c.conservation_tol);
    c.energy_growth = s.number("energy_growth", c.energy_growth);
    c.energy_refinement = s.flag("energy_refinement", c.energy_refinement);
    if (s.has("dominating_utility")) c.dominating_utility = parse_utility(s.child("dominating_utility"), gamma);
}

void parse_curve(const Section& s, CurveSettings& c) {
    s.allow_only({"phi_min", "phi_max", "n_points", "x"});
    c.phi_min = s.number("phi_min", c.phi_min);
    c.phi_max = s.number("phi_max", c.phi_max);
    c.n_points = s.count("n_points", c.n_points);
    c.x = s.number("x", c.x);
    if (!(c.phi_min > 0.0 && c.phi_min < c.phi_max)) s.fail("", "require 0 < phi_min < phi_max");
    if (c.n_points < 2) s.fail("n_points", "need at least two points");
}

void parse_mms(const Section& s, MmsPlan& p) {
    s.allow_only({"gamma", "t_final", "spatial_base_cells", "spatial_base_steps", "temporal_cells",
                  "temporal_base_steps", "levels", "advection"});
    p.gamma = s.number("gamma", p.gamma);
    p.t_final = s.number("t_final", p.t_final);
    p.spatial_base_cells = s.count("spatial_base_cells", p.spatial_base_cells);
    p.spatial_base_steps = s.count("spatial_base_steps", p.spatial_base_steps);
    p.temporal_cells = s.count("temporal_cells", p.temporal_cells);
    p.temporal_base_steps = s.count("temporal_base_steps", p.temporal_base_steps);
    p.levels = static_cast<int>(s.count("levels", static_cast<std::size_t>(p.levels)));
    p.advection = parse_advection(s, "advection", p.advection);
    if (!(p.gamma > 0.0) || !(p.t_final > 0.0)) s.fail("", "gamma and t_final must be positive");
    if (p.levels < 2) s.fail("levels", "need at least two levels to measure an order");
}

}  // namespace

const PortfolioModel& RunConfig::require_model() const {
    if (!model) throw InputError(source + ": /model: missing");
    return *model;
}

nlohmann::json parse_json_text(const std::string& text, const std::string& source) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        const std::size_t byte = std::min<std::size_t>(e.byte, text.size());
        std::size_t line = 1;
        std::size_t column = 1;
        for (std::size_t i = 0; i + 1 < byte; ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        std::string what = e.what();
        if (auto pos = what.find("; "); pos != std::string::npos) what = what.substr(pos + 2);
        throw InputError(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what);
    }
}

RunConfig parse_config(const nlohmann::json& document, const std::string& source,
                       const std::filesystem::path& base_dir) {
    const Section root(document, "", source);
    root.allow_only({"model", "utility", "truncation_gamma", "pde", "checks", "alpha_curve", "weights_path", "mms"});

    RunConfig out;
    out.document = document;
    out.source = source;
    const double gamma = root.number("truncation_gamma", 8.0);
    if (!(gamma > 0.0)) root.fail("truncation_gamma", "must be positive");

    if (root.has("model")) out.model = parse_model(root.child("model"), base_dir);
    out.utility.truncation_gamma = gamma;
    if (root.has("utility")) out.utility = parse_utility(root.child("utility"), gamma);
    const double domain = out.utility.truncation_gamma;
    out.pde.grid = SpatialGrid(-domain, domain, out.pde.grid.n_cells());
    if (root.has("pde")) parse_pde(root.child("pde"), domain, out);
    if (root.has("checks")) parse_checks(root.child("checks"), gamma, out.checks);
    if (root.has("alpha_curve")) parse_curve(root.child("alpha_curve"), out.alpha_curve);
    if (root.has("weights_path")) parse_curve(root.child("weights_path"), out.weights_path);
    if (root.has("mms")) parse_mms(root.child("mms"), out.mms);
    for (double t : out.slices) {
        if (!(t >= 0.0 && t <= out.pde.t_final)) {
            throw InputError(source + ": /pde/slices: " + std::to_string(t) + " lies outside [0, t_final]");
        }
    }
    return out;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open config " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string source = path.string();
    return parse_config(parse_json_text(buffer.str(), source), source, path.parent_path());
}

std::vector<double> parse_slice_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
        if (used == 0 || used != item.size() || !std::isfinite(v)) {
            throw InputError("--slices: cannot read \"" + item + "\" as a time");
        }
        out.push_back(v);
    }
    if (out.empty()) throw InputError("--slices: empty list");
    return out;
}

const char* to_string(AdvectionScheme scheme) {
    switch (scheme) {
        case AdvectionScheme::Central: return "central";
        case AdvectionScheme::Upwind: return "upwind";
        case AdvectionScheme::Hybrid: return "hybrid";
    }
    return "unknown";
}

const char* to_string(BoundaryCondition boundary) {
    return boundary == BoundaryCondition::Neumann ? "neumann" : "dirichlet";
}

nlohmann::json effective_settings(const RunConfig& c) {
    nlohmann::json pde = {{"x_min", c.pde.grid.x_min()},
                          {"x_max", c.pde.grid.x_max()},
                          {"n_cells", c.pde.grid.n_cells()},
                          {"t_final", c.pde.t_final},
                          {"n_steps", c.pde.n_steps},
                          {"picard_tol", c.pde.picard_tol},
                          {"picard_max", c.pde.picard_max},
                          {"boundary", to_string(c.pde.boundary)},
                          {"advection", to_string(c.pde.advection)},
                          {"slices", c.slices}};
    if (!c.pde.cutoff_m) {
        pde["cutoff"] = "auto";
    } else if (std::isinf(*c.pde.cutoff_m)) {
        pde["cutoff"] = "off";
    } else {
        pde["cutoff"] = *c.pde.cutoff_m;
    }
    return {{"pde", pde},
            {"truncation_gamma", c.utility.truncation_gamma},
            {"checks", {{"seed", c.checks.seed}, {"pairs", c.checks.pairs},
                        {"phi_range", {c.checks.phi_lo, c.checks.phi_hi}}}}};
}

}  // namespace riccati

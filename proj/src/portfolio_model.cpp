#include "riccati_hjb/portfolio_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "riccati_hjb/errors.hpp"

namespace riccati {

SpatialGrid::SpatialGrid(double x_min, double x_max, std::size_t n_cells)
    : x_min_(x_min), x_max_(x_max), n_cells_(n_cells), dx_(0.0) {
    if (!(std::isfinite(x_min) && std::isfinite(x_max)) || !(x_min < x_max)) {
        throw InputError("spatial grid: require finite x_min < x_max");
    }
    if (n_cells < kMinCells) {
        throw InputError("spatial grid: n_cells must be at least " + std::to_string(kMinCells));
    }
    dx_ = (x_max - x_min) / static_cast<double>(n_cells);
}

std::vector<double> SpatialGrid::centers() const {
    std::vector<double> xs(n_cells_);
    for (std::size_t i = 0; i < n_cells_; ++i) xs[i] = center(i);
    return xs;
}

namespace {

constexpr double kSimplexTol = 1e-12;

void validate_simplex_point(const Eigen::VectorXd& theta, std::size_t n, std::size_t index) {
    const std::string where = "decision set point " + std::to_string(index);
    if (static_cast<std::size_t>(theta.size()) != n) {
        throw InputError(where + ": length " + std::to_string(theta.size()) + " does not match " +
                         std::to_string(n) + " assets");
    }
    if (!theta.allFinite() || theta.minCoeff() < 0.0) {
        throw InputError(where + ": weights must be finite and nonnegative");
    }
    if (std::abs(theta.sum() - 1.0) > kSimplexTol) {
        throw InputError(where + ": weights must sum to one");
    }
}

void validate_decision_set(DecisionSet& set, std::size_t n) {
    if (auto* s = std::get_if<Simplex>(&set)) {
        if (s->n == 0) s->n = n;
        if (s->n != n) throw InputError("simplex dimension does not match the number of assets");
        return;
    }
    auto& menu = std::get<DiscreteMenu>(set);
    if (menu.points.empty()) throw InputError("discrete decision set is empty");
    for (std::size_t i = 0; i < menu.points.size(); ++i) {
        validate_simplex_point(menu.points[i], n, i);
        for (std::size_t j = 0; j < i; ++j) {
            if ((menu.points[i] - menu.points[j]).cwiseAbs().maxCoeff() == 0.0) {
                throw InputError("discrete decision set: point " + std::to_string(i) +
                                 " duplicates point " + std::to_string(j));
            }
        }
    }
}

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }
double smoothstep_d(double t) { return 6.0 * t * (1.0 - t); }
double smoothstep_dd(double t) { return 6.0 - 12.0 * t; }

}  // namespace

double InflowProfile::rate(double y) const {
    if (y <= y_minus) return 0.0;
    if (y >= y_plus) return eps_rate;
    return eps_rate * smoothstep((y - y_minus) / (y_plus - y_minus));
}

double InflowProfile::rate_dy(double y) const {
    if (y <= y_minus || y >= y_plus) return 0.0;
    const double width = y_plus - y_minus;
    return eps_rate * smoothstep_d((y - y_minus) / width) / width;
}

double InflowProfile::rate_dyy(double y) const {
    if (y <= y_minus || y >= y_plus) return 0.0;
    const double width = y_plus - y_minus;
    return eps_rate * smoothstep_dd((y - y_minus) / width) / (width * width);
}

PortfolioModel::PortfolioModel(Eigen::VectorXd mu, Eigen::MatrixXd sigma, DecisionSet decision_set,
                               std::optional<InflowProfile> inflow, DriftConvention convention)
    : mu_(std::move(mu)),
      sigma_(std::move(sigma)),
      decision_set_(std::move(decision_set)),
      inflow_(inflow),
      convention_(convention) {
    const auto n = mu_.size();
    if (n < 1) throw InputError("portfolio model: at least one asset is required");
    if (sigma_.rows() != n || sigma_.cols() != n) {
        std::ostringstream msg;
        msg << "portfolio model: dimension mismatch, mu has length " << n << " but Sigma is "
            << sigma_.rows() << "x" << sigma_.cols();
        throw InputError(msg.str());
    }
    if (!mu_.allFinite() || !sigma_.allFinite()) {
        throw InputError("portfolio model: mu and Sigma must be finite");
    }
    sigma_ = (0.5 * (sigma_ + sigma_.transpose())).eval();

    // Cholesky with a relative pivot floor so numerically singular matrices are rejected too.
    Eigen::LLT<Eigen::MatrixXd> llt(sigma_);
    const double scale = sigma_.diagonal().cwiseAbs().maxCoeff();
    bool ok = llt.info() == Eigen::Success && scale > 0.0;
    if (ok) {
        const Eigen::MatrixXd l = llt.matrixL();
        for (Eigen::Index i = 0; i < n; ++i) {
            if (l(i, i) * l(i, i) <= 1e-12 * scale) ok = false;
        }
    }
    if (!ok) throw InputError("portfolio model: covariance matrix is not positive definite");

    validate_decision_set(decision_set_, static_cast<std::size_t>(n));

    if (inflow_) {
        if (!(inflow_->y_minus > 0.0 && inflow_->y_minus < inflow_->y_plus) ||
            !std::isfinite(inflow_->eps_rate)) {
            throw InputError("inflow profile: require 0 < y_minus < y_plus and a finite rate");
        }
    }
}

double PortfolioModel::variance(const Eigen::VectorXd& theta) const {
    return theta.dot(sigma_ * theta);
}

PortfolioModel PortfolioModel::with_decision_set(DecisionSet set) const {
    return PortfolioModel(mu_, sigma_, std::move(set), inflow_, convention_);
}

PortfolioModel PortfolioModel::without_inflow() const {
    return PortfolioModel(mu_, sigma_, decision_set_, std::nullopt, convention_);
}

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_cell(const std::string& text, const std::string& file, std::size_t row,
                  std::size_t col) {
    const std::string cell = trim(text);
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(cell, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (cell.empty() || used != cell.size() || !std::isfinite(value)) {
        throw InputError(file + " row " + std::to_string(row) + ", column " + std::to_string(col) +
                         ": cannot parse '" + cell + "' as a number");
    }
    return value;
}

}  // namespace

PortfolioModel ingest_market_data(std::istream& mu_csv, std::istream& sigma_csv,
                                  DecisionSet decision_set, std::optional<InflowProfile> inflow,
                                  DriftConvention convention) {
    std::vector<double> mu;
    std::string line;
    std::size_t row = 0;
    bool header_seen = false;
    while (std::getline(mu_csv, line)) {
        ++row;
        if (trim(line).empty()) continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        if (line.find(',') != std::string::npos) {
            throw InputError("mu csv row " + std::to_string(row) + ": expected a single value");
        }
        mu.push_back(parse_cell(line, "mu csv", row, 1));
    }
    if (mu.empty()) throw InputError("mu csv: no values after the header row");

    std::vector<std::vector<double>> rows;
    row = 0;
    while (std::getline(sigma_csv, line)) {
        ++row;
        if (trim(line).empty()) continue;
        std::vector<double> values;
        std::stringstream cells(line);
        std::string cell;
        std::size_t col = 0;
        while (std::getline(cells, cell, ',')) values.push_back(parse_cell(cell, "sigma csv", row, ++col));
        if (!rows.empty() && values.size() != rows.front().size()) {
            throw InputError("sigma csv row " + std::to_string(row) + ": has " +
                             std::to_string(values.size()) + " columns, expected " +
                             std::to_string(rows.front().size()));
        }
        rows.push_back(std::move(values));
    }
    if (rows.size() != mu.size() || rows.front().size() != mu.size()) {
        throw InputError("dimension mismatch: mu has " + std::to_string(mu.size()) +
                         " entries but sigma csv is " + std::to_string(rows.size()) + "x" +
                         std::to_string(rows.empty() ? 0 : rows.front().size()));
    }

    const auto n = static_cast<Eigen::Index>(mu.size());
    Eigen::VectorXd mu_vec = Eigen::Map<Eigen::VectorXd>(mu.data(), n);
    Eigen::MatrixXd sigma(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) sigma(i, j) = rows[i][j];
    }
    return PortfolioModel(std::move(mu_vec), std::move(sigma), std::move(decision_set), inflow,
                          convention);
}

Eigen::MatrixXd two_asset_covariance(double sigma_1, double sigma_2, double rho) {
    Eigen::MatrixXd s(2, 2);
    s << sigma_1 * sigma_1, rho * sigma_1 * sigma_2, rho * sigma_1 * sigma_2, sigma_2 * sigma_2;
    return s;
}

double inflow_drift(const PortfolioModel& model, double x) {
    if (!model.inflow()) return 0.0;
    const double y = std::exp(x);
    return model.inflow()->rate(y) / y;
}

// d/dx [eps(e^x) e^{-x}] = eps'(y) - eps(y)/y with y = e^x
double inflow_drift_dx(const PortfolioModel& model, double x) {
    if (!model.inflow()) return 0.0;
    const auto& f = *model.inflow();
    const double y = std::exp(x);
    return f.rate_dy(y) - f.rate(y) / y;
}

double inflow_drift_dxx(const PortfolioModel& model, double x) {
    if (!model.inflow()) return 0.0;
    const auto& f = *model.inflow();
    const double y = std::exp(x);
    return f.rate_dyy(y) * y - f.rate_dy(y) + f.rate(y) / y;
}

double inflow_drift_slope_sup(const PortfolioModel& model) {
    if (!model.inflow() || model.inflow()->eps_rate == 0.0) return 0.0;
    const auto& f = *model.inflow();
    auto slope = [&f](double y) { return std::abs(f.rate_dy(y) - f.rate(y) / y); };

    // Saturated branch |eps|/y peaks at y_plus; below y_minus the slope vanishes.
    double best = slope(f.y_plus);
    double best_y = f.y_plus;
    constexpr int kSamples = 20000;
    const double width = f.y_plus - f.y_minus;
    for (int k = 0; k <= kSamples; ++k) {
        const double y = f.y_minus + width * k / kSamples;
        const double s = slope(y);
        if (s > best) {
            best = s;
            best_y = y;
        }
    }
    // golden-section polish around the best sample
    double lo = std::max(f.y_minus, best_y - width / kSamples);
    double hi = std::min(f.y_plus, best_y + width / kSamples);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 80; ++it) {
        const double a = hi - g * (hi - lo);
        const double b = lo + g * (hi - lo);
        if (slope(a) > slope(b)) hi = b; else lo = a;
    }
    return std::max(best, slope(0.5 * (lo + hi)));
}

double drift(const PortfolioModel& model, double x, const Eigen::VectorXd& theta) {
    double value = model.mu().dot(theta);
    if (model.convention() == DriftConvention::LogWealth) value -= 0.5 * model.variance(theta);
    return value + inflow_drift(model, x);
}

void UtilitySpec::validate() const {
    if (!(truncation_gamma > 0.0) || !std::isfinite(truncation_gamma)) {
        throw InputError("utility: truncation_gamma must be positive");
    }
    if (const auto* d = std::get_if<DaraPairExponential>(&family)) {
        if (!(d->a0 > 0.0 && d->a1 > 0.0) || !std::isfinite(d->x_star)) {
            throw InputError("utility: DARA requires a0 > 0, a1 > 0 and a finite x_star");
        }
    } else if (const auto* t = std::get_if<TabulatedPhi0>(&family)) {
        if (t->x.size() < 2 || t->x.size() != t->phi.size()) {
            throw InputError("utility: tabulated phi0 needs matching x/phi arrays of length >= 2");
        }
        for (std::size_t i = 1; i < t->x.size(); ++i) {
            if (!(t->x[i] > t->x[i - 1])) throw InputError("utility: tabulated x must increase");
        }
    }
}

double dara_shift(const DaraPairExponential& u) {
    return std::exp(-u.a0 * u.x_star) * (u.a0 - u.a1) / u.a1;
}

double utility_value(const UtilitySpec& spec, double x) {
    if (const auto* d = std::get_if<DaraPairExponential>(&spec.family)) {
        if (x <= d->x_star) return -std::exp(-d->a0 * x) - dara_shift(*d);
        return -(d->a0 / d->a1) * std::exp(-d->a1 * x + (d->a1 - d->a0) * d->x_star);
    }
    if (std::holds_alternative<ArctanUtility>(spec.family)) return std::atan(x);
    throw InputError("utility: a tabulated profile does not define u(x)");
}

double utility_derivative(const UtilitySpec& spec, double x) {
    if (const auto* d = std::get_if<DaraPairExponential>(&spec.family)) {
        if (x <= d->x_star) return d->a0 * std::exp(-d->a0 * x);
        return d->a0 * std::exp(-d->a1 * x + (d->a1 - d->a0) * d->x_star);
    }
    if (std::holds_alternative<ArctanUtility>(spec.family)) return 1.0 / (1.0 + x * x);
    throw InputError("utility: a tabulated profile does not define u'(x)");
}

double phi0_untruncated(const UtilitySpec& spec, double x) {
    if (const auto* d = std::get_if<DaraPairExponential>(&spec.family)) {
        return x <= d->x_star ? d->a0 : d->a1;
    }
    if (std::holds_alternative<ArctanUtility>(spec.family)) return 2.0 * x / (1.0 + x * x);
    const auto& t = std::get<TabulatedPhi0>(spec.family);
    if (x <= t.x.front()) return t.phi.front();
    if (x >= t.x.back()) return t.phi.back();
    const auto it = std::upper_bound(t.x.begin(), t.x.end(), x);
    const auto hi = static_cast<std::size_t>(it - t.x.begin());
    const auto lo = hi - 1;
    const double w = (x - t.x[lo]) / (t.x[hi] - t.x[lo]);
    return (1.0 - w) * t.phi[lo] + w * t.phi[hi];
}

std::vector<double> phi0_profile(const UtilitySpec& spec, const SpatialGrid& grid) {
    spec.validate();
    const double gamma = spec.truncation_gamma;
    const double half_cell = 0.5 * grid.dx();
    std::vector<double> phi(grid.n_cells());
    for (std::size_t i = 0; i < grid.n_cells(); ++i) {
        const double x = grid.center(i);
        double weight = std::clamp((gamma - std::abs(x)) / half_cell, 0.0, 1.0);
        // a centre exactly half a cell inside +-gamma must keep the full value
        if (weight > 1.0 - 1e-9) weight = 1.0;
        if (weight < 1e-9) weight = 0.0;
        phi[i] = weight == 0.0 ? 0.0 : weight * phi0_untruncated(spec, x);
    }
    return phi;
}

}  // namespace riccati

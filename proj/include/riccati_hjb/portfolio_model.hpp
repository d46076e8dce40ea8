#ifndef RICCATI_HJB_PORTFOLIO_MODEL_HPP
#define RICCATI_HJB_PORTFOLIO_MODEL_HPP

#include <istream>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "riccati_hjb/grid.hpp"

namespace riccati {

/// The unit simplex {theta >= 0, 1'theta = 1} in R^n.
struct Simplex {
    std::size_t n = 0;
};

/// A finite menu of admissible weight vectors, each on the simplex.
struct DiscreteMenu {
    std::vector<Eigen::VectorXd> points;
};

using DecisionSet = std::variant<Simplex, DiscreteMenu>;

/// Wealth-dependent cash flow eps(y): zero below y_minus, eps_rate above y_plus,
/// cubic smoothstep in between.
struct InflowProfile {
    double eps_rate = 0.0;
    double y_minus = 1.0;
    double y_plus = 2.0;

    double rate(double y) const;
    double rate_dy(double y) const;
    double rate_dyy(double y) const;
};

/// How the log-wealth drift is assembled from the asset returns.
///
/// `Markowitz` uses mu'theta directly, which is the convention behind the
/// two-asset pension-fund figures. `LogWealth` subtracts the Ito correction
/// sigma(theta)^2 / 2 that appears after the substitution x = ln y.
enum class DriftConvention { Markowitz, LogWealth };

class PortfolioModel {
public:
    /// Validates and stores the model. Sigma is symmetrised before the
    /// positive-definiteness check; throws InputError on any violation.
    PortfolioModel(Eigen::VectorXd mu, Eigen::MatrixXd sigma, DecisionSet decision_set,
                   std::optional<InflowProfile> inflow = std::nullopt,
                   DriftConvention convention = DriftConvention::Markowitz);

    std::size_t n_assets() const { return static_cast<std::size_t>(mu_.size()); }
    const Eigen::VectorXd& mu() const { return mu_; }
    const Eigen::MatrixXd& sigma() const { return sigma_; }
    const DecisionSet& decision_set() const { return decision_set_; }
    const std::optional<InflowProfile>& inflow() const { return inflow_; }
    DriftConvention convention() const { return convention_; }

    bool is_simplex() const { return std::holds_alternative<Simplex>(decision_set_); }
    const DiscreteMenu* menu() const { return std::get_if<DiscreteMenu>(&decision_set_); }

    /// theta' Sigma theta
    double variance(const Eigen::VectorXd& theta) const;

    /// Copy of this model with a different decision set.
    PortfolioModel with_decision_set(DecisionSet set) const;
    PortfolioModel without_inflow() const;

private:
    Eigen::VectorXd mu_;
    Eigen::MatrixXd sigma_;
    DecisionSet decision_set_;
    std::optional<InflowProfile> inflow_;
    DriftConvention convention_;
};

/// Reads mu (header row, then one value per line) and Sigma (n rows of n
/// comma-separated values). Errors carry row/column context.
PortfolioModel ingest_market_data(std::istream& mu_csv, std::istream& sigma_csv,
                                  DecisionSet decision_set = Simplex{},
                                  std::optional<InflowProfile> inflow = std::nullopt,
                                  DriftConvention convention = DriftConvention::Markowitz);

/// Covariance of two assets from volatilities and a correlation coefficient.
Eigen::MatrixXd two_asset_covariance(double sigma_1, double sigma_2, double rho);

/// eps(e^x) e^{-x}: the inflow contribution to the log-wealth drift, and its x-derivatives.
double inflow_drift(const PortfolioModel& model, double x);
double inflow_drift_dx(const PortfolioModel& model, double x);
double inflow_drift_dxx(const PortfolioModel& model, double x);

/// sup over x of |d/dx inflow_drift|. Zero without inflow.
double inflow_drift_slope_sup(const PortfolioModel& model);

/// mu(x, theta) for the configured convention, including the inflow term.
double drift(const PortfolioModel& model, double x, const Eigen::VectorXd& theta);

struct DaraPairExponential {
    double a0 = 9.0;
    double a1 = 6.0;
    double x_star = 2.0;
};
struct ArctanUtility {};
/// Initial profile given directly as samples, linearly interpolated between
/// abscissae and held constant beyond the ends.
struct TabulatedPhi0 {
    std::vector<double> x;
    std::vector<double> phi;
};

using UtilityFamily = std::variant<DaraPairExponential, ArctanUtility, TabulatedPhi0>;

struct UtilitySpec {
    UtilityFamily family = DaraPairExponential{};
    double truncation_gamma = 8.0;

    void validate() const;
};

/// c* = e^{-a0 x*} (a0 - a1) / a1
double dara_shift(const DaraPairExponential& u);

/// Terminal utility u(x) and u'(x). TabulatedPhi0 carries no utility and throws.
double utility_value(const UtilitySpec& spec, double x);
double utility_derivative(const UtilitySpec& spec, double x);

/// -u''/u' at a point, before truncation.
double phi0_untruncated(const UtilitySpec& spec, double x);

/// phi0 sampled at the cell centres, truncated to zero outside (-gamma, gamma)
/// with a linear blend across the half cell just inside +-gamma.
std::vector<double> phi0_profile(const UtilitySpec& spec, const SpatialGrid& grid);

}  // namespace riccati

#endif

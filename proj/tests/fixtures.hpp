#ifndef RICCATI_HJB_TESTS_FIXTURES_HPP
#define RICCATI_HJB_TESTS_FIXTURES_HPP

#include <Eigen/Dense>

#include "riccati_hjb/portfolio_model.hpp"

namespace fixtures {

// Stocks index and bonds of the Slovak pension-fund example.
inline constexpr double kMuStocks = 0.1028;
inline constexpr double kMuBonds = 0.0516;
inline constexpr double kSigmaStocks = 0.169;
inline constexpr double kSigmaBonds = 0.0082;
inline constexpr double kRho = -0.1151;

inline Eigen::VectorXd pension_mu() {
    Eigen::VectorXd mu(2);
    mu << kMuStocks, kMuBonds;
    return mu;
}

inline Eigen::MatrixXd pension_sigma() {
    Eigen::MatrixXd s(2, 2);
    s << kSigmaStocks * kSigmaStocks, kRho * kSigmaStocks * kSigmaBonds,
        kRho * kSigmaStocks * kSigmaBonds, kSigmaBonds * kSigmaBonds;
    return s;
}

inline riccati::DiscreteMenu three_fund_menu() {
    riccati::DiscreteMenu menu;
    menu.points.push_back((Eigen::VectorXd(2) << 0.8, 0.2).finished());
    menu.points.push_back((Eigen::VectorXd(2) << 0.5, 0.5).finished());
    menu.points.push_back((Eigen::VectorXd(2) << 0.0, 1.0).finished());
    return menu;
}

inline riccati::PortfolioModel pension_model(riccati::DecisionSet set = riccati::Simplex{2}) {
    return riccati::PortfolioModel(pension_mu(), pension_sigma(), std::move(set));
}

inline riccati::PortfolioModel three_fund_model() { return pension_model(three_fund_menu()); }

inline riccati::PortfolioModel singleton_model(double m = 0.05, double s2 = 0.04) {
    return riccati::PortfolioModel((Eigen::VectorXd(1) << m).finished(), (Eigen::MatrixXd(1, 1) << s2).finished(),
                                   riccati::Simplex{1});
}

}  // namespace fixtures

#endif

#ifndef RICCATI_HJB_CONFIG_HPP
#define RICCATI_HJB_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "riccati_hjb/portfolio_model.hpp"
#include "riccati_hjb/riccati_solver.hpp"

namespace riccati {

struct CheckSettings {
    std::uint64_t seed = 42;
    std::size_t pairs = 1000;
    double phi_lo = 0.1;
    double phi_hi = 50.0;
    std::size_t x_samples = 5;
    double monotonicity_tol = 1e-10;
    double maximum_principle_tol = 1e-8;
    double comparison_tol = 1e-8;
    double conservation_tol = 1e-9;
    double energy_growth = 0.10;
    /// Initial data expected to dominate the run's own; empty skips the comparison check.
    std::optional<UtilitySpec> dominating_utility;
    /// Re-solve on a grid refined by two in space and time for the energy refinement check.
    bool energy_refinement = true;
};

struct CurveSettings {
    double phi_min = 0.5;
    double phi_max = 10.0;
    std::size_t n_points = 200;
    double x = 0.0;
};

struct RunConfig {
    /// Parsed document, echoed into manifests.
    nlohmann::json document;
    std::string source;
    std::optional<PortfolioModel> model;
    UtilitySpec utility;
    PDEConfig pde;
    std::vector<double> slices;
    CheckSettings checks;
    CurveSettings alpha_curve;
    CurveSettings weights_path{0.5, 50.0, 200, 0.0};
    MmsPlan mms;

    const PortfolioModel& require_model() const;
};

/// Parses JSON text; syntax errors are reported as "<source>:<line>:<column>: ...".
nlohmann::json parse_json_text(const std::string& text, const std::string& source);

/// Builds a RunConfig from a document. CSV paths inside the model section are
/// resolved against base_dir. Errors name the offending key as a JSON pointer.
RunConfig parse_config(const nlohmann::json& document, const std::string& source,
                       const std::filesystem::path& base_dir);

RunConfig load_config(const std::filesystem::path& path);

/// "0.5,1,2.5" -> {0.5, 1, 2.5}
std::vector<double> parse_slice_list(const std::string& text);

const char* to_string(AdvectionScheme scheme);
const char* to_string(BoundaryCondition boundary);

/// The effective settings after defaults were applied, for manifests.
nlohmann::json effective_settings(const RunConfig& config);

}  // namespace riccati

#endif

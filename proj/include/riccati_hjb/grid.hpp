#ifndef RICCATI_HJB_GRID_HPP
#define RICCATI_HJB_GRID_HPP

#include <cstddef>
#include <vector>

namespace riccati {

/// Uniform cell-centred grid on [x_min, x_max] in log-wealth units.
class SpatialGrid {
public:
    SpatialGrid(double x_min, double x_max, std::size_t n_cells);

    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    std::size_t n_cells() const { return n_cells_; }
    double dx() const { return dx_; }
    double length() const { return x_max_ - x_min_; }

    double center(std::size_t i) const { return x_min_ + (static_cast<double>(i) + 0.5) * dx_; }
    std::vector<double> centers() const;

    static constexpr std::size_t kMinCells = 8;

private:
    double x_min_;
    double x_max_;
    std::size_t n_cells_;
    double dx_;
};

}  // namespace riccati

#endif

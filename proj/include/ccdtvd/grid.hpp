#pragma once

#include <cstddef>
#include <stdexcept>

namespace ccdtvd {

/// Uniform 1D axis with `n_cells` cells on [left, right]; nodes are 0..n_cells.
class GridAxis {
public:
    GridAxis(std::size_t n_cells, double left, double right)
        : n_cells_(n_cells), left_(left), right_(right),
          spacing_((right - left) / static_cast<double>(n_cells)) {
        if (n_cells == 0) throw std::invalid_argument("GridAxis: n_cells must be positive");
        if (!(right > left)) throw std::invalid_argument("GridAxis: right must exceed left");
    }

    std::size_t n_cells() const noexcept { return n_cells_; }
    std::size_t n_nodes() const noexcept { return n_cells_ + 1; }
    double left() const noexcept { return left_; }
    double right() const noexcept { return right_; }
    double spacing() const noexcept { return spacing_; }

    double node(std::size_t i) const noexcept {
        return left_ + static_cast<double>(i) * spacing_;
    }

private:
    std::size_t n_cells_;
    double left_;
    double right_;
    double spacing_;
};

}  // namespace ccdtvd

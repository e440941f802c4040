#pragma once

// Three-point combined compact difference (CCD) operator: sixth-order interior
// first and second derivatives of nodal samples on a uniform, non-periodic axis.

#include <array>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ccdtvd/banded_lu.hpp"
#include "ccdtvd/grid.hpp"

namespace ccdtvd {

/// Fewest cells for which the CCD system is nonsingular (m = 3 and m = 4 have
/// zero determinant).
inline constexpr std::size_t kMinCcdCells = 4;

/// Node count up to which the dense IAB = A^{-1} B product is materialized.
inline constexpr std::size_t kDenseIabMaxNodes = 64;

/**
 * Square matrix in which row i holds three consecutive entries starting at
 * column clamp(i - 1, 0, size - 3). Interior rows are (sub, diag, super); the
 * first row starts at column 0 and the last row ends at column size - 1.
 */
class ThreePointMatrix {
public:
    explicit ThreePointMatrix(std::size_t size);

    std::size_t size() const noexcept { return rows_.size(); }
    static std::size_t first_column(std::size_t row, std::size_t size) noexcept;

    std::array<double, 3>& row(std::size_t i) { return rows_.at(i); }
    const std::array<double, 3>& row(std::size_t i) const { return rows_.at(i); }

    double operator()(std::size_t i, std::size_t j) const;
    double row_dot(std::size_t i, std::span<const double> x) const;
    Eigen::MatrixXd dense() const;

private:
    std::vector<std::array<double, 3>> rows_;
};

/// Block form A v = B u of the CCD equations, v = [u'; u''].
struct CcdBlocks {
    ThreePointMatrix a1, a2, a3, a4;  // coefficient blocks
    ThreePointMatrix b1, b2;          // right-hand-side blocks

    std::size_t nodes() const noexcept { return a1.size(); }

    /// [A1 A2; A3 A4], 2m x 2m, block ordering.
    Eigen::MatrixXd coefficient_matrix() const;
    /// [B1; B2], 2m x m.
    Eigen::MatrixXd rhs_matrix() const;

    /// max_i |(A v - B u)_i| for v = (first, second).
    double residual(std::span<const double> samples, std::span<const double> first,
                    std::span<const double> second) const;
    /// max_i |(B u)_i|.
    double rhs_norm(std::span<const double> samples) const;
};

/// Raw blocks for `nodes` >= 3 points at spacing h. No solvability check.
CcdBlocks build_ccd_blocks(std::size_t nodes, double h);

struct CcdSystem {
    GridAxis axis;
    CcdBlocks blocks;

    std::size_t nodes() const noexcept { return blocks.nodes(); }
};

/// Throws std::invalid_argument when axis.n_cells() < kMinCcdCells.
CcdSystem build_ccd_system(const GridAxis& axis);

struct DerivativePair {
    std::vector<double> first;
    std::vector<double> second;
};

/**
 * Factorized CCD system for one axis. Unknowns are interleaved
 * (u'_0, u''_0, u'_1, u''_1, ...) which makes the 2m x 2m matrix banded with
 * three sub- and three super-diagonals; solves cost O(m).
 *
 * Immutable after construction, so one instance may serve any number of
 * concurrent pencil solves as long as each caller brings its own scratch.
 */
class CcdFactorization {
public:
    explicit CcdFactorization(CcdSystem system);

    const GridAxis& axis() const noexcept { return system_.axis; }
    const CcdSystem& system() const noexcept { return system_; }
    std::size_t nodes() const noexcept { return system_.nodes(); }

    /// `scratch` must hold 2 * nodes() values.
    void apply(std::span<const double> samples, std::span<double> first,
               std::span<double> second, std::span<double> scratch) const;

    DerivativePair apply(std::span<const double> samples) const;

    bool has_dense_iab() const noexcept { return iab_.has_value(); }
    /// 2m x m matrix mapping samples to [u'; u'']. Throws if not materialized.
    const Eigen::MatrixXd& dense_iab() const;
    DerivativePair apply_dense(std::span<const double> samples) const;

private:
    CcdSystem system_;
    BandedLU lu_;
    std::optional<Eigen::MatrixXd> iab_;
};

CcdFactorization factorize(CcdSystem system);
DerivativePair apply_ccd(const CcdFactorization& fact, std::span<const double> samples);

/// Shares one factorization per distinct (cell count, spacing) pair.
class FactorizationCache {
public:
    std::shared_ptr<const CcdFactorization> get(const GridAxis& axis);
    std::size_t size() const;

private:
    mutable std::mutex mutex_;
    std::map<std::pair<std::size_t, double>, std::shared_ptr<const CcdFactorization>> entries_;
};

FactorizationCache& default_factorization_cache();

}  // namespace ccdtvd

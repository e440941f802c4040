#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ccdtvd {

class SingularMatrixError : public std::runtime_error {
public:
    SingularMatrixError(std::size_t column, const std::string& what)
        : std::runtime_error(what), column_(column) {}
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t column_;
};

/**
 * Square band matrix with `lower` sub- and `upper` super-diagonals, factorized
 * in place by Gaussian elimination with partial pivoting.
 *
 * Storage follows the LAPACK general-band layout: column j holds rows
 * j-upper-lower .. j+lower, so row interchanges have room for the fill-in of
 * `lower` extra super-diagonals.
 */
class BandedLU {
public:
    BandedLU(std::size_t n, std::size_t lower, std::size_t upper);

    std::size_t size() const noexcept { return n_; }
    std::size_t lower() const noexcept { return kl_; }
    std::size_t upper() const noexcept { return ku_; }
    bool factorized() const noexcept { return factorized_; }

    /// Entry setter; (row, col) must lie inside the declared band.
    void set(std::size_t row, std::size_t col, double value);
    double get(std::size_t row, std::size_t col) const;
    bool in_band(std::size_t row, std::size_t col) const noexcept;

    /// y = A x using the unfactorized entries. Throws once factorized.
    void multiply(std::span<const double> x, std::span<double> y) const;

    /// Throws SingularMatrixError on an exactly zero pivot.
    void factorize();

    /// Overwrites rhs with the solution of A x = rhs.
    void solve(std::span<double> rhs) const;

private:
    double& at(std::size_t row, std::size_t col) noexcept {
        return ab_[(kv_ + row - col) + col * ldab_];
    }
    double at(std::size_t row, std::size_t col) const noexcept {
        return ab_[(kv_ + row - col) + col * ldab_];
    }

    std::size_t n_;
    std::size_t kl_;
    std::size_t ku_;
    std::size_t kv_;    // kl + ku, row offset of the main diagonal
    std::size_t ldab_;  // 2 kl + ku + 1
    std::vector<double> ab_;
    std::vector<std::size_t> pivots_;
    bool factorized_ = false;
};

}  // namespace ccdtvd

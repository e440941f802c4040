#include "ccdtvd/banded_lu.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <fmt/format.h>

namespace ccdtvd {

BandedLU::BandedLU(std::size_t n, std::size_t lower, std::size_t upper)
    : n_(n), kl_(lower), ku_(upper), kv_(lower + upper), ldab_(2 * lower + upper + 1),
      ab_(ldab_ * n, 0.0), pivots_(n, 0) {
    if (n == 0) throw std::invalid_argument("BandedLU: empty matrix");
}

bool BandedLU::in_band(std::size_t row, std::size_t col) const noexcept {
    if (row >= n_ || col >= n_) return false;
    return row >= col ? row - col <= kl_ : col - row <= ku_;
}

void BandedLU::set(std::size_t row, std::size_t col, double value) {
    if (factorized_) throw std::logic_error("BandedLU::set after factorize");
    if (!in_band(row, col))
        throw std::out_of_range(fmt::format("BandedLU::set: ({}, {}) outside band", row, col));
    at(row, col) = value;
}

double BandedLU::get(std::size_t row, std::size_t col) const {
    if (factorized_) throw std::logic_error("BandedLU::get after factorize");
    return in_band(row, col) ? at(row, col) : 0.0;
}

void BandedLU::multiply(std::span<const double> x, std::span<double> y) const {
    if (factorized_) throw std::logic_error("BandedLU::multiply after factorize");
    if (x.size() != n_ || y.size() != n_) throw std::invalid_argument("BandedLU::multiply: size");
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t c0 = i > kl_ ? i - kl_ : 0;
        const std::size_t c1 = std::min(n_ - 1, i + ku_);
        double sum = 0.0;
        for (std::size_t c = c0; c <= c1; ++c) sum += at(i, c) * x[c];
        y[i] = sum;
    }
}

void BandedLU::factorize() {
    if (factorized_) return;
    std::size_t ju = 0;  // last column touched by an interchange so far
    for (std::size_t j = 0; j < n_; ++j) {
        const std::size_t km = std::min(kl_, n_ - 1 - j);

        std::size_t p = j;
        double best = std::abs(at(j, j));
        for (std::size_t i = j + 1; i <= j + km; ++i) {
            if (std::abs(at(i, j)) > best) {
                best = std::abs(at(i, j));
                p = i;
            }
        }
        pivots_[j] = p;
        if (best == 0.0)
            throw SingularMatrixError(j, fmt::format("BandedLU: zero pivot in column {}", j));

        ju = std::max(ju, std::min(j + ku_ + (p - j), n_ - 1));
        if (p != j)
            for (std::size_t c = j; c <= ju; ++c) std::swap(at(p, c), at(j, c));

        if (km > 0) {
            const double inv = 1.0 / at(j, j);
            for (std::size_t i = j + 1; i <= j + km; ++i) at(i, j) *= inv;
            for (std::size_t c = j + 1; c <= ju; ++c) {
                const double t = at(j, c);
                if (t == 0.0) continue;
                for (std::size_t i = j + 1; i <= j + km; ++i) at(i, c) -= at(i, j) * t;
            }
        }
    }
    factorized_ = true;
}

void BandedLU::solve(std::span<double> b) const {
    if (!factorized_) throw std::logic_error("BandedLU::solve before factorize");
    if (b.size() != n_) throw std::invalid_argument("BandedLU::solve: size");

    // L y = P b
    for (std::size_t j = 0; j + 1 < n_; ++j) {
        const std::size_t km = std::min(kl_, n_ - 1 - j);
        const std::size_t p = pivots_[j];
        if (p != j) std::swap(b[p], b[j]);
        const double t = b[j];
        for (std::size_t i = j + 1; i <= j + km; ++i) b[i] -= at(i, j) * t;
    }
    // U x = y, U has kl + ku super-diagonals
    for (std::size_t j = n_; j-- > 0;) {
        b[j] /= at(j, j);
        const double t = b[j];
        const std::size_t i0 = j > kv_ ? j - kv_ : 0;
        for (std::size_t i = i0; i < j; ++i) b[i] -= t * at(i, j);
    }
}

}  // namespace ccdtvd

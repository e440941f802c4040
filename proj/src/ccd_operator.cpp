#include "ccdtvd/ccd_operator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace ccdtvd {

ThreePointMatrix::ThreePointMatrix(std::size_t size) : rows_(size, {0.0, 0.0, 0.0}) {
    if (size < 3) throw std::invalid_argument("ThreePointMatrix: size must be at least 3");
}

std::size_t ThreePointMatrix::first_column(std::size_t row, std::size_t size) noexcept {
    if (row == 0) return 0;
    return std::min(row - 1, size - 3);
}

double ThreePointMatrix::operator()(std::size_t i, std::size_t j) const {
    const std::size_t c0 = first_column(i, size());
    if (j < c0 || j > c0 + 2) return 0.0;
    return rows_.at(i)[j - c0];
}

double ThreePointMatrix::row_dot(std::size_t i, std::span<const double> x) const {
    const std::size_t c0 = first_column(i, size());
    const auto& r = rows_[i];
    return r[0] * x[c0] + r[1] * x[c0 + 1] + r[2] * x[c0 + 2];
}

Eigen::MatrixXd ThreePointMatrix::dense() const {
    const auto m = static_cast<Eigen::Index>(size());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t i = 0; i < size(); ++i) {
        const std::size_t c0 = first_column(i, size());
        for (std::size_t k = 0; k < 3; ++k)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c0 + k)) = rows_[i][k];
    }
    return out;
}

Eigen::MatrixXd CcdBlocks::coefficient_matrix() const {
    const auto m = static_cast<Eigen::Index>(nodes());
    Eigen::MatrixXd out(2 * m, 2 * m);
    out.topLeftCorner(m, m) = a1.dense();
    out.topRightCorner(m, m) = a2.dense();
    out.bottomLeftCorner(m, m) = a3.dense();
    out.bottomRightCorner(m, m) = a4.dense();
    return out;
}

Eigen::MatrixXd CcdBlocks::rhs_matrix() const {
    const auto m = static_cast<Eigen::Index>(nodes());
    Eigen::MatrixXd out(2 * m, m);
    out.topRows(m) = b1.dense();
    out.bottomRows(m) = b2.dense();
    return out;
}

double CcdBlocks::residual(std::span<const double> u, std::span<const double> d1,
                           std::span<const double> d2) const {
    const std::size_t m = nodes();
    if (u.size() != m || d1.size() != m || d2.size() != m)
        throw std::invalid_argument("CcdBlocks::residual: size mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double r1 = a1.row_dot(i, d1) + a2.row_dot(i, d2) - b1.row_dot(i, u);
        const double r2 = a3.row_dot(i, d1) + a4.row_dot(i, d2) - b2.row_dot(i, u);
        worst = std::max({worst, std::abs(r1), std::abs(r2)});
    }
    return worst;
}

double CcdBlocks::rhs_norm(std::span<const double> u) const {
    double worst = 0.0;
    for (std::size_t i = 0; i < nodes(); ++i)
        worst = std::max({worst, std::abs(b1.row_dot(i, u)), std::abs(b2.row_dot(i, u))});
    return worst;
}

CcdBlocks build_ccd_blocks(std::size_t m, double h) {
    if (m < 3) throw std::invalid_argument("build_ccd_blocks: need at least 3 nodes");
    if (!(h > 0.0) || !std::isfinite(h))
        throw std::invalid_argument("build_ccd_blocks: spacing must be positive and finite");

    CcdBlocks s{ThreePointMatrix(m), ThreePointMatrix(m), ThreePointMatrix(m),
                ThreePointMatrix(m), ThreePointMatrix(m), ThreePointMatrix(m)};

    for (std::size_t i = 1; i + 1 < m; ++i) {
        s.a1.row(i) = {7.0 / 16.0, 1.0, 7.0 / 16.0};
        s.a2.row(i) = {h / 16.0, 0.0, -h / 16.0};
        s.b1.row(i) = {-15.0 / (16.0 * h), 0.0, 15.0 / (16.0 * h)};
        s.a3.row(i) = {-9.0 / (8.0 * h), 0.0, 9.0 / (8.0 * h)};
        s.a4.row(i) = {-1.0 / 8.0, 1.0, -1.0 / 8.0};
        s.b2.row(i) = {3.0 / (h * h), -6.0 / (h * h), 3.0 / (h * h)};
    }

    // One-sided closures, exact for polynomials through degree four.
    s.a1.row(0) = {14.0, 16.0, 0.0};
    s.a2.row(0) = {2.0 * h, -4.0 * h, 0.0};
    s.b1.row(0) = {-31.0 / h, 32.0 / h, -1.0 / h};
    s.a3.row(0) = {1.0, 2.0, 0.0};
    s.a4.row(0) = {0.0, -h, 0.0};
    s.b2.row(0) = {-7.0 / (2.0 * h), 8.0 / (2.0 * h), -1.0 / (2.0 * h)};

    const std::size_t n = m - 1;
    s.a1.row(n) = {0.0, 16.0, 14.0};
    s.a2.row(n) = {0.0, 4.0 * h, -2.0 * h};
    s.b1.row(n) = {1.0 / h, -32.0 / h, 31.0 / h};
    s.a3.row(n) = {0.0, 2.0, 1.0};
    s.a4.row(n) = {0.0, h, 0.0};
    s.b2.row(n) = {1.0 / (2.0 * h), -8.0 / (2.0 * h), 7.0 / (2.0 * h)};
    return s;
}

CcdSystem build_ccd_system(const GridAxis& axis) {
    if (axis.n_cells() < kMinCcdCells)
        throw std::invalid_argument(fmt::format(
            "build_ccd_system: {} cells is below the minimum of {} (the CCD matrix is singular "
            "for 2 and 3 cells and undefined below)",
            axis.n_cells(), kMinCcdCells));
    return CcdSystem{axis, build_ccd_blocks(axis.n_nodes(), axis.spacing())};
}

namespace {

BandedLU interleaved_matrix(const CcdBlocks& s) {
    const std::size_t m = s.nodes();
    BandedLU lu(2 * m, 3, 3);
    auto put = [&](const ThreePointMatrix& blk, std::size_t i, std::size_t row_off,
                   std::size_t col_off) {
        const std::size_t c0 = ThreePointMatrix::first_column(i, m);
        for (std::size_t k = 0; k < 3; ++k) {
            const double v = blk.row(i)[k];
            // The closure rows carry structural zeros that would fall outside the band.
            if (v != 0.0) lu.set(2 * i + row_off, 2 * (c0 + k) + col_off, v);
        }
    };
    for (std::size_t i = 0; i < m; ++i) {
        put(s.a1, i, 0, 0);
        put(s.a2, i, 0, 1);
        put(s.a3, i, 1, 0);
        put(s.a4, i, 1, 1);
    }
    return lu;
}

}  // namespace

CcdFactorization::CcdFactorization(CcdSystem system)
    : system_(std::move(system)), lu_(interleaved_matrix(system_.blocks)) {
    // Exactly singular for every h, but rounding leaves tiny nonzero pivots.
    if (nodes() <= kMinCcdCells)
        throw SingularMatrixError(0, fmt::format("CCD system with {} nodes is singular", nodes()));
    try {
        lu_.factorize();
    } catch (const SingularMatrixError& e) {
        throw SingularMatrixError(
            e.column(), fmt::format("CCD system with {} nodes is singular: {}", nodes(), e.what()));
    }
    if (nodes() <= kDenseIabMaxNodes) {
        const Eigen::MatrixXd a = system_.blocks.coefficient_matrix();
        iab_ = a.partialPivLu().solve(system_.blocks.rhs_matrix());
    }
}

void CcdFactorization::apply(std::span<const double> u, std::span<double> d1,
                             std::span<double> d2, std::span<double> scratch) const {
    const std::size_t m = nodes();
    if (u.size() != m || d1.size() != m || d2.size() != m || scratch.size() < 2 * m)
        throw std::invalid_argument(fmt::format(
            "CcdFactorization::apply: expected {} samples and {} scratch values", m, 2 * m));
    const CcdBlocks& s = system_.blocks;
    for (std::size_t i = 0; i < m; ++i) {
        scratch[2 * i] = s.b1.row_dot(i, u);
        scratch[2 * i + 1] = s.b2.row_dot(i, u);
    }
    lu_.solve(scratch.first(2 * m));
    for (std::size_t i = 0; i < m; ++i) {
        d1[i] = scratch[2 * i];
        d2[i] = scratch[2 * i + 1];
    }
}

DerivativePair CcdFactorization::apply(std::span<const double> u) const {
    DerivativePair out{std::vector<double>(nodes()), std::vector<double>(nodes())};
    std::vector<double> scratch(2 * nodes());
    apply(u, out.first, out.second, scratch);
    return out;
}

const Eigen::MatrixXd& CcdFactorization::dense_iab() const {
    if (!iab_) throw std::logic_error("dense IAB is only kept for small systems");
    return *iab_;
}

DerivativePair CcdFactorization::apply_dense(std::span<const double> u) const {
    const auto& iab = dense_iab();
    const auto m = static_cast<Eigen::Index>(nodes());
    if (u.size() != nodes()) throw std::invalid_argument("apply_dense: size mismatch");
    const Eigen::Map<const Eigen::VectorXd> x(u.data(), m);
    const Eigen::VectorXd v = iab * x;
    DerivativePair out{std::vector<double>(v.data(), v.data() + m),
                       std::vector<double>(v.data() + m, v.data() + 2 * m)};
    return out;
}

CcdFactorization factorize(CcdSystem system) { return CcdFactorization(std::move(system)); }

DerivativePair apply_ccd(const CcdFactorization& fact, std::span<const double> samples) {
    return fact.apply(samples);
}

std::shared_ptr<const CcdFactorization> FactorizationCache::get(const GridAxis& axis) {
    const auto key = std::make_pair(axis.n_cells(), axis.spacing());
    std::lock_guard lock(mutex_);
    auto it = entries_.find(key);
    if (it != entries_.end()) return it->second;
    auto fact = std::make_shared<const CcdFactorization>(build_ccd_system(axis));
    entries_.emplace(key, fact);
    return fact;
}

std::size_t FactorizationCache::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

FactorizationCache& default_factorization_cache() {
    static FactorizationCache cache;
    return cache;
}

}  // namespace ccdtvd

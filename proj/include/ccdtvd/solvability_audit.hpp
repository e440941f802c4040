#pragma once

// Numerical replay of the unique-solvability argument for the CCD system:
// semi-circulant algebra, the block-determinant identity, the scripted n = 10
// reduction to a strictly diagonally dominant matrix, and a conditioning sweep.

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ccdtvd {

/**
 * m x m tridiagonal matrix with interior rows (a, b, c), first row (d, e, 0, ...)
 * and last row (..., 0, g, f).
 */
struct SemiCirculant3 {
    std::size_t m = 0;
    double a = 0.0, b = 0.0, c = 0.0;
    double d = 0.0, e = 0.0, f = 0.0, g = 0.0;

    Eigen::MatrixXd materialize() const;
};

/// Five-diagonal product of two semi-circulant matrices: interior rows carry
/// c1..c5 on diagonals -2..2, rows 1 and m-2 carry d1..d4 (columns 0..3) and
/// d5..d8 (columns m-4..m-1), rows 0 and m-1 carry e1..e3 and e4..e6.
struct SemiCirculantProduct {
    std::size_t m = 0;
    std::array<double, 5> c{};
    std::array<double, 8> d{};
    std::array<double, 6> e{};

    Eigen::MatrixXd materialize() const;
};

/// Requires equal sizes and m >= 4.
SemiCirculantProduct semi_circulant_product(const SemiCirculant3& lhs, const SemiCirculant3& rhs);

struct BlockDeterminantReport {
    double commutator_norm = 0.0;  // ||AC - CA||_inf
    double block_determinant = 0.0;
    double reduced_determinant = 0.0;  // det(AD - CB)
    double relative_difference = 0.0;
    bool passed = false;  // relative difference <= 1e-8
};

/// det([A B; C D]) against det(AD - CB). Throws unless AC = CA to 1e-12 and m <= 8.
BlockDeterminantReport block_determinant_identity_check(const Eigen::MatrixXd& A,
                                                        const Eigen::MatrixXd& B,
                                                        const Eigen::MatrixXd& C,
                                                        const Eigen::MatrixXd& D);

/// The four coefficient blocks as semi-circulant matrices of size m at spacing h.
std::array<SemiCirculant3, 4> ccd_coefficient_blocks(std::size_t m, double h);

/// [A1 A2; A3 A4] assembled from ccd_coefficient_blocks. Requires m >= 4.
Eigen::MatrixXd assemble_full_ccd_matrix(std::size_t m, double h);

/// T1..T19 of the reduced n = 10 matrix, evaluated from their radical forms.
struct AppendixConstants {
    std::array<double, 19> t{};
    /// 0-based (row, column) of T_k in the reduced matrix.
    static constexpr std::array<std::array<std::size_t, 2>, 19> position{{
        {0, 0}, {0, 1}, {0, 3}, {0, 5}, {1, 0}, {1, 1}, {1, 3}, {1, 4}, {2, 2}, {2, 4},
        {7, 7}, {7, 8}, {8, 5}, {8, 7}, {8, 8}, {8, 9}, {9, 7}, {9, 8}, {9, 9},
    }};

    double operator[](int k) const { return t.at(static_cast<std::size_t>(k - 1)); }
};

AppendixConstants appendix_constants();

struct ReductionMultiplier {
    std::string name;
    double printed = 0.0;  // value used by the replay
    double derived = 0.0;  // value recomputed from the running matrix
};

struct AppendixBReduction {
    Eigen::MatrixXd normalized;          // 2n x 2n after the block and row operations
    double identity_block_error = 0.0;   // max |C - I| of the bottom-left block
    Eigen::MatrixXd schur;               // A D - B C before the elementary steps
    Eigen::MatrixXd reduced;             // after the seven elementary steps
    std::vector<ReductionMultiplier> multipliers;
    std::vector<double> margins;         // 2 |a_ii| - sum_j |a_ij|
    double min_margin = 0.0;
    bool dominant = false;
};

/// Only n = 10 is supported: the elementary steps are specific to that size.
AppendixBReduction appendix_b_reduction(std::size_t n = 10);

struct SweepRow {
    std::size_t m = 0;
    double h = 0.0;
    double rcond = 0.0;             // 1 / (||A||_1 ||A^{-1}||_1)
    double backward_error = 0.0;    // ||A x - b||_inf / (||A||_inf ||x||_inf + ||b||_inf)
    bool passed = false;
};

inline constexpr double kRcondThreshold = 1e-12;

std::vector<SweepRow> nonsingularity_sweep(const std::vector<std::size_t>& sizes,
                                           const std::vector<double>& spacings);

struct AuditReport {
    AppendixBReduction reduction;
    AppendixConstants constants;
    std::vector<SweepRow> sweep;
    bool passed = false;  // dominant reduction and every sweep row passed
};

AuditReport run_audit(const std::vector<std::size_t>& sizes, const std::vector<double>& spacings);

/// JSON document with the reduced matrix, margins, multipliers, constants and sweep.
std::string audit_report_json(const AuditReport& report);

}  // namespace ccdtvd

#pragma once

// Independent reference computations for the tests: plain dense linear
// algebra written out by hand, analytic derivatives, and a seeded generator.
// Nothing here calls into the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

using Dense = std::vector<std::vector<double>>;

inline Dense zeros(std::size_t r, std::size_t c) { return Dense(r, std::vector<double>(c, 0.0)); }

inline Dense matmul(const Dense& a, const Dense& b) {
    Dense out = zeros(a.size(), b[0].size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < b.size(); ++k)
            for (std::size_t j = 0; j < b[0].size(); ++j) out[i][j] += a[i][k] * b[k][j];
    return out;
}

inline std::vector<double> matvec(const Dense& a, const std::vector<double>& x) {
    std::vector<double> y(a.size(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j) y[i] += a[i][j] * x[j];
    return y;
}

/// Determinant by Gaussian elimination with partial pivoting.
inline double determinant(Dense a) {
    const std::size_t n = a.size();
    double det = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
        if (a[p][k] == 0.0) return 0.0;
        if (p != k) {
            std::swap(a[p], a[k]);
            det = -det;
        }
        det *= a[k][k];
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a[i][k] / a[k][k];
            for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
        }
    }
    return det;
}

/// Solves a x = b by Gaussian elimination with partial pivoting.
inline std::vector<double> solve(Dense a, std::vector<double> b) {
    const std::size_t n = a.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
        if (a[p][k] == 0.0) throw std::runtime_error("oracle::solve: singular");
        std::swap(a[p], a[k]);
        std::swap(b[p], b[k]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a[i][k] / a[k][k];
            for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
        x[i] = s / a[i][i];
    }
    return x;
}

/// Hand-written CCD rows, interleaved ordering (u'_i, u''_i): an independent
/// transcription used to cross-check the library assembly.
inline void ccd_dense(std::size_t m, double h, Dense& A, Dense& B) {
    A = zeros(2 * m, 2 * m);
    B = zeros(2 * m, m);
    const auto d1 = [](std::size_t j) { return 2 * j; };
    const auto d2 = [](std::size_t j) { return 2 * j + 1; };
    for (std::size_t i = 1; i + 1 < m; ++i) {
        const std::size_t r = 2 * i, s = 2 * i + 1;
        A[r][d1(i - 1)] = 7.0 / 16;  A[r][d1(i)] = 1.0;  A[r][d1(i + 1)] = 7.0 / 16;
        A[r][d2(i - 1)] = h / 16;    A[r][d2(i + 1)] = -h / 16;
        B[r][i - 1] = -15.0 / (16 * h);  B[r][i + 1] = 15.0 / (16 * h);
        A[s][d1(i - 1)] = -9.0 / (8 * h);  A[s][d1(i + 1)] = 9.0 / (8 * h);
        A[s][d2(i - 1)] = -1.0 / 8;  A[s][d2(i)] = 1.0;  A[s][d2(i + 1)] = -1.0 / 8;
        B[s][i - 1] = 3 / (h * h);  B[s][i] = -6 / (h * h);  B[s][i + 1] = 3 / (h * h);
    }
    const std::size_t n = m - 1;
    A[0][d1(0)] = 14;  A[0][d1(1)] = 16;  A[0][d2(0)] = 2 * h;  A[0][d2(1)] = -4 * h;
    B[0][0] = -31 / h;  B[0][1] = 32 / h;  B[0][2] = -1 / h;
    A[1][d1(0)] = 1;  A[1][d1(1)] = 2;  A[1][d2(1)] = -h;
    B[1][0] = -7 / (2 * h);  B[1][1] = 8 / (2 * h);  B[1][2] = -1 / (2 * h);
    A[2 * n][d1(n - 1)] = 16;  A[2 * n][d1(n)] = 14;  A[2 * n][d2(n - 1)] = 4 * h;  A[2 * n][d2(n)] = -2 * h;
    B[2 * n][n - 2] = 1 / h;  B[2 * n][n - 1] = -32 / h;  B[2 * n][n] = 31 / h;
    A[2 * n + 1][d1(n - 1)] = 2;  A[2 * n + 1][d1(n)] = 1;  A[2 * n + 1][d2(n - 1)] = h;
    B[2 * n + 1][n - 2] = 1 / (2 * h);  B[2 * n + 1][n - 1] = -8 / (2 * h);  B[2 * n + 1][n] = 7 / (2 * h);
}

/// Seeded source of test inputs.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    std::size_t index(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
    }
    std::vector<double> vector(std::size_t n, double lo = -1.0, double hi = 1.0) {
        std::vector<double> v(n);
        for (auto& x : v) x = uniform(lo, hi);
        return v;
    }

private:
    std::mt19937_64 rng_;
};

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs(const std::vector<double>& a) {
    double m = 0.0;
    for (double x : a) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace oracle

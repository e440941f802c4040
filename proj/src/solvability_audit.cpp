#include "ccdtvd/solvability_audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

namespace ccdtvd {

namespace {

using Eigen::Index;

Index ix(std::size_t i) { return static_cast<Index>(i); }

}  // namespace

Eigen::MatrixXd SemiCirculant3::materialize() const {
    if (m < 3) throw std::invalid_argument("SemiCirculant3: m must be at least 3");
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(ix(m), ix(m));
    out(0, 0) = d;
    out(0, 1) = e;
    for (std::size_t i = 1; i + 1 < m; ++i) {
        out(ix(i), ix(i - 1)) = a;
        out(ix(i), ix(i)) = b;
        out(ix(i), ix(i + 1)) = c;
    }
    out(ix(m - 1), ix(m - 2)) = g;
    out(ix(m - 1), ix(m - 1)) = f;
    return out;
}

Eigen::MatrixXd SemiCirculantProduct::materialize() const {
    if (m < 4) throw std::invalid_argument("SemiCirculantProduct: m must be at least 4");
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(ix(m), ix(m));
    for (std::size_t k = 0; k < 3; ++k) {
        out(0, ix(k)) = e[k];
        out(ix(m - 1), ix(m - 3 + k)) = e[3 + k];
    }
    for (std::size_t k = 0; k < 4; ++k) {
        out(1, ix(k)) = d[k];
        out(ix(m - 2), ix(m - 4 + k)) = d[4 + k];
    }
    for (std::size_t i = 2; i + 2 < m; ++i)
        for (std::size_t k = 0; k < 5; ++k) out(ix(i), ix(i + k - 2)) = c[k];
    return out;
}

SemiCirculantProduct semi_circulant_product(const SemiCirculant3& A, const SemiCirculant3& B) {
    if (A.m != B.m) throw std::invalid_argument("semi_circulant_product: size mismatch");
    if (A.m < 4) throw std::invalid_argument("semi_circulant_product: m must be at least 4");
    const double a1 = A.a, a2 = A.b, a3 = A.c, a4 = A.d, a5 = A.e, a6 = A.f, a7 = A.g;
    const double b1 = B.a, b2 = B.b, b3 = B.c, b4 = B.d, b5 = B.e, b6 = B.f, b7 = B.g;
    SemiCirculantProduct p;
    p.m = A.m;
    p.c = {a1 * b1, a1 * b2 + a2 * b1, a1 * b3 + a2 * b2 + a3 * b1, a2 * b3 + a3 * b2, a3 * b3};
    p.d = {a1 * b4 + a2 * b1, a1 * b5 + a2 * b2 + a3 * b1, a2 * b3 + a3 * b2, a3 * b3,
           a1 * b1,           a1 * b2 + a2 * b1,           a1 * b3 + a2 * b2 + a3 * b7,
           a2 * b3 + a3 * b6};
    p.e = {a4 * b4 + a5 * b1, a4 * b5 + a5 * b2, a5 * b3,
           a7 * b1,           a6 * b7 + a7 * b2, a7 * b3 + a6 * b6};
    return p;
}

BlockDeterminantReport block_determinant_identity_check(const Eigen::MatrixXd& A,
                                                        const Eigen::MatrixXd& B,
                                                        const Eigen::MatrixXd& C,
                                                        const Eigen::MatrixXd& D) {
    const Index m = A.rows();
    for (const auto* x : {&A, &B, &C, &D})
        if (x->rows() != m || x->cols() != m)
            throw std::invalid_argument("block_determinant_identity_check: blocks must be m x m");
    if (m > 8) throw std::invalid_argument("block_determinant_identity_check: m must be <= 8");

    BlockDeterminantReport r;
    r.commutator_norm = (A * C - C * A).cwiseAbs().rowwise().sum().maxCoeff();
    if (r.commutator_norm > 1e-12)
        throw std::invalid_argument(fmt::format(
            "block_determinant_identity_check: A and C do not commute (||AC - CA|| = {:.3e})",
            r.commutator_norm));

    Eigen::MatrixXd full(2 * m, 2 * m);
    full << A, B, C, D;
    r.block_determinant = full.fullPivLu().determinant();
    r.reduced_determinant = (A * D - C * B).fullPivLu().determinant();
    const double scale = std::max(std::abs(r.block_determinant), std::abs(r.reduced_determinant));
    r.relative_difference =
        scale == 0.0 ? 0.0 : std::abs(r.block_determinant - r.reduced_determinant) / scale;
    r.passed = r.relative_difference <= 1e-8;
    return r;
}

std::array<SemiCirculant3, 4> ccd_coefficient_blocks(std::size_t m, double h) {
    // Same floating-point expressions as build_ccd_blocks, so the two agree bitwise.
    return {{
        {m, 7.0 / 16.0, 1.0, 7.0 / 16.0, 14.0, 16.0, 14.0, 16.0},
        {m, h / 16.0, 0.0, -h / 16.0, 2.0 * h, -4.0 * h, -2.0 * h, 4.0 * h},
        {m, -9.0 / (8.0 * h), 0.0, 9.0 / (8.0 * h), 1.0, 2.0, 1.0, 2.0},
        {m, -1.0 / 8.0, 1.0, -1.0 / 8.0, 0.0, -h, 0.0, h},
    }};
}

Eigen::MatrixXd assemble_full_ccd_matrix(std::size_t m, double h) {
    if (m < 4) throw std::invalid_argument("assemble_full_ccd_matrix: m must be at least 4");
    const auto blocks = ccd_coefficient_blocks(m, h);
    Eigen::MatrixXd out(2 * ix(m), 2 * ix(m));
    out << blocks[0].materialize(), blocks[1].materialize(), blocks[2].materialize(),
        blocks[3].materialize();
    return out;
}

AppendixConstants appendix_constants() {
    const double s = std::sqrt(7.0);
    AppendixConstants c;
    c.t = {
        -136835.0 / 8209824.0 + 421733.0 * s / 36944208.0,
        -416144963942525.0 * s / 864691128455135232.0,
        -46840306656146665409.0 * s / 41595480345574524321792.0 + 6115.0 / 2052456.0,
        -46840306656146665409.0 * s / 41595480345574524321792.0 + 6115.0 / 2052456.0,
        21881309630676858473952943462656048141172736.0 * s /
                4667640113605791995493311956355581953955543731.0 -
            2893014312251833953326629616913521171234816.0 /
                518626679289532443943701328483953550439504859.0,
        -267591658885243284604171740430098010027602763.0 /
                33192107474530076412396885022973027228128310976.0 +
            587650275369111747907115169185577623944244693.0 * s /
                37341120908846335963946495650844655631644349848.0,
        -1799614987336256538927773374693436599301849447.0 * s /
                298728967270770687711571965206757245053154798784.0 -
            442381615984325718712039486584685244485625.0 /
                691502239052709925258268437978604733919339812.0,
        60812707732120381749986704242152551792357469.0 * s /
                18670560454423167981973247825422327815822174924.0 +
            900723013413257827633193252372996530470617.0 /
                922002985403613233677691250638139645225786416.0,
        5235921989442888980950159.0 * s / 183849407004430256490676224.0 +
            41853249163690425155625.0 / 40855423778762279220150272.0,
        640001231916311360619949.0 * s / 551548221013290769472028672.0 +
            33366161622715196997673.0 / 40855423778762279220150272.0,
        69251.0 * s / 2574720.0 + 133.0 / 85824.0,
        37.0 * s / 3456.0,
        -s / 17280.0,
        34711.0 * s / 8582400.0 + 7073.0 / 1430400.0,
        -3197.0 * s / 1029888.0 + 2315.0 / 85824.0,
        -4733.0 * s / 2574720.0 + 479.0 / 107280.0,
        -547.0 * s / 80460.0 - 29.0 / 26820.0,
        2711.0 * s / 16092.0 - 1495.0 / 5364.0,
        547.0 * s / 80460.0 + 29.0 / 26820.0,
    };
    return c;
}

AppendixBReduction appendix_b_reduction(std::size_t n) {
    if (n != 10) throw std::invalid_argument("appendix_b_reduction: only n = 10 is scripted");
    const double s7 = std::sqrt(7.0);
    const double a = 6.0 * s7 / 7.0;
    const double b = 3.0 * s7;
    const Index N = ix(n);

    const auto blocks = ccd_coefficient_blocks(n, 1.0);
    const Eigen::MatrixXd a1 = blocks[0].materialize(), a2 = blocks[1].materialize();
    const Eigen::MatrixXd a3 = blocks[2].materialize(), a4 = blocks[3].materialize();

    // Block row 2 += a * block row 1, then block column 1 += b * block column 2.
    Eigen::MatrixXd a5(2 * N, 2 * N);
    a5 << a1 + b * a2, a2, a3 + a * a1 + b * (a4 + a * a2), a4 + a * a2;

    const double pivot = a5(N + 1, 1);
    for (Index r = N + 1; r < 2 * N - 1; ++r) a5.row(r) /= pivot;
    a5.row(N) -= a5.row(0) * (a5(N, 1) / a5(0, 1));
    a5.row(2 * N - 1) -= a5.row(N - 1) * (a5(2 * N - 1, N - 2) / a5(N - 1, N - 2));
    a5.row(N) /= a5(N, 0);
    a5.row(2 * N - 1) /= a5(2 * N - 1, N - 1);

    AppendixBReduction out;
    out.normalized = a5;
    const Eigen::MatrixXd A = a5.topLeftCorner(N, N), B = a5.topRightCorner(N, N);
    const Eigen::MatrixXd C = a5.bottomLeftCorner(N, N), D = a5.bottomRightCorner(N, N);
    out.identity_block_error = (C - Eigen::MatrixXd::Identity(N, N)).cwiseAbs().maxCoeff();

    Eigen::MatrixXd m6 = A * D - B * C;
    out.schur = m6;

    // Step 1: r1 <- r1 - X r2 + Y r3 - Z r4.
    const double X = (1459440.0 * s7 + 8541848.0) / 598633.0;
    const double Y = (94986.0 * s7 + 1563660.0) / 598633.0;
    const double Z = (55035.0 * s7 + 2841419.0) / 3591798.0;
    {
        const double q = (m6(1, 2) * m6(0, 1) - m6(1, 1) * m6(0, 2)) /
                         (m6(2, 1) * m6(0, 2) - m6(2, 2) * m6(0, 1));
        const double x = m6(0, 1) / (m6(1, 1) + m6(2, 1) * q);
        out.multipliers.push_back({"step1_r2", X, x});
        out.multipliers.push_back({"step1_r3", Y, -q * x});
        out.multipliers.push_back({"step1_r4", Z, 18345.0 * s7 / 1197266.0 + 405917.0 / 513114.0});
    }
    m6.row(0) += -X * m6.row(1) + Y * m6.row(2) - Z * m6.row(3);

    // Step 2: c3 <- c3 + m31 c1.
    const double m31 = 161433961059948782743125.0 * s7 / 638365996543160612814848.0 +
                       386982051292812235294125.0 / 319182998271580306407424.0;
    out.multipliers.push_back({"m31", m31, -m6(0, 2) / m6(0, 0)});
    m6.col(2) += m31 * m6.col(0);

    // Step 3: c5 <- c5 + m51 c1.
    const double m51 = 128698051973330045562453.0 * s7 / 638365996543160612814848.0 +
                       320818233644731054212525.0 / 319182998271580306407424.0;
    out.multipliers.push_back({"m51", m51, -m6(0, 4) / m6(0, 0)});
    m6.col(4) += m51 * m6.col(0);

    // Step 4: r2 <- r2 - m23 r3.
    const double m23 =
        455021090726735024960954900487104822899500.0 * s7 /
            57625186587725827104855703164883727826611651.0 +
        98624527354971701012117024209404389139084220.0 /
            172875559763177481314567109494651183479834953.0;
    out.multipliers.push_back({"m23", m23, m6(1, 2) / m6(2, 2)});
    m6.row(1) -= m23 * m6.row(2);

    // Step 5: c_{n-1} <- c_{n-1} - 3/2 c_n.
    m6.col(N - 2) -= 1.5 * m6.col(N - 1);

    // Step 6: c_{n-2} <- c_{n-2} - k c_n.
    const double k6 = (2269.0 - 570.0 * s7) / 1490.0;
    out.multipliers.push_back({"step6", k6, m6(N - 1, N - 3) / m6(N - 1, N - 1) + 0.1});
    m6.col(N - 3) -= k6 * m6.col(N - 1);

    // Step 7: r_{n-1} <- r_{n-1} - (r_{n-2} + r_n) / 10.
    m6.row(N - 2) -= 0.1 * (m6.row(N - 3) + m6.row(N - 1));

    out.reduced = m6;
    out.min_margin = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < N; ++i) {
        const double margin = 2.0 * std::abs(m6(i, i)) - m6.row(i).cwiseAbs().sum();
        out.margins.push_back(margin);
        out.min_margin = std::min(out.min_margin, margin);
    }
    out.dominant = out.min_margin > 0.0;
    return out;
}

std::vector<SweepRow> nonsingularity_sweep(const std::vector<std::size_t>& sizes,
                                           const std::vector<double>& spacings) {
    std::vector<SweepRow> rows;
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (double h : spacings) {
        for (std::size_t m : sizes) {
            SweepRow row{m, h};
            const Eigen::MatrixXd A = assemble_full_ccd_matrix(m, h);
            const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
            const Eigen::MatrixXd inv = lu.inverse();
            const double norm1 = A.cwiseAbs().colwise().sum().maxCoeff();
            const double inv1 = inv.cwiseAbs().colwise().sum().maxCoeff();
            row.rcond = 1.0 / (norm1 * inv1);
            if (!std::isfinite(row.rcond)) row.rcond = 0.0;

            Eigen::VectorXd rhs(A.rows());
            for (Index i = 0; i < rhs.size(); ++i) rhs(i) = dist(rng);
            const Eigen::VectorXd x = lu.solve(rhs);
            const double normInf = A.cwiseAbs().rowwise().sum().maxCoeff();
            row.backward_error = (A * x - rhs).cwiseAbs().maxCoeff() /
                                 (normInf * x.cwiseAbs().maxCoeff() + rhs.cwiseAbs().maxCoeff());
            if (!std::isfinite(row.backward_error)) row.backward_error = 1.0;
            row.passed = row.rcond > kRcondThreshold && row.backward_error < 1e-12;
            rows.push_back(row);
        }
    }
    return rows;
}

AuditReport run_audit(const std::vector<std::size_t>& sizes, const std::vector<double>& spacings) {
    AuditReport r;
    r.reduction = appendix_b_reduction(10);
    r.constants = appendix_constants();
    r.sweep = nonsingularity_sweep(sizes, spacings);
    r.passed = r.reduction.dominant &&
               std::all_of(r.sweep.begin(), r.sweep.end(), [](const SweepRow& s) { return s.passed; });
    return r;
}

std::string audit_report_json(const AuditReport& report) {
    using nlohmann::json;
    auto matrix = [](const Eigen::MatrixXd& m) {
        json rows = json::array();
        for (Index i = 0; i < m.rows(); ++i) {
            json row = json::array();
            for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
            rows.push_back(row);
        }
        return rows;
    };

    json doc;
    const auto& red = report.reduction;
    doc["reduction"]["n"] = red.reduced.rows();
    doc["reduction"]["matrix"] = matrix(red.reduced);
    doc["reduction"]["identity_block_error"] = red.identity_block_error;
    doc["reduction"]["margins"] = red.margins;
    doc["reduction"]["min_margin"] = red.min_margin;
    doc["reduction"]["strictly_diagonally_dominant"] = red.dominant;
    json mult = json::array();
    for (const auto& m : red.multipliers)
        mult.push_back({{"name", m.name}, {"printed", m.printed}, {"derived", m.derived},
                        {"drift", std::abs(m.printed - m.derived)}});
    doc["reduction"]["multipliers"] = mult;

    json consts = json::array();
    for (std::size_t k = 0; k < report.constants.t.size(); ++k) {
        const auto [i, j] = AppendixConstants::position[k];
        const double replay = red.reduced(ix(i), ix(j));
        consts.push_back({{"name", fmt::format("T{}", k + 1)},
                          {"row", i},
                          {"col", j},
                          {"printed", report.constants.t[k]},
                          {"replay", replay},
                          {"difference", std::abs(report.constants.t[k] - replay)}});
    }
    doc["constants"] = consts;

    json sweep = json::array();
    for (const auto& s : report.sweep)
        sweep.push_back({{"m", s.m}, {"h", s.h}, {"rcond", s.rcond},
                         {"backward_error", s.backward_error}, {"passed", s.passed}});
    doc["sweep"] = sweep;
    doc["rcond_threshold"] = kRcondThreshold;
    doc["passed"] = report.passed;
    return doc.dump(2);
}

}  // namespace ccdtvd

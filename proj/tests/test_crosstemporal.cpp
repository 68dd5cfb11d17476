#include <doctest.h>

#include "ctrec/crosstemporal.hpp"
#include "ctrec/errors.hpp"
#include "support.hpp"

using namespace ctrec;
using namespace testing;

namespace {

MatrixXd printed_S_check() {
    MatrixXd Cc(13, 8);
    Cc << 1, 1, 1, 1, 1, 1, 1, 1,
          1, 1, 0, 0, 1, 1, 0, 0,
          0, 0, 1, 1, 0, 0, 1, 1,
          1, 0, 0, 0, 1, 0, 0, 0,
          0, 1, 0, 0, 0, 1, 0, 0,
          0, 0, 1, 0, 0, 0, 1, 0,
          0, 0, 0, 1, 0, 0, 0, 1,
          1, 1, 1, 1, 0, 0, 0, 0,
          1, 1, 0, 0, 0, 0, 0, 0,
          0, 0, 1, 1, 0, 0, 0, 0,
          0, 0, 0, 0, 1, 1, 1, 1,
          0, 0, 0, 0, 1, 1, 0, 0,
          0, 0, 0, 0, 0, 0, 1, 1;
    MatrixXd S(21, 8);
    S << Cc, MatrixXd::Identity(8, 8);
    return S;
}

MatrixXd printed_Z1() {
    MatrixXd Z(3, 7);
    Z << 1, 0, 0, -1, -1, -1, -1, 0, 1, 0, -1, -1, 0, 0, 0, 0, 1, 0, 0, -1, -1;
    return Z;
}

} // namespace

TEST_CASE("toy cross-temporal structure reproduces the printed matrices") {
    const auto xts = build_cross_temporal(toy_cs(), build_temporal(4), 1);
    const MatrixXd S = printed_S_check();
    CHECK(MatrixXd(xts.struct_summing) == S);
    CHECK(MatrixXd(xts.struct_agg) == S.topRows(13));

    const MatrixXd I7 = MatrixXd::Identity(7, 7), Z = printed_Z1();
    MatrixXd Hb = MatrixXd::Zero(16, 21);
    Hb.block(0, 0, 7, 7) = I7;
    Hb.block(0, 7, 7, 7) = -I7;
    Hb.block(0, 14, 7, 7) = -I7;
    for (int i = 0; i < 3; ++i)
        Hb.block(7 + 3 * i, 7 * i, 3, 7) = Z;
    CHECK(MatrixXd(xts.kernel_redundant) == Hb);

    MatrixXd Istar = MatrixXd::Zero(4, 7);
    Istar.rightCols(4).setIdentity();
    MatrixXd H = MatrixXd::Zero(13, 21);
    H.block(0, 0, 4, 7) = Istar;
    H.block(0, 7, 4, 7) = -Istar;
    H.block(0, 14, 4, 7) = -Istar;
    for (int i = 0; i < 3; ++i)
        H.block(4 + 3 * i, 7 * i, 3, 7) = Z;
    CHECK(MatrixXd(xts.kernel) == H);
    CHECK(numerical_rank(H) == 13);
    CHECK(numerical_rank(Hb) == 13);

    MatrixXd Q = MatrixXd::Zero(21, 21);
    Q.topLeftCorner(10, 10).setIdentity();
    for (int r = 0; r < 4; ++r)
        Q(10 + r, 13 + r) = 1;
    for (int r = 0; r < 3; ++r)
        Q(14 + r, 10 + r) = 1;
    Q.bottomRightCorner(4, 4).setIdentity();
    CHECK(xts.struct_perm.dense() == Q);
    CHECK(max_abs(MatrixXd(xts.kernel) * Q * S) == 0.0);
}

TEST_CASE("commutation matrix") {
    const auto P = commutation_matrix(2, 3);
    MatrixXd X(2, 3);
    X << 11, 12, 13, 21, 22, 23;
    VectorXd x(6), xs(6);
    x << 11, 21, 12, 22, 13, 23;
    xs << 11, 12, 13, 21, 22, 23;
    CHECK(Eigen::Map<VectorXd>(X.data(), 6) == x);
    CHECK(P.apply(x) == xs);
    MatrixXd printed(6, 6);
    printed << 1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0,
        0, 1;
    CHECK(commutation_matrix(3, 2).dense() == printed);
    CHECK(P.dense() == printed.transpose());
    CHECK(commutation_matrix(1, 5).dense() == MatrixXd::Identity(5, 5));
    const MatrixXd C33 = commutation_matrix(3, 3).dense();
    CHECK(C33 * C33 == MatrixXd::Identity(9, 9));
    for (Index r = 1; r < 5; ++r)
        for (Index c = 1; c < 5; ++c) {
            const MatrixXd A = commutation_matrix(r, c).dense(), B = commutation_matrix(c, r).dense();
            CHECK(A * B == MatrixXd::Identity(r * c, r * c));
            CHECK(A.transpose() * A == MatrixXd::Identity(r * c, r * c));
        }
}

TEST_CASE("tableau vectorizations are related by P") {
    std::mt19937_64 rng(4);
    const auto xts = build_cross_temporal(toy_cs(), build_temporal(4), 2);
    const ForecastTableau t{random_normal(rng, 3, xts.cols()), "base"};
    CHECK(xts.commutation.apply(t.vec_by_time()) == t.vec_by_variable());
    CHECK(ForecastTableau::from_by_variable(t.vec_by_variable(), 3, xts.cols(), "x").values == t.values);
}

TEST_CASE("small structures") {
    const auto single = build_cross_temporal(build_cross_sectional(MatrixXd::Ones(1, 1), {"T", "B"}), build_temporal(1), 1);
    MatrixXd H(1, 2);
    H << 1, -1;
    CHECK(MatrixXd(single.kernel) == H);
    const auto m2 = build_cross_temporal(toy_cs(), build_temporal(2), 1);
    CHECK(m2.kernel.rows() == 5);
    CHECK(numerical_rank(MatrixXd(m2.kernel)) == 5);
    CHECK(m2.expected_rank() == 5);
}

TEST_CASE("property: structure invariants on random instances") {
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<Index> na(1, 3), nb(2, 4), hh(1, 2);
    for (int rep = 0; rep < 25; ++rep) {
        const Index a = na(rng), b = nb(rng), h = hh(rng);
        const int m = std::vector<int>{1, 2, 3, 4}[static_cast<size_t>(rep % 4)];
        const auto cs = build_cross_sectional(random_agg(rng, a, b), default_labels(a, b));
        const auto xts = build_cross_temporal(cs, build_temporal(m), h);
        const MatrixXd H = MatrixXd(xts.kernel), Hb = MatrixXd(xts.kernel_redundant);
        CHECK(H.rows() == h * (a * m + cs.n() * xts.ts.k_star));
        CHECK(numerical_rank(H) == H.rows());
        const MatrixXd Q = xts.struct_perm.dense(), P = xts.commutation.dense();
        CHECK(Q.transpose() * Q == MatrixXd::Identity(Q.rows(), Q.rows()));
        CHECK(P.transpose() * P == MatrixXd::Identity(P.rows(), P.rows()));
        const MatrixXd QS = Q * MatrixXd(xts.struct_summing);
        CHECK(max_abs(H * QS) <= 1e-10);
        CHECK(numerical_rank(QS) == b * m * h);
        CHECK(QS.cols() == xts.dim() - H.rows());
        // kernels share one null space: each annihilates a basis of the other's
        const MatrixXd NH = Eigen::FullPivLU<MatrixXd>(H).kernel();
        const MatrixXd NHb = Eigen::FullPivLU<MatrixXd>(Hb).kernel();
        CHECK(max_abs(Hb * NH) <= 1e-10);
        CHECK(max_abs(H * NHb) <= 1e-10);
        // rows of H_breve lie in the row space of H
        MatrixXd stacked(H.rows() + Hb.rows(), H.cols());
        stacked << H, Hb;
        CHECK(numerical_rank(stacked) == H.rows());
    }
}

TEST_CASE("bottom-up example and forms") {
    const auto xts = build_cross_temporal(toy_cs(), build_temporal(4), 1);
    MatrixXd B(2, 4);
    B << 1, 2, 3, 4, 5, 6, 7, 8;
    const MatrixXd Y = bottom_up(B, xts).values;
    CHECK(Y(0, 0) == 36);
    CHECK(Y(1, 0) == 10);
    CHECK(Y(2, 1) == 11);
    CHECK(Y(2, 2) == 15);
    VectorXd xq(4);
    xq << 6, 8, 10, 12;
    CHECK(Y.row(0).tail(4).transpose() == xq);
    CHECK(bottom_up(MatrixXd::Zero(2, 4), xts).values.isZero(0.0));
    CHECK(max_abs(bottom_up_structural(B, xts).values - Y) == 0.0);
    const auto rep = coherence_report(Y, xts);
    CHECK(rep.d_cs <= 1e-12);
    CHECK(rep.d_te <= 1e-12);
    CHECK(hf_bottom(Y, xts) == B);
    CHECK_THROWS_AS(bottom_up(MatrixXd::Zero(2, 3), xts), Error);
}

TEST_CASE("coherence report on perturbed input") {
    std::mt19937_64 rng(13);
    const auto xts = build_cross_temporal(toy_cs(), build_temporal(4), 2);
    const MatrixXd Y = bottom_up(random_normal(rng, 2, 8), xts).values + random_normal(rng, 3, 14, 0.1);
    const auto r = coherence_report(Y, xts);
    CHECK(r.d_cs > 0.0);
    CHECK(r.d_te > 0.0);
    CHECK(r.max_cs <= r.d_cs);
    CHECK_THROWS_AS(coherence_report(MatrixXd::Zero(3, 7), xts), Error);
}

TEST_CASE("raw constraint path") {
    const auto ts = build_temporal(1);
    MatrixXd K(1, 4);
    K << 1, -1, -1, 0;
    const auto xts = build_cross_temporal_raw(K, 4, ts, 1);
    CHECK(xts.raw);
    CHECK_FALSE(xts.structural());
    MatrixXd bad(2, 4);
    bad << K, K;
    CHECK_THROWS_AS(build_cross_temporal_raw(bad, 4, ts, 1), Error);
    CHECK_THROWS_AS(bottom_up(MatrixXd::Zero(1, 1), xts), Error);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "plantedrank/peel.hpp"

using namespace plantedrank;

namespace {

Matrix threshold_mask(const Matrix& m, int u) {
    Matrix mask(m.rows, m.cols);
    const double level = std::ldexp(1.0, -u);
    for (std::size_t i = 0; i < m.data.size(); ++i)
        mask.data[i] = m.data[i] >= level ? 1.0 : 0.0;
    return mask;
}

void check_peel_invariants(const Matrix& m, int p, const PeelResult& res) {
    for (int i : res.block.rows)
        for (int k : res.block.cols) CHECK(m.at(i, k) >= res.block.lambda);
    const double cells = static_cast<double>(res.block.rows.size()) *
                         static_cast<double>(res.block.cols.size());
    const double lhs = 8.0 * p * std::log2(static_cast<double>(std::min(m.rows, m.cols))) *
                           res.block.lambda * res.block.lambda * cells +
                       std::ldexp(static_cast<double>(m.rows) * m.cols, -2 * p);
    CHECK(lhs + 1e-9 >= frobenius_sq(m));
    CHECK(res.lhs == doctest::Approx(lhs).epsilon(1e-12));
}

}  // namespace

TEST_CASE("level selection") {
    SUBCASE("all-ones picks the top level") {
        const LevelSelection sel = level_select(Matrix(4, 4, 1.0), 3);
        CHECK(sel.u_star == 1);
        CHECK(sel.ones == 16);
        for (double v : sel.mask.data) CHECK(v == 1.0);
    }
    SUBCASE("all-zeros degenerates to an empty mask") {
        const LevelSelection sel = level_select(Matrix(4, 4, 0.0), 3);
        CHECK(sel.u_star == 1);
        CHECK(sel.ones == 0);
    }
    SUBCASE("selected mask matches direct thresholding and stays isotonic") {
        for (int trial = 0; trial < 30; ++trial) {
            Rng rng(derive_seed(10, trial, "level"));
            const Matrix m = gen_isotonic(6, 5, rng.next_u64(),
                                          IsotonicKind::ColumnSortedUniform);
            const int p = 1 + static_cast<int>(rng.uniform_int(6));
            const LevelSelection sel = level_select(m, p);
            CHECK(sel.mask.data == threshold_mask(m, sel.u_star).data);
            CHECK(is_isotonic(sel.mask));
            for (int u = 1; u < p; ++u) {  // nested level sets
                const Matrix a = threshold_mask(m, u), b = threshold_mask(m, u + 1);
                for (std::size_t i = 0; i < a.data.size(); ++i) CHECK(a.data[i] <= b.data[i]);
            }
        }
    }
    CHECK_THROWS_AS(level_select(Matrix(2, 2, 0.5), 0), InvalidArgument);
    CHECK_THROWS_AS(level_select(Matrix(0, 0), 1), InvalidArgument);
}

TEST_CASE("dyadic block extraction") {
    SUBCASE("full mask") {
        const DyadicBlock dyad = dyadic_block(Matrix(6, 5, 1.0));
        CHECK(dyad.i_star == 4);  // 2^floor(log2 6)
        CHECK(dyad.j_star == 5);
        for (int k = 0; k < 5; ++k) CHECK(dyad.pi_col(k) == k);
    }
    SUBCASE("single cell") {
        Matrix mask(3, 3, 0.0);
        mask.at(0, 0) = 1.0;
        const DyadicBlock dyad = dyadic_block(mask);
        CHECK(dyad.i_star == 1);
        CHECK(dyad.j_star == 1);
    }
    SUBCASE("empty mask") {
        const DyadicBlock dyad = dyadic_block(Matrix(4, 4, 0.0));
        CHECK(dyad.i_star == 0);
        CHECK(dyad.j_star == 0);
    }
    SUBCASE("sorted mask is bi-isotonic and the block sits inside it") {
        for (int trial = 0; trial < 30; ++trial) {
            Rng rng(derive_seed(11, trial, "dyadic"));
            const int n = 2 + static_cast<int>(rng.uniform_int(7));
            const int d = 1 + static_cast<int>(rng.uniform_int(7));
            Matrix mask(n, d);
            for (int k = 0; k < d; ++k) {
                const int h = static_cast<int>(rng.uniform_int(n + 1));
                for (int i = 0; i < h; ++i) mask.at(i, k) = 1.0;
            }
            const DyadicBlock dyad = dyadic_block(mask);
            const Matrix sorted = [&] {
                Matrix s(n, d);
                const Permutation order = dyad.pi_col.inverse();
                for (int k = 0; k < d; ++k)
                    for (int i = 0; i < n; ++i) s.at(i, k) = mask.at(i, order(k));
                return s;
            }();
            for (int i = 0; i < n; ++i)
                for (int k = 0; k + 1 < d; ++k) CHECK(sorted.at(i, k) >= sorted.at(i, k + 1));
            CHECK(is_isotonic(sorted));
            for (int i = 0; i < dyad.i_star; ++i)
                for (int k = 0; k < dyad.j_star; ++k) CHECK(sorted.at(i, k) == 1.0);
        }
    }
    CHECK_THROWS_AS(dyadic_block(Matrix(2, 2, 0.5)), InvalidArgument);
}

TEST_CASE("peel hand traces") {
    SUBCASE("all-ones 8x8 with p=3") {
        const PeelResult res = peel(Matrix(8, 8, 1.0), 3);
        CHECK(res.block.lambda == 0.5);
        CHECK(res.block.rows.size() == 8);
        CHECK(res.block.cols.size() == 8);
        CHECK(res.lhs == doctest::Approx(1153.0).epsilon(1e-12));
        CHECK(res.rhs == doctest::Approx(64.0).epsilon(1e-12));
    }
    SUBCASE("all-zeros gives an empty block") {
        const PeelResult res = peel(Matrix(4, 6, 0.0), 2);
        CHECK(res.block.rows.empty());
        CHECK(res.block.cols.empty());
        CHECK(res.rhs == 0.0);
        CHECK(res.lhs >= 0.0);
    }
    SUBCASE("single-row matrices skip the inequality check") {
        const PeelResult res = peel(Matrix(1, 5, 0.9), 4);
        CHECK_FALSE(res.inequality_checked);
        for (int k : res.block.cols) CHECK(Matrix(1, 5, 0.9).at(0, k) >= res.block.lambda);
    }
    CHECK_THROWS_AS(peel(Matrix(2, 2, 0.5), 0), InvalidArgument);
    SUBCASE("rejects non-permuted-isotonic input") {
        Matrix bad(2, 2);
        bad.at(0, 1) = 1.0;
        bad.at(1, 0) = 1.0;
        CHECK_THROWS_AS(peel(bad, 2), InvalidArgument);
    }
}

TEST_CASE("peel property suite on shuffled isotonic draws") {
    for (int trial = 0; trial < 80; ++trial) {
        Rng rng(derive_seed(12, trial, "peel-prop"));
        const int sizes[] = {8, 16, 32};
        const int n = sizes[rng.uniform_int(3)];
        const int d = sizes[rng.uniform_int(3)];
        const int p = 1 + static_cast<int>(rng.uniform_int(6));
        const auto kind = trial % 2 == 0 ? IsotonicKind::ColumnSortedUniform
                                         : IsotonicKind::CumulativeDecrements;
        const Matrix sorted = gen_isotonic(n, d, rng.next_u64(), kind);
        const Permutation pi(rng.permutation(n));
        const Matrix m = apply_row_permutation(sorted, pi, false);
        const PeelResult res = peel(m, p);
        check_peel_invariants(m, p, res);
    }
}

TEST_CASE("peel with more rows than columns") {
    for (int trial = 0; trial < 20; ++trial) {
        Rng rng(derive_seed(13, trial, "peel-tall"));
        const Matrix sorted = gen_isotonic(24, 5, rng.next_u64(),
                                           IsotonicKind::ColumnSortedUniform);
        const Permutation pi(rng.permutation(24));
        const Matrix m = apply_row_permutation(sorted, pi, false);
        const PeelResult res = peel(m, 3);
        check_peel_invariants(m, 3, res);
    }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "plantedrank/rank.hpp"

using namespace plantedrank;

namespace {

ObservationMatrix from_rows(std::initializer_list<std::initializer_list<int>> rows) {
    const int n = static_cast<int>(rows.size());
    const int d = static_cast<int>(rows.begin()->size());
    ObservationMatrix y(n, d);
    int i = 0;
    for (const auto& row : rows) {
        int k = 0;
        for (int v : row) y.at(i, k++) = static_cast<std::int8_t>(v);
        ++i;
    }
    return y;
}

// Exact projection of one column onto the non-increasing [0,1] set: enumerate
// consecutive-block partitions, clip each block mean, keep the best feasible
// candidate. The true projection is blockwise constant, so it is in this set.
std::vector<double> brute_force_project(const std::vector<double>& x) {
    const int n = static_cast<int>(x.size());
    std::vector<double> best;
    double best_dist = std::numeric_limits<double>::infinity();
    for (unsigned cuts = 0; cuts < (1u << (n - 1)); ++cuts) {
        std::vector<double> candidate(n);
        int start = 0;
        for (int i = 0; i < n; ++i) {
            const bool end_block = i == n - 1 || (cuts >> i & 1);
            if (!end_block) continue;
            double mean = 0.0;
            for (int j = start; j <= i; ++j) mean += x[j];
            mean /= (i - start + 1);
            const double v = std::clamp(mean, 0.0, 1.0);
            for (int j = start; j <= i; ++j) candidate[j] = v;
            start = i + 1;
        }
        bool feasible = true;
        for (int i = 0; i + 1 < n; ++i)
            if (candidate[i] < candidate[i + 1]) feasible = false;
        if (!feasible) continue;
        double dist = 0.0;
        for (int i = 0; i < n; ++i) dist += (candidate[i] - x[i]) * (candidate[i] - x[i]);
        if (dist < best_dist) {
            best_dist = dist;
            best = candidate;
        }
    }
    return best;
}

Matrix column_matrix(const std::vector<double>& x) {
    Matrix m(static_cast<int>(x.size()), 1);
    m.data = x;
    return m;
}

}  // namespace

TEST_CASE("row-sum ranking") {
    CHECK(rank_row_sums(from_rows({{1, 1}, {-1, -1}})).map == std::vector<int>{0, 1});
    CHECK(rank_row_sums(from_rows({{1, -1}, {1, -1}, {1, -1}})).map ==
          std::vector<int>{0, 1, 2});  // ties keep index order
    const ObservationMatrix y = from_rows({{-1, -1}, {1, -1}, {1, 1}});
    const Permutation pi = rank_row_sums(y);
    CHECK(pi(2) == 0);
    CHECK(pi(0) == 2);
}

TEST_CASE("spectral ranking") {
    SUBCASE("two separated rows") {
        const auto res = rank_spectral(from_rows({{1, 1}, {-1, -1}}));
        CHECK(res.converged);
        CHECK(res.perm.map == std::vector<int>{0, 1});
    }
    SUBCASE("equal rows collapse to the identity") {
        const auto res = rank_spectral(from_rows({{1, -1}, {1, -1}}));
        CHECK(res.perm.map == std::vector<int>{0, 1});
    }
    SUBCASE("noiseless rank-one signals are recovered exactly") {
        for (int trial = 0; trial < 100; ++trial) {
            Rng rng(derive_seed(40, trial, "rank-one"));
            const int n = 4 + static_cast<int>(rng.uniform_int(8));
            const int d = 3 + static_cast<int>(rng.uniform_int(8));
            std::vector<double> u(n), v(d);
            for (double& x : u) x = rng.uniform01();
            std::sort(u.begin(), u.end(), std::greater<>());
            for (int i = 0; i + 1 < n; ++i) u[i] += 0.05 * (n - i);  // strictly decreasing
            for (double& x : v) x = 0.1 + 0.9 * rng.uniform01();
            Matrix m(n, d);
            for (int i = 0; i < n; ++i)
                for (int k = 0; k < d; ++k) m.at(i, k) = u[i] * v[k];
            const auto res = rank_spectral(m);
            CHECK(res.perm.map == Permutation::identity(n).map);
        }
    }
    SUBCASE("row-permuted input gives consistently permuted output") {
        Rng rng(derive_seed(41, 0, "spectral-equivariance"));
        for (int trial = 0; trial < 20; ++trial) {
            const int n = 6, d = 24;
            Matrix m(n, d);
            for (int i = 0; i < n; ++i)
                for (int k = 0; k < d; ++k)
                    m.at(i, k) = (n - i) * 0.1 + 0.05 * rng.uniform01();
            const Permutation sigma(rng.permutation(n));
            const Matrix permuted = apply_row_permutation(m, sigma, true);
            const Permutation pa = rank_spectral(m).perm;
            const Permutation pb = rank_spectral(permuted).perm;
            for (int j = 0; j < n; ++j) CHECK(pb(sigma(j)) == pa(j));
        }
    }
    CHECK_THROWS_AS(rank_spectral(from_rows({{1, 1}})), InvalidArgument);
}

TEST_CASE("isotonic projection") {
    SUBCASE("feasible points are fixed") {
        Matrix m(3, 2);
        m.at(0, 0) = 0.9; m.at(0, 1) = 0.5;
        m.at(1, 0) = 0.4; m.at(1, 1) = 0.5;
        m.at(2, 0) = 0.1; m.at(2, 1) = 0.2;
        CHECK(project_isotonic(m).data == m.data);
    }
    SUBCASE("hand-pooled columns") {
        const Matrix a = project_isotonic(column_matrix({0.2, 0.8}));
        CHECK(a.at(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(a.at(1, 0) == doctest::Approx(0.5).epsilon(1e-15));
        const Matrix b = project_isotonic(column_matrix({-1.0, 1.0}));
        CHECK(b.at(0, 0) == 0.0);
        CHECK(b.at(1, 0) == 0.0);
    }
    SUBCASE("idempotent and non-expansive") {
        Rng rng(derive_seed(42, 0, "projection"));
        for (int trial = 0; trial < 200; ++trial) {
            const int n = 2 + static_cast<int>(rng.uniform_int(9));
            Matrix a(n, 2), b(n, 2);
            for (double& v : a.data) v = 3.0 * rng.uniform01() - 1.0;
            for (double& v : b.data) v = 3.0 * rng.uniform01() - 1.0;
            const Matrix pa = project_isotonic(a), pb = project_isotonic(b);
            CHECK(is_isotonic(pa));
            CHECK(in_unit_range(pa));
            double drift = 0.0;
            const Matrix ppa = project_isotonic(pa);
            for (std::size_t i = 0; i < pa.data.size(); ++i)
                drift = std::max(drift, std::abs(ppa.data[i] - pa.data[i]));
            CHECK(drift <= 1e-12);
            CHECK(std::sqrt(reconstruction_loss(pa, pb)) <=
                  std::sqrt(reconstruction_loss(a, b)) + 1e-12);
        }
    }
    SUBCASE("matches the brute-force oracle on length-6 columns") {
        Rng rng(derive_seed(43, 0, "projection-oracle"));
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> x(6);
            for (double& v : x) v = 3.0 * rng.uniform01() - 1.0;
            const Matrix got = project_isotonic(column_matrix(x));
            const std::vector<double> want = brute_force_project(x);
            for (int i = 0; i < 6; ++i)
                CHECK(got.at(i, 0) == doctest::Approx(want[i]).epsilon(1e-6));
        }
    }
}

TEST_CASE("reconstruction") {
    ObservationMatrix ones(3, 4, 1), negs(3, 4, -1);
    const Permutation pi(std::vector<int>{2, 0, 1});
    for (double v : reconstruct(ones, pi).data) CHECK(v == 1.0);
    for (double v : reconstruct(negs, pi).data) CHECK(v == 0.0);
    CHECK_THROWS_AS(reconstruct(ones, Permutation::identity(2)), InvalidArgument);

    SUBCASE("the oracle permutation reconstructs better than a random one") {
        double oracle_total = 0.0, random_total = 0.0;
        for (int rep = 0; rep < 200; ++rep) {
            Rng rng(derive_seed(44, rep, "reco-paired"));
            InstanceSpec spec;
            spec.kind = InstanceSpec::Kind::Block;
            spec.n = 16;
            spec.d = 16;
            spec.lambda = 0.8;
            spec.kn = 8;
            spec.kd = 8;
            const DrawnInstance inst = draw_instance(spec, rng);
            const ObservationMatrix y = sample_observations(inst.signal, rng);
            oracle_total +=
                reconstruction_loss(reconstruct(y, inst.oracle), inst.signal);
            const Permutation random_pi(rng.permutation(16));
            random_total +=
                reconstruction_loss(reconstruct(y, random_pi), inst.signal);
        }
        CHECK(oracle_total < random_total);
    }
}

TEST_CASE("pipeline evaluation") {
    SUBCASE("separated deterministic instance has zero ranking loss") {
        InstanceSpec spec;
        spec.kind = InstanceSpec::Kind::Block;
        spec.n = 8;
        spec.d = 64;
        spec.lambda = 1.0;
        spec.kn = 4;
        spec.kd = 64;  // block rows read all +1; a noise row ties with
                       // probability 2^-64, so separation is effectively sure
        RankMethod method;
        method.tag = RankMethod::Tag::RowSum;
        const PipelineReport report = evaluate_pipeline(spec, method, 100, 50u);
        CHECK(report.ranking.mean == 0.0);
    }
    SUBCASE("deterministic given the seed") {
        InstanceSpec spec;
        spec.kind = InstanceSpec::Kind::Hard;
        spec.n = 16;
        spec.d = 16;
        spec.m = 4;
        RankMethod method;
        method.tag = RankMethod::Tag::Spectral;
        const PipelineReport a = evaluate_pipeline(spec, method, 20, 51u);
        const PipelineReport b = evaluate_pipeline(spec, method, 20, 51u);
        CHECK(a.ranking_losses == b.ranking_losses);
        CHECK(a.reconstruction_losses == b.reconstruction_losses);
    }
}

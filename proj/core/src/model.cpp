#include "plantedrank/model.hpp"

#include <algorithm>
#include <cmath>

namespace plantedrank {

namespace {

Matrix permute_rows_impl(const Matrix& m, const Permutation& pi, bool inverse) {
    if (pi.size() != m.rows) throw InvalidArgument("permutation length does not match row count");
    Matrix out(m.rows, m.cols);
    for (int j = 0; j < m.rows; ++j) {
        const int dst = inverse ? pi(j) : j;
        const int src = inverse ? j : pi(j);
        for (int k = 0; k < m.cols; ++k) out.at(dst, k) = m.at(src, k);
    }
    return out;
}

}  // namespace

Matrix apply_row_permutation(const Matrix& m, const Permutation& pi, bool inverse) {
    if (!pi.is_valid()) throw InvalidArgument("not a permutation");
    return permute_rows_impl(m, pi, inverse);
}

ObservationMatrix apply_row_permutation(const ObservationMatrix& y, const Permutation& pi,
                                        bool inverse) {
    if (!pi.is_valid() || pi.size() != y.rows)
        throw InvalidArgument("permutation length does not match row count");
    ObservationMatrix out(y.rows, y.cols);
    for (int j = 0; j < y.rows; ++j) {
        const int dst = inverse ? pi(j) : j;
        const int src = inverse ? j : pi(j);
        for (int k = 0; k < y.cols; ++k) out.at(dst, k) = y.at(src, k);
    }
    return out;
}

ObservationMatrix sample_observations(const Matrix& m, Rng& rng) {
    if (!in_unit_range(m)) throw InvalidArgument("signal entries must lie in [0,1]");
    ObservationMatrix y(m.rows, m.cols);
    for (std::size_t i = 0; i < m.data.size(); ++i)
        y.data[i] = rng.bernoulli((1.0 + m.data[i]) / 2.0) ? 1 : -1;
    return y;
}

ObservationMatrix sample_observations(const Matrix& m, std::uint64_t seed) {
    Rng rng(seed);
    return sample_observations(m, rng);
}

Matrix make_block_matrix(const BlockSpec& spec, int n, int d) {
    if (n < 1 || d < 1) throw InvalidArgument("block matrix needs n,d >= 1");
    if (!(spec.lambda > 0.0 && spec.lambda <= 1.0))
        throw InvalidArgument("block height must lie in (0,1]");
    Matrix m(n, d);
    for (int i : spec.rows)
        if (i < 0 || i >= n) throw InvalidArgument("block row index out of range");
    for (int k : spec.cols)
        if (k < 0 || k >= d) throw InvalidArgument("block column index out of range");
    for (int i : spec.rows)
        for (int k : spec.cols) m.at(i, k) = spec.lambda;
    return m;
}

bool is_isotonic(const Matrix& m) {
    for (int i = 0; i + 1 < m.rows; ++i)
        for (int k = 0; k < m.cols; ++k)
            if (m.at(i, k) < m.at(i + 1, k)) return false;
    return true;
}

PermutedIsotonicResult is_permuted_isotonic(const Matrix& m) {
    std::vector<double> row_sums(m.rows, 0.0);
    for (int i = 0; i < m.rows; ++i)
        for (int k = 0; k < m.cols; ++k) row_sums[i] += m.at(i, k);

    std::vector<int> order(m.rows);
    for (int i = 0; i < m.rows; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return row_sums[a] > row_sums[b]; });

    PermutedIsotonicResult res;
    for (int i = 0; i + 1 < m.rows; ++i) {
        for (int k = 0; k < m.cols; ++k) {
            if (m.at(order[i], k) < m.at(order[i + 1], k)) {
                res.offending_row_a = order[i];
                res.offending_row_b = order[i + 1];
                return res;
            }
        }
    }
    // order[i] is the original row placed at sorted position i, so the witness
    // pi satisfies pi^{-1}(i) = order[i].
    res.ok = true;
    res.witness = Permutation(order).inverse();
    return res;
}

Matrix gen_isotonic(int n, int d, std::uint64_t seed, IsotonicKind kind) {
    if (n < 1 || d < 1) throw InvalidArgument("gen_isotonic needs n,d >= 1");
    Rng rng(seed);
    Matrix m(n, d);
    if (kind == IsotonicKind::ColumnSortedUniform) {
        for (double& v : m.data) v = rng.uniform01();
        std::vector<double> col(n);
        for (int k = 0; k < d; ++k) {
            for (int i = 0; i < n; ++i) col[i] = m.at(i, k);
            std::sort(col.begin(), col.end(), std::greater<>());
            for (int i = 0; i < n; ++i) m.at(i, k) = col[i];
        }
    } else {
        for (int k = 0; k < d; ++k) m.at(0, k) = rng.uniform01();
        const double step = 2.0 / n;
        for (int i = 1; i < n; ++i)
            for (int k = 0; k < d; ++k)
                m.at(i, k) = std::max(0.0, m.at(i - 1, k) - rng.uniform01() * step);
    }
    return m;
}

HardInstance gen_hard_instance(int n, int d, int m, std::uint64_t seed) {
    if (m < 1 || n < 1 || d < 1 || n % m != 0)
        throw InvalidArgument("gen_hard_instance needs m >= 1 dividing n");
    HardInstance inst;
    inst.lambda = 1.0 / m;
    inst.group_rows = n / m;
    inst.block_rows = std::max(1, std::min(m * m, n / (2 * m)));
    inst.block_cols = std::min(static_cast<int>(std::ceil(std::sqrt(double(d)) * m)), d);

    Rng rng(seed);
    // Sorted (isotonic) layout: groups from the highest base value down, block
    // rows first within each group. Any choice of block columns keeps the rows
    // a chain in the coordinatewise order.
    Matrix sorted(n, d);
    int row = 0;
    for (int l = m; l >= 1; --l) {
        const double base = inst.lambda * (l - 1);
        const std::vector<int> block_cols = rng.subset(d, inst.block_cols);
        for (int g = 0; g < inst.group_rows; ++g, ++row) {
            for (int k = 0; k < d; ++k) sorted.at(row, k) = base;
            if (g < inst.block_rows)
                for (int k : block_cols) sorted.at(row, k) = base + inst.lambda;
        }
    }

    Permutation pi(rng.permutation(n));
    inst.signal = apply_row_permutation(sorted, pi, /*inverse=*/false);
    inst.oracle = pi;
    return inst;
}

double ranking_loss(const Matrix& m, const Permutation& pi_hat, const Permutation& pi_star) {
    if (pi_hat.size() != m.rows || pi_star.size() != m.rows)
        throw InvalidArgument("permutation length does not match row count");
    const Matrix oracle_sorted = apply_row_permutation(m, pi_star, /*inverse=*/true);
    if (!is_isotonic(oracle_sorted))
        throw InvalidArgument("pi_star is not an oracle permutation for this matrix");
    const Matrix hat_sorted = apply_row_permutation(m, pi_hat, /*inverse=*/true);
    return reconstruction_loss(hat_sorted, oracle_sorted);
}

double reconstruction_loss(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw InvalidArgument("shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double diff = a.data[i] - b.data[i];
        s += diff * diff;
    }
    return s;
}

}  // namespace plantedrank

#include "plantedrank/peel.hpp"

#include <algorithm>
#include <cmath>

namespace plantedrank {

LevelSelection level_select(const Matrix& m, int p) {
    if (p < 1) throw InvalidArgument("level_select needs p >= 1");
    if (m.rows < 1 || m.cols < 1) throw InvalidArgument("level_select needs a nonempty matrix");
    if (!is_isotonic(m)) throw InvalidArgument("level_select input must be isotonic");

    int best_u = 1;
    double best_score = -1.0;
    long long best_ones = 0;
    for (int u = 1; u <= p; ++u) {
        const double level = std::ldexp(1.0, -u);  // 2^{-u}
        long long ones = 0;
        for (double v : m.data)
            if (v >= level) ++ones;
        const double score = static_cast<double>(ones) * std::ldexp(1.0, -2 * u);
        if (score > best_score) {
            best_score = score;
            best_u = u;
            best_ones = ones;
        }
    }

    LevelSelection sel;
    sel.u_star = best_u;
    sel.ones = best_ones;
    sel.mask = Matrix(m.rows, m.cols);
    const double level = std::ldexp(1.0, -best_u);
    for (std::size_t i = 0; i < m.data.size(); ++i)
        sel.mask.data[i] = m.data[i] >= level ? 1.0 : 0.0;
    return sel;
}

namespace {

// Column heights of a binary isotonic mask (each column is a prefix of ones).
std::vector<int> column_heights(const Matrix& mask) {
    std::vector<int> h(mask.cols, 0);
    for (int k = 0; k < mask.cols; ++k) {
        int count = 0;
        for (int i = 0; i < mask.rows; ++i) {
            const double v = mask.at(i, k);
            if (v != 0.0 && v != 1.0) throw InvalidArgument("mask must be binary");
            if (v == 1.0) {
                if (i != count) throw InvalidArgument("mask must be isotonic");
                ++count;
            }
        }
        h[k] = count;
    }
    return h;
}

std::vector<int> dyadic_counts(int n) {
    std::vector<int> g;
    for (int v = 1; v <= n; v *= 2) g.push_back(v);
    return g;
}

}  // namespace

DyadicBlock dyadic_block(const Matrix& mask) {
    const std::vector<int> heights = column_heights(mask);

    std::vector<int> order(mask.cols);
    for (int k = 0; k < mask.cols; ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return heights[a] > heights[b]; });

    DyadicBlock out;
    out.pi_col = Permutation(order).inverse();  // column k of the sorted mask is order[k]

    // j_i = number of columns of height >= i; maximize i * j_i over dyadic i.
    long long best = -1;
    for (int i : dyadic_counts(mask.rows)) {
        long long j = 0;
        for (int h : heights)
            if (h >= i) ++j;
        const long long score = static_cast<long long>(i) * j;
        if (j > 0 && score > best) {
            best = score;
            out.i_star = i;
            out.j_star = j;
        }
    }
    return out;  // i_star = j_star = 0 when the mask is empty
}

PeelResult peel(const Matrix& m, int p) {
    if (p < 1) throw InvalidArgument("peel needs p >= 1");
    if (!in_unit_range(m)) throw InvalidArgument("signal entries must lie in [0,1]");
    const auto perm = is_permuted_isotonic(m);
    if (!perm.ok) throw InvalidArgument("peel input must be permuted isotonic");
    const Permutation& witness = *perm.witness;

    const int n = m.rows, d = m.cols;
    // log2(1) = 0 kills the first term of the bound; fall back to p = 1 and
    // skip the inequality check (the domination claim still holds).
    const bool degenerate = std::min(n, d) == 1;
    const int p_eff = degenerate ? 1 : p;

    const Matrix sorted = apply_row_permutation(m, witness, /*inverse=*/true);
    const LevelSelection sel = level_select(sorted, p_eff);

    PeelResult res;
    res.u_star = sel.u_star;
    res.block.lambda = std::ldexp(1.0, -sel.u_star);
    res.rhs = frobenius_sq(m);
    res.inequality_checked = !degenerate;

    std::vector<int> sorted_rows;  // row indices of the sorted matrix in S
    std::vector<int> cols;         // original column indices in T
    if (n <= d) {
        const DyadicBlock dyad = dyadic_block(sel.mask);
        res.i_star = dyad.i_star;
        const Permutation col_order = dyad.pi_col.inverse();
        for (int i = 0; i < dyad.i_star; ++i) sorted_rows.push_back(i);
        for (int j = 0; j < dyad.j_star; ++j) cols.push_back(col_order(j));
    } else {
        // Grid along columns: heights sorted descending; dyadic column count c
        // reaches down h_c rows, maximize c * h_c.
        std::vector<int> heights = column_heights(sel.mask);
        std::vector<int> order(d);
        for (int k = 0; k < d; ++k) order[k] = k;
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return heights[a] > heights[b]; });
        long long best = -1;
        long long c_star = 0, rows_star = 0;
        for (int c : dyadic_counts(d)) {
            const int h = heights[order[c - 1]];  // min height among the first c columns
            const long long score = static_cast<long long>(c) * h;
            if (h > 0 && score > best) {
                best = score;
                c_star = c;
                rows_star = h;
            }
        }
        res.i_star = c_star;
        for (int i = 0; i < rows_star; ++i) sorted_rows.push_back(i);
        for (int j = 0; j < c_star; ++j) cols.push_back(order[j]);
    }

    // Map S back through the witness: sorted row i is original row pi^{-1}(i).
    const Permutation inv = witness.inverse();
    for (int i : sorted_rows) res.block.rows.push_back(inv(i));
    std::sort(res.block.rows.begin(), res.block.rows.end());
    std::sort(cols.begin(), cols.end());
    res.block.cols = std::move(cols);

    const double lam = res.block.lambda;
    for (int i : res.block.rows)
        for (int k : res.block.cols)
            if (m.at(i, k) < lam)
                throw Error("peel invariant violated: block is not dominated");

    const double cells =
        static_cast<double>(res.block.rows.size()) * static_cast<double>(res.block.cols.size());
    res.lhs = 8.0 * p_eff * std::log2(static_cast<double>(std::min(n, d))) * lam * lam * cells +
              std::ldexp(static_cast<double>(n) * d, -2 * p_eff);
    if (res.inequality_checked && res.lhs < res.rhs - 1e-9)
        throw Error("peel invariant violated: energy inequality fails");
    return res;
}

}  // namespace plantedrank

#pragma once

#include <optional>
#include <vector>

#include "plantedrank/matrix.hpp"
#include "plantedrank/permutation.hpp"
#include "plantedrank/rng.hpp"

namespace plantedrank {

// Planted block lambda * 1{S x T}.
struct BlockSpec {
    double lambda = 0.0;
    std::vector<int> rows;  // S, ascending
    std::vector<int> cols;  // T, ascending
};

struct LossReport {
    double ranking_loss = 0.0;
    double reconstruction_loss = 0.0;
};

// Entry (i,k) is +1 with probability (1 + M_{i,k})/2, independently.
ObservationMatrix sample_observations(const Matrix& m, Rng& rng);
ObservationMatrix sample_observations(const Matrix& m, std::uint64_t seed);

Matrix make_block_matrix(const BlockSpec& spec, int n, int d);

// Columns non-increasing down the rows.
bool is_isotonic(const Matrix& m);

struct PermutedIsotonicResult {
    bool ok = false;
    std::optional<Permutation> witness;  // pi with M_{pi^{-1}} isotonic
    int offending_row_a = -1;            // first dominance failure, when !ok
    int offending_row_b = -1;
};

// Sort rows by row sum (descending, stable) and verify coordinatewise
// dominance between adjacent rows. Membership is equivalent to the rows
// forming a chain in the coordinatewise order, and any chain is consistent
// with row-sum order, so row-sum sorting is complete.
PermutedIsotonicResult is_permuted_isotonic(const Matrix& m);

enum class IsotonicKind {
    ColumnSortedUniform,  // iid U[0,1], each column sorted descending
    CumulativeDecrements, // row 0 uniform, then subtract random decrements, clip at 0
};

Matrix gen_isotonic(int n, int d, std::uint64_t seed, IsotonicKind kind);

struct HardInstance {
    Matrix signal;         // rows randomly permuted
    Permutation oracle;    // pi* with signal_{pi*^{-1}} isotonic
    double lambda = 0.0;   // 1/m
    int group_rows = 0;    // N = n/m
    int block_rows = 0;    // K_N = min(m^2, floor(n/(2m))) or 1
    int block_cols = 0;    // K_d = min(ceil(sqrt(d)*m), d)
};

// m stacked groups of n/m rows; group l has base value lambda*(l-1) plus a
// planted block of height lambda, block positions drawn from the seed.
HardInstance gen_hard_instance(int n, int d, int m, std::uint64_t seed);

// || M_{pi_hat^{-1}} - M_{pi*^{-1}} ||_F^2. Validates that pi* is an oracle
// permutation for M; the value does not depend on which oracle permutation
// is supplied when several exist.
double ranking_loss(const Matrix& m, const Permutation& pi_hat, const Permutation& pi_star);

// || A - B ||_F^2
double reconstruction_loss(const Matrix& a, const Matrix& b);

}  // namespace plantedrank

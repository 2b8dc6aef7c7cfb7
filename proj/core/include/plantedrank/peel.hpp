#pragma once

#include <vector>

#include "plantedrank/model.hpp"

namespace plantedrank {

struct LevelSelection {
    int u_star = 1;
    Matrix mask;          // 0/1 entries of 1{M >= 2^{-u*}}
    long long ones = 0;
};

// Thresholds M at 2^{-u} for u in 1..p and keeps the level whose mask score
// |mask| * 2^{-2u} is maximal (smallest u on ties). The bulk of the squared
// norm lives above that level.
LevelSelection level_select(const Matrix& m, int p);

struct DyadicBlock {
    Permutation pi_col;   // sorts columns by column sum, descending, stable
    long long i_star = 0; // dyadic row count (0 for an empty mask)
    long long j_star = 0; // widest column extent at i_star rows
};

// For a binary isotonic mask: sort columns to make it bi-isotonic, then pick
// the dyadic row count i maximizing i * j_i, where j_i is the rightmost
// one-column in row i of the sorted mask.
DyadicBlock dyadic_block(const Matrix& mask);

struct PeelResult {
    BlockSpec block;               // lambda = 2^{-u*}, S and T in original coordinates
    int u_star = 1;
    long long i_star = 0;          // dyadic count along the gridded (shorter) side
    double lhs = 0.0;              // 8 p log2(n^d) lambda^2 |S||T| + 2^{-2p} n d
    double rhs = 0.0;              // ||M||_F^2
    bool inequality_checked = true;  // false when n^d = 1 (log2 term vanishes)
};

// Extracts a dominated block from a permuted isotonic matrix: M >= lambda
// 1{S x T} entrywise and lhs >= rhs. The dyadic grid runs along rows when
// n <= d, else along columns.
PeelResult peel(const Matrix& m, int p);

}  // namespace plantedrank

#pragma once

#include <vector>

#include "plantedrank/detect.hpp"

namespace plantedrank {

struct TwoStageDecision {
    DetectDecision decision;
    std::vector<int> selected_cols;  // S_Q (or S_Q^(m)), ascending
};

// Row-sum test for a single row: sum_k Y_{row,k} >= sqrt(2 d ln(n/delta)).
DetectDecision est_row_sum(const ObservationMatrix& y, double delta, int row);

// Leave-one-out column selection (column sums over all rows except `row`
// against sqrt(2 n ln(d/delta))), then the row's sum over the selected
// columns against sqrt(2 |S_Q| ln(n/delta)). Empty selection decides 0.
TwoStageDecision est_two_stage(const ObservationMatrix& y, double delta, int row);

// Scan variant: S_Q^(m) is the size-m column set maximizing the best size-m
// row subset sum with `row` excluded; ties go to the lexicographically
// smallest column set.
TwoStageDecision est_scan_two_stage(const ObservationMatrix& y, int m, double delta, int row,
                                    const ScanOptions& opts = {});

struct SupportDecision {
    int row = 0;
    DetectDecision f_se;
    TwoStageDecision f_se2;
    TwoStageDecision f_se2_scan;
    int scan_size = 0;  // m ^ K_n ^ K_d
    int combined = 0;
};

SupportDecision est_combined(const ObservationMatrix& y, int m, int kn, int kd, double delta,
                             int row, const ScanOptions& opts = {});

// Rows sorted by max(row-sum score, leave-one-out two-stage score), ties by
// index. One shared column-sum pass keeps the cost linear in nd.
Permutation rank_block(const ObservationMatrix& y, double delta);

// Mean of (f - x*)^2 for est_combined on row 0 under uniform block draws.
RiskEstimate mc_estimation_risk(const InstanceSpec& instance, int m, int kn, int kd,
                                double delta, long long replicates, std::uint64_t seed,
                                const ScanOptions& opts = {});

}  // namespace plantedrank

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "plantedrank/matrix.hpp"
#include "plantedrank/mc.hpp"
#include "plantedrank/model.hpp"

namespace plantedrank {

struct DetectDecision {
    std::string test;
    double statistic = 0.0;
    double threshold = 0.0;
    int decision = 0;  // 1 iff statistic >= threshold
};

enum class Axis { Rows, Cols };

struct ScanOptions {
    long long budget = 10'000'000;  // max column subsets enumerated
};

// Global sum of Y against sqrt(2 n d ln(1/delta)).
DetectDecision stat_global_sum(const ObservationMatrix& y, double delta);

// Max row sum against sqrt(2 d ln(n/delta)), or the column counterpart.
DetectDecision stat_line_scan(const ObservationMatrix& y, double delta, Axis axis);

// Exact sup over nonempty S,T with |S| v |T| <= m of the submatrix sum,
// against m sqrt(2 m ln(nd/delta)). Column subsets are enumerated in
// lexicographic order; the optimal S for a fixed T is a top-k row prefix.
DetectDecision stat_submatrix_scan(const ObservationMatrix& y, int m, double delta,
                                   const ScanOptions& opts = {});

struct AggregateDecision {
    int decision = 0;
    int scan_size = 0;  // m ^ K_n ^ K_d
    std::vector<DetectDecision> parts;
};

// OR of global-sum, row-scan, column-scan and the size-(m^K_n^K_d) scan.
AggregateDecision detect_aggregate(const ObservationMatrix& y, int m, int kn, int kd,
                                   double delta, const ScanOptions& opts = {});

struct DyadicDecision {
    int decision = 0;
    double sub_delta = 0.0;  // each sub-test runs at delta/4
    std::vector<DetectDecision> parts;
};

// OR of detect_aggregate over dyadic (K_n, K_d); the scan is evaluated once
// per distinct clamped size.
DyadicDecision detect_dyadic(const ObservationMatrix& y, int m, double delta,
                             const ScanOptions& opts = {});

// ---------------------------------------------------------------------------
// Monte Carlo instances and risk estimation.

struct InstanceSpec {
    enum class Kind { Null, Block, Hard, IsotonicShuffled };
    Kind kind = Kind::Null;
    int n = 1, d = 1;
    double lambda = 0.0;  // Block
    int kn = 1, kd = 1;   // Block: uniform S,T of these sizes
    int m = 1;            // Hard: group count
    IsotonicKind iso_kind = IsotonicKind::ColumnSortedUniform;
};

struct DrawnInstance {
    Matrix signal;
    Permutation oracle;   // valid for Hard and IsotonicShuffled draws
    bool nonnull = false; // x_0
};

DrawnInstance draw_instance(const InstanceSpec& spec, Rng& rng);

struct TestSpec {
    enum class Kind {
        GlobalSum,
        RowScan,
        ColScan,
        SubmatrixScan,
        Aggregate,
        Dyadic,
        ConstantZero,  // baseline anchors for risk sanity checks
        ConstantOne,
    };
    Kind kind = Kind::GlobalSum;
    double delta = 0.05;
    int m = 1;
    int kn = 0, kd = 0;  // Aggregate clamp; 0 means use instance dimensions
    ScanOptions scan;
};

int run_test(const TestSpec& test, const ObservationMatrix& y);

// Mean of (f - x_0)^2 over fresh (M, Y) draws, deterministic given the seed.
RiskEstimate mc_detection_risk(const TestSpec& test, const InstanceSpec& instance,
                               long long replicates, std::uint64_t seed);

struct SweepPoint {
    double rho = 0.0;
    double worst_risk = 0.0;
    std::string worst_case;  // which family member attains it
};

struct SweepResult {
    double epsilon = 0.0;
    double null_risk = 0.0;
    std::vector<SweepPoint> table;
    std::optional<double> rho_reached;  // smallest grid rho with worst risk <= epsilon
};

// Worst Monte Carlo risk of the dyadic test (run at delta = epsilon/4) over
// the null plus block alternatives on dyadic (K_n,K_d) with lambda chosen so
// lambda^2 K_n K_d = rho^2, clipped at lambda <= 1.
SweepResult separation_sweep(int n, int d, int m, double epsilon,
                             const std::vector<double>& rho_grid, long long replicates,
                             std::uint64_t seed, const ScanOptions& opts = {});

}  // namespace plantedrank

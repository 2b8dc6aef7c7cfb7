#pragma once

#include <cstdint>
#include <string>

#include "plantedrank/detect.hpp"

namespace plantedrank {

struct RankMethod {
    enum class Tag { RowSum, Spectral, Block };
    Tag tag = Tag::RowSum;
    double tolerance = 1e-10;  // power iteration stop
    int max_iterations = 10000;
    double delta = 0.05;       // Block scoring level
};

// Rows sorted by row sum, descending, ties by index.
Permutation rank_row_sums(const ObservationMatrix& y);

struct SpectralResult {
    Permutation perm;
    bool converged = true;
    int iterations = 0;
};

// Center the columns, take the top left singular vector by power iteration
// on A A^T (deterministic start: the row-sum vector), fix the sign so the
// ordering agrees with the row-sum ranking, and sort coefficients descending.
// The real-matrix overload is the direct input path used for testing on
// noiseless signals.
SpectralResult rank_spectral(const Matrix& a, double tolerance = 1e-10,
                             int max_iterations = 10000);
SpectralResult rank_spectral(const ObservationMatrix& y, double tolerance = 1e-10,
                             int max_iterations = 10000);

// Exact Euclidean projection onto {[0,1]-valued matrices with non-increasing
// columns}: per-column pool-adjacent-violators, then clip. Clipping after
// pooling is the exact projection onto the cone/box intersection.
Matrix project_isotonic(const Matrix& a);

// apply_row_permutation(project_isotonic(Y_{pi^{-1}}), pi, false): the
// isotonic estimate re-expressed in original row order.
Matrix reconstruct(const ObservationMatrix& y, const Permutation& pi_hat);

Permutation rank_with_method(const ObservationMatrix& y, const RankMethod& method);

struct PipelineReport {
    MeanEstimate ranking;
    MeanEstimate reconstruction;
    std::vector<double> ranking_losses;         // per replicate
    std::vector<double> reconstruction_losses;  // per replicate
};

// Per replicate: draw (M, pi*), sample Y, rank, reconstruct, record both
// losses. Deterministic given the seed.
PipelineReport evaluate_pipeline(const InstanceSpec& instance, const RankMethod& method,
                                 long long replicates, std::uint64_t seed);

}  // namespace plantedrank

#include "plantedrank/rank.hpp"

#include <algorithm>
#include <cmath>

#include "plantedrank/support.hpp"

namespace plantedrank {

Permutation rank_row_sums(const ObservationMatrix& y) {
    std::vector<long long> sums(y.rows, 0);
    for (int i = 0; i < y.rows; ++i)
        for (int k = 0; k < y.cols; ++k) sums[i] += y.at(i, k);
    std::vector<int> order(y.rows);
    for (int i = 0; i < y.rows; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return sums[a] > sums[b]; });
    return Permutation(order).inverse();
}

namespace {

std::vector<double> ranks_with_ties(const std::vector<double>& v) {
    const int n = static_cast<int>(v.size());
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return v[a] < v[b]; });
    std::vector<double> rank(n);
    int i = 0;
    while (i < n) {
        int j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        const double mid = 0.5 * (i + j);
        for (int k = i; k <= j; ++k) rank[order[k]] = mid;
        i = j + 1;
    }
    return rank;
}

// Sign of the rank correlation between two score vectors.
double rank_correlation(const std::vector<double>& a, const std::vector<double>& b) {
    const auto ra = ranks_with_ties(a), rb = ranks_with_ties(b);
    const double mean = 0.5 * (static_cast<double>(a.size()) - 1.0);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (ra[i] - mean) * (rb[i] - mean);
    return s;
}

Permutation order_descending(const std::vector<double>& score) {
    std::vector<int> order(score.size());
    for (std::size_t i = 0; i < score.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return score[a] > score[b]; });
    return Permutation(order).inverse();
}

}  // namespace

SpectralResult rank_spectral(const Matrix& input, double tolerance, int max_iterations) {
    if (input.rows < 2) throw InvalidArgument("rank_spectral needs n >= 2");
    if (!(tolerance > 0.0) || max_iterations < 1)
        throw InvalidArgument("bad power-iteration options");
    const int n = input.rows, d = input.cols;

    Matrix a = input;  // center the columns
    for (int k = 0; k < d; ++k) {
        double mean = 0.0;
        for (int i = 0; i < n; ++i) mean += a.at(i, k);
        mean /= n;
        for (int i = 0; i < n; ++i) a.at(i, k) -= mean;
    }

    SpectralResult res;
    std::vector<double> row_scores(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < d; ++k) row_scores[i] += a.at(i, k);

    if (frobenius_sq(a) == 0.0) {  // all rows equal
        res.perm = Permutation::identity(n);
        return res;
    }

    std::vector<double> v = row_scores;
    double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    if (norm == 0.0) {  // degenerate start, fall back to e_0
        std::fill(v.begin(), v.end(), 0.0);
        v[0] = 1.0;
        norm = 1.0;
    }
    for (double& x : v) x /= norm;

    std::vector<double> w(d), next(n);
    res.converged = false;
    for (int it = 0; it < max_iterations; ++it) {
        res.iterations = it + 1;
        // next = A (A^T v), never forming A A^T
        for (int k = 0; k < d; ++k) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += a.at(i, k) * v[i];
            w[k] = s;
        }
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int k = 0; k < d; ++k) s += a.at(i, k) * w[k];
            next[i] = s;
        }
        norm = std::sqrt(std::inner_product(next.begin(), next.end(), next.begin(), 0.0));
        if (norm == 0.0) break;  // start was orthogonal to the top space
        for (double& x : next) x /= norm;
        double diff = 0.0;
        for (int i = 0; i < n; ++i) diff += (next[i] - v[i]) * (next[i] - v[i]);
        v = next;
        if (std::sqrt(diff) <= tolerance) {
            res.converged = true;
            break;
        }
    }

    const double corr = rank_correlation(v, row_scores);
    if (corr < 0.0) {
        for (double& x : v) x = -x;
    } else if (corr == 0.0 && v[0] < 0.0) {
        for (double& x : v) x = -x;
    }
    res.perm = order_descending(v);
    return res;
}

SpectralResult rank_spectral(const ObservationMatrix& y, double tolerance, int max_iterations) {
    return rank_spectral(to_matrix(y), tolerance, max_iterations);
}

namespace {

// Pool-adjacent-violators for a non-increasing fit, then clip to [0,1].
void project_column_isotonic(std::vector<double>& x) {
    const int n = static_cast<int>(x.size());
    std::vector<double> mean(n), weight(n);
    std::vector<int> len(n);
    int top = 0;
    for (int i = 0; i < n; ++i) {
        mean[top] = x[i];
        weight[top] = 1.0;
        len[top] = 1;
        ++top;
        while (top > 1 && mean[top - 2] < mean[top - 1]) {
            const double w = weight[top - 2] + weight[top - 1];
            mean[top - 2] = (mean[top - 2] * weight[top - 2] + mean[top - 1] * weight[top - 1]) / w;
            weight[top - 2] = w;
            len[top - 2] += len[top - 1];
            --top;
        }
    }
    int pos = 0;
    for (int b = 0; b < top; ++b) {
        const double v = std::clamp(mean[b], 0.0, 1.0);
        for (int j = 0; j < len[b]; ++j) x[pos++] = v;
    }
}

}  // namespace

Matrix project_isotonic(const Matrix& a) {
    Matrix out(a.rows, a.cols);
    std::vector<double> col(a.rows);
    for (int k = 0; k < a.cols; ++k) {
        for (int i = 0; i < a.rows; ++i) col[i] = a.at(i, k);
        project_column_isotonic(col);
        for (int i = 0; i < a.rows; ++i) out.at(i, k) = col[i];
    }
    return out;
}

Matrix reconstruct(const ObservationMatrix& y, const Permutation& pi_hat) {
    if (pi_hat.size() != y.rows) throw InvalidArgument("permutation length does not match");
    const Matrix sorted = apply_row_permutation(to_matrix(y), pi_hat, /*inverse=*/true);
    return apply_row_permutation(project_isotonic(sorted), pi_hat, /*inverse=*/false);
}

Permutation rank_with_method(const ObservationMatrix& y, const RankMethod& method) {
    switch (method.tag) {
        case RankMethod::Tag::RowSum:
            return rank_row_sums(y);
        case RankMethod::Tag::Spectral:
            return rank_spectral(y, method.tolerance, method.max_iterations).perm;
        case RankMethod::Tag::Block:
            return rank_block(y, method.delta);
    }
    throw InvalidArgument("unknown ranking method");
}

PipelineReport evaluate_pipeline(const InstanceSpec& instance, const RankMethod& method,
                                 long long replicates, std::uint64_t seed) {
    if (replicates < 1) throw InvalidArgument("replicates must be >= 1");
    auto losses = parallel_replicates<std::pair<double, double>>(replicates, [&](long long rep) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(rep), "rank-loss"));
        const DrawnInstance inst = draw_instance(instance, rng);
        const ObservationMatrix y = sample_observations(inst.signal, rng);
        const Permutation pi_hat = rank_with_method(y, method);
        const Matrix m_hat = reconstruct(y, pi_hat);
        return std::make_pair(ranking_loss(inst.signal, pi_hat, inst.oracle),
                              reconstruction_loss(m_hat, inst.signal));
    });
    PipelineReport report;
    for (const auto& [rank_loss, reco_loss] : losses) {
        report.ranking_losses.push_back(rank_loss);
        report.reconstruction_losses.push_back(reco_loss);
    }
    report.ranking = summarize_mean(report.ranking_losses);
    report.reconstruction = summarize_mean(report.reconstruction_losses);
    return report;
}

}  // namespace plantedrank

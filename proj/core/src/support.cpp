#include "plantedrank/support.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace plantedrank {

namespace {

void check_row(const ObservationMatrix& y, int row) {
    if (row < 0 || row >= y.rows) throw InvalidArgument("row index out of range");
}

void check_delta(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0,1)");
}

double binomial_saturating(int d, int m, long long limit) {
    const int k = std::min(m, d - m);  // C(d,m) = C(d,d-m)
    double c = 1.0;
    for (int t = 1; t <= k; ++t) {
        c = c * (d - t + 1) / t;
        if (c > static_cast<double>(limit)) return static_cast<double>(limit) + 1.0;
    }
    return c;
}

}  // namespace

DetectDecision est_row_sum(const ObservationMatrix& y, double delta, int row) {
    check_delta(delta);
    check_row(y, row);
    DetectDecision dec;
    dec.test = "se";
    long long s = 0;
    for (int k = 0; k < y.cols; ++k) s += y.at(row, k);
    dec.statistic = static_cast<double>(s);
    dec.threshold = std::sqrt(2.0 * y.cols * std::log(y.rows / delta));
    dec.decision = dec.statistic >= dec.threshold ? 1 : 0;
    return dec;
}

TwoStageDecision est_two_stage(const ObservationMatrix& y, double delta, int row) {
    check_delta(delta);
    check_row(y, row);
    if (y.rows < 2) throw InvalidArgument("two-stage test needs n >= 2");

    TwoStageDecision out;
    out.decision.test = "se2";
    const double col_threshold = std::sqrt(2.0 * y.rows * std::log(y.cols / delta));
    for (int k = 0; k < y.cols; ++k) {
        long long s = 0;
        for (int i = 0; i < y.rows; ++i)
            if (i != row) s += y.at(i, k);
        if (static_cast<double>(s) >= col_threshold) out.selected_cols.push_back(k);
    }

    if (out.selected_cols.empty()) {
        out.decision.statistic = 0.0;
        out.decision.threshold = 0.0;
        out.decision.decision = 0;  // empty selection: conservative 0
        return out;
    }
    long long s = 0;
    for (int k : out.selected_cols) s += y.at(row, k);
    out.decision.statistic = static_cast<double>(s);
    out.decision.threshold =
        std::sqrt(2.0 * static_cast<double>(out.selected_cols.size()) * std::log(y.rows / delta));
    out.decision.decision = out.decision.statistic >= out.decision.threshold ? 1 : 0;
    return out;
}

TwoStageDecision est_scan_two_stage(const ObservationMatrix& y, int m, double delta, int row,
                                    const ScanOptions& opts) {
    check_delta(delta);
    check_row(y, row);
    const int n = y.rows, d = y.cols;
    if (m < 1 || m > std::min(n - 1, d))
        throw InvalidArgument("scan size m must satisfy 1 <= m <= (n-1)^d");
    if (binomial_saturating(d, m, opts.budget) > static_cast<double>(opts.budget))
        throw InvalidArgument("column-set enumeration exceeds budget");

    std::vector<std::vector<std::int8_t>> col(d, std::vector<std::int8_t>(n));
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < d; ++k) col[k][i] = y.at(i, k);

    std::vector<long long> restricted(n, 0);
    std::vector<long long> scratch;
    scratch.reserve(n);
    long long best = std::numeric_limits<long long>::min();
    std::vector<int> current, best_cols;

    auto top_m_sum = [&] {
        scratch.clear();
        for (int i = 0; i < n; ++i)
            if (i != row) scratch.push_back(restricted[i]);
        std::nth_element(scratch.begin(), scratch.begin() + (m - 1), scratch.end(),
                         std::greater<>());
        long long s = 0;
        for (int k = 0; k < m; ++k) s += scratch[k];
        return s;
    };

    // Lexicographic enumeration keeps the first maximizer the smallest set.
    std::function<void(int)> rec = [&](int start) {
        const int needed = m - static_cast<int>(current.size());
        if (needed == 0) {
            const long long s = top_m_sum();
            if (s > best) {
                best = s;
                best_cols = current;
            }
            return;
        }
        for (int c = start; c + needed <= d; ++c) {
            current.push_back(c);
            for (int i = 0; i < n; ++i) restricted[i] += col[c][i];
            rec(c + 1);
            for (int i = 0; i < n; ++i) restricted[i] -= col[c][i];
            current.pop_back();
        }
    };
    rec(0);

    TwoStageDecision out;
    out.decision.test = "se2m";
    out.selected_cols = best_cols;
    long long s = 0;
    for (int k : best_cols) s += y.at(row, k);
    out.decision.statistic = static_cast<double>(s);
    out.decision.threshold = std::sqrt(2.0 * m * std::log(n / delta));
    out.decision.decision = out.decision.statistic >= out.decision.threshold ? 1 : 0;
    return out;
}

SupportDecision est_combined(const ObservationMatrix& y, int m, int kn, int kd, double delta,
                             int row, const ScanOptions& opts) {
    if (kn < 1 || kn > y.rows || kd < 1 || kd > y.cols)
        throw InvalidArgument("est_combined needs 1 <= K_n <= n and 1 <= K_d <= d");
    SupportDecision out;
    out.row = row;
    out.f_se = est_row_sum(y, delta, row);
    out.f_se2 = est_two_stage(y, delta, row);
    out.scan_size = std::max(1, std::min({m, kn, kd, y.rows - 1, y.cols}));
    out.f_se2_scan = est_scan_two_stage(y, out.scan_size, delta, row, opts);
    out.combined =
        out.f_se.decision | out.f_se2.decision.decision | out.f_se2_scan.decision.decision;
    return out;
}

Permutation rank_block(const ObservationMatrix& y, double delta) {
    check_delta(delta);
    if (y.rows < 2) throw InvalidArgument("rank_block needs n >= 2");
    const int n = y.rows, d = y.cols;

    std::vector<long long> row_sums(n, 0), col_sums(d, 0);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < d; ++k) {
            row_sums[i] += y.at(i, k);
            col_sums[k] += y.at(i, k);
        }

    const double row_threshold = std::sqrt(2.0 * d * std::log(n / delta));
    const double col_threshold = std::sqrt(2.0 * n * std::log(d / delta));
    const double log_n_delta = std::log(n / delta);

    std::vector<double> score(n);
    for (int i = 0; i < n; ++i) {
        double s = static_cast<double>(row_sums[i]) / row_threshold;
        long long sel_sum = 0;
        int sel_count = 0;
        for (int k = 0; k < d; ++k) {
            if (static_cast<double>(col_sums[k] - y.at(i, k)) >= col_threshold) {
                sel_sum += y.at(i, k);
                ++sel_count;
            }
        }
        if (sel_count > 0)
            s = std::max(s, static_cast<double>(sel_sum) /
                                std::sqrt(2.0 * sel_count * log_n_delta));
        score[i] = s;
    }

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return score[a] > score[b]; });
    return Permutation(order).inverse();
}

RiskEstimate mc_estimation_risk(const InstanceSpec& instance, int m, int kn, int kd,
                                double delta, long long replicates, std::uint64_t seed,
                                const ScanOptions& opts) {
    if (replicates < 1) throw InvalidArgument("replicates must be >= 1");
    auto errors = parallel_replicates<double>(replicates, [&](long long rep) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(rep), "estimate-risk"));
        const DrawnInstance inst = draw_instance(instance, rng);
        const ObservationMatrix y = sample_observations(inst.signal, rng);
        int x_star = 0;
        for (int k = 0; k < inst.signal.cols; ++k)
            if (inst.signal.at(0, k) > 0.0) {
                x_star = 1;
                break;
            }
        const int f = est_combined(y, m, kn, kd, delta, /*row=*/0, opts).combined;
        const double diff = f - x_star;
        return diff * diff;
    });
    return summarize_binary(errors);
}

}  // namespace plantedrank

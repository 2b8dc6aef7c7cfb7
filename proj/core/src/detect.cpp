#include "plantedrank/detect.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>

namespace plantedrank {

int worker_count() {
    if (const char* env = std::getenv("PLANTEDRANK_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<int>(v);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

namespace {

void check_delta(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0,1)");
}

long long total_sum(const ObservationMatrix& y) {
    long long s = 0;
    for (std::int8_t v : y.data) s += v;
    return s;
}

// Number of column subsets of sizes 1..m, saturating at limit.
long long subset_count(int d, int m, long long limit) {
    long long total = 0;
    double binom = 1.0;
    for (int t = 1; t <= m; ++t) {
        binom = binom * (d - t + 1) / t;
        if (binom > static_cast<double>(limit)) return limit + 1;
        total += static_cast<long long>(binom + 0.5);
        if (total > limit) return limit + 1;
    }
    return total;
}

}  // namespace

DetectDecision stat_global_sum(const ObservationMatrix& y, double delta) {
    check_delta(delta);
    DetectDecision dec;
    dec.test = "gs";
    dec.statistic = static_cast<double>(total_sum(y));
    dec.threshold = std::sqrt(2.0 * y.rows * y.cols * std::log(1.0 / delta));
    dec.decision = dec.statistic >= dec.threshold ? 1 : 0;
    return dec;
}

DetectDecision stat_line_scan(const ObservationMatrix& y, double delta, Axis axis) {
    check_delta(delta);
    DetectDecision dec;
    long long best = std::numeric_limits<long long>::min();
    if (axis == Axis::Rows) {
        dec.test = "rs";
        for (int i = 0; i < y.rows; ++i) {
            long long s = 0;
            for (int k = 0; k < y.cols; ++k) s += y.at(i, k);
            best = std::max(best, s);
        }
        dec.threshold = std::sqrt(2.0 * y.cols * std::log(y.rows / delta));
    } else {
        dec.test = "cs";
        for (int k = 0; k < y.cols; ++k) {
            long long s = 0;
            for (int i = 0; i < y.rows; ++i) s += y.at(i, k);
            best = std::max(best, s);
        }
        dec.threshold = std::sqrt(2.0 * y.rows * std::log(y.cols / delta));
    }
    dec.statistic = static_cast<double>(best);
    dec.decision = dec.statistic >= dec.threshold ? 1 : 0;
    return dec;
}

namespace {

// Exact scan statistic: enumerate column subsets T (sizes 1..m, lexicographic)
// with incrementally maintained restricted row sums; for each T the optimal
// nonempty S of size <= m is a prefix of the rows sorted by restricted sum.
long long scan_statistic(const ObservationMatrix& y, int m) {
    const int n = y.rows, d = y.cols;
    std::vector<std::vector<std::int8_t>> col(d, std::vector<std::int8_t>(n));
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < d; ++k) col[k][i] = y.at(i, k);

    std::vector<long long> restricted(n, 0);
    std::vector<long long> top(m);
    long long best = std::numeric_limits<long long>::min();

    auto evaluate = [&] {
        const int take = std::min(m, n);
        std::partial_sort_copy(restricted.begin(), restricted.end(), top.begin(),
                               top.begin() + take, std::greater<>());
        long long prefix = 0;
        for (int k = 0; k < take; ++k) {
            prefix += top[k];
            best = std::max(best, prefix);
        }
    };

    std::function<void(int, int)> rec = [&](int start, int depth) {
        for (int c = start; c < d; ++c) {
            for (int i = 0; i < n; ++i) restricted[i] += col[c][i];
            evaluate();
            if (depth + 1 < m) rec(c + 1, depth + 1);
            for (int i = 0; i < n; ++i) restricted[i] -= col[c][i];
        }
    };
    rec(0, 0);
    return best;
}

}  // namespace

DetectDecision stat_submatrix_scan(const ObservationMatrix& y, int m, double delta,
                                   const ScanOptions& opts) {
    check_delta(delta);
    if (m < 1 || m > std::min(y.rows, y.cols))
        throw InvalidArgument("scan size m must satisfy 1 <= m <= n^d");
    if (subset_count(y.cols, m, opts.budget) > opts.budget)
        throw InvalidArgument("submatrix scan enumeration exceeds budget");

    DetectDecision dec;
    dec.test = "ss";
    dec.statistic = static_cast<double>(scan_statistic(y, m));
    dec.threshold =
        m * std::sqrt(2.0 * m * std::log(static_cast<double>(y.rows) * y.cols / delta));
    dec.decision = dec.statistic >= dec.threshold ? 1 : 0;
    return dec;
}

AggregateDecision detect_aggregate(const ObservationMatrix& y, int m, int kn, int kd,
                                   double delta, const ScanOptions& opts) {
    if (kn < 1 || kn > y.rows || kd < 1 || kd > y.cols)
        throw InvalidArgument("aggregate needs 1 <= K_n <= n and 1 <= K_d <= d");
    AggregateDecision agg;
    agg.scan_size = std::min(m, std::min(kn, kd));
    agg.parts.push_back(stat_global_sum(y, delta));
    agg.parts.push_back(stat_line_scan(y, delta, Axis::Rows));
    agg.parts.push_back(stat_line_scan(y, delta, Axis::Cols));
    agg.parts.push_back(stat_submatrix_scan(y, agg.scan_size, delta, opts));
    for (const auto& p : agg.parts) agg.decision |= p.decision;
    return agg;
}

namespace {

std::vector<int> dyadic_grid(int n) {
    std::vector<int> g;
    for (int v = 1; v <= n; v *= 2) g.push_back(v);
    return g;
}

}  // namespace

DyadicDecision detect_dyadic(const ObservationMatrix& y, int m, double delta,
                             const ScanOptions& opts) {
    check_delta(delta);
    DyadicDecision dy;
    dy.sub_delta = delta / 4.0;
    dy.parts.push_back(stat_global_sum(y, dy.sub_delta));
    dy.parts.push_back(stat_line_scan(y, dy.sub_delta, Axis::Rows));
    dy.parts.push_back(stat_line_scan(y, dy.sub_delta, Axis::Cols));
    std::vector<int> sizes;
    for (int kn : dyadic_grid(y.rows))
        for (int kd : dyadic_grid(y.cols)) sizes.push_back(std::min(m, std::min(kn, kd)));
    std::sort(sizes.begin(), sizes.end());
    sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
    for (int s : sizes) {
        auto part = stat_submatrix_scan(y, s, dy.sub_delta, opts);
        part.test = "ss" + std::to_string(s);
        dy.parts.push_back(std::move(part));
    }
    for (const auto& p : dy.parts) dy.decision |= p.decision;
    return dy;
}

DrawnInstance draw_instance(const InstanceSpec& spec, Rng& rng) {
    DrawnInstance inst;
    switch (spec.kind) {
        case InstanceSpec::Kind::Null:
            inst.signal = Matrix(spec.n, spec.d, 0.0);
            inst.oracle = Permutation::identity(spec.n);
            inst.nonnull = false;
            break;
        case InstanceSpec::Kind::Block: {
            if (spec.lambda <= 0.0) {  // degenerate block, same law as the null
                inst.signal = Matrix(spec.n, spec.d, 0.0);
                inst.oracle = Permutation::identity(spec.n);
                inst.nonnull = false;
                break;
            }
            BlockSpec block;
            block.lambda = spec.lambda;
            block.rows = rng.subset(spec.n, spec.kn);
            block.cols = rng.subset(spec.d, spec.kd);
            inst.signal = make_block_matrix(block, spec.n, spec.d);
            inst.oracle = is_permuted_isotonic(inst.signal).witness.value();
            inst.nonnull = true;
            break;
        }
        case InstanceSpec::Kind::Hard: {
            auto hard = gen_hard_instance(spec.n, spec.d, spec.m, rng.next_u64());
            inst.signal = std::move(hard.signal);
            inst.oracle = std::move(hard.oracle);
            inst.nonnull = true;
            break;
        }
        case InstanceSpec::Kind::IsotonicShuffled: {
            Matrix sorted = gen_isotonic(spec.n, spec.d, rng.next_u64(), spec.iso_kind);
            Permutation pi(rng.permutation(spec.n));
            inst.signal = apply_row_permutation(sorted, pi, /*inverse=*/false);
            inst.oracle = pi;
            inst.nonnull = frobenius_sq(inst.signal) > 0.0;
            break;
        }
    }
    return inst;
}

int run_test(const TestSpec& test, const ObservationMatrix& y) {
    switch (test.kind) {
        case TestSpec::Kind::GlobalSum:
            return stat_global_sum(y, test.delta).decision;
        case TestSpec::Kind::RowScan:
            return stat_line_scan(y, test.delta, Axis::Rows).decision;
        case TestSpec::Kind::ColScan:
            return stat_line_scan(y, test.delta, Axis::Cols).decision;
        case TestSpec::Kind::SubmatrixScan:
            return stat_submatrix_scan(y, test.m, test.delta, test.scan).decision;
        case TestSpec::Kind::Aggregate: {
            const int kn = test.kn > 0 ? test.kn : y.rows;
            const int kd = test.kd > 0 ? test.kd : y.cols;
            return detect_aggregate(y, test.m, kn, kd, test.delta, test.scan).decision;
        }
        case TestSpec::Kind::Dyadic:
            return detect_dyadic(y, test.m, test.delta, test.scan).decision;
        case TestSpec::Kind::ConstantZero:
            return 0;
        case TestSpec::Kind::ConstantOne:
            return 1;
    }
    throw InvalidArgument("unknown test kind");
}

RiskEstimate mc_detection_risk(const TestSpec& test, const InstanceSpec& instance,
                               long long replicates, std::uint64_t seed) {
    if (replicates < 1) throw InvalidArgument("replicates must be >= 1");
    auto errors = parallel_replicates<double>(replicates, [&](long long rep) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(rep), "detect-risk"));
        const DrawnInstance inst = draw_instance(instance, rng);
        const ObservationMatrix y = sample_observations(inst.signal, rng);
        const int f = run_test(test, y);
        const int x0 = inst.nonnull ? 1 : 0;
        const double diff = f - x0;
        return diff * diff;
    });
    return summarize_binary(errors);
}

SweepResult separation_sweep(int n, int d, int m, double epsilon,
                             const std::vector<double>& rho_grid, long long replicates,
                             std::uint64_t seed, const ScanOptions& opts) {
    if (rho_grid.empty()) throw InvalidArgument("rho grid must be nonempty");
    SweepResult result;
    result.epsilon = epsilon;

    TestSpec test;
    test.kind = TestSpec::Kind::Dyadic;
    test.delta = epsilon / 4.0;
    test.m = m;
    test.scan = opts;

    InstanceSpec null_spec;
    null_spec.kind = InstanceSpec::Kind::Null;
    null_spec.n = n;
    null_spec.d = d;
    result.null_risk = mc_detection_risk(test, null_spec, replicates, seed).mean;

    std::vector<double> grid = rho_grid;
    std::sort(grid.begin(), grid.end());
    for (double rho : grid) {
        SweepPoint point;
        point.rho = rho;
        point.worst_risk = result.null_risk;
        point.worst_case = "null";
        if (rho > 0.0) {
            for (int kn = 1; kn <= n; kn *= 2) {
                for (int kd = 1; kd <= d; kd *= 2) {
                    const double raw = rho / std::sqrt(static_cast<double>(kn) * kd);
                    // members whose clipped height cannot reach norm rho fall
                    // outside the rho-separated alternative set
                    if (raw > 1.0 + 1e-12) continue;
                    const double lambda = std::min(1.0, raw);
                    InstanceSpec alt;
                    alt.kind = InstanceSpec::Kind::Block;
                    alt.n = n;
                    alt.d = d;
                    alt.lambda = lambda;
                    alt.kn = kn;
                    alt.kd = kd;
                    const double risk = mc_detection_risk(test, alt, replicates, seed).mean;
                    if (risk > point.worst_risk) {
                        point.worst_risk = risk;
                        point.worst_case = "block kn=" + std::to_string(kn) +
                                           " kd=" + std::to_string(kd);
                    }
                }
            }
        }
        if (!result.rho_reached && point.worst_risk <= epsilon) result.rho_reached = rho;
        result.table.push_back(std::move(point));
    }
    return result;
}

}  // namespace plantedrank

// Acceptance suite: one pass/fail line per criterion, exit code equal to the
// number of failures. Tolerances are pinned in code next to each check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "plantedrank/experiment.hpp"

using namespace plantedrank;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string details;
};

double binomial_se(double p, long long reps) {
    return std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

PriorSpec detection_prior(long long n, long long d, double lambda, long long kn,
                          long long kd) {
    PriorSpec p;
    p.kind = PriorSpec::Kind::DetectionUniform;
    p.n = n;
    p.d = d;
    p.lambda = lambda;
    p.kn = kn;
    p.kd = kd;
    return p;
}

// 1. Template-sum advantage equals the monomial-basis brute force.
Outcome criterion_advantage_equivalence() {
    Outcome out;
    const TemplateCatalog catalog = enumerate_templates(3, TemplateVariant::Detection);
    double worst = 0.0;
    int cases = 0;
    for (auto [n, d] : {std::pair{2, 2}, {3, 2}, {3, 3}}) {
        for (int kn = 1; kn <= n; ++kn)
            for (int kd = 1; kd <= d; ++kd)
                for (double lambda : {0.1, 0.5, 1.0})
                    for (int degree : {1, 2, 3}) {
                        const PriorSpec prior = detection_prior(n, d, lambda, kn, kd);
                        const double a = adv_low_degree(catalog, prior, degree);
                        const double b = adv_bruteforce(prior, degree);
                        worst = std::max(worst, std::abs(a - b));
                        ++cases;
                    }
    }
    out.pass = worst <= 1e-9;
    out.details = std::to_string(cases) + " cases, max |adv - oracle| = " + fmt(worst);
    return out;
}

// 2. Degree-1 closed form.
Outcome criterion_single_edge() {
    Outcome out;
    double worst = 0.0;
    Rng rng(derive_seed(2024, 0, "acceptance-c2"));
    for (int trial = 0; trial < 20; ++trial) {
        const long long n = 2 + static_cast<long long>(rng.uniform_int(49));
        const long long d = 2 + static_cast<long long>(rng.uniform_int(49));
        const long long kn = 1 + static_cast<long long>(rng.uniform_int(n));
        const long long kd = 1 + static_cast<long long>(rng.uniform_int(d));
        const double lambda = 0.05 + 0.95 * rng.uniform01();
        const double adv_sq = adv_low_degree(detection_prior(n, d, lambda, kn, kd), 1);
        const double closed =
            1.0 + lambda * lambda * kn * kn * kd * kd / (static_cast<double>(n) * d);
        worst = std::max(worst, std::abs(adv_sq - closed) / closed);
    }
    out.pass = worst <= 1e-12;
    out.details = "max relative gap " + fmt(worst);
    return out;
}

// 3. Census and counting bounds.
Outcome criterion_census() {
    Outcome out;
    const TemplateCatalog d2 = enumerate_templates(2, TemplateVariant::Detection);
    bool ok = d2.entries.size() == 4;
    std::string extra;
    for (auto variant : {TemplateVariant::Detection, TemplateVariant::Estimation}) {
        const TemplateCatalog catalog = enumerate_templates(5, variant);
        for (const auto& entry : catalog.entries)
            if (!satisfies_counting_bounds(entry)) ok = false;
        if (variant == TemplateVariant::Detection) {
            std::map<std::tuple<int, int, int>, long long> connected;
            for (const auto& entry : catalog.entries)
                if (entry.cc == 1)
                    ++connected[{entry.tmpl.v_count, entry.tmpl.w_count,
                                 entry.tmpl.edge_count()}];
            for (const auto& [key, count] : connected) {
                const auto [r, s, e] = key;
                const double bound =
                    std::pow(2.0, 4.0 * e) *
                    std::pow(static_cast<double>(std::min(r, s)),
                             static_cast<double>(e - (r + s - 1)));
                if (static_cast<double>(count) > bound) ok = false;
            }
            extra = ", detection |catalog(5)| = " + std::to_string(catalog.entries.size());
        }
    }
    out.pass = ok;
    out.details = "|templates(D=2)| = " + std::to_string(d2.entries.size()) + extra;
    return out;
}

// 4. Null calibration of the four tests.
Outcome criterion_calibration() {
    Outcome out;
    InstanceSpec null_spec;
    null_spec.kind = InstanceSpec::Kind::Null;
    null_spec.n = 64;
    null_spec.d = 64;
    const long long reps = 2000;
    const double cap = 0.05 + 3.0 * binomial_se(0.05, reps);
    const std::pair<TestSpec::Kind, std::string> tests[] = {
        {TestSpec::Kind::GlobalSum, "gs"},
        {TestSpec::Kind::RowScan, "rs"},
        {TestSpec::Kind::ColScan, "cs"},
        {TestSpec::Kind::SubmatrixScan, "ss2"},
    };
    for (const auto& [kind, name] : tests) {
        TestSpec test;
        test.kind = kind;
        test.delta = 0.05;
        test.m = 2;
        const double risk = mc_detection_risk(test, null_spec, reps, 4001u).mean;
        out.details += name + "=" + fmt(risk) + " ";
        if (risk > cap) out.pass = false;
    }
    out.details += "cap=" + fmt(cap);
    return out;
}

// 5. Global-sum power at 1.1x the threshold condition.
Outcome criterion_power() {
    Outcome out;
    const int n = 64, d = 64, kn = 32, kd = 32;
    const double delta = 0.05;
    const double lambda = 1.1 * 2.0 * std::sqrt(2.0 * std::log(1.0 / delta)) *
                          std::sqrt(static_cast<double>(n) * d) / (kn * kd);
    InstanceSpec spec;
    spec.kind = InstanceSpec::Kind::Block;
    spec.n = n;
    spec.d = d;
    spec.lambda = lambda;
    spec.kn = kn;
    spec.kd = kd;
    TestSpec test;
    test.kind = TestSpec::Kind::GlobalSum;
    test.delta = delta;
    const long long reps = 2000;
    const double risk = mc_detection_risk(test, spec, reps, 4002u).mean;
    const double cap = delta + 3.0 * binomial_se(delta, reps);
    out.pass = risk <= cap && lambda <= 1.0;
    out.details = "lambda=" + fmt(lambda) + " risk=" + fmt(risk) + " cap=" + fmt(cap);
    return out;
}

// 6. Combined support estimator power, each branch separately at 1.1x.
Outcome criterion_estimation_power() {
    Outcome out;
    struct Branch {
        const char* name;
        int n, d, kn, kd, m;
        double lambda;
    };
    // branch (c) needs m >= ~9.7 ln(nd/delta), so the column scan runs at
    // m = d - 1 where the enumeration stays tiny
    const Branch branches[] = {
        {"rowsum-and-width", 256, 256, 208, 169, 1, 0.9},
        {"colsum", 256, 256, 128, 208, 1, 0.9},
        {"scan", 141, 140, 140, 139, 139, 0.96},
    };
    const double delta = 0.05;
    const long long reps = 1000;
    const double cap = 5.0 * delta + 3.0 * binomial_se(5.0 * delta, reps);
    for (const auto& b : branches) {
        const double theta =
            2.0 * std::sqrt(2.0 * std::log(static_cast<double>(b.n) * b.d / delta));
        const double branch_a =
            std::min(b.lambda * b.kn / std::sqrt(static_cast<double>(b.n)),
                     b.lambda * std::sqrt(static_cast<double>(b.kd)));
        const double branch_b = b.lambda * b.kd / std::sqrt(static_cast<double>(b.d));
        const double branch_c =
            b.lambda * std::sqrt(static_cast<double>(std::min({b.m, b.kn - 1, b.kd})));
        if (std::max({branch_a, branch_b, branch_c}) < 1.1 * theta) {
            out.pass = false;
            out.details += std::string(b.name) + ": condition not met! ";
            continue;
        }
        InstanceSpec spec;
        spec.kind = InstanceSpec::Kind::Block;
        spec.n = b.n;
        spec.d = b.d;
        spec.lambda = b.lambda;
        spec.kn = b.kn;
        spec.kd = b.kd;
        const double risk =
            mc_estimation_risk(spec, b.m, b.kn, b.kd, delta, reps, 4003u).mean;
        out.details += std::string(b.name) + "=" + fmt(risk) + " ";
        if (risk > cap) out.pass = false;
    }
    out.details += "cap=" + fmt(cap);
    return out;
}

// 7. Peeling invariants on shuffled isotonic draws.
Outcome criterion_peeling() {
    Outcome out;
    const int sizes[] = {8, 16, 32, 64};
    long long holds = 0;
    const int total = 500;
    for (int trial = 0; trial < total; ++trial) {
        Rng rng(derive_seed(4004, trial, "acceptance-peel"));
        const int n = sizes[rng.uniform_int(4)];
        const int d = sizes[rng.uniform_int(4)];
        const int p = 1 + trial % 6;
        const auto kind = trial % 2 == 0 ? IsotonicKind::ColumnSortedUniform
                                         : IsotonicKind::CumulativeDecrements;
        const Matrix sorted = gen_isotonic(n, d, rng.next_u64(), kind);
        const Permutation pi(rng.permutation(n));
        const Matrix m = apply_row_permutation(sorted, pi, false);
        try {
            const PeelResult res = peel(m, p);
            bool dominated = true;
            for (int i : res.block.rows)
                for (int k : res.block.cols)
                    if (m.at(i, k) < res.block.lambda) dominated = false;
            const double cells = static_cast<double>(res.block.rows.size()) *
                                 static_cast<double>(res.block.cols.size());
            const double lhs =
                8.0 * p * std::log2(static_cast<double>(std::min(n, d))) *
                    res.block.lambda * res.block.lambda * cells +
                std::ldexp(static_cast<double>(n) * d, -2 * p);
            if (dominated && lhs + 1e-9 >= frobenius_sq(m)) ++holds;
        } catch (const Error&) {
        }
    }
    out.pass = holds == total;
    out.details = std::to_string(holds) + "/" + std::to_string(total) + " instances";
    return out;
}

// 8. Isotonic projection against the partition oracle.
Outcome criterion_projection() {
    Outcome out;
    double worst_gap = 0.0, worst_drift = 0.0;
    bool expansive = false;
    Rng rng(derive_seed(4005, 0, "acceptance-proj"));
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> x(6);
        for (double& v : x) v = 3.0 * rng.uniform01() - 1.0;
        Matrix column(6, 1);
        column.data = x;
        const Matrix projected = project_isotonic(column);

        // oracle: best feasible candidate over consecutive-block partitions
        double best_dist = 1e300;
        std::vector<double> oracle(6);
        for (unsigned cuts = 0; cuts < 32; ++cuts) {
            std::vector<double> cand(6);
            int start = 0;
            for (int i = 0; i < 6; ++i) {
                if (i != 5 && !(cuts >> i & 1)) continue;
                double mean = 0.0;
                for (int j = start; j <= i; ++j) mean += x[j];
                mean /= (i - start + 1);
                mean = std::min(1.0, std::max(0.0, mean));
                for (int j = start; j <= i; ++j) cand[j] = mean;
                start = i + 1;
            }
            bool feasible = true;
            for (int i = 0; i + 1 < 6; ++i)
                if (cand[i] < cand[i + 1]) feasible = false;
            if (!feasible) continue;
            double dist = 0.0;
            for (int i = 0; i < 6; ++i) dist += (cand[i] - x[i]) * (cand[i] - x[i]);
            if (dist < best_dist) {
                best_dist = dist;
                oracle = cand;
            }
        }
        for (int i = 0; i < 6; ++i)
            worst_gap = std::max(worst_gap, std::abs(projected.at(i, 0) - oracle[i]));

        const Matrix twice = project_isotonic(projected);
        for (int i = 0; i < 6; ++i)
            worst_drift = std::max(worst_drift, std::abs(twice.at(i, 0) - projected.at(i, 0)));

        std::vector<double> y(6);
        for (double& v : y) v = 3.0 * rng.uniform01() - 1.0;
        Matrix column_y(6, 1);
        column_y.data = y;
        const Matrix projected_y = project_isotonic(column_y);
        if (std::sqrt(reconstruction_loss(projected, projected_y)) >
            std::sqrt(reconstruction_loss(column, column_y)) + 1e-12)
            expansive = true;
    }
    out.pass = worst_gap <= 1e-6 && worst_drift <= 1e-12 && !expansive;
    out.details = "oracle gap " + fmt(worst_gap) + ", idempotence drift " + fmt(worst_drift) +
                  (expansive ? ", expansive!" : ", non-expansive");
    return out;
}

// 9. Linear-time block ranking stays under the stated rate.
Outcome criterion_block_ranking_rate() {
    Outcome out;
    std::vector<double> means;
    for (int n : {64, 128, 256}) {
        const int d = n;
        InstanceSpec spec;
        spec.kind = InstanceSpec::Kind::Block;
        spec.n = n;
        spec.d = d;
        spec.kn = n / 2;
        spec.kd = std::min(static_cast<int>(std::sqrt(static_cast<double>(n) * d)), d);
        spec.lambda = std::max(std::pow(static_cast<double>(n) * d, -0.25),
                               1.0 / std::sqrt(static_cast<double>(n)));
        auto losses = parallel_replicates<double>(200, [&](long long rep) {
            Rng rng(derive_seed(4006, static_cast<std::uint64_t>(rep) * 1000 + n,
                                "acceptance-rank"));
            const DrawnInstance inst = draw_instance(spec, rng);
            const ObservationMatrix y = sample_observations(inst.signal, rng);
            const Permutation pi_hat = rank_block(y, 0.05);
            return ranking_loss(inst.signal, pi_hat, inst.oracle);
        });
        means.push_back(summarize_mean(losses).mean);
        const double bound = 16.0 * (n + std::sqrt(static_cast<double>(n) * d)) *
                             std::log(static_cast<double>(n) * d);
        out.details += "n=" + std::to_string(n) + " loss=" + fmt(means.back()) +
                       " bound=" + fmt(bound) + " ";
        if (means.back() > bound) out.pass = false;
    }
    for (std::size_t i = 1; i < means.size(); ++i) {
        const double ratio = means[i] / std::max(means[i - 1], 1e-300);
        out.details += "ratio=" + fmt(ratio) + " ";
        if (ratio > 2.8) out.pass = false;
    }
    return out;
}

// 10. Monte Carlo validation of the moment formulas and null orthonormality.
Outcome criterion_moment_validation() {
    Outcome out;
    const long long reps = 100000;
    const TemplateCatalog det = enumerate_templates(2, TemplateVariant::Detection);
    const PriorSpec det_prior = detection_prior(4, 4, 0.5, 2, 2);
    for (const auto& entry : det.entries) {
        if (entry.cc != 1) continue;  // single-edge and the two 2-stars
        const MomentEstimate est = mc_moment_check(entry, det_prior, reps, 4007u);
        const double want = psi_moment_detection(entry, det_prior);
        const double gap = std::abs(est.mean - want);
        if (gap > 3.0 * est.stderr_) {
            out.pass = false;
            out.details += "detection moment off by " + fmt(gap / est.stderr_) + " sigma ";
        }
    }

    const TemplateCatalog est_cat = enumerate_templates(2, TemplateVariant::Estimation);
    PriorSpec est_prior = det_prior;
    est_prior.kind = PriorSpec::Kind::EstimationBernoulli;
    int validated = 0;
    for (const auto& entry : est_cat.entries) {
        if (entry.cc != 1 || entry.tmpl.v1_isolated()) continue;
        const MomentEstimate est = mc_moment_check(entry, est_prior, reps, 4008u);
        const double want = corr_star_moment(entry, est_prior);
        const double gap = std::abs(est.mean - want);
        ++validated;
        if (gap > 3.0 * est.stderr_) {
            out.pass = false;
            out.details += "estimation moment off by " + fmt(gap / est.stderr_) + " sigma ";
        }
    }

    const GramCheck gram = mc_gram_null(det, 4, 4, reps, 4009u);
    double worst_sigma = 0.0;
    for (int i = 0; i < gram.size; ++i)
        for (int j = 0; j < gram.size; ++j) {
            const double want = i == j ? 1.0 : 0.0;
            const double se = std::max(gram.stderr_[i * gram.size + j], 1e-12);
            worst_sigma =
                std::max(worst_sigma, std::abs(gram.mean[i * gram.size + j] - want) / se);
        }
    if (worst_sigma > 3.0) out.pass = false;
    out.details += std::to_string(validated) + " estimation templates, gram worst " +
                   fmt(worst_sigma) + " sigma";
    return out;
}

// 11. CLI determinism: byte-identical records.csv on rerun.
Outcome criterion_determinism(const std::string& cli) {
    Outcome out;
    const fs::path dir = fs::temp_directory_path() / "plantedrank_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);

    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    };
    auto run_cli = [&](const std::string& args) {
        const std::string cmd = cli + " " + args;
        return WEXITSTATUS(std::system(cmd.c_str()));
    };

    std::vector<ExperimentConfig> configs;
    {
        ExperimentConfig c;
        c.id = "acc-detect";
        c.kind = ExperimentKind::DetectRisk;
        c.generator = "block";
        c.n = 32;
        c.d = 32;
        c.lambda = 0.4;
        c.kn = 8;
        c.kd = 8;
        c.method = "aggregate";
        c.m = 2;
        c.replicates = 60;
        c.seed = 311;
        configs.push_back(c);
    }
    {
        ExperimentConfig c;
        c.id = "acc-estimate";
        c.kind = ExperimentKind::EstimateRisk;
        c.generator = "block";
        c.n = 24;
        c.d = 24;
        c.lambda = 0.8;
        c.kn = 12;
        c.kd = 16;
        c.m = 2;
        c.replicates = 60;
        c.seed = 312;
        configs.push_back(c);
    }
    {
        ExperimentConfig c;
        c.id = "acc-rank";
        c.kind = ExperimentKind::RankLoss;
        c.generator = "hard";
        c.n = 32;
        c.d = 32;
        c.m = 4;
        c.method = "spectral";
        c.replicates = 40;
        c.seed = 313;
        configs.push_back(c);
    }
    {
        ExperimentConfig c;
        c.id = "acc-peel";
        c.kind = ExperimentKind::PeelCheck;
        c.generator = "isotonic";
        c.n = 32;
        c.d = 16;
        c.p = 4;
        c.replicates = 40;
        c.seed = 314;
        configs.push_back(c);
    }

    int idx = 0;
    for (const auto& config : configs) {
        const fs::path config_path = dir / ("config" + std::to_string(idx) + ".json");
        {
            std::ofstream f(config_path);
            f << config.to_json().dump(2) << "\n";
        }
        const fs::path out_a = dir / ("a" + std::to_string(idx));
        const fs::path out_b = dir / ("b" + std::to_string(idx));
        setenv("PLANTEDRANK_THREADS", "2", 1);
        int rc = run_cli("run --config " + config_path.string() + " --output-dir " +
                         out_a.string() + " > /dev/null");
        setenv("PLANTEDRANK_THREADS", "4", 1);
        rc |= run_cli("run --config " + config_path.string() + " --output-dir " +
                      out_b.string() + " > /dev/null");
        unsetenv("PLANTEDRANK_THREADS");
        if (rc != 0) {
            out.pass = false;
            out.details += config.id + ": nonzero exit ";
            ++idx;
            continue;
        }
        if (slurp(out_a / "records.csv") != slurp(out_b / "records.csv")) {
            out.pass = false;
            out.details += config.id + ": records differ ";
        }
        ++idx;
    }
    if (out.pass) out.details = std::to_string(configs.size()) + " configs byte-identical";
    fs::remove_all(dir);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    std::string cli = PLANTEDRANK_CLI_PATH;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--cli") cli = argv[i + 1];

    struct Entry {
        int id;
        const char* name;
        double seconds_limit;  // 0 = unlimited
        Outcome (*fn)();
    };
    const Entry entries[] = {
        {1, "advantage oracle equivalence", 60.0, criterion_advantage_equivalence},
        {2, "single-edge closed form", 0.0, criterion_single_edge},
        {3, "template census and counting bounds", 120.0, criterion_census},
        {4, "detection null calibration", 0.0, criterion_calibration},
        {5, "detection power", 0.0, criterion_power},
        {6, "estimation power", 0.0, criterion_estimation_power},
        {7, "peeling invariants", 0.0, criterion_peeling},
        {8, "isotonic projection oracle", 0.0, criterion_projection},
        {9, "block ranking rate shape", 600.0, criterion_block_ranking_rate},
        {10, "moment validation", 0.0, criterion_moment_validation},
    };

    int failures = 0;
    for (const auto& entry : entries) {
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = entry.fn();
        } catch (const std::exception& e) {
            outcome.pass = false;
            outcome.details = std::string("exception: ") + e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (entry.seconds_limit > 0.0 && seconds > entry.seconds_limit) {
            outcome.pass = false;
            outcome.details += " [over the " + fmt(entry.seconds_limit) + " s limit]";
        }
        std::printf("[%s] criterion %d: %s — %s (%.1f s)\n", outcome.pass ? "PASS" : "FAIL",
                    entry.id, entry.name, outcome.details.c_str(), seconds);
        std::fflush(stdout);
        if (!outcome.pass) ++failures;
    }

    {
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = criterion_determinism(cli);
        } catch (const std::exception& e) {
            outcome.pass = false;
            outcome.details = std::string("exception: ") + e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] criterion 11: output determinism — %s (%.1f s)\n",
                    outcome.pass ? "PASS" : "FAIL", outcome.details.c_str(), seconds);
        if (!outcome.pass) ++failures;
    }
    return failures;
}

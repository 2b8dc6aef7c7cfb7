#include "plantedrank/experiment.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>

namespace plantedrank {

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::DetectRisk: return "detect-risk";
        case ExperimentKind::EstimateRisk: return "estimate-risk";
        case ExperimentKind::RankLoss: return "rank-loss";
        case ExperimentKind::PeelCheck: return "peel-check";
        case ExperimentKind::LowDegTable: return "lowdeg-table";
        case ExperimentKind::SeparationSweep: return "separation-sweep";
    }
    throw InvalidArgument("invalid config field: kind");
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
    if (s == "detect-risk") return ExperimentKind::DetectRisk;
    if (s == "estimate-risk") return ExperimentKind::EstimateRisk;
    if (s == "rank-loss") return ExperimentKind::RankLoss;
    if (s == "peel-check") return ExperimentKind::PeelCheck;
    if (s == "lowdeg-table") return ExperimentKind::LowDegTable;
    if (s == "separation-sweep") return ExperimentKind::SeparationSweep;
    throw InvalidArgument("invalid config field: kind");
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j{
        {"id", id},         {"kind", to_string(kind)},
        {"n", n},           {"d", d},
        {"lambda", lambda}, {"kn", kn},
        {"kd", kd},         {"m", m},
        {"delta", delta},   {"p", p},
        {"D", degree},      {"cs", c_s},
        {"method", method}, {"generator", generator},
        {"replicates", replicates},
        {"seed", seed},     {"output_dir", output_dir},
        {"epsilon", epsilon},
    };
    if (!rho_grid.empty()) j["rho_grid"] = rho_grid;
    return j;
}

namespace {

template <typename T>
void read_field(const nlohmann::json& j, const char* name, T& out) {
    if (!j.contains(name)) return;
    try {
        out = j.at(name).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw InvalidArgument(std::string("invalid config field: ") + name);
    }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    read_field(j, "id", c.id);
    std::string kind_name = to_string(c.kind);
    read_field(j, "kind", kind_name);
    c.kind = experiment_kind_from_string(kind_name);
    read_field(j, "n", c.n);
    read_field(j, "d", c.d);
    read_field(j, "lambda", c.lambda);
    read_field(j, "kn", c.kn);
    read_field(j, "kd", c.kd);
    read_field(j, "m", c.m);
    read_field(j, "delta", c.delta);
    read_field(j, "p", c.p);
    read_field(j, "D", c.degree);
    read_field(j, "cs", c.c_s);
    read_field(j, "method", c.method);
    read_field(j, "generator", c.generator);
    read_field(j, "replicates", c.replicates);
    read_field(j, "seed", c.seed);
    read_field(j, "output_dir", c.output_dir);
    read_field(j, "epsilon", c.epsilon);
    read_field(j, "rho_grid", c.rho_grid);
    if (c.replicates < 1) throw InvalidArgument("invalid config field: replicates");
    if (c.n < 1) throw InvalidArgument("invalid config field: n");
    if (c.d < 1) throw InvalidArgument("invalid config field: d");
    return c;
}

namespace {

InstanceSpec instance_from_config(const ExperimentConfig& c) {
    InstanceSpec spec;
    spec.n = c.n;
    spec.d = c.d;
    if (c.generator == "null") {
        spec.kind = InstanceSpec::Kind::Null;
    } else if (c.generator == "block") {
        spec.kind = InstanceSpec::Kind::Block;
        spec.lambda = c.lambda;
        spec.kn = c.kn;
        spec.kd = c.kd;
    } else if (c.generator == "hard") {
        spec.kind = InstanceSpec::Kind::Hard;
        spec.m = c.m;
    } else if (c.generator == "isotonic") {
        spec.kind = InstanceSpec::Kind::IsotonicShuffled;
    } else {
        throw InvalidArgument("invalid config field: generator");
    }
    return spec;
}

ExperimentRecord base_record(const ExperimentConfig& c, long long replicate,
                             std::uint64_t seed) {
    ExperimentRecord r;
    r.experiment_id = c.id;
    r.kind = to_string(c.kind);
    r.replicate = replicate;
    r.seed = seed;
    r.n = c.n;
    r.d = c.d;
    r.lambda = c.lambda;
    r.kn = c.kn;
    r.kd = c.kd;
    r.m = c.m;
    r.delta = c.delta;
    r.p = c.p;
    r.degree = c.degree;
    r.method = c.method;
    return r;
}

RunResult run_detect_risk(const ExperimentConfig& c) {
    const InstanceSpec instance = instance_from_config(c);
    auto records = parallel_replicates<ExperimentRecord>(c.replicates, [&](long long rep) {
        const std::uint64_t rep_seed = derive_seed(c.seed, static_cast<std::uint64_t>(rep),
                                                  "detect-risk");
        Rng rng(rep_seed);
        const DrawnInstance inst = draw_instance(instance, rng);
        const ObservationMatrix y = sample_observations(inst.signal, rng);
        ExperimentRecord r = base_record(c, rep, rep_seed);
        if (c.method == "gs") {
            const auto dec = stat_global_sum(y, c.delta);
            r.statistic = dec.statistic;
            r.threshold = dec.threshold;
            r.decision = dec.decision;
        } else if (c.method == "rs" || c.method == "cs") {
            const auto dec = stat_line_scan(y, c.delta,
                                            c.method == "rs" ? Axis::Rows : Axis::Cols);
            r.statistic = dec.statistic;
            r.threshold = dec.threshold;
            r.decision = dec.decision;
        } else if (c.method == "ss") {
            const auto dec = stat_submatrix_scan(y, c.m, c.delta);
            r.statistic = dec.statistic;
            r.threshold = dec.threshold;
            r.decision = dec.decision;
        } else if (c.method == "aggregate") {
            r.decision = detect_aggregate(y, c.m, c.kn, c.kd, c.delta).decision;
        } else if (c.method == "dyadic") {
            r.decision = detect_dyadic(y, c.m, c.delta).decision;
        } else {
            throw InvalidArgument("invalid config field: method");
        }
        return r;
    });

    std::vector<double> errors;
    const int x0 = instance.kind == InstanceSpec::Kind::Null ||
                           (instance.kind == InstanceSpec::Kind::Block && c.lambda <= 0.0)
                       ? 0
                       : 1;
    for (const auto& r : records) {
        const double diff = *r.decision - x0;
        errors.push_back(diff * diff);
    }
    const RiskEstimate risk = summarize_binary(errors);
    RunResult out;
    out.records = std::move(records);
    out.summary = {{"risk", risk.mean},
                   {"ci_half", risk.ci_half},
                   {"replicates", risk.replicates},
                   {"x0", x0}};
    return out;
}

RunResult run_estimate_risk(const ExperimentConfig& c) {
    if (c.generator != "block") throw InvalidArgument("invalid config field: generator");
    const InstanceSpec instance = instance_from_config(c);
    auto records = parallel_replicates<ExperimentRecord>(c.replicates, [&](long long rep) {
        const std::uint64_t rep_seed = derive_seed(c.seed, static_cast<std::uint64_t>(rep),
                                                  "estimate-risk");
        Rng rng(rep_seed);
        const DrawnInstance inst = draw_instance(instance, rng);
        const ObservationMatrix y = sample_observations(inst.signal, rng);
        int x_star = 0;
        for (int k = 0; k < inst.signal.cols; ++k)
            if (inst.signal.at(0, k) > 0.0) {
                x_star = 1;
                break;
            }
        ExperimentRecord r = base_record(c, rep, rep_seed);
        r.statistic = static_cast<double>(x_star);  // the target functional
        r.decision = est_combined(y, c.m, c.kn, c.kd, c.delta, 0).combined;
        return r;
    });
    std::vector<double> errors;
    for (const auto& r : records) {
        const double diff = *r.decision - *r.statistic;
        errors.push_back(diff * diff);
    }
    const RiskEstimate risk = summarize_binary(errors);
    RunResult out;
    out.records = std::move(records);
    out.summary = {{"risk", risk.mean}, {"ci_half", risk.ci_half},
                   {"replicates", risk.replicates}};
    return out;
}

RankMethod method_from_config(const ExperimentConfig& c) {
    RankMethod m;
    m.delta = c.delta;
    if (c.method == "rowsum") m.tag = RankMethod::Tag::RowSum;
    else if (c.method == "spectral") m.tag = RankMethod::Tag::Spectral;
    else if (c.method == "block") m.tag = RankMethod::Tag::Block;
    else throw InvalidArgument("invalid config field: method");
    return m;
}

RunResult run_rank_loss(const ExperimentConfig& c) {
    const InstanceSpec instance = instance_from_config(c);
    const RankMethod method = method_from_config(c);
    auto records = parallel_replicates<ExperimentRecord>(c.replicates, [&](long long rep) {
        const std::uint64_t rep_seed = derive_seed(c.seed, static_cast<std::uint64_t>(rep),
                                                  "rank-loss");
        Rng rng(rep_seed);
        const DrawnInstance inst = draw_instance(instance, rng);
        const ObservationMatrix y = sample_observations(inst.signal, rng);
        const Permutation pi_hat = rank_with_method(y, method);
        const Matrix m_hat = reconstruct(y, pi_hat);
        ExperimentRecord r = base_record(c, rep, rep_seed);
        r.ranking_loss = ranking_loss(inst.signal, pi_hat, inst.oracle);
        r.reconstruction_loss = reconstruction_loss(m_hat, inst.signal);
        return r;
    });
    std::vector<double> rank_losses, reco_losses;
    for (const auto& r : records) {
        rank_losses.push_back(*r.ranking_loss);
        reco_losses.push_back(*r.reconstruction_loss);
    }
    const MeanEstimate rank_est = summarize_mean(rank_losses);
    const MeanEstimate reco_est = summarize_mean(reco_losses);
    RunResult out;
    out.records = std::move(records);
    out.summary = {{"ranking_loss", rank_est.mean},
                   {"ranking_ci_half", rank_est.ci_half},
                   {"reconstruction_loss", reco_est.mean},
                   {"reconstruction_ci_half", reco_est.ci_half},
                   {"replicates", rank_est.replicates}};
    return out;
}

RunResult run_peel_check(const ExperimentConfig& c) {
    auto records = parallel_replicates<ExperimentRecord>(c.replicates, [&](long long rep) {
        const std::uint64_t rep_seed = derive_seed(c.seed, static_cast<std::uint64_t>(rep),
                                                  "peel-check");
        Rng rng(rep_seed);
        const Matrix sorted = gen_isotonic(c.n, c.d, rng.next_u64(),
                                           IsotonicKind::ColumnSortedUniform);
        const Permutation pi(rng.permutation(c.n));
        const Matrix m = apply_row_permutation(sorted, pi, /*inverse=*/false);
        ExperimentRecord r = base_record(c, rep, rep_seed);
        try {
            const PeelResult peel_result = peel(m, c.p);
            r.statistic = peel_result.rhs;
            r.threshold = peel_result.lhs;
            r.decision = 1;
        } catch (const Error&) {
            r.decision = 0;  // invariant violated
        }
        return r;
    });
    long long holds = 0;
    for (const auto& r : records) holds += *r.decision;
    RunResult out;
    out.records = std::move(records);
    out.summary = {{"holds", holds}, {"replicates", c.replicates},
                   {"fraction", static_cast<double>(holds) / c.replicates}};
    return out;
}

RunResult run_lowdeg_table(const ExperimentConfig& c) {
    PriorSpec prior;
    prior.n = c.n;
    prior.d = c.d;
    prior.lambda = c.lambda;
    prior.kn = c.kn;
    prior.kd = c.kd;
    RunResult out;
    nlohmann::json table = nlohmann::json::array();
    if (c.method == "adv") {
        prior.kind = PriorSpec::Kind::DetectionUniform;
        const TemplateCatalog catalog = enumerate_templates(c.degree,
                                                            TemplateVariant::Detection);
        for (int deg = 1; deg <= c.degree; ++deg) {
            const double adv_sq = adv_low_degree(catalog, prior, deg);
            const auto bound = detection_risk_lb(adv_sq);
            ExperimentRecord r = base_record(c, deg, c.seed);
            r.degree = deg;
            r.statistic = adv_sq;
            r.threshold = bound.primary;
            out.records.push_back(std::move(r));
            table.push_back({{"D", deg}, {"adv_sq", adv_sq}, {"risk_lb", bound.primary}});
        }
    } else if (c.method == "corr") {
        prior.kind = PriorSpec::Kind::EstimationBernoulli;
        for (int deg = 2; deg <= c.degree; ++deg) {
            const CorrBound bound = estimation_corr_bound(prior, deg, c.c_s);
            const double risk = estimation_risk_lb(prior, bound.inflated);
            ExperimentRecord r = base_record(c, deg, c.seed);
            r.degree = deg;
            r.statistic = bound.raw_sum;
            r.threshold = bound.inflated;
            out.records.push_back(std::move(r));
            table.push_back({{"D", deg},
                             {"raw_sum", bound.raw_sum},
                             {"inflated", bound.inflated},
                             {"risk_lb", risk},
                             {"e_x_star", bound.e_x_star}});
        }
    } else {
        throw InvalidArgument("invalid config field: method");
    }
    out.summary = {{"table", table}};
    return out;
}

RunResult run_separation_sweep(const ExperimentConfig& c) {
    if (c.rho_grid.empty()) throw InvalidArgument("invalid config field: rho_grid");
    const SweepResult sweep = separation_sweep(c.n, c.d, c.m, c.epsilon, c.rho_grid,
                                               c.replicates, c.seed);
    RunResult out;
    nlohmann::json table = nlohmann::json::array();
    long long idx = 0;
    for (const auto& point : sweep.table) {
        ExperimentRecord r = base_record(c, idx++, c.seed);
        r.statistic = point.rho;
        r.threshold = point.worst_risk;
        r.decision = point.worst_risk <= c.epsilon ? 1 : 0;
        out.records.push_back(std::move(r));
        table.push_back({{"rho", point.rho},
                         {"worst_risk", point.worst_risk},
                         {"worst_case", point.worst_case}});
    }
    out.summary = {{"table", table},
                   {"null_risk", sweep.null_risk},
                   {"epsilon", c.epsilon}};
    if (sweep.rho_reached)
        out.summary["rho_reached"] = *sweep.rho_reached;
    else
        out.summary["rho_reached"] = "not reached";
    return out;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    RunResult result;
    switch (config.kind) {
        case ExperimentKind::DetectRisk: result = run_detect_risk(config); break;
        case ExperimentKind::EstimateRisk: result = run_estimate_risk(config); break;
        case ExperimentKind::RankLoss: result = run_rank_loss(config); break;
        case ExperimentKind::PeelCheck: result = run_peel_check(config); break;
        case ExperimentKind::LowDegTable: result = run_lowdeg_table(config); break;
        case ExperimentKind::SeparationSweep: result = run_separation_sweep(config); break;
    }
    const auto elapsed = std::chrono::steady_clock::now() - start;
    result.summary["elapsed_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
    result.summary["id"] = config.id;
    result.summary["kind"] = to_string(config.kind);
    return result;
}

namespace {

std::string csv_cell(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

}  // namespace

std::string records_to_csv(const std::vector<ExperimentRecord>& records) {
    std::string out =
        "experiment_id,kind,replicate,seed,n,d,lambda,kn,kd,m,delta,p,D,method,"
        "statistic,threshold,decision,ranking_loss,reconstruction_loss,wall_ms\n";
    for (const auto& r : records) {
        out += r.experiment_id + ',' + r.kind + ',' + std::to_string(r.replicate) + ',' +
               std::to_string(r.seed) + ',' + std::to_string(r.n) + ',' +
               std::to_string(r.d) + ',' + format_double(r.lambda) + ',' +
               std::to_string(r.kn) + ',' + std::to_string(r.kd) + ',' +
               std::to_string(r.m) + ',' + format_double(r.delta) + ',' +
               std::to_string(r.p) + ',' + std::to_string(r.degree) + ',' + r.method + ',' +
               csv_cell(r.statistic) + ',' + csv_cell(r.threshold) + ',' +
               (r.decision ? std::to_string(*r.decision) : std::string()) + ',' +
               csv_cell(r.ranking_loss) + ',' + csv_cell(r.reconstruction_loss) + ',' +
               std::to_string(r.wall_ms) + '\n';
    }
    return out;
}

std::string write_results(const ExperimentConfig& config, const RunResult& result,
                          const std::string& directory) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(directory, ec);
    if (ec) throw Error("cannot create output directory: " + directory);

    const fs::path dir(directory);
    {
        std::ofstream out(dir / "records.csv", std::ios::binary);
        if (!out) throw Error("cannot write " + (dir / "records.csv").string());
        out << records_to_csv(result.records);
    }
    {
        std::ofstream out(dir / "summary.json");
        if (!out) throw Error("cannot write " + (dir / "summary.json").string());
        out << result.summary.dump(2) << "\n";
    }
    const fs::path manifest_path = dir / "manifest.json";
    {
        nlohmann::json manifest{{"config", config.to_json()},
                                {"master_seed", config.seed},
                                {"records", "records.csv"},
                                {"summary", "summary.json"}};
        std::ofstream out(manifest_path);
        if (!out) throw Error("cannot write " + manifest_path.string());
        out << manifest.dump(2) << "\n";
    }
    return manifest_path.string();
}

}  // namespace plantedrank

// Command-line front end: instance generation, sampling, detection and
// support tests, ranking, reconstruction, peeling, low-degree bounds, and
// replicated experiments driven by JSON configs.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "plantedrank/experiment.hpp"

namespace pr = plantedrank;
using nlohmann::json;

namespace {

json decision_json(const pr::DetectDecision& d) {
    return {{"test", d.test},
            {"statistic", d.statistic},
            {"threshold", d.threshold},
            {"decision", d.decision}};
}

std::vector<int> read_permutation_file(const std::string& path, int expected) {
    std::ifstream in(path);
    if (!in) throw pr::Error("cannot open: " + path);
    std::vector<int> values;
    int v = 0;
    while (in >> v) values.push_back(v);
    if (static_cast<int>(values.size()) != expected)
        throw pr::Error("permutation in " + path + " has wrong length");
    return values;
}

struct GenArgs {
    std::string kind = "isotonic-sorted";
    int n = 8, d = 8, m = 2;
    double lambda = 0.5;
    int kn = 1, kd = 1;
    std::uint64_t seed = 1;
    std::string output;
    std::string perm_output;
};

void run_gen(const GenArgs& a) {
    if (a.kind == "block") {
        pr::Rng rng(a.seed);
        pr::BlockSpec spec;
        spec.lambda = a.lambda;
        spec.rows = rng.subset(a.n, a.kn);
        spec.cols = rng.subset(a.d, a.kd);
        pr::write_signal_file(pr::make_block_matrix(spec, a.n, a.d), a.output);
        return;
    }
    if (a.kind == "hard") {
        const auto inst = pr::gen_hard_instance(a.n, a.d, a.m, a.seed);
        pr::write_signal_file(inst.signal, a.output);
        if (!a.perm_output.empty()) {
            std::ofstream out(a.perm_output);
            if (!out) throw pr::Error("cannot open for writing: " + a.perm_output);
            for (int i = 0; i < inst.oracle.size(); ++i) {
                if (i) out << " ";
                out << inst.oracle(i);
            }
            out << "\n";
        }
        return;
    }
    const pr::IsotonicKind kind = a.kind == "isotonic-cumulative"
                                      ? pr::IsotonicKind::CumulativeDecrements
                                      : pr::IsotonicKind::ColumnSortedUniform;
    if (a.kind != "isotonic-sorted" && a.kind != "isotonic-cumulative")
        throw CLI::ValidationError("--kind", "unknown generator kind: " + a.kind);
    pr::write_signal_file(pr::gen_isotonic(a.n, a.d, a.seed, kind), a.output);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Planted-submatrix detection, support estimation, ranking and "
                 "low-degree bound toolkit"};
    app.require_subcommand(1);

    // --- gen ---------------------------------------------------------------
    GenArgs gen_args;
    auto* gen = app.add_subcommand("gen", "Generate a signal matrix file");
    gen->add_option("--kind", gen_args.kind,
                    "isotonic-sorted | isotonic-cumulative | block | hard");
    gen->add_option("--n", gen_args.n, "rows")->required();
    gen->add_option("--d", gen_args.d, "columns")->required();
    gen->add_option("--m", gen_args.m, "group count (hard)");
    gen->add_option("--lambda", gen_args.lambda, "block height");
    gen->add_option("--kn", gen_args.kn, "block rows");
    gen->add_option("--kd", gen_args.kd, "block columns");
    gen->add_option("--seed", gen_args.seed, "seed");
    gen->add_option("--output", gen_args.output, "output matrix file")->required();
    gen->add_option("--perm-output", gen_args.perm_output, "oracle permutation file (hard)");

    // --- sample ------------------------------------------------------------
    std::string sample_input, sample_output;
    std::uint64_t sample_seed = 1;
    auto* sample = app.add_subcommand("sample", "Sample observations from a signal file");
    sample->add_option("--input", sample_input, "signal matrix file")->required();
    sample->add_option("--seed", sample_seed, "seed");
    sample->add_option("--output", sample_output, "output observation file")->required();

    // --- detect ------------------------------------------------------------
    std::string detect_input;
    double detect_delta = 0.05;
    int detect_m = 1, detect_kn = 0, detect_kd = 0;
    bool detect_dyadic_flag = false;
    auto* detect = app.add_subcommand("detect", "Detection statistics on an observation file");
    detect->add_option("--input", detect_input, "observation file")->required();
    detect->add_option("--delta", detect_delta, "tuning level");
    detect->add_option("--m", detect_m, "scan size");
    detect->add_option("--kn", detect_kn, "block row count for the aggregate clamp");
    detect->add_option("--kd", detect_kd, "block column count for the aggregate clamp");
    detect->add_flag("--dyadic", detect_dyadic_flag, "aggregate over dyadic (K_n, K_d)");

    // --- estimate ----------------------------------------------------------
    std::string est_input;
    double est_delta = 0.05;
    int est_row = 0, est_m = 1, est_kn = 0, est_kd = 0;
    auto* estimate = app.add_subcommand("estimate", "Support membership tests for one row");
    estimate->add_option("--input", est_input, "observation file")->required();
    estimate->add_option("--row", est_row, "row under test");
    estimate->add_option("--delta", est_delta, "tuning level");
    estimate->add_option("--m", est_m, "scan size");
    estimate->add_option("--kn", est_kn, "block row count for the clamp");
    estimate->add_option("--kd", est_kd, "block column count for the clamp");

    // --- rank --------------------------------------------------------------
    std::string rank_input, rank_method = "rowsum";
    double rank_delta = 0.05;
    auto* rank = app.add_subcommand("rank", "Rank the rows of an observation file");
    rank->add_option("--input", rank_input, "observation file")->required();
    rank->add_option("--method", rank_method, "rowsum | spectral | block");
    rank->add_option("--delta", rank_delta, "tuning level (block)");

    // --- reconstruct -------------------------------------------------------
    std::string reco_input, reco_perm, reco_output;
    auto* reco = app.add_subcommand("reconstruct",
                                    "Isotonic reconstruction given a permutation");
    reco->add_option("--input", reco_input, "observation file")->required();
    reco->add_option("--perm", reco_perm, "permutation file")->required();
    reco->add_option("--output", reco_output, "output matrix file (default: stdout)");

    // --- peel --------------------------------------------------------------
    std::string peel_input;
    int peel_p = 4;
    auto* peel_cmd = app.add_subcommand("peel", "Dominated-block extraction");
    peel_cmd->add_option("--input", peel_input, "signal matrix file")->required();
    peel_cmd->add_option("--p", peel_p, "level count");

    // --- lowdeg ------------------------------------------------------------
    auto* lowdeg = app.add_subcommand("lowdeg", "Low-degree advantage and correlation bounds");
    lowdeg->require_subcommand(1);
    long long ld_n = 8, ld_d = 8, ld_kn = 1, ld_kd = 1;
    double ld_lambda = 0.5, ld_cs = 18.0;
    int ld_degree = 2;
    std::string ld_variant = "detection";
    for (auto* sub : {lowdeg->add_subcommand("adv", "squared advantage"),
                      lowdeg->add_subcommand("corr", "correlation bound"),
                      lowdeg->add_subcommand("catalog", "template catalog")}) {
        sub->add_option("--n", ld_n, "rows");
        sub->add_option("--d", ld_d, "columns");
        sub->add_option("--lambda", ld_lambda, "block height");
        sub->add_option("--kn", ld_kn, "block rows");
        sub->add_option("--kd", ld_kd, "block columns");
        sub->add_option("--D", ld_degree, "degree cap");
        sub->add_option("--cs", ld_cs, "inflation constant (corr)");
        sub->add_option("--variant", ld_variant, "detection | estimation (catalog)");
    }

    // --- run / sweep ---------------------------------------------------------
    std::string run_config, run_output;
    auto* run = app.add_subcommand("run", "Execute an experiment config");
    run->add_option("--config", run_config, "JSON config file")->required();
    run->add_option("--output-dir", run_output, "override the config output directory");

    int sweep_n = 32, sweep_d = 32, sweep_m = 2;
    double sweep_eps = 0.1, sweep_rho_min = 0.0, sweep_rho_max = 32.0;
    int sweep_count = 9;
    long long sweep_reps = 100;
    std::uint64_t sweep_seed = 1;
    std::string sweep_output;
    auto* sweep = app.add_subcommand("sweep", "Separation-distance sweep");
    sweep->add_option("--n", sweep_n, "rows");
    sweep->add_option("--d", sweep_d, "columns");
    sweep->add_option("--m", sweep_m, "scan size");
    sweep->add_option("--epsilon", sweep_eps, "target risk");
    sweep->add_option("--rho-min", sweep_rho_min, "grid start");
    sweep->add_option("--rho-max", sweep_rho_max, "grid end");
    sweep->add_option("--rho-count", sweep_count, "grid points");
    sweep->add_option("--replicates", sweep_reps, "Monte Carlo replicates");
    sweep->add_option("--seed", sweep_seed, "seed");
    sweep->add_option("--output-dir", sweep_output, "write records/summary/manifest here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*gen) {
            run_gen(gen_args);
        } else if (*sample) {
            const pr::Matrix m = pr::read_signal_file(sample_input);
            pr::write_observation_file(pr::sample_observations(m, sample_seed), sample_output);
        } else if (*detect) {
            const pr::ObservationMatrix y = pr::read_observation_file(detect_input);
            json records = json::array();
            int overall = 0;
            if (detect_dyadic_flag) {
                const auto dy = pr::detect_dyadic(y, detect_m, detect_delta);
                for (const auto& part : dy.parts) records.push_back(decision_json(part));
                overall = dy.decision;
            } else {
                const int kn = detect_kn > 0 ? detect_kn : y.rows;
                const int kd = detect_kd > 0 ? detect_kd : y.cols;
                const auto agg = pr::detect_aggregate(y, detect_m, kn, kd, detect_delta);
                for (const auto& part : agg.parts) records.push_back(decision_json(part));
                overall = agg.decision;
            }
            std::cout << json{{"decision", overall}, {"tests", records}}.dump(2) << "\n";
        } else if (*estimate) {
            const pr::ObservationMatrix y = pr::read_observation_file(est_input);
            const int kn = est_kn > 0 ? est_kn : y.rows;
            const int kd = est_kd > 0 ? est_kd : y.cols;
            const auto dec = pr::est_combined(y, est_m, kn, kd, est_delta, est_row);
            std::cout << json{{"row", dec.row},
                              {"combined", dec.combined},
                              {"scan_size", dec.scan_size},
                              {"f_se", decision_json(dec.f_se)},
                              {"f_se2", decision_json(dec.f_se2.decision)},
                              {"f_se2_scan", decision_json(dec.f_se2_scan.decision)},
                              {"selected_cols", dec.f_se2.selected_cols},
                              {"selected_cols_scan", dec.f_se2_scan.selected_cols}}
                             .dump(2)
                      << "\n";
        } else if (*rank) {
            const pr::ObservationMatrix y = pr::read_observation_file(rank_input);
            pr::RankMethod method;
            method.delta = rank_delta;
            if (rank_method == "rowsum") method.tag = pr::RankMethod::Tag::RowSum;
            else if (rank_method == "spectral") method.tag = pr::RankMethod::Tag::Spectral;
            else if (rank_method == "block") method.tag = pr::RankMethod::Tag::Block;
            else throw CLI::ValidationError("--method", "unknown method: " + rank_method);
            const pr::Permutation pi = pr::rank_with_method(y, method);
            for (int i = 0; i < pi.size(); ++i) {
                if (i) std::cout << " ";
                std::cout << pi(i);
            }
            std::cout << "\n";
        } else if (*reco) {
            const pr::ObservationMatrix y = pr::read_observation_file(reco_input);
            const pr::Permutation pi(read_permutation_file(reco_perm, y.rows));
            const pr::Matrix m = pr::reconstruct(y, pi);
            if (reco_output.empty()) {
                std::cout << m.rows << " " << m.cols << "\n";
                for (int i = 0; i < m.rows; ++i) {
                    for (int k = 0; k < m.cols; ++k) {
                        if (k) std::cout << " ";
                        std::cout << pr::format_double(m.at(i, k));
                    }
                    std::cout << "\n";
                }
            } else {
                pr::write_signal_file(m, reco_output);
            }
        } else if (*peel_cmd) {
            const pr::Matrix m = pr::read_signal_file(peel_input);
            const auto res = pr::peel(m, peel_p);
            std::cout << json{{"lambda", res.block.lambda},
                              {"S", res.block.rows},
                              {"T", res.block.cols},
                              {"u_star", res.u_star},
                              {"lhs", res.lhs},
                              {"rhs", res.rhs},
                              {"inequality_checked", res.inequality_checked}}
                             .dump(2)
                      << "\n";
        } else if (*lowdeg) {
            pr::PriorSpec prior;
            prior.n = ld_n;
            prior.d = ld_d;
            prior.lambda = ld_lambda;
            prior.kn = ld_kn;
            prior.kd = ld_kd;
            if (lowdeg->got_subcommand("adv")) {
                prior.kind = pr::PriorSpec::Kind::DetectionUniform;
                const double adv_sq = pr::adv_low_degree(prior, ld_degree);
                const auto bound = pr::detection_risk_lb(adv_sq);
                std::cout << json{{"adv_sq", adv_sq},
                                  {"risk_lb", bound.primary},
                                  {"risk_lb_secondary", bound.secondary}}
                                 .dump(2)
                          << "\n";
            } else if (lowdeg->got_subcommand("corr")) {
                prior.kind = pr::PriorSpec::Kind::EstimationBernoulli;
                const auto bound = pr::estimation_corr_bound(prior, ld_degree, ld_cs);
                std::cout << json{{"raw_sum", bound.raw_sum},
                                  {"inflated", bound.inflated},
                                  {"e_x_star", bound.e_x_star},
                                  {"skipped", bound.skipped},
                                  {"risk_lb", pr::estimation_risk_lb(prior, bound.inflated)}}
                                 .dump(2)
                          << "\n";
            } else {
                const auto variant = ld_variant == "estimation"
                                         ? pr::TemplateVariant::Estimation
                                         : pr::TemplateVariant::Detection;
                const auto catalog = pr::enumerate_templates(ld_degree, variant);
                // edge-list text export: one template per line
                for (const auto& entry : catalog.entries) {
                    std::cout << "V=" << entry.tmpl.v_count << " W=" << entry.tmpl.w_count
                              << " aut=" << entry.aut << " cc=" << entry.cc << " edges=";
                    for (std::size_t i = 0; i < entry.tmpl.edges.size(); ++i) {
                        if (i) std::cout << ";";
                        std::cout << entry.tmpl.edges[i].first << "-"
                                  << entry.tmpl.edges[i].second;
                    }
                    std::cout << "\n";
                }
            }
        } else if (*run) {
            std::ifstream in(run_config);
            if (!in) throw pr::Error("cannot open: " + run_config);
            json j;
            in >> j;
            pr::ExperimentConfig config = pr::ExperimentConfig::from_json(j);
            if (!run_output.empty()) config.output_dir = run_output;
            const pr::RunResult result = pr::run_experiment(config);
            const std::string manifest = pr::write_results(config, result, config.output_dir);
            std::cout << manifest << "\n";
        } else if (*sweep) {
            pr::ExperimentConfig config;
            config.id = "sweep";
            config.kind = pr::ExperimentKind::SeparationSweep;
            config.n = sweep_n;
            config.d = sweep_d;
            config.m = sweep_m;
            config.epsilon = sweep_eps;
            config.replicates = sweep_reps;
            config.seed = sweep_seed;
            if (sweep_count < 1) throw CLI::ValidationError("--rho-count", "needs >= 1");
            for (int i = 0; i < sweep_count; ++i)
                config.rho_grid.push_back(
                    sweep_count == 1 ? sweep_rho_min
                                     : sweep_rho_min + (sweep_rho_max - sweep_rho_min) * i /
                                                           (sweep_count - 1));
            const pr::RunResult result = pr::run_experiment(config);
            if (!sweep_output.empty()) {
                config.output_dir = sweep_output;
                pr::write_results(config, result, sweep_output);
            }
            std::cout << result.summary.dump(2) << "\n";
        }
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

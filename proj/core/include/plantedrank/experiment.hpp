#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "plantedrank/detect.hpp"
#include "plantedrank/lowdeg.hpp"
#include "plantedrank/peel.hpp"
#include "plantedrank/rank.hpp"
#include "plantedrank/support.hpp"

namespace plantedrank {

enum class ExperimentKind {
    DetectRisk,
    EstimateRisk,
    RankLoss,
    PeelCheck,
    LowDegTable,
    SeparationSweep,
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& s);

struct ExperimentConfig {
    std::string id = "experiment";
    ExperimentKind kind = ExperimentKind::DetectRisk;
    int n = 8, d = 8;
    double lambda = 0.0;
    int kn = 1, kd = 1;
    int m = 1;
    double delta = 0.05;
    int p = 4;
    int degree = 2;      // D
    double c_s = 18.0;
    std::string method = "gs";       // per-kind: test / rank method / adv|corr
    std::string generator = "null";  // null | block | hard | isotonic
    long long replicates = 1;
    std::uint64_t seed = 1;
    std::string output_dir = "out";
    double epsilon = 0.1;            // separation sweep target
    std::vector<double> rho_grid;    // separation sweep grid

    nlohmann::json to_json() const;
    static ExperimentConfig from_json(const nlohmann::json& j);
};

// One row of records.csv. Optional fields print as empty cells; the exact
// column set and order are part of the output contract (see README).
struct ExperimentRecord {
    std::string experiment_id;
    std::string kind;
    long long replicate = 0;
    std::uint64_t seed = 0;
    int n = 0, d = 0;
    double lambda = 0.0;
    int kn = 0, kd = 0, m = 0;
    double delta = 0.0;
    int p = 0;
    int degree = 0;
    std::string method;
    std::optional<double> statistic;
    std::optional<double> threshold;
    std::optional<int> decision;
    std::optional<double> ranking_loss;
    std::optional<double> reconstruction_loss;
    long long wall_ms = 0;  // pinned to 0: records.csv is byte-reproducible
};

struct RunResult {
    std::vector<ExperimentRecord> records;
    nlohmann::json summary;
};

RunResult run_experiment(const ExperimentConfig& config);

std::string records_to_csv(const std::vector<ExperimentRecord>& records);

// Writes records.csv, summary.json and manifest.json; returns the manifest path.
std::string write_results(const ExperimentConfig& config, const RunResult& result,
                          const std::string& directory);

}  // namespace plantedrank

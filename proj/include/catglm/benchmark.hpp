#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "catglm/data.hpp"
#include "catglm/glm.hpp"
#include "catglm/grasp.hpp"

namespace catglm {

struct BenchmarkConfig {
    SplitPlan plan;
    GraspConfig grasp;
};

struct ReshuffleOutcome {
    std::size_t index = 0;
    double original = 0.0;   // one-hot model on the test sample (CCR or RMSE)
    double clustered = 0.0;  // best GRASP model on the test sample
    bool original_converged = false;
    double best_payoff = 0.0;
    std::size_t best_repeat = 0;
    std::vector<Clustering> best_clusterings;
};

struct RunReport {
    std::string name;
    Family family = Family::bernoulli_logit;
    BenchmarkConfig config;
    std::vector<std::string> clustered_predictors;
    std::vector<ReshuffleOutcome> reshuffles;
    double mean_original = 0.0;
    double mean_clustered = 0.0;
    double relative_complexity = 0.0;
    double wall_seconds = 0.0;  // not serialized: the report JSON must be reproducible

    const char* metric_name() const { return family == Family::bernoulli_logit ? "ccr" : "rmse"; }
    nlohmann::json to_json(const Schema& schema) const;
    /// One-line summary row: name, original, clustered, relative complexity.
    std::string table_row() const;
    static std::string table_header(Family family);
};

/// Original-model protocol only: one-hot fit on each reshuffle's training
/// sample, scored on its test sample.
struct OriginalReport {
    std::vector<double> per_reshuffle;
    std::vector<bool> converged;
    double mean = 0.0;
};

OriginalReport run_original(const Dataset& data, const Schema& schema, Family family, const SplitPlan& plan,
                            const FitConfig& fit = {});

/// Seed handed to GRASP for reshuffle `index` of a benchmark seeded with `seed`.
std::uint64_t reshuffle_grasp_seed(std::uint64_t seed, std::size_t index);

/// Ten (plan.n_reshuffles) train/test reshuffles; for each, the one-hot and
/// the GRASP-clustered model are fit on train and scored on test.
RunReport run_benchmark(const std::string& name, const Dataset& data, const Schema& schema, Family family,
                        const BenchmarkConfig& config);

/// Family implied by the schema's response type.
Family default_family(const Schema& schema);

}  // namespace catglm

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "catglm/clustering.hpp"
#include "catglm/data.hpp"
#include "catglm/glm.hpp"

namespace catglm {

class GraspError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GraspConfig {
    std::size_t m = 100;
    int k_prime = 2;
    // Fixed restricted-candidate-list size. Unset: 3 when some remaining
    // predictor has more than 5 categories, otherwise 2.
    std::optional<std::size_t> rcl_size;
    std::uint64_t seed = 0;
    // Share of the training sample held out to score candidates. Zero scores
    // candidates on the test sample instead.
    double payoff_split = 0.25;
    FitConfig fit;
    unsigned threads = 1;

    void validate() const;
};

/// RCL size for the predictors still to be clustered (given their K_j).
std::size_t rcl_size_for(const GraspConfig& config, std::span<const std::size_t> remaining_cardinalities);

/// Categorical predictors (indices among categorical predictors) with
/// K_j > k_prime. Throws GraspError when there are none.
std::vector<std::size_t> eligible_predictors(const Schema& schema, int k_prime);

/// One commit of a constructive pass.
struct StepRecord {
    std::size_t predictor = 0;        // categorical index
    std::size_t clustering_index = 0; // into the predictor's feasible list
    double payoff = 0.0;
    std::size_t candidates = 0;       // candidates evaluated in this step
    std::size_t rcl_size = 0;
    std::size_t rank = 0;             // position of the drawn entry in the sorted list
    double cutoff_payoff = 0.0;       // payoff of the first entry outside the RCL (or -inf)
};

struct IterationResult {
    std::size_t repeat = 0;
    std::vector<Clustering> clusterings;  // one per eligible predictor, eligible order
    double payoff = 0.0;                  // validation payoff of the clustered model
    FittedGlm model;                      // clustered model refit on the full training sample
    std::vector<StepRecord> steps;
    std::vector<std::string> diagnostics;

    const Clustering& clustering_for(const std::string& predictor) const;
};

struct GraspOutput {
    std::size_t best_index = 0;           // into all_iterations
    std::vector<IterationResult> all_iterations;
    std::vector<std::string> failures;    // repeats that raised, with the reason
    std::vector<std::size_t> eligible;    // categorical indices
    std::vector<CategoryOrdering> orderings;  // per eligible predictor
    std::optional<double> test_metric;    // best model on the test sample (CCR or RMSE)
    std::uint64_t seed = 0;

    const IterationResult& best() const { return all_iterations.at(best_index); }
    nlohmann::json to_json(const Schema& schema) const;
};

/// Shared, immutable state of one GRASP run: the fit / validation partition,
/// category orderings and feasible clusterings of every eligible predictor.
class GraspProblem {
public:
    /// `test` may be null unless config.payoff_split == 0.
    GraspProblem(const Dataset& train, const Dataset* test, const Schema& schema, Family family, GraspConfig config);

    /// Partial solution: chosen clustering index per categorical predictor,
    /// -1 for predictors still one-hot encoded.
    using State = std::vector<int>;
    State empty_state() const { return State(schema_.n_categorical(), -1); }

    /// Validation payoff (CCR, or -RMSE for counts) of the model fit on the
    /// fit part with `state` applied and predictor j reduced by its
    /// feasible clustering `clustering_index`. Fit failures give -inf.
    double evaluate_candidate(const State& state, std::size_t j, std::size_t clustering_index,
                              std::string* diagnostic = nullptr) const;

    IterationResult single_pass(std::size_t repeat_index) const;

    /// Encodings for a state (unset predictors stay one-hot).
    std::vector<Encoding> encodings(const State& state) const;
    Clustering clustering(std::size_t j, std::size_t clustering_index) const;

    const std::vector<std::size_t>& eligible() const { return eligible_; }
    const std::vector<std::vector<int>>& feasible(std::size_t j) const { return feasible_.at(j); }
    const CategoryOrdering& ordering(std::size_t j) const { return orderings_.at(j); }
    const Dataset& fit_part() const { return fit_part_; }
    const Dataset& validation() const { return *validation_; }
    const Dataset& train() const { return train_; }
    const Schema& schema() const { return schema_; }
    Family family() const { return family_; }
    const GraspConfig& config() const { return config_; }

private:
    double payoff(const FittedGlm& model, const Dataset& data, std::span<const Encoding> enc) const;

    const Dataset& train_;
    const Schema& schema_;
    Family family_;
    GraspConfig config_;
    Dataset fit_part_;
    Dataset holdout_;
    const Dataset* validation_ = nullptr;
    std::vector<std::size_t> eligible_;
    std::vector<CategoryOrdering> orderings_;          // per categorical index (eligible only filled)
    std::vector<std::vector<std::vector<int>>> feasible_;  // per categorical index
};

/// m independent constructive passes; returns the best (highest payoff,
/// lowest repeat index on ties) and every pass. Deterministic in the seed
/// regardless of config.threads.
GraspOutput grasp_run(const Dataset& train, const Dataset* test, const Schema& schema, Family family,
                      const GraspConfig& config);

/// Test-sample metric of a fitted model under the given encodings.
double test_metric(const FittedGlm& model, const Dataset& data, const Schema& schema, std::span<const Encoding> enc);

}  // namespace catglm

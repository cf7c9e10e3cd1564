#include "catglm/grasp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "catglm/random.hpp"
#include "parallel.hpp"

namespace catglm {

using nlohmann::json;

namespace {

constexpr double kFailedPayoff = -std::numeric_limits<double>::infinity();

struct Candidate {
    double payoff;
    std::size_t predictor;
    std::size_t index;
};

}  // namespace

void GraspConfig::validate() const {
    if (m < 1) throw GraspError("m must be at least 1");
    if (k_prime < 2) throw GraspError("k_prime must be at least 2");
    if (rcl_size && *rcl_size < 1) throw GraspError("rcl size must be at least 1");
    if (!(payoff_split >= 0.0 && payoff_split < 1.0)) throw GraspError("payoff split must lie in [0, 1)");
}

std::size_t rcl_size_for(const GraspConfig& config, std::span<const std::size_t> remaining_cardinalities) {
    if (config.rcl_size) return *config.rcl_size;
    const bool large = std::any_of(remaining_cardinalities.begin(), remaining_cardinalities.end(),
                                   [](std::size_t k) { return k > 5; });
    return large ? 3 : 2;
}

std::vector<std::size_t> eligible_predictors(const Schema& schema, int k_prime) {
    std::vector<std::size_t> out;
    const auto n = schema.n_categorical();
    for (std::size_t j = 0; j < n; ++j)
        if (schema.categorical(j).cardinality() > static_cast<std::size_t>(k_prime)) out.push_back(j);
    if (out.empty()) {
        throw GraspError("no categorical predictor has more than k_prime = " + std::to_string(k_prime) +
                         " categories; fit the plain one-hot GLM instead");
    }
    return out;
}

const Clustering& IterationResult::clustering_for(const std::string& predictor) const {
    for (const auto& c : clusterings)
        if (c.predictor == predictor) return c;
    throw GraspError("iteration " + std::to_string(repeat) + " has no clustering for '" + predictor + "'");
}

double test_metric(const FittedGlm& model, const Dataset& data, const Schema& schema, std::span<const Encoding> enc) {
    const auto design = build_design(data, schema, enc);
    const auto mu = predict_mean(model, design);
    return model.family == Family::bernoulli_logit ? ccr(mu, data.response) : rmse(mu, data.response);
}

GraspProblem::GraspProblem(const Dataset& train, const Dataset* test, const Schema& schema, Family family,
                           GraspConfig config)
    : train_(train), schema_(schema), family_(family), config_(std::move(config)) {
    config_.validate();
    eligible_ = eligible_predictors(schema_, config_.k_prime);

    if (config_.payoff_split == 0.0) {
        if (!test) throw GraspError("payoff split 0 scores candidates on the test sample, but none was given");
        fit_part_ = train_;
        validation_ = test;
    } else {
        const auto n_val = static_cast<std::size_t>(std::llround(config_.payoff_split * static_cast<double>(train_.n_rows)));
        if (n_val == 0 || n_val >= train_.n_rows)
            throw GraspError("payoff split leaves an empty fit or validation part");
        std::vector<std::size_t> rows(train_.n_rows);
        std::iota(rows.begin(), rows.end(), std::size_t{0});
        auto rng = make_stream(config_.seed, StreamTag::validation, 0);
        shuffle_in_place(std::span<std::size_t>(rows), rng);
        std::vector<std::size_t> val(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_val));
        std::vector<std::size_t> fit(rows.begin() + static_cast<std::ptrdiff_t>(n_val), rows.end());
        std::sort(val.begin(), val.end());
        std::sort(fit.begin(), fit.end());
        fit_part_ = train_.subset(fit);
        holdout_ = train_.subset(val);
        validation_ = &holdout_;
    }

    const auto n_cat = schema_.n_categorical();
    orderings_.resize(n_cat);
    feasible_.resize(n_cat);
    bool need_one_hot = false;
    for (auto j : eligible_) need_one_hot |= schema_.categorical(j).kind == PredictorKind::nominal;
    FittedGlm one_hot;
    if (need_one_hot) {
        one_hot = fit_irls(build_design(fit_part_, schema_), fit_part_.response, family_, config_.fit);
    }
    for (auto j : eligible_) {
        const auto& spec = schema_.categorical(j);
        orderings_[j] = spec.kind == PredictorKind::ordinal ? order_natural(spec) : order_by_coefficients(spec, one_hot);
        feasible_[j] = enumerate_feasible_clusterings(spec.cardinality(), config_.k_prime);
    }
}

Clustering GraspProblem::clustering(std::size_t j, std::size_t clustering_index) const {
    return Clustering{schema_.categorical(j).name, config_.k_prime, orderings_.at(j).order,
                      feasible_.at(j).at(clustering_index)};
}

std::vector<Encoding> GraspProblem::encodings(const State& state) const {
    std::vector<Encoding> enc(state.size());
    for (std::size_t j = 0; j < state.size(); ++j)
        if (state[j] >= 0) enc[j] = Encoding::clustered(clustering(j, static_cast<std::size_t>(state[j])));
    return enc;
}

double GraspProblem::payoff(const FittedGlm& model, const Dataset& data, std::span<const Encoding> enc) const {
    const double metric = test_metric(model, data, schema_, enc);
    return family_ == Family::bernoulli_logit ? metric : -metric;
}

double GraspProblem::evaluate_candidate(const State& state, std::size_t j, std::size_t clustering_index,
                                        std::string* diagnostic) const {
    if (state.at(j) >= 0) throw GraspError("predictor '" + schema_.categorical(j).name + "' is already clustered");
    State trial = state;
    trial[j] = static_cast<int>(clustering_index);
    try {
        const auto enc = encodings(trial);
        const auto model = fit_irls(build_design(fit_part_, schema_, enc), fit_part_.response, family_, config_.fit);
        return payoff(model, *validation_, enc);
    } catch (const std::exception& e) {
        if (diagnostic) {
            *diagnostic = "candidate " + schema_.categorical(j).name + "#" + std::to_string(clustering_index) +
                          " failed: " + e.what();
        }
        return kFailedPayoff;
    }
}

IterationResult GraspProblem::single_pass(std::size_t repeat_index) const {
    auto rng = make_stream(config_.seed, StreamTag::grasp_repeat, repeat_index);
    IterationResult result;
    result.repeat = repeat_index;

    State state = empty_state();
    std::vector<std::size_t> remaining = eligible_;
    std::vector<Candidate> pool;

    while (!remaining.empty()) {
        pool.clear();
        std::vector<std::size_t> cards;
        for (auto j : remaining) {
            cards.push_back(schema_.categorical(j).cardinality());
            for (std::size_t c = 0; c < feasible_[j].size(); ++c) {
                std::string diag;
                const double v = evaluate_candidate(state, j, c, &diag);
                if (!diag.empty()) result.diagnostics.push_back(std::move(diag));
                pool.push_back({v, j, c});
            }
        }
        const std::size_t evaluated = pool.size();
        std::erase_if(pool, [](const Candidate& c) { return !(c.payoff > kFailedPayoff); });
        if (pool.empty()) throw GraspError("every candidate failed in repeat " + std::to_string(repeat_index));
        std::sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) {
            if (a.payoff != b.payoff) return a.payoff > b.payoff;
            if (a.predictor != b.predictor) return a.predictor < b.predictor;
            return a.index < b.index;
        });

        const std::size_t rcl = std::min(rcl_size_for(config_, cards), pool.size());
        const auto pick = static_cast<std::size_t>(uniform_below(rng, rcl));
        const Candidate chosen = pool[pick];
        state[chosen.predictor] = static_cast<int>(chosen.index);
        std::erase(remaining, chosen.predictor);
        result.steps.push_back({chosen.predictor, chosen.index, chosen.payoff, evaluated, rcl, pick,
                                rcl < pool.size() ? pool[rcl].payoff : kFailedPayoff});
    }

    result.payoff = result.steps.back().payoff;
    const auto enc = encodings(state);
    result.model = fit_irls(build_design(train_, schema_, enc), train_.response, family_, config_.fit);
    for (auto j : eligible_) result.clusterings.push_back(enc[j].clustering);
    return result;
}

GraspOutput grasp_run(const Dataset& train, const Dataset* test, const Schema& schema, Family family,
                      const GraspConfig& config) {
    const GraspProblem problem(train, test, schema, family, config);

    std::vector<std::optional<IterationResult>> slots(config.m);
    std::vector<std::string> errors(config.m);
    detail::parallel_for(config.m, config.threads, [&](std::size_t i) {
        try {
            slots[i] = problem.single_pass(i);
        } catch (const std::exception& e) {
            errors[i] = "repeat " + std::to_string(i) + ": " + e.what();
        }
    });

    GraspOutput out;
    out.seed = config.seed;
    out.eligible = problem.eligible();
    for (auto j : out.eligible) out.orderings.push_back(problem.ordering(j));
    for (std::size_t i = 0; i < config.m; ++i) {
        if (slots[i]) {
            out.all_iterations.push_back(std::move(*slots[i]));
        } else {
            out.failures.push_back(std::move(errors[i]));
        }
    }
    if (out.all_iterations.empty()) {
        std::string msg = "all GRASP repeats failed";
        for (const auto& f : out.failures) msg += "; " + f;
        throw GraspError(msg);
    }
    for (std::size_t i = 1; i < out.all_iterations.size(); ++i)
        if (out.all_iterations[i].payoff > out.all_iterations[out.best_index].payoff) out.best_index = i;

    if (test) {
        std::vector<Encoding> enc(schema.n_categorical());
        for (const auto& c : out.best().clusterings) enc[*schema.find_categorical(c.predictor)] = Encoding::clustered(c);
        out.test_metric = test_metric(out.best().model, *test, schema, enc);
    }
    return out;
}

json GraspOutput::to_json(const Schema& schema) const {
    auto clusterings_json = [&](const IterationResult& it) {
        json arr = json::array();
        for (const auto& c : it.clusterings) arr.push_back(c.to_json(schema.categorical(*schema.find_categorical(c.predictor))));
        return arr;
    };
    json iterations = json::array();
    for (const auto& it : all_iterations) {
        json steps = json::array();
        for (const auto& s : it.steps) {
            steps.push_back({{"predictor", schema.categorical(s.predictor).name},
                             {"clustering_index", s.clustering_index},
                             {"payoff", s.payoff},
                             {"candidates", s.candidates},
                             {"rcl_size", s.rcl_size},
                             {"rank", s.rank}});
        }
        iterations.push_back({{"repeat", it.repeat},
                              {"stream", {{"seed", seed}, {"repeat", it.repeat}}},
                              {"payoff", it.payoff},
                              {"clusterings", clusterings_json(it)},
                              {"steps", steps},
                              {"diagnostics", it.diagnostics}});
    }
    json eligible_names = json::array();
    for (auto j : eligible) eligible_names.push_back(schema.categorical(j).name);
    json out = {{"seed", seed},
                {"eligible", eligible_names},
                {"best_repeat", best().repeat},
                {"best_payoff", best().payoff},
                {"best_clusterings", clusterings_json(best())},
                {"best_model", best().model.to_json()},
                {"iterations", iterations},
                {"failures", failures}};
    if (test_metric) out["test_metric"] = *test_metric;
    return out;
}

}  // namespace catglm

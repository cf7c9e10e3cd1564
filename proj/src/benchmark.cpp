#include "catglm/benchmark.hpp"

#include <chrono>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "catglm/clustering.hpp"
#include "catglm/random.hpp"
#include "numfmt.hpp"

namespace catglm {

using nlohmann::json;

Family default_family(const Schema& schema) {
    return schema.response.type == ResponseType::binary ? Family::bernoulli_logit : Family::poisson_log;
}

std::uint64_t reshuffle_grasp_seed(std::uint64_t seed, std::size_t index) {
    auto rng = make_stream(seed, StreamTag::reshuffle_seed, index);
    return rng();
}

namespace {

double score(const FittedGlm& model, const Dataset& test, const Schema& schema) {
    return test_metric(model, test, schema, {});
}

double mean(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

OriginalReport run_original(const Dataset& data, const Schema& schema, Family family, const SplitPlan& plan,
                            const FitConfig& fit) {
    OriginalReport rep;
    for (std::size_t i = 0; i < plan.n_reshuffles; ++i) {
        const auto [train, test] = split(data, plan, i);
        const auto model = fit_irls(build_design(train, schema), train.response, family, fit);
        rep.per_reshuffle.push_back(score(model, test, schema));
        rep.converged.push_back(model.converged);
    }
    rep.mean = mean(rep.per_reshuffle);
    return rep;
}

RunReport run_benchmark(const std::string& name, const Dataset& data, const Schema& schema, Family family,
                        const BenchmarkConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    RunReport rep;
    rep.name = name;
    rep.family = family;
    rep.config = config;

    const auto eligible = eligible_predictors(schema, config.grasp.k_prime);
    std::set<std::string> clustered;
    for (auto j : eligible) {
        rep.clustered_predictors.push_back(schema.categorical(j).name);
        clustered.insert(schema.categorical(j).name);
    }
    rep.relative_complexity = relative_complexity(schema, clustered, config.grasp.k_prime);

    std::vector<double> orig, clus;
    for (std::size_t i = 0; i < config.plan.n_reshuffles; ++i) {
        const auto [train, test] = split(data, config.plan, i);
        ReshuffleOutcome out;
        out.index = i;
        const auto original = fit_irls(build_design(train, schema), train.response, family, config.grasp.fit);
        out.original = score(original, test, schema);
        out.original_converged = original.converged;

        GraspConfig gc = config.grasp;
        gc.seed = reshuffle_grasp_seed(config.plan.seed, i);
        const auto g = grasp_run(train, &test, schema, family, gc);
        out.clustered = *g.test_metric;
        out.best_payoff = g.best().payoff;
        out.best_repeat = g.best().repeat;
        out.best_clusterings = g.best().clusterings;

        orig.push_back(out.original);
        clus.push_back(out.clustered);
        rep.reshuffles.push_back(std::move(out));
    }
    rep.mean_original = mean(orig);
    rep.mean_clustered = mean(clus);
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

json RunReport::to_json(const Schema& schema) const {
    json rows = json::array();
    for (const auto& r : reshuffles) {
        json cl = json::array();
        for (const auto& c : r.best_clusterings)
            cl.push_back(c.to_json(schema.categorical(*schema.find_categorical(c.predictor))));
        rows.push_back({{"index", r.index},
                        {"original", r.original},
                        {"clustered", r.clustered},
                        {"original_converged", r.original_converged},
                        {"best_payoff", r.best_payoff},
                        {"best_repeat", r.best_repeat},
                        {"best_clusterings", cl}});
    }
    const auto& g = config.grasp;
    json cfg = {{"train_fraction", config.plan.train_fraction},
                {"reshuffles", config.plan.n_reshuffles},
                {"seed", config.plan.seed},
                {"m", g.m},
                {"k_prime", g.k_prime},
                {"payoff_split", g.payoff_split}};
    cfg["rcl"] = g.rcl_size ? json(*g.rcl_size) : json("auto");
    return {{"name", name},
            {"family", family_name(family)},
            {"metric", metric_name()},
            {"config", cfg},
            {"clustered_predictors", clustered_predictors},
            {"reshuffles", rows},
            {"mean_original", mean_original},
            {"mean_clustered", mean_clustered},
            {"relative_complexity", relative_complexity}};
}

std::string RunReport::table_header(Family family) {
    const std::string unit = family == Family::bernoulli_logit ? "Accuracy (%)" : "RMSE";
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-16s %14s %14s %14s", "Name", ("Orig " + unit.substr(0, 8)).c_str(),
                  ("Clust " + unit.substr(0, 8)).c_str(), "RelCompl (%)");
    return buf;
}

std::string RunReport::table_row() const {
    const double scale = family == Family::bernoulli_logit ? 100.0 : 1.0;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-16s %14.2f %14.2f %14.2f", name.c_str(), mean_original * scale,
                  mean_clustered * scale, relative_complexity);
    return buf;
}

}  // namespace catglm

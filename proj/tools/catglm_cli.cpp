// catglm: fit, cluster and benchmark GLMs with clustered categorical predictors.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "catglm/benchmark.hpp"
#include "catglm/clustering.hpp"
#include "catglm/data.hpp"
#include "catglm/glm.hpp"
#include "catglm/grasp.hpp"
#include "catglm/proximity.hpp"

namespace fs = std::filesystem;
using namespace catglm;
using nlohmann::json;

namespace {

struct Options {
    std::string data;
    std::string schema;
    std::string family;
    std::string name;
    int k_prime = 2;
    std::size_t m = 100;
    std::optional<std::size_t> rcl;
    std::uint64_t seed = 0;
    double train_frac = 0.7;
    double payoff_split = 0.25;
    std::size_t reshuffles = 10;
    std::string out = "catglm-out";
    unsigned threads = 1;
};

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--data", o.data, "CSV file with a header row")->required()->check(CLI::ExistingFile);
    cmd->add_option("--schema", o.schema, "schema JSON")->required()->check(CLI::ExistingFile);
    cmd->add_option("--family", o.family, "logit or poisson (default: from the response type)")
        ->check(CLI::IsMember({"logit", "poisson"}));
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--train-frac", o.train_frac, "training share of each reshuffle")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--reshuffles", o.reshuffles, "number of train/test reshuffles")->check(CLI::PositiveNumber);
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--name", o.name, "dataset name in reports (default: data file stem)");
}

void add_grasp(CLI::App* cmd, Options& o) {
    cmd->add_option("--kprime", o.k_prime, "maximum clusters per predictor")->check(CLI::Range(2, 1000));
    cmd->add_option("--m", o.m, "GRASP repeats")->check(CLI::PositiveNumber);
    cmd->add_option("--rcl", o.rcl, "fixed restricted candidate list size (default: 3 if some K > 5, else 2)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--payoff-split", o.payoff_split, "training share held out to score candidates (0: use test)")
        ->check(CLI::Range(0.0, 0.99));
    cmd->add_option("--threads", o.threads, "worker threads for GRASP repeats")->check(CLI::PositiveNumber);
}

struct Loaded {
    Schema schema;
    Dataset data;
    Family family;
    std::string name;
};

Loaded load(const Options& o) {
    Loaded l;
    l.schema = load_schema(o.schema);
    l.data = load_csv(o.data, l.schema);
    l.family = o.family.empty() ? default_family(l.schema) : parse_family(o.family);
    if (l.family == Family::bernoulli_logit && l.schema.response.type != ResponseType::binary)
        throw std::runtime_error("--family logit needs a binary response");
    l.name = o.name.empty() ? fs::path(o.data).stem().string() : o.name;
    return l;
}

SplitPlan plan_of(const Options& o) { return {o.train_frac, o.reshuffles, o.seed}; }

GraspConfig grasp_of(const Options& o) {
    GraspConfig g;
    g.m = o.m;
    g.k_prime = o.k_prime;
    g.rcl_size = o.rcl;
    g.seed = o.seed;
    g.payoff_split = o.payoff_split;
    g.threads = o.threads;
    return g;
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    f << text;
    f.close();
    if (!f) throw std::runtime_error("cannot write " + path.string());
}

void write_json(const fs::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

std::string metric_text(Family f, double v) {
    char buf[64];
    if (f == Family::bernoulli_logit) {
        std::snprintf(buf, sizeof buf, "CCR %.2f%%", v * 100.0);
    } else {
        std::snprintf(buf, sizeof buf, "RMSE %.4f", v);
    }
    return buf;
}

int cmd_fit(const Options& o) {
    const auto l = load(o);
    const auto plan = plan_of(o);
    const auto rep = run_original(l.data, l.schema, l.family, plan);
    const auto full = fit_irls(build_design(l.data, l.schema), l.data.response, l.family);

    const fs::path out = o.out;
    json report = {{"name", l.name},
                   {"family", family_name(l.family)},
                   {"metric", l.family == Family::bernoulli_logit ? "ccr" : "rmse"},
                   {"train_fraction", plan.train_fraction},
                   {"seed", plan.seed},
                   {"per_reshuffle", rep.per_reshuffle},
                   {"converged", rep.converged},
                   {"mean", rep.mean}};
    write_json(out / "fit_report.json", report);
    write_json(out / "model.json", full.to_json());

    std::printf("%s: one-hot %s model, %zu rows, %zu coefficients\n", l.name.c_str(), family_name(l.family),
                l.data.n_rows, full.columns.size());
    for (std::size_t i = 0; i < full.columns.size(); ++i)
        std::printf("  %-32s % .6f\n", full.columns[i].label().c_str(), full.coefficients[static_cast<Eigen::Index>(i)]);
    std::printf("converged: %s, iterations: %d, deviance: %.4f\n", full.converged ? "yes" : "no", full.n_iterations,
                full.deviance);
    std::printf("test %s (mean over %zu reshuffles)\n", metric_text(l.family, rep.mean).c_str(), plan.n_reshuffles);
    return 0;
}

int cmd_cluster(const Options& o) {
    const auto l = load(o);
    const auto [train, test] = split(l.data, plan_of(o), 0);
    const auto out_run = grasp_run(train, &test, l.schema, l.family, grasp_of(o));

    const fs::path out = o.out;
    write_json(out / "best_model.json", out_run.best().model.to_json());
    write_json(out / "grasp_output.json", out_run.to_json(l.schema));
    for (auto j : out_run.eligible) {
        const auto& spec = l.schema.categorical(j);
        const auto pm = compute_proximity(out_run.all_iterations, spec);
        write_text(out / "proximity" / (spec.name + ".csv"), export_csv(pm));
        write_text(out / "proximity" / (spec.name + ".dot"), export_dot(pm));
    }

    std::printf("%s: %zu GRASP repeats, best repeat %zu, validation payoff %.4f\n", l.name.c_str(),
                out_run.all_iterations.size(), out_run.best().repeat, out_run.best().payoff);
    if (!out_run.failures.empty()) std::printf("%zu repeats failed\n", out_run.failures.size());
    for (const auto& c : out_run.best().clusterings) {
        const auto& spec = l.schema.categorical(*l.schema.find_categorical(c.predictor));
        std::printf("  %s:", c.predictor.c_str());
        int current = -1;
        for (std::size_t p = 0; p < c.order.size(); ++p) {
            if (c.assignment[p] != current) {
                std::printf(current < 0 ? " {" : "} {");
                current = c.assignment[p];
            } else {
                std::printf(", ");
            }
            std::printf("%s", spec.categories[static_cast<std::size_t>(c.order[p])].c_str());
        }
        std::printf("}\n");
    }
    std::printf("test %s\n", metric_text(l.family, *out_run.test_metric).c_str());
    return 0;
}

int cmd_benchmark(const Options& o) {
    const auto l = load(o);
    BenchmarkConfig cfg{plan_of(o), grasp_of(o)};
    const auto rep = run_benchmark(l.name, l.data, l.schema, l.family, cfg);

    const fs::path out = o.out;
    write_json(out / "report.json", rep.to_json(l.schema));
    const std::string table = RunReport::table_header(l.family) + "\n" + rep.table_row() + "\n";
    write_text(out / "summary.txt", table);
    std::fputs(table.c_str(), stdout);
    std::printf("(%zu reshuffles, m = %zu, %.1f s)\n", rep.reshuffles.size(), cfg.grasp.m, rep.wall_seconds);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GLMs with clustered categorical predictors"};
    app.require_subcommand(1);
    Options o;
    auto* fit = app.add_subcommand("fit", "one-hot GLM: reshuffle test metric and full-data coefficients");
    auto* cluster = app.add_subcommand("cluster", "GRASP clustering on the first reshuffle, with proximity graphs");
    auto* bench = app.add_subcommand("benchmark", "original vs clustered model over the reshuffles");
    for (auto* c : {fit, cluster, bench}) add_common(c, o);
    for (auto* c : {cluster, bench}) add_grasp(c, o);

    CLI11_PARSE(app, argc, argv);
    try {
        if (fit->parsed()) return cmd_fit(o);
        if (cluster->parsed()) return cmd_cluster(o);
        return cmd_benchmark(o);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "catglm: %s\n", e.what());
        return 1;
    }
}

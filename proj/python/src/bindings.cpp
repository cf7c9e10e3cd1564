#include <optional>
#include <set>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <nlohmann/json.hpp>

#include "catglm/benchmark.hpp"
#include "catglm/clustering.hpp"
#include "catglm/data.hpp"
#include "catglm/glm.hpp"
#include "catglm/grasp.hpp"
#include "catglm/proximity.hpp"

namespace py = pybind11;
using namespace catglm;

namespace {

// Keeps the schema next to the output so labels resolve after the call returns.
struct GraspResult {
    Schema schema;
    GraspOutput output;

    const PredictorSpec& spec(const std::string& name) const {
        const auto j = schema.find_categorical(name);
        if (!j) throw py::key_error("no categorical predictor '" + name + "'");
        return schema.categorical(*j);
    }
};

GraspConfig grasp_config(std::size_t m, int k_prime, std::optional<std::size_t> rcl, std::uint64_t seed,
                         double payoff_split, unsigned threads) {
    GraspConfig g;
    g.m = m;
    g.k_prime = k_prime;
    g.rcl_size = rcl;
    g.seed = seed;
    g.payoff_split = payoff_split;
    g.threads = threads;
    return g;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "GLMs with clustered categorical predictors";

    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<GlmError>(m, "GlmError", PyExc_RuntimeError);
    py::register_exception<ClusteringError>(m, "ClusteringError", PyExc_ValueError);
    py::register_exception<GraspError>(m, "GraspError", PyExc_RuntimeError);

    py::enum_<Family>(m, "Family")
        .value("bernoulli_logit", Family::bernoulli_logit)
        .value("poisson_log", Family::poisson_log);
    m.def("parse_family", &parse_family);

    py::class_<Schema>(m, "Schema")
        .def_static("from_json", [](const std::string& text) { return Schema::from_json(nlohmann::json::parse(text)); })
        .def("to_json", [](const Schema& s) { return s.to_json().dump(); })
        .def_property_readonly("n_categorical", &Schema::n_categorical)
        .def_property_readonly("n_continuous", &Schema::n_continuous)
        .def_property_readonly("categorical_names", [](const Schema& s) {
            std::vector<std::string> names;
            for (std::size_t j = 0; j < s.n_categorical(); ++j) names.push_back(s.categorical(j).name);
            return names;
        })
        .def_property_readonly("default_family", &default_family);

    py::class_<Dataset>(m, "Dataset")
        .def_readonly("n_rows", &Dataset::n_rows)
        .def_readonly("categorical", &Dataset::categorical)
        .def_readonly("continuous", &Dataset::continuous)
        .def_readonly("response", &Dataset::response)
        .def("subset", [](const Dataset& d, const std::vector<std::size_t>& rows) { return d.subset(rows); });

    m.def("load_schema", &load_schema, py::arg("path"));
    m.def("load_csv", &load_csv, py::arg("path"), py::arg("schema"));
    m.def(
        "split",
        [](const Dataset& d, double train_fraction, std::uint64_t seed, std::size_t index) {
            return split(d, SplitPlan{train_fraction, index + 1, seed}, index);
        },
        py::arg("data"), py::arg("train_fraction") = 0.7, py::arg("seed") = 0, py::arg("index") = 0);

    py::class_<FittedGlm>(m, "FittedGlm")
        .def_readonly("coefficients", &FittedGlm::coefficients)
        .def_readonly("converged", &FittedGlm::converged)
        .def_readonly("n_iterations", &FittedGlm::n_iterations)
        .def_readonly("deviance", &FittedGlm::deviance)
        .def_readonly("ridge", &FittedGlm::ridge)
        .def_readonly("rank_deficient", &FittedGlm::rank_deficient)
        .def_readonly("separation", &FittedGlm::separation)
        .def_readonly("score_max_abs", &FittedGlm::score_max_abs)
        .def_property_readonly("labels", [](const FittedGlm& f) {
            std::vector<std::string> out;
            for (const auto& c : f.columns) out.push_back(c.label());
            return out;
        })
        .def("to_json", [](const FittedGlm& f) { return f.to_json().dump(); });

    m.def(
        "fit_one_hot",
        [](const Dataset& d, const Schema& s, std::optional<Family> family) {
            return fit_irls(build_design(d, s), d.response, family.value_or(default_family(s)));
        },
        py::arg("data"), py::arg("schema"), py::arg("family") = py::none());
    m.def(
        "predict_one_hot", [](const FittedGlm& f, const Dataset& d, const Schema& s) { return predict_mean(f, build_design(d, s)); },
        py::arg("model"), py::arg("data"), py::arg("schema"));
    m.def("ccr", [](const std::vector<double>& mu, const std::vector<double>& y) { return ccr(mu, y); });
    m.def("rmse", [](const std::vector<double>& mu, const std::vector<double>& y) { return rmse(mu, y); });

    m.def("enumerate_feasible_clusterings", &enumerate_feasible_clusterings, py::arg("k"), py::arg("k_prime") = 2);
    m.def("count_feasible_clusterings", &count_feasible_clusterings, py::arg("k"), py::arg("k_prime") = 2);
    m.def(
        "relative_complexity",
        [](const Schema& s, const std::vector<std::string>& clustered, int k_prime) {
            return relative_complexity(s, std::set<std::string>(clustered.begin(), clustered.end()), k_prime);
        },
        py::arg("schema"), py::arg("clustered"), py::arg("k_prime") = 2);
    m.def(
        "eligible_predictors",
        [](const Schema& s, int k_prime) {
            std::vector<std::string> names;
            for (auto j : eligible_predictors(s, k_prime)) names.push_back(s.categorical(j).name);
            return names;
        },
        py::arg("schema"), py::arg("k_prime") = 2);

    py::class_<GraspResult>(m, "GraspResult")
        .def_property_readonly("best_payoff", [](const GraspResult& r) { return r.output.best().payoff; })
        .def_property_readonly("best_repeat", [](const GraspResult& r) { return r.output.best().repeat; })
        .def_property_readonly("test_metric", [](const GraspResult& r) { return r.output.test_metric; })
        .def_property_readonly("best_model", [](const GraspResult& r) { return r.output.best().model; })
        .def("to_json", [](const GraspResult& r) { return r.output.to_json(r.schema).dump(); })
        .def("proximity",
             [](const GraspResult& r, const std::string& name) {
                 return compute_proximity(r.output.all_iterations, r.spec(name)).values();
             })
        .def(
            "proximity_dot",
            [](const GraspResult& r, const std::string& name, double threshold) {
                return export_dot(compute_proximity(r.output.all_iterations, r.spec(name)), threshold);
            },
            py::arg("name"), py::arg("threshold") = 0.0);

    m.def(
        "grasp_run",
        [](const Dataset& train, const Dataset* test, const Schema& s, std::optional<Family> family, std::size_t m_,
           int k_prime, std::optional<std::size_t> rcl, std::uint64_t seed, double payoff_split, unsigned threads) {
            const auto cfg = grasp_config(m_, k_prime, rcl, seed, payoff_split, threads);
            py::gil_scoped_release release;
            return GraspResult{s, grasp_run(train, test, s, family.value_or(default_family(s)), cfg)};
        },
        py::arg("train"), py::arg("test") = nullptr, py::arg("schema"), py::arg("family") = py::none(),
        py::arg("m") = 100, py::arg("k_prime") = 2, py::arg("rcl") = py::none(), py::arg("seed") = 0,
        py::arg("payoff_split") = 0.25, py::arg("threads") = 1);

    m.def(
        "run_benchmark",
        [](const std::string& name, const Dataset& d, const Schema& s, std::optional<Family> family, std::size_t m_,
           int k_prime, std::optional<std::size_t> rcl, std::uint64_t seed, double train_fraction,
           std::size_t reshuffles, double payoff_split, unsigned threads) {
            BenchmarkConfig cfg{SplitPlan{train_fraction, reshuffles, seed},
                                grasp_config(m_, k_prime, rcl, seed, payoff_split, threads)};
            py::gil_scoped_release release;
            return run_benchmark(name, d, s, family.value_or(default_family(s)), cfg).to_json(s).dump();
        },
        py::arg("name"), py::arg("data"), py::arg("schema"), py::arg("family") = py::none(), py::arg("m") = 100,
        py::arg("k_prime") = 2, py::arg("rcl") = py::none(), py::arg("seed") = 0, py::arg("train_fraction") = 0.7,
        py::arg("reshuffles") = 10, py::arg("payoff_split") = 0.25, py::arg("threads") = 1);
}

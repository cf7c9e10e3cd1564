#pragma once

#include <atomic>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "catglm/data.hpp"
#include "catglm/glm.hpp"
#include "catglm/grasp.hpp"
#include "catglm/proximity.hpp"

namespace fixtures {

inline catglm::PredictorSpec nominal(std::string name, std::vector<std::string> cats) {
    return {std::move(name), catglm::PredictorKind::nominal, std::move(cats)};
}
inline catglm::PredictorSpec ordinal(std::string name, std::vector<std::string> cats) {
    return {std::move(name), catglm::PredictorKind::ordinal, std::move(cats)};
}
inline catglm::PredictorSpec continuous(std::string name) {
    return {std::move(name), catglm::PredictorKind::continuous, {}};
}

inline std::vector<std::string> letters(int n) {
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) out.push_back(std::string(1, static_cast<char>('a' + i)));
    return out;
}

/// One nominal predictor whose categories {a..}: y ~ Bernoulli(p[category]).
/// Rows cycle through categories so every category is present.
inline std::pair<catglm::Schema, catglm::Dataset> grouped_bernoulli(const std::vector<double>& p, std::size_t n,
                                                                     unsigned seed) {
    catglm::Schema schema;
    schema.predictors = {nominal("g", letters(static_cast<int>(p.size())))};
    schema.response = {"y", catglm::ResponseType::binary, std::nullopt};
    catglm::Dataset d;
    d.n_rows = n;
    d.categorical.resize(1);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const int c = static_cast<int>(i % p.size());
        d.categorical[0].push_back(c);
        d.response.push_back(u(rng) < p[static_cast<std::size_t>(c)] ? 1.0 : 0.0);
    }
    return {schema, d};
}

/// Score-equation audit over every fit made with an audited() config:
/// converged, unridged fits must satisfy |X'(y - mu)|_inf <= sqrt(N) * 1e-6.
struct ScoreAudit {
    std::atomic<long> checked{0};
    std::atomic<long> violations{0};
    std::atomic<long> skipped{0};  // not converged or ridged
};

inline ScoreAudit& score_audit() {
    static ScoreAudit audit;
    return audit;
}

inline catglm::FitConfig audited(catglm::FitConfig config = {}) {
    config.observer = [](const catglm::DesignMatrix& design, std::span<const double>, const catglm::FittedGlm& fit) {
        auto& a = score_audit();
        if (!fit.converged || fit.ridge > 0) {
            ++a.skipped;
            return;
        }
        ++a.checked;
        if (fit.score_max_abs > std::sqrt(static_cast<double>(design.rows())) * 1e-6) ++a.violations;
    };
    return config;
}

/// Exact checks on the proximity matrix of every eligible predictor of a run:
/// symmetric, unit diagonal, every entry an integer count over m.
inline bool proximity_properties_hold(const catglm::GraspOutput& out, const catglm::Schema& schema) {
    for (auto j : out.eligible) {
        const auto pm = catglm::compute_proximity(out.all_iterations, schema.categorical(j));
        const auto v = pm.values();
        const auto m = static_cast<double>(out.all_iterations.size());
        if (pm.m != out.all_iterations.size()) return false;
        for (Eigen::Index a = 0; a < v.rows(); ++a) {
            if (v(a, a) != 1.0) return false;
            for (Eigen::Index b = 0; b < v.cols(); ++b) {
                if (v(a, b) != v(b, a)) return false;
                const double scaled = v(a, b) * m;
                if (scaled != std::round(scaled) || v(a, b) != std::round(scaled) / m) return false;
                if (v(a, b) < 0.0 || v(a, b) > 1.0) return false;
            }
        }
    }
    return true;
}

}  // namespace fixtures

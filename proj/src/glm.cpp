#include "catglm/glm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <Eigen/SparseCore>
#include <nlohmann/json.hpp>

namespace catglm {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::json;

namespace {

constexpr double kRankRidge = 1e-8;
constexpr double kSeparationRidge = 1e-4;
constexpr double kScoreTolerance = 1e-6;  // per sqrt(N)
constexpr int kMaxHalvings = 50;

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double logistic(double eta) {
    if (eta >= 0) return 1.0 / (1.0 + std::exp(-eta));
    const double e = std::exp(eta);
    return e / (1.0 + e);
}

void check_response(Family family, std::span<const double> y) {
    for (double v : y) {
        const bool ok = family == Family::bernoulli_logit ? (v == 0.0 || v == 1.0)
                                                          : (v >= 0.0 && std::isfinite(v) && std::floor(v) == v);
        if (!ok) throw GlmError(std::string("response value outside the support of ") + family_name(family));
    }
}

std::size_t intercept_index(const DesignMatrix& design) {
    for (std::size_t i = 0; i < design.columns.size(); ++i)
        if (design.columns[i].kind == ColumnDescriptor::Kind::intercept) return i;
    throw GlmError("design has no intercept column");
}

struct IrlsResult {
    VectorXd beta;
    bool converged = false;
    bool rank_deficient = false;
    int iterations = 0;
    double deviance = 0;
    double ridge = 0;
};

/// Core loop. Minimizes deviance/2 + ridge/2 * |beta|^2.
IrlsResult run_irls(const MatrixXd& x, std::span<const double> y_span, Family family, const FitConfig& config,
                    double ridge, std::size_t icept) {
    const auto n = x.rows();
    const auto p = x.cols();
    const Eigen::Map<const VectorXd> y(y_span.data(), n);
    const double score_limit = std::sqrt(static_cast<double>(n)) * kScoreTolerance;

    IrlsResult res;
    res.ridge = ridge;
    res.beta = VectorXd::Zero(p);
    const double ybar = y.mean();
    if (family == Family::bernoulli_logit) {
        const double m = std::clamp(ybar, 1e-3, 1.0 - 1e-3);
        res.beta[static_cast<Eigen::Index>(icept)] = std::log(m / (1.0 - m));
    } else {
        res.beta[static_cast<Eigen::Index>(icept)] = std::log(std::max(ybar, 1e-3));
    }

    VectorXd eta = x * res.beta;
    double dev = deviance(family, y_span, eta);
    auto objective = [&](double d, const VectorXd& b) { return 0.5 * d + 0.5 * res.ridge * b.squaredNorm(); };

    VectorXd mu(n), w(n), grad(p);
    MatrixXd h(p, p);
    MatrixXd xw;

    // Dummy-coded designs are mostly zeros; accumulate X'WX over the
    // non-zeros of each row when that is cheaper than the dense product.
    Eigen::SparseMatrix<double, Eigen::RowMajor> xs;
    const Eigen::Index nnz = (x.array() != 0.0).count();
    const bool sparse = nnz * 2 < n * p;
    if (sparse) xs = x.sparseView();

    auto cross_product = [&] {
        if (!sparse) {
            xw = x.array().colwise() * w.array().sqrt();
            h.setZero();
            h.selfadjointView<Eigen::Lower>().rankUpdate(xw.transpose());
        } else {
            h.setZero();
            const int* outer = xs.outerIndexPtr();
            const int* inner = xs.innerIndexPtr();
            const double* val = xs.valuePtr();
            for (Eigen::Index i = 0; i < n; ++i) {
                for (int a = outer[i]; a < outer[i + 1]; ++a) {
                    const double wa = w[i] * val[a];
                    double* col = &h(0, inner[a]);
                    for (int b = outer[i]; b <= a; ++b) col[inner[b]] += wa * val[b];
                }
            }
            // Filled the upper triangle (row <= column); mirror below.
            h.triangularView<Eigen::StrictlyLower>() = h.transpose();
            return;
        }
        h.triangularView<Eigen::StrictlyUpper>() = h.transpose();
    };
    auto linear = [&](const VectorXd& b) -> VectorXd {
        if (sparse) return xs * b;
        return x * b;
    };

    auto refresh = [&] {
        for (Eigen::Index i = 0; i < n; ++i) {
            if (family == Family::bernoulli_logit) {
                mu[i] = logistic(eta[i]);
                w[i] = mu[i] * (1.0 - mu[i]);
            } else {
                mu[i] = std::exp(eta[i]);
                w[i] = mu[i];
            }
        }
        if (sparse) {
            grad.noalias() = xs.transpose() * (y - mu);
        } else {
            grad.noalias() = x.transpose() * (y - mu);
        }
        grad -= res.ridge * res.beta;
    };

    refresh();
    for (int iter = 0; iter < config.max_iterations; ++iter) {
        cross_product();

        // Jacobi scaling so the rank test is independent of column units.
        auto factor = [&](VectorXd& scale, Eigen::LDLT<MatrixXd>& ldlt) {
            MatrixXd hr = h;
            hr.diagonal().array() += res.ridge;
            scale = hr.diagonal().array().max(std::numeric_limits<double>::min()).rsqrt().matrix();
            ldlt.compute(scale.asDiagonal() * hr * scale.asDiagonal());
            if (ldlt.info() != Eigen::Success) return false;
            const VectorXd d = ldlt.vectorD();
            return d.minCoeff() > 1e-10 * std::max(1.0, d.maxCoeff()) && hr.diagonal().minCoeff() > 0.0;
        };
        VectorXd scale;
        Eigen::LDLT<MatrixXd> ldlt;
        if (!factor(scale, ldlt)) {
            if (res.ridge < kRankRidge) {
                res.ridge = kRankRidge;
                res.rank_deficient = true;
                grad = x.transpose() * (y - mu) - res.ridge * res.beta;
                factor(scale, ldlt);
            } else {
                res.rank_deficient = true;
            }
        }
        const VectorXd step = scale.asDiagonal() * ldlt.solve(scale.asDiagonal() * grad);

        const double q_old = objective(dev, res.beta);
        double t = 1.0;
        bool accepted = false;
        VectorXd beta_new;
        VectorXd eta_new;
        double dev_new = 0;
        for (int k = 0; k <= kMaxHalvings; ++k, t *= 0.5) {
            beta_new = res.beta + t * step;
            eta_new = linear(beta_new);
            dev_new = deviance(family, y_span, eta_new);
            const double q_new = objective(dev_new, beta_new);
            if (std::isfinite(q_new) && q_new <= q_old + 1e-12 * std::abs(q_old)) {
                accepted = true;
                break;
            }
        }
        ++res.iterations;
        if (!accepted) {
            // No descent possible: we sit at the numerical optimum or the
            // problem is ill-posed. Decide by the score below.
            res.converged = grad.cwiseAbs().maxCoeff() <= score_limit;
            break;
        }
        const double rel_change = std::abs(dev_new - dev) / (std::abs(dev_new) + 0.1);
        res.beta = std::move(beta_new);
        eta = std::move(eta_new);
        dev = dev_new;
        refresh();
        if (rel_change < config.tolerance && grad.cwiseAbs().maxCoeff() <= score_limit) {
            res.converged = true;
            break;
        }
    }
    res.deviance = dev;
    return res;
}

}  // namespace

const char* family_name(Family f) {
    return f == Family::bernoulli_logit ? "bernoulli_logit" : "poisson_log";
}

Family parse_family(const std::string& name) {
    if (name == "logit" || name == "bernoulli_logit" || name == "logistic" || name == "binomial")
        return Family::bernoulli_logit;
    if (name == "poisson" || name == "poisson_log") return Family::poisson_log;
    throw GlmError("unknown family '" + name + "' (expected logit or poisson)");
}

double mean_function(Family f, double eta) { return f == Family::bernoulli_logit ? logistic(eta) : std::exp(eta); }

std::string ColumnDescriptor::label() const {
    switch (kind) {
        case Kind::intercept: return "(intercept)";
        case Kind::continuous: return predictor;
        case Kind::dummy:
            return predictor + (basis == Basis::category ? "[category=" : "[cluster=") + std::to_string(group) + "]";
    }
    return "?";
}

void DesignMatrix::validate() const {
    if (static_cast<std::size_t>(values.cols()) != columns.size()) {
        throw GlmError("design has " + std::to_string(values.cols()) + " value columns but " +
                       std::to_string(columns.size()) + " descriptors");
    }
    std::size_t intercepts = 0;
    std::set<std::string> labels;
    for (std::size_t j = 0; j < columns.size(); ++j) {
        const auto& c = columns[j];
        if (!labels.insert(c.label()).second) throw GlmError("duplicate design column " + c.label());
        const auto col = values.col(static_cast<Eigen::Index>(j));
        if (c.kind == ColumnDescriptor::Kind::intercept) {
            ++intercepts;
            if ((col.array() != 1.0).any()) throw GlmError("intercept column is not all ones");
        } else if (c.kind == ColumnDescriptor::Kind::dummy) {
            if (((col.array() != 0.0) && (col.array() != 1.0)).any())
                throw GlmError("dummy column " + c.label() + " has values outside {0,1}");
        }
    }
    if (intercepts != 1) throw GlmError("design must have exactly one intercept column");
}

double deviance(Family family, std::span<const double> y, const VectorXd& eta) {
    double d = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double e = eta[static_cast<Eigen::Index>(i)];
        if (family == Family::bernoulli_logit) {
            d += softplus(e) - y[i] * e;
        } else {
            const double mu = std::exp(e);
            d += (y[i] > 0 ? y[i] * (std::log(y[i]) - e) : 0.0) - (y[i] - mu);
        }
    }
    return 2.0 * d;
}

double log_likelihood(const MatrixXd& x, std::span<const double> y, Family family, const VectorXd& beta) {
    const VectorXd eta = x * beta;
    double ll = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double e = eta[static_cast<Eigen::Index>(i)];
        ll += family == Family::bernoulli_logit ? y[i] * e - softplus(e) : y[i] * e - std::exp(e);
    }
    return ll;
}

VectorXd score(const MatrixXd& x, std::span<const double> y, Family family, const VectorXd& beta) {
    const VectorXd eta = x * beta;
    VectorXd resid(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) resid[i] = y[static_cast<std::size_t>(i)] - mean_function(family, eta[i]);
    return x.transpose() * resid;
}

FittedGlm fit_irls(const DesignMatrix& design, std::span<const double> y, Family family, const FitConfig& config) {
    if (design.rows() == 0) throw GlmError("cannot fit a GLM on zero rows");
    if (design.rows() != y.size()) {
        throw GlmError("design has " + std::to_string(design.rows()) + " rows but response has " +
                       std::to_string(y.size()));
    }
    if (config.max_iterations < 1 || !(config.tolerance > 0) || config.ridge < 0 || !(config.divergence_guard > 0)) {
        throw GlmError("invalid fit configuration");
    }
    check_response(family, y);
    const auto icept = intercept_index(design);

    IrlsResult r = run_irls(design.values, y, family, config, config.ridge, icept);
    bool separation = false;
    if (!std::isfinite(r.beta.norm()) || r.beta.norm() > config.divergence_guard) {
        separation = true;
        const bool deficient = r.rank_deficient;
        r = run_irls(design.values, y, family, config, std::max(config.ridge, kSeparationRidge), icept);
        r.rank_deficient = r.rank_deficient || deficient;
    }

    FittedGlm fit;
    fit.family = family;
    fit.columns = design.columns;
    fit.coefficients = r.beta;
    fit.converged = r.converged;
    fit.n_iterations = r.iterations;
    fit.deviance = std::max(0.0, r.deviance);
    fit.ridge = r.ridge;
    fit.rank_deficient = r.rank_deficient;
    fit.separation = separation;
    fit.score_max_abs = score(design.values, y, family, r.beta).cwiseAbs().maxCoeff();
    if (config.observer) config.observer(design, y, fit);
    return fit;
}

double FittedGlm::coefficient(const ColumnDescriptor& col) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == col) return coefficients[static_cast<Eigen::Index>(i)];
    throw GlmError("model has no column " + col.label());
}

std::vector<double> predict_mean(const FittedGlm& model, const DesignMatrix& design) {
    if (design.columns != model.columns) {
        std::string diff;
        const auto n = std::max(design.columns.size(), model.columns.size());
        for (std::size_t i = 0; i < n; ++i) {
            const std::string a = i < model.columns.size() ? model.columns[i].label() : "<none>";
            const std::string b = i < design.columns.size() ? design.columns[i].label() : "<none>";
            if (a != b) diff += " [" + std::to_string(i) + "] model " + a + " vs design " + b + ";";
        }
        throw GlmError("design columns do not match the model:" + diff);
    }
    const VectorXd eta = design.values * model.coefficients;
    std::vector<double> out(static_cast<std::size_t>(eta.size()));
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        double m = mean_function(model.family, eta[i]);
        if (model.family == Family::bernoulli_logit) m = std::clamp(m, 1e-10, 1.0 - 1e-10);
        out[static_cast<std::size_t>(i)] = m;
    }
    return out;
}

double ccr(std::span<const double> predicted_means, std::span<const double> y) {
    if (predicted_means.empty()) throw GlmError("ccr of empty input");
    if (predicted_means.size() != y.size()) throw GlmError("ccr: prediction and response lengths differ");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double cls = predicted_means[i] >= 0.5 ? 1.0 : 0.0;
        hits += cls == y[i];
    }
    return static_cast<double>(hits) / static_cast<double>(y.size());
}

double rmse(std::span<const double> predicted_means, std::span<const double> y) {
    if (predicted_means.empty()) throw GlmError("rmse of empty input");
    if (predicted_means.size() != y.size()) throw GlmError("rmse: prediction and response lengths differ");
    double ss = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = predicted_means[i] - y[i];
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(y.size()));
}

namespace {

const char* kind_text(ColumnDescriptor::Kind k) {
    switch (k) {
        case ColumnDescriptor::Kind::intercept: return "intercept";
        case ColumnDescriptor::Kind::dummy: return "dummy";
        case ColumnDescriptor::Kind::continuous: return "continuous";
    }
    return "?";
}

}  // namespace

json FittedGlm::to_json() const {
    json cols = json::array();
    for (std::size_t i = 0; i < columns.size(); ++i) {
        const auto& c = columns[i];
        json jc = {{"kind", kind_text(c.kind)}, {"label", c.label()}, {"coefficient", coefficients[static_cast<Eigen::Index>(i)]}};
        if (c.kind != ColumnDescriptor::Kind::intercept) jc["predictor"] = c.predictor;
        if (c.kind == ColumnDescriptor::Kind::dummy) {
            jc["group"] = c.group;
            jc["basis"] = c.basis == ColumnDescriptor::Basis::category ? "category" : "cluster";
        }
        cols.push_back(std::move(jc));
    }
    return {{"family", family_name(family)},
            {"columns", cols},
            {"converged", converged},
            {"iterations", n_iterations},
            {"deviance", deviance},
            {"ridge", ridge},
            {"rank_deficient", rank_deficient},
            {"separation", separation},
            {"score_max_abs", score_max_abs}};
}

FittedGlm FittedGlm::from_json(const json& doc) {
    FittedGlm fit;
    fit.family = parse_family(doc.at("family").get<std::string>());
    const auto& cols = doc.at("columns");
    fit.coefficients.resize(static_cast<Eigen::Index>(cols.size()));
    Eigen::Index i = 0;
    for (const auto& jc : cols) {
        ColumnDescriptor c;
        const auto kind = jc.at("kind").get<std::string>();
        if (kind == "intercept") {
            c = ColumnDescriptor::intercept();
        } else if (kind == "continuous") {
            c = ColumnDescriptor::continuous(jc.at("predictor").get<std::string>());
        } else if (kind == "dummy") {
            c = ColumnDescriptor::dummy(jc.at("predictor").get<std::string>(), jc.at("group").get<int>(),
                                        jc.at("basis").get<std::string>() == "cluster" ? ColumnDescriptor::Basis::cluster
                                                                                       : ColumnDescriptor::Basis::category);
        } else {
            throw GlmError("unknown column kind '" + kind + "'");
        }
        fit.columns.push_back(std::move(c));
        fit.coefficients[i++] = jc.at("coefficient").get<double>();
    }
    fit.converged = doc.at("converged").get<bool>();
    fit.n_iterations = doc.at("iterations").get<int>();
    fit.deviance = doc.at("deviance").get<double>();
    fit.ridge = doc.value("ridge", 0.0);
    fit.rank_deficient = doc.value("rank_deficient", false);
    fit.separation = doc.value("separation", false);
    fit.score_max_abs = doc.value("score_max_abs", 0.0);
    return fit;
}

}  // namespace catglm

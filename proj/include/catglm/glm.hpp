#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

namespace catglm {

class GlmError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Family { bernoulli_logit, poisson_log };

const char* family_name(Family f);
Family parse_family(const std::string& name);  // "logit"/"bernoulli_logit"/"poisson"/"poisson_log"

/// Inverse link G(eta).
double mean_function(Family f, double eta);

/// What a design column encodes. Dummy columns come either from one-hot
/// encoding (group = category index) or from a clustering (group = cluster id).
struct ColumnDescriptor {
    enum class Kind { intercept, dummy, continuous };
    enum class Basis { category, cluster };

    Kind kind = Kind::intercept;
    std::string predictor;
    int group = -1;
    Basis basis = Basis::category;

    static ColumnDescriptor intercept() { return {}; }
    static ColumnDescriptor dummy(std::string predictor, int group, Basis basis) {
        return {Kind::dummy, std::move(predictor), group, basis};
    }
    static ColumnDescriptor continuous(std::string predictor) {
        return {Kind::continuous, std::move(predictor), -1, Basis::category};
    }

    std::string label() const;
    bool operator==(const ColumnDescriptor&) const = default;
};

struct DesignMatrix {
    std::vector<ColumnDescriptor> columns;
    Eigen::MatrixXd values;  // rows x columns

    std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
    std::size_t cols() const { return columns.size(); }

    /// Throws GlmError unless there is exactly one all-ones intercept column,
    /// dummies are 0/1 and descriptors are unique.
    void validate() const;
};

struct FittedGlm;

struct FitConfig {
    int max_iterations = 100;
    double tolerance = 1e-8;        // relative deviance change
    double ridge = 0.0;
    double divergence_guard = 1e4;  // coefficient norm that triggers the separation refit
    // Called once per fit_irls with the final model; used by diagnostics.
    std::function<void(const DesignMatrix&, std::span<const double>, const FittedGlm&)> observer;
};

struct FittedGlm {
    Family family = Family::bernoulli_logit;
    std::vector<ColumnDescriptor> columns;
    Eigen::VectorXd coefficients;
    bool converged = false;
    int n_iterations = 0;
    double deviance = 0.0;
    double ridge = 0.0;           // ridge actually applied
    bool rank_deficient = false;  // a 1e-8 ridge was added to make the system solvable
    bool separation = false;      // coefficient norm exceeded the guard; refit with 1e-4 ridge
    double score_max_abs = 0.0;   // |X'(y - mu)|_inf at the returned coefficients

    double coefficient(const ColumnDescriptor& col) const;
    nlohmann::json to_json() const;
    static FittedGlm from_json(const nlohmann::json& doc);
};

/// Maximum-likelihood fit by iteratively reweighted least squares with
/// step-halving. Throws GlmError on empty input, size mismatch or a response
/// outside the family's support.
FittedGlm fit_irls(const DesignMatrix& design, std::span<const double> y, Family family,
                   const FitConfig& config = {});

/// G(X beta) per row; logistic means are clamped to [1e-10, 1 - 1e-10].
std::vector<double> predict_mean(const FittedGlm& model, const DesignMatrix& design);

/// Fraction of rows where (mean >= 0.5) equals y.
double ccr(std::span<const double> predicted_means, std::span<const double> y);

double rmse(std::span<const double> predicted_means, std::span<const double> y);

/// Log-likelihood (up to terms constant in beta) and its gradient X'(y - mu).
double log_likelihood(const Eigen::MatrixXd& x, std::span<const double> y, Family family,
                      const Eigen::VectorXd& beta);
Eigen::VectorXd score(const Eigen::MatrixXd& x, std::span<const double> y, Family family,
                      const Eigen::VectorXd& beta);

/// Twice the log-likelihood gap to the saturated model.
double deviance(Family family, std::span<const double> y, const Eigen::VectorXd& eta);

}  // namespace catglm

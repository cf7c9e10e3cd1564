#pragma once

#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "catglm/data.hpp"
#include "catglm/glm.hpp"

namespace catglm {

class ClusteringError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// order[position] = category index. A permutation of 0..K-1.
struct CategoryOrdering {
    std::string predictor;
    std::vector<int> order;

    /// Inverse permutation: position of each category.
    std::vector<int> positions() const;
    void validate(std::size_t k_categories) const;
};

/// Assignment of ordered categories to at most k_prime consecutive clusters.
/// assignment[position] is the cluster id of the category at that position.
struct Clustering {
    std::string predictor;
    int k_prime = 2;
    std::vector<int> order;       // the ordering the assignment refers to
    std::vector<int> assignment;  // non-decreasing, starts at 0, steps of at most 1

    /// Cluster id of a category (by category index, not position).
    int cluster_of(int category) const;
    /// Number of non-empty clusters.
    int used_clusters() const;
    void validate() const;

    nlohmann::json to_json(const PredictorSpec& spec) const;
    static Clustering from_json(const nlohmann::json& doc, const PredictorSpec& spec);
};

/// Identity order; the schema lists ordinal categories in their natural order.
CategoryOrdering order_natural(const PredictorSpec& spec);

/// Categories sorted ascending by their one-hot coefficient; the reference
/// category (index 0) takes the value 0. Ties keep the original index order.
CategoryOrdering order_by_coefficients(const PredictorSpec& spec, const FittedGlm& one_hot_fit);

/// All feasible assignments of k_categories ordered categories into at most
/// k_prime consecutive clusters, i.e. every placement of 0..k_prime-1 cut
/// points in the k_categories-1 gaps. Ordered by number of cuts, most cuts
/// first, then lexicographically by cut positions; for k_prime = 2 this lists
/// the single-cut clusterings by size of the first cluster and ends with the
/// all-in-one clustering.
std::vector<std::vector<int>> enumerate_feasible_clusterings(std::size_t k_categories, int k_prime);

/// Number of feasible clusterings: sum_{j<k_prime} C(k_categories-1, j).
std::size_t count_feasible_clusterings(std::size_t k_categories, int k_prime);

struct DummyBlock {
    std::vector<int> groups;  // cluster id of each emitted column
    Eigen::MatrixXd values;   // rows x groups.size()
};

/// Reduced dummy encoding of one categorical column: one indicator per
/// non-empty cluster except the last non-empty one. A single non-empty
/// cluster yields zero columns.
DummyBlock apply_clustering(std::span<const int> column, const Clustering& clustering);

/// Categorical coefficient count of the clustered model as a percentage of
/// the one-hot model's: sum over categorical predictors of (k_prime-1) for
/// clustered ones and (K_j-1) for the rest, over sum(K_j) - J. With k_prime = 2
/// and every predictor clustered this is J / (sum K_j - J) * 100.
double relative_complexity(const Schema& schema, const std::set<std::string>& clustered_predictors, int k_prime = 2);

/// How one categorical predictor enters a design matrix.
struct Encoding {
    enum class Kind { one_hot, clustered, dropped };
    Kind kind = Kind::one_hot;
    Clustering clustering;  // kind == clustered only

    static Encoding one_hot() { return {}; }
    static Encoding dropped() { return {Kind::dropped, {}}; }
    static Encoding clustered(Clustering c) { return {Kind::clustered, std::move(c)}; }
};

/// Intercept, then the categorical predictors in schema order (one-hot uses
/// category 0 as reference), then continuous predictors. `encodings` has one
/// entry per categorical predictor; empty means all one-hot.
DesignMatrix build_design(const Dataset& data, const Schema& schema, std::span<const Encoding> encodings = {});

}  // namespace catglm

#include "catglm/clustering.hpp"

#include <algorithm>
#include <numeric>

#include <nlohmann/json.hpp>

namespace catglm {

using nlohmann::json;

std::vector<int> CategoryOrdering::positions() const {
    std::vector<int> pos(order.size(), -1);
    for (std::size_t i = 0; i < order.size(); ++i) pos[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
    return pos;
}

void CategoryOrdering::validate(std::size_t k_categories) const {
    if (order.size() != k_categories) throw ClusteringError("ordering of '" + predictor + "' has wrong length");
    std::vector<bool> seen(k_categories, false);
    for (int c : order) {
        if (c < 0 || static_cast<std::size_t>(c) >= k_categories || seen[static_cast<std::size_t>(c)])
            throw ClusteringError("ordering of '" + predictor + "' is not a permutation");
        seen[static_cast<std::size_t>(c)] = true;
    }
}

int Clustering::cluster_of(int category) const {
    for (std::size_t i = 0; i < order.size(); ++i)
        if (order[i] == category) return assignment[i];
    throw ClusteringError("category index " + std::to_string(category) + " outside the ordering of '" + predictor + "'");
}

int Clustering::used_clusters() const { return assignment.empty() ? 0 : assignment.back() + 1; }

void Clustering::validate() const {
    if (k_prime < 2) throw ClusteringError("k_prime must be at least 2");
    if (assignment.size() != order.size()) throw ClusteringError("assignment and ordering of '" + predictor + "' differ in length");
    CategoryOrdering{predictor, order}.validate(order.size());
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        const int prev = i == 0 ? 0 : assignment[i - 1];
        const int a = assignment[i];
        if (i == 0 ? a != 0 : (a != prev && a != prev + 1))
            throw ClusteringError("assignment of '" + predictor + "' is not consecutive");
        if (a >= k_prime) throw ClusteringError("assignment of '" + predictor + "' uses more than k_prime clusters");
    }
}

json Clustering::to_json(const PredictorSpec& spec) const {
    std::vector<std::string> labels;
    for (int c : order) labels.push_back(spec.categories.at(static_cast<std::size_t>(c)));
    return {{"predictor", predictor}, {"k_prime", k_prime}, {"order", labels}, {"assignment", assignment}};
}

Clustering Clustering::from_json(const json& doc, const PredictorSpec& spec) {
    Clustering c;
    c.predictor = doc.at("predictor").get<std::string>();
    c.k_prime = doc.at("k_prime").get<int>();
    for (const auto& label : doc.at("order").get<std::vector<std::string>>()) {
        const auto idx = spec.category_index(label);
        if (!idx) throw ClusteringError("unknown category '" + label + "' for '" + spec.name + "'");
        c.order.push_back(static_cast<int>(*idx));
    }
    c.assignment = doc.at("assignment").get<std::vector<int>>();
    c.validate();
    return c;
}

CategoryOrdering order_natural(const PredictorSpec& spec) {
    if (spec.kind != PredictorKind::ordinal) throw ClusteringError("'" + spec.name + "' is not ordinal");
    CategoryOrdering o{spec.name, std::vector<int>(spec.cardinality())};
    std::iota(o.order.begin(), o.order.end(), 0);
    return o;
}

CategoryOrdering order_by_coefficients(const PredictorSpec& spec, const FittedGlm& one_hot_fit) {
    if (!spec.is_categorical()) throw ClusteringError("'" + spec.name + "' is not categorical");
    const auto k = spec.cardinality();
    std::vector<double> value(k, 0.0);
    for (std::size_t c = 1; c < k; ++c) {
        const auto col = ColumnDescriptor::dummy(spec.name, static_cast<int>(c), ColumnDescriptor::Basis::category);
        const auto it = std::find(one_hot_fit.columns.begin(), one_hot_fit.columns.end(), col);
        if (it == one_hot_fit.columns.end())
            throw ClusteringError("one-hot fit lacks dummy " + col.label() + " for '" + spec.name + "'");
        value[c] = one_hot_fit.coefficients[it - one_hot_fit.columns.begin()];
    }
    CategoryOrdering o{spec.name, std::vector<int>(k)};
    std::iota(o.order.begin(), o.order.end(), 0);
    std::stable_sort(o.order.begin(), o.order.end(),
                     [&](int a, int b) { return value[static_cast<std::size_t>(a)] < value[static_cast<std::size_t>(b)]; });
    return o;
}

namespace {

std::size_t binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    std::size_t r = 1;
    for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

std::size_t count_feasible_clusterings(std::size_t k_categories, int k_prime) {
    if (k_prime < 2) throw ClusteringError("k_prime must be at least 2");
    if (k_categories < 1) throw ClusteringError("need at least one category");
    std::size_t total = 0;
    for (std::size_t j = 0; j < static_cast<std::size_t>(k_prime); ++j) total += binomial(k_categories - 1, j);
    return total;
}

std::vector<std::vector<int>> enumerate_feasible_clusterings(std::size_t k_categories, int k_prime) {
    if (k_prime < 2) throw ClusteringError("k_prime must be at least 2");
    if (k_categories < 2) throw ClusteringError("need at least two categories to cluster");
    const std::size_t gaps = k_categories - 1;
    std::vector<std::vector<int>> out;
    out.reserve(count_feasible_clusterings(k_categories, k_prime));

    const auto max_cuts = std::min<std::size_t>(static_cast<std::size_t>(k_prime) - 1, gaps);
    for (std::size_t cuts = max_cuts + 1; cuts-- > 0;) {
        // Cut positions c_1 < ... < c_cuts in 1..gaps; a cut at c means a new
        // cluster starts at position c. Lexicographic combinations.
        std::vector<std::size_t> pos(cuts);
        std::iota(pos.begin(), pos.end(), std::size_t{1});
        while (true) {
            std::vector<int> a(k_categories, 0);
            for (std::size_t c : pos)
                for (std::size_t i = c; i < k_categories; ++i) ++a[i];
            out.push_back(std::move(a));
            // Advance to the next combination.
            std::size_t i = cuts;
            while (i > 0 && pos[i - 1] == gaps - (cuts - i)) --i;
            if (i == 0) break;
            ++pos[i - 1];
            for (std::size_t j = i; j < cuts; ++j) pos[j] = pos[j - 1] + 1;
        }
    }
    return out;
}

DummyBlock apply_clustering(std::span<const int> column, const Clustering& clustering) {
    const auto positions = CategoryOrdering{clustering.predictor, clustering.order}.positions();
    const int used = clustering.used_clusters();
    DummyBlock block;
    for (int g = 0; g + 1 < used; ++g) block.groups.push_back(g);
    block.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(column.size()),
                                         static_cast<Eigen::Index>(block.groups.size()));
    for (std::size_t r = 0; r < column.size(); ++r) {
        const int c = column[r];
        if (c < 0 || static_cast<std::size_t>(c) >= positions.size())
            throw ClusteringError("category index " + std::to_string(c) + " outside the ordering of '" +
                                  clustering.predictor + "'");
        const int g = clustering.assignment[static_cast<std::size_t>(positions[static_cast<std::size_t>(c)])];
        if (g + 1 < used) block.values(static_cast<Eigen::Index>(r), g) = 1.0;
    }
    return block;
}

double relative_complexity(const Schema& schema, const std::set<std::string>& clustered_predictors, int k_prime) {
    std::size_t j = 0, sum_k = 0, clustered = 0;
    for (const auto& p : schema.predictors) {
        if (!p.is_categorical()) continue;
        ++j;
        sum_k += p.cardinality();
        clustered += clustered_predictors.count(p.name) ? static_cast<std::size_t>(k_prime - 1) : p.cardinality() - 1;
    }
    if (j == 0) throw ClusteringError("schema has no categorical predictor");
    if (sum_k == j) throw ClusteringError("every categorical predictor has a single category");
    for (const auto& name : clustered_predictors)
        if (!schema.find_categorical(name)) throw ClusteringError("'" + name + "' is not a categorical predictor");
    return static_cast<double>(clustered) / static_cast<double>(sum_k - j) * 100.0;
}

DesignMatrix build_design(const Dataset& data, const Schema& schema, std::span<const Encoding> encodings) {
    const auto cat_pos = schema.categorical_positions();
    const auto cont_pos = schema.continuous_positions();
    if (!encodings.empty() && encodings.size() != cat_pos.size())
        throw ClusteringError("need one encoding per categorical predictor");
    const auto n = static_cast<Eigen::Index>(data.n_rows);

    // Count columns first so values are written once.
    std::vector<DummyBlock> blocks(cat_pos.size());
    Eigen::Index p = 1;
    for (std::size_t c = 0; c < cat_pos.size(); ++c) {
        const auto& spec = schema.predictors[cat_pos[c]];
        const auto kind = encodings.empty() ? Encoding::Kind::one_hot : encodings[c].kind;
        if (kind == Encoding::Kind::clustered) {
            if (encodings[c].clustering.predictor != spec.name)
                throw ClusteringError("clustering for '" + encodings[c].clustering.predictor + "' given for '" + spec.name + "'");
            blocks[c] = apply_clustering(data.categorical[c], encodings[c].clustering);
            p += static_cast<Eigen::Index>(blocks[c].groups.size());
        } else if (kind == Encoding::Kind::one_hot) {
            p += static_cast<Eigen::Index>(spec.cardinality()) - 1;
        }
    }
    p += static_cast<Eigen::Index>(cont_pos.size());

    DesignMatrix d;
    d.columns.reserve(static_cast<std::size_t>(p));
    d.values = Eigen::MatrixXd::Zero(n, p);
    d.columns.push_back(ColumnDescriptor::intercept());
    d.values.col(0).setOnes();
    Eigen::Index col = 1;
    for (std::size_t c = 0; c < cat_pos.size(); ++c) {
        const auto& spec = schema.predictors[cat_pos[c]];
        const auto kind = encodings.empty() ? Encoding::Kind::one_hot : encodings[c].kind;
        if (kind == Encoding::Kind::one_hot) {
            const auto k = static_cast<int>(spec.cardinality());
            for (int g = 1; g < k; ++g)
                d.columns.push_back(ColumnDescriptor::dummy(spec.name, g, ColumnDescriptor::Basis::category));
            for (Eigen::Index r = 0; r < n; ++r) {
                const int v = data.categorical[c][static_cast<std::size_t>(r)];
                if (v > 0) d.values(r, col + v - 1) = 1.0;
            }
            col += k - 1;
        } else if (kind == Encoding::Kind::clustered) {
            const auto& b = blocks[c];
            for (int g : b.groups) d.columns.push_back(ColumnDescriptor::dummy(spec.name, g, ColumnDescriptor::Basis::cluster));
            d.values.middleCols(col, b.values.cols()) = b.values;
            col += b.values.cols();
        }
    }
    for (std::size_t c = 0; c < cont_pos.size(); ++c) {
        d.columns.push_back(ColumnDescriptor::continuous(schema.predictors[cont_pos[c]].name));
        d.values.col(col++) = Eigen::Map<const Eigen::VectorXd>(data.continuous[c].data(), n);
    }
    return d;
}

}  // namespace catglm

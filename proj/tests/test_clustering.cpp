#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "catglm/clustering.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace catglm;

namespace {

const std::vector<std::string> kEducation = {"1st-4th",   "5th-6th",      "7th-8th",   "9th",        "10th",
                                             "11th",      "12th",         "HS-grad",   "Some-college", "Assoc-voc",
                                             "Assoc-acdm", "Prof-school", "Bachelors", "Masters",    "Doctorate"};

// Table 1 of the method's description: column k (1-based) puts the first k
// education levels in the first cluster. Rows are the 15 levels.
std::vector<std::vector<int>> table1() {
    std::vector<std::vector<int>> t(15, std::vector<int>(15));
    for (int row = 0; row < 15; ++row)
        for (int col = 0; col < 15; ++col) t[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)] = row <= col;
    return t;
}

Clustering make(const std::string& name, std::vector<int> order, std::vector<int> assignment, int k_prime = 2) {
    Clustering c;
    c.predictor = name;
    c.k_prime = k_prime;
    c.order = std::move(order);
    c.assignment = std::move(assignment);
    return c;
}

std::vector<int> identity(int k) {
    std::vector<int> v(static_cast<std::size_t>(k));
    std::iota(v.begin(), v.end(), 0);
    return v;
}

}  // namespace

TEST_CASE("natural ordering") {
    const auto edu = fixtures::ordinal("education", kEducation);
    const auto o = order_natural(edu);
    CHECK(o.order == identity(15));
    CHECK(edu.categories[static_cast<std::size_t>(o.order.front())] == "1st-4th");
    CHECK(edu.categories[static_cast<std::size_t>(o.order.back())] == "Doctorate");
    CHECK(order_natural(fixtures::ordinal("one", {"x"})).order == std::vector<int>{0});
    CHECK(order_natural(fixtures::ordinal("three", {"l", "m", "h"})).order == std::vector<int>{0, 1, 2});
    CHECK_THROWS_AS(order_natural(fixtures::nominal("n", {"a", "b"})), ClusteringError);
}

TEST_CASE("ordering by one-hot coefficients") {
    const auto spec = fixtures::nominal("g", {"a", "b", "c"});
    FittedGlm fit;
    fit.columns = {ColumnDescriptor::intercept(), ColumnDescriptor::dummy("g", 1, ColumnDescriptor::Basis::category),
                   ColumnDescriptor::dummy("g", 2, ColumnDescriptor::Basis::category)};
    fit.coefficients = Eigen::Vector3d(0.3, 0.5, -0.2);
    CHECK(order_by_coefficients(spec, fit).order == std::vector<int>{2, 0, 1});
    fit.coefficients = Eigen::Vector3d(0.3, 0.0, 0.0);
    CHECK(order_by_coefficients(spec, fit).order == std::vector<int>{0, 1, 2});
    fit.columns.pop_back();
    fit.coefficients = Eigen::Vector2d(0.3, 0.1);
    CHECK_THROWS_AS(order_by_coefficients(spec, fit), ClusteringError);
}

TEST_CASE("Table 1: the 15 feasible two-cluster splits of Education") {
    const auto all = enumerate_feasible_clusterings(15, 2);
    REQUIRE(all.size() == 15);
    const auto t = table1();
    for (std::size_t col = 0; col < 15; ++col) {
        for (std::size_t row = 0; row < 15; ++row) {
            // Table entries mark membership of the first cluster.
            const int in_first = all[col][row] == 0 ? 1 : 0;
            CHECK(in_first == t[row][col]);
        }
    }
    // The last column is the all-in-one clustering.
    CHECK(std::all_of(all.back().begin(), all.back().end(), [](int a) { return a == 0; }));
}

TEST_CASE("small enumeration cases") {
    CHECK(enumerate_feasible_clusterings(2, 2) == std::vector<std::vector<int>>{{0, 1}, {0, 0}});
    CHECK(enumerate_feasible_clusterings(5, 3).size() == 11);
    CHECK(count_feasible_clusterings(5, 3) == 11);
    CHECK_THROWS_AS(enumerate_feasible_clusterings(1, 2), ClusteringError);
    CHECK_THROWS_AS(enumerate_feasible_clusterings(4, 1), ClusteringError);
}

TEST_CASE("enumeration equals the brute-force oracle for K <= 8, K' <= 4") {
    for (int k = 2; k <= 8; ++k) {
        for (int kp = 2; kp <= 4; ++kp) {
            const auto got = enumerate_feasible_clusterings(static_cast<std::size_t>(k), kp);
            const std::set<std::vector<int>> got_set(got.begin(), got.end());
            CHECK(got_set.size() == got.size());  // no duplicates
            CHECK(got_set == oracle::monotone_prefix_assignments(k, kp));
            long expect = 0;
            for (int j = 0; j < kp; ++j) expect += oracle::binomial(k - 1, j);
            CHECK(static_cast<long>(got.size()) == expect);
            CHECK(count_feasible_clusterings(static_cast<std::size_t>(k), kp) == got.size());
            if (kp == 2) CHECK(got.size() == static_cast<std::size_t>(k));
            // Most cuts first; the all-in-one clustering is last.
            for (std::size_t i = 1; i < got.size(); ++i) CHECK(got[i - 1].back() >= got[i].back());
            CHECK(got.back() == std::vector<int>(static_cast<std::size_t>(k), 0));
        }
    }
}

TEST_CASE("apply_clustering") {
    const auto order = identity(15);
    const auto all = enumerate_feasible_clusterings(15, 2);
    SUBCASE("Table 1 column 12: Bachelors falls outside the first cluster") {
        const auto c = make("education", order, all[11]);
        const std::vector<int> rows{12, 11, 0};  // Bachelors, Prof-school, 1st-4th
        const auto b = apply_clustering(rows, c);
        REQUIRE(b.values.cols() == 1);
        CHECK(b.values(0, 0) == 0.0);
        CHECK(b.values(1, 0) == 1.0);
        CHECK(b.values(2, 0) == 1.0);
    }
    SUBCASE("all-in-one gives zero columns") {
        const auto c = make("education", order, all.back());
        CHECK(apply_clustering(std::vector<int>{3, 4}, c).values.cols() == 0);
    }
    SUBCASE("cut after the first category") {
        const auto c = make("education", order, all.front());
        const auto b = apply_clustering(std::vector<int>{0, 1}, c);
        CHECK(b.values(0, 0) == 1.0);
        CHECK(b.values(1, 0) == 0.0);
    }
    SUBCASE("permuted order and three clusters") {
        const auto c = make("g", {2, 0, 1, 3}, {0, 1, 1, 2}, 3);
        const auto b = apply_clustering(std::vector<int>{0, 1, 2, 3}, c);
        REQUIRE(b.values.cols() == 2);
        CHECK(b.groups == std::vector<int>{0, 1});
        CHECK(b.values.row(0) == Eigen::RowVector2d(0, 1));
        CHECK(b.values.row(2) == Eigen::RowVector2d(1, 0));
        CHECK(b.values.row(3) == Eigen::RowVector2d(0, 0));
        CHECK(c.cluster_of(2) == 0);
        CHECK(c.cluster_of(3) == 2);
    }
    SUBCASE("out-of-range category") {
        const auto c = make("g", {0, 1}, {0, 1});
        CHECK_THROWS_AS(apply_clustering(std::vector<int>{2}, c), ClusteringError);
    }
}

TEST_CASE("clustering validation and JSON") {
    const auto spec = fixtures::nominal("g", {"a", "b", "c"});
    CHECK_THROWS_AS(make("g", {0, 1, 2}, {0, 2, 2}).validate(), ClusteringError);
    CHECK_THROWS_AS(make("g", {0, 1, 2}, {1, 1, 1}).validate(), ClusteringError);
    CHECK_THROWS_AS(make("g", {0, 0, 2}, {0, 1, 1}).validate(), ClusteringError);
    CHECK_THROWS_AS(make("g", {0, 1, 2}, {0, 1, 2}).validate(), ClusteringError);

    const auto c = make("g", {2, 0, 1}, {0, 0, 1});
    const auto doc = c.to_json(spec);
    CHECK(doc["order"] == nlohmann::json({"c", "a", "b"}));
    const auto back = Clustering::from_json(doc, spec);
    CHECK(back.order == c.order);
    CHECK(back.assignment == c.assignment);
    auto bad = doc;
    bad["order"][0] = "zz";
    CHECK_THROWS_AS(Clustering::from_json(bad, spec), ClusteringError);
}

TEST_CASE("relative complexity") {
    auto schema_with = [](const std::vector<std::size_t>& ks) {
        Schema s;
        for (std::size_t i = 0; i < ks.size(); ++i)
            s.predictors.push_back(fixtures::nominal("p" + std::to_string(i), fixtures::letters(static_cast<int>(ks[i]))));
        s.response = {"y", ResponseType::binary, std::nullopt};
        return s;
    };
    auto all_names = [](const Schema& s) {
        std::set<std::string> n;
        for (const auto& p : s.predictors) n.insert(p.name);
        return n;
    };
    const auto nursery = schema_with({3, 5, 4, 4, 3, 3, 3});
    CHECK(relative_complexity(nursery, all_names(nursery)) == doctest::Approx(700.0 / 18.0));
    const auto car = schema_with({4, 4, 4, 3, 3, 3});
    CHECK(relative_complexity(car, all_names(car)) == doctest::Approx(40.0));
    const auto one = schema_with({5});
    CHECK(relative_complexity(one, all_names(one)) == 25.0);
    CHECK(relative_complexity(one, {}) == 100.0);
    CHECK_THROWS_AS(relative_complexity(schema_with({1, 1}), {}), ClusteringError);
    CHECK_THROWS_AS(relative_complexity(one, {"nope"}), ClusteringError);
}

TEST_CASE("build_design layout and encodings") {
    Schema s;
    s.predictors = {fixtures::continuous("x"), fixtures::nominal("g", {"a", "b", "c"}),
                    fixtures::ordinal("o", {"l", "m"})};
    s.response = {"y", ResponseType::binary, std::nullopt};
    Dataset d;
    d.n_rows = 3;
    d.categorical = {{0, 1, 2}, {1, 0, 1}};
    d.continuous = {{0.5, -1.0, 2.0}};
    d.response = {0, 1, 1};

    const auto one_hot = build_design(d, s);
    std::vector<std::string> labels;
    for (const auto& c : one_hot.columns) labels.push_back(c.label());
    CHECK(labels == std::vector<std::string>{"(intercept)", "g[category=1]", "g[category=2]", "o[category=1]", "x"});
    CHECK_NOTHROW(one_hot.validate());
    CHECK(one_hot.values.row(2) == (Eigen::RowVectorXd(5) << 1, 0, 1, 1, 2.0).finished());

    std::vector<Encoding> enc{Encoding::clustered(make("g", {0, 1, 2}, {0, 1, 1})), Encoding::dropped()};
    const auto clustered = build_design(d, s, enc);
    labels.clear();
    for (const auto& c : clustered.columns) labels.push_back(c.label());
    CHECK(labels == std::vector<std::string>{"(intercept)", "g[cluster=0]", "x"});
    CHECK(clustered.values.col(1) == Eigen::Vector3d(1, 0, 0));

    enc.pop_back();
    CHECK_THROWS_AS(build_design(d, s, enc), ClusteringError);
}

TEST_CASE("all-in-one clustering reproduces the model without the predictor") {
    std::mt19937_64 rng(21);
    Schema s;
    s.predictors = {fixtures::nominal("g", fixtures::letters(5)), fixtures::nominal("h", fixtures::letters(4)),
                    fixtures::continuous("x")};
    s.response = {"y", ResponseType::binary, std::nullopt};
    Dataset d;
    d.n_rows = 400;
    d.categorical.resize(2);
    d.continuous.resize(1);
    std::normal_distribution<double> z;
    for (std::size_t i = 0; i < d.n_rows; ++i) {
        d.categorical[0].push_back(static_cast<int>(rng() % 5));
        d.categorical[1].push_back(static_cast<int>(rng() % 4));
        d.continuous[0].push_back(z(rng));
        const double eta = 0.3 * d.categorical[0].back() - 0.6 + 0.8 * d.continuous[0].back();
        d.response.push_back(std::bernoulli_distribution(1 / (1 + std::exp(-eta)))(rng) ? 1.0 : 0.0);
    }
    const auto all_in_one = enumerate_feasible_clusterings(4, 2).back();
    std::vector<Encoding> a{Encoding::one_hot(), Encoding::clustered(make("h", identity(4), all_in_one))};
    std::vector<Encoding> b{Encoding::one_hot(), Encoding::dropped()};
    const auto da = build_design(d, s, a);
    const auto db = build_design(d, s, b);
    CHECK(da.columns == db.columns);
    const auto fa = fit_irls(da, d.response, Family::bernoulli_logit, fixtures::audited());
    const auto fb = fit_irls(db, d.response, Family::bernoulli_logit, fixtures::audited());
    const auto pa = predict_mean(fa, da);
    const auto pb = predict_mean(fb, db);
    for (std::size_t i = 0; i < pa.size(); ++i) CHECK(std::abs(pa[i] - pb[i]) <= 1e-10);
}

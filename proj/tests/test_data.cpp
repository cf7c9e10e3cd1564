#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "catglm/data.hpp"
#include "fixtures.hpp"

using namespace catglm;

namespace {

Schema one_nominal_schema() {
    Schema s;
    s.predictors = {fixtures::nominal("colour", {"a", "b"})};
    s.response = {"y", ResponseType::binary, std::nullopt};
    return s;
}

std::string error_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const DataError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("read_csv resolves category indices in file order") {
    std::istringstream in("colour,y\na,1\nb,0\na,0\n");
    const auto d = read_csv(in, one_nominal_schema());
    CHECK(d.n_rows == 3);
    CHECK(d.categorical[0] == std::vector<int>{0, 1, 0});
    CHECK(d.response == std::vector<double>{1, 0, 0});
}

TEST_CASE("read_csv names the offending row, column and label") {
    std::istringstream in("colour,y\na,1\nzz,0\n");
    const auto msg = error_of([&] { read_csv(in, one_nominal_schema()); });
    CHECK(msg.find("'zz'") != std::string::npos);
    CHECK(msg.find("row 2") != std::string::npos);
    CHECK(msg.find("'colour'") != std::string::npos);
}

TEST_CASE("read_csv rejects bad continuous cells and missing responses") {
    Schema s = one_nominal_schema();
    s.predictors.push_back(fixtures::continuous("x"));
    {
        std::istringstream in("colour,x,y\na,1.5,1\nb,abc,0\n");
        CHECK(error_of([&] { read_csv(in, s); }).find("non-numeric") != std::string::npos);
    }
    {
        std::istringstream in("colour,x,y\na,,1\n");
        CHECK(error_of([&] { read_csv(in, s); }).find("missing continuous") != std::string::npos);
    }
    {
        std::istringstream in("colour,x,y\na,1,\n");
        CHECK(error_of([&] { read_csv(in, s); }).find("missing response") != std::string::npos);
    }
    {
        std::istringstream in("colour,y\na,1\n");
        CHECK(error_of([&] { read_csv(in, s); }).find("header lacks column 'x'") != std::string::npos);
    }
}

TEST_CASE("empty categorical cells map to the declared missing category") {
    Schema s;
    s.predictors = {fixtures::nominal("job", {"Private", "State-gov", "Missing"})};
    s.response = {"y", ResponseType::binary, std::nullopt};
    std::istringstream in("job,y\nPrivate,1\n,0\nMissing,1\n");
    const auto d = read_csv(in, s);
    CHECK(d.categorical[0] == std::vector<int>{0, 2, 2});

    s.predictors[0].categories.pop_back();
    std::istringstream in2("job,y\nPrivate,1\n,0\n");
    CHECK(error_of([&] { read_csv(in2, s); }).find("'Missing'") != std::string::npos);
}

TEST_CASE("quoted RFC-4180 fields and CRLF line endings") {
    Schema s;
    s.predictors = {fixtures::nominal("city", {"Paris, FR", "He said \"hi\"", "two\nlines"})};
    s.response = {"n", ResponseType::count, std::nullopt};
    std::istringstream in("city,n\r\n\"Paris, FR\",3\r\n\"He said \"\"hi\"\"\",0\r\n\"two\nlines\",7\r\n");
    const auto d = read_csv(in, s);
    CHECK(d.categorical[0] == std::vector<int>{0, 1, 2});
    CHECK(d.response == std::vector<double>{3, 0, 7});
}

TEST_CASE("count responses must be non-negative integers") {
    Schema s = one_nominal_schema();
    s.response.type = ResponseType::count;
    std::istringstream in("colour,y\na,2.5\n");
    CHECK(error_of([&] { read_csv(in, s); }).find("non-negative integer") != std::string::npos);
    std::istringstream in2("colour,y\na,-1\n");
    CHECK_THROWS_AS(read_csv(in2, s), DataError);
}

TEST_CASE("binary responses: positive label, 0/1 and majority-vs-rest") {
    Schema s = one_nominal_schema();
    s.response.positive_label = "yes";
    std::istringstream in("colour,y\na,yes\nb,no\n");
    CHECK(read_csv(in, s).response == std::vector<double>{1, 0});

    s.response.positive_label.reset();
    std::istringstream in2("colour,y\na,x\nb,z\na,z\n");
    CHECK(read_csv(in2, s).response == std::vector<double>{0, 1, 1});
}

TEST_CASE("binarize_majority_vs_rest") {
    std::vector<std::string> labels;
    labels.insert(labels.end(), 66, "A");
    labels.insert(labels.end(), 20, "B");
    labels.insert(labels.end(), 14, "C");
    std::shuffle(labels.begin(), labels.end(), std::mt19937(3));
    const auto b = binarize_majority_vs_rest(labels);
    CHECK(b.majority_label == "A");
    for (std::size_t i = 0; i < labels.size(); ++i) CHECK(b.values[i] == (labels[i] == "A" ? 1.0 : 0.0));

    SUBCASE("ties go to the lexicographically smallest label") {
        std::vector<std::string> tie(50, "B");
        tie.insert(tie.end(), 50, "A");
        // Oracle: count per label, then sort by (-count, label).
        std::map<std::string, int> counts;
        for (const auto& l : tie) ++counts[l];
        std::vector<std::pair<int, std::string>> ranked;
        for (const auto& [l, c] : counts) ranked.push_back({-c, l});
        std::sort(ranked.begin(), ranked.end());
        CHECK(binarize_majority_vs_rest(tie).majority_label == ranked.front().second);
        CHECK(ranked.front().second == "A");
    }
    SUBCASE("a single label is degenerate") {
        std::vector<std::string> one(5, "A");
        CHECK_THROWS_AS(binarize_majority_vs_rest(one), DataError);
    }
    SUBCASE("output holds exactly the majority count of ones") {
        std::mt19937 rng(11);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<std::string> ls;
            const int n = 2 + static_cast<int>(rng() % 200);
            for (int i = 0; i < n; ++i) ls.push_back(std::string(1, static_cast<char>('a' + rng() % 4)));
            ls.push_back("a");
            ls.push_back("b");
            const auto r = binarize_majority_vs_rest(ls);
            const auto ones = std::count(r.values.begin(), r.values.end(), 1.0);
            std::map<std::string, long> counts;
            for (const auto& l : ls) ++counts[l];
            long best = 0;
            for (const auto& [l, c] : counts) best = std::max(best, c);
            CHECK(ones == best);
            CHECK(counts[r.majority_label] == best);
        }
    }
}

TEST_CASE("split sizes and determinism") {
    SplitPlan plan;
    plan.seed = 42;
    const auto a = split_indices(10, plan, 0);
    CHECK(a.train.size() == 7);
    CHECK(a.test.size() == 3);
    const auto b = split_indices(10, plan, 0);
    CHECK(a.train == b.train);
    CHECK(a.test == b.test);

    CHECK_THROWS_AS(split_indices(10, plan, 10), DataError);
    CHECK_THROWS_AS(split_indices(1, plan, 0), DataError);
    plan.train_fraction = 1.0;
    CHECK_THROWS_AS(split_indices(10, plan, 0), DataError);
}

TEST_CASE("ten reshuffles of 1000 rows are pairwise distinct 700/300 partitions") {
    SplitPlan plan;
    plan.seed = 7;
    std::vector<std::vector<std::size_t>> trains;
    for (std::size_t i = 0; i < plan.n_reshuffles; ++i) {
        const auto s = split_indices(1000, plan, i);
        CHECK(s.train.size() == 700);
        CHECK(s.test.size() == 300);
        trains.push_back(s.train);
    }
    for (std::size_t i = 0; i < trains.size(); ++i)
        for (std::size_t j = i + 1; j < trains.size(); ++j) CHECK(trains[i] != trains[j]);
}

TEST_CASE("split partitions are exhaustive and disjoint (property)") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        SplitPlan plan;
        plan.seed = rng();
        plan.train_fraction = 0.05 + 0.9 * (rng() % 1000) / 1000.0;
        const std::size_t n = 20 + rng() % 500;
        const auto s = split_indices(n, plan, rng() % plan.n_reshuffles);
        CHECK(s.train.size() == static_cast<std::size_t>(std::llround(plan.train_fraction * n)));
        std::vector<std::size_t> all = s.train;
        all.insert(all.end(), s.test.begin(), s.test.end());
        std::sort(all.begin(), all.end());
        std::vector<std::size_t> expect(n);
        std::iota(expect.begin(), expect.end(), std::size_t{0});
        CHECK(all == expect);
    }
}

TEST_CASE("write_csv then read_csv reproduces the dataset (property)") {
    Schema s;
    s.predictors = {fixtures::nominal("n", {"x", "y,z", "w\"q"}), fixtures::continuous("c"),
                    fixtures::ordinal("o", {"lo", "mid", "hi"})};
    std::mt19937 rng(9);
    std::normal_distribution<double> norm(0, 1e3);
    for (auto type : {ResponseType::binary, ResponseType::count}) {
        s.response = {"r", type, std::nullopt};
        for (int trial = 0; trial < 20; ++trial) {
            Dataset d;
            d.n_rows = 1 + rng() % 40;
            d.categorical.resize(2);
            d.continuous.resize(1);
            for (std::size_t i = 0; i < d.n_rows; ++i) {
                d.categorical[0].push_back(static_cast<int>(rng() % 3));
                d.categorical[1].push_back(static_cast<int>(rng() % 3));
                d.continuous[0].push_back(norm(rng) / 7.0);
                d.response.push_back(type == ResponseType::binary ? static_cast<double>(rng() % 2)
                                                                  : static_cast<double>(rng() % 30));
            }
            std::stringstream buf;
            write_csv(buf, d, s);
            const auto back = read_csv(buf, s);
            CHECK(back.n_rows == d.n_rows);
            CHECK(back.categorical == d.categorical);
            CHECK(back.continuous == d.continuous);
            CHECK(back.response == d.response);
        }
    }
}

TEST_CASE("schema JSON parsing and validation") {
    const auto doc = nlohmann::json::parse(R"({
        "predictors": [
            {"name": "edu", "kind": "ordinal", "categories": ["lo", "hi"]},
            {"name": "age", "kind": "continuous"}
        ],
        "response": {"name": "y", "type": "binary", "positive_label": ">50K"}
    })");
    const auto s = Schema::from_json(doc);
    CHECK(s.n_categorical() == 1);
    CHECK(s.n_continuous() == 1);
    CHECK(s.response.positive_label == ">50K");
    CHECK(Schema::from_json(s.to_json()).to_json() == s.to_json());

    auto dup = doc;
    dup["predictors"][1]["name"] = "edu";
    CHECK_THROWS_AS(Schema::from_json(dup), DataError);
    auto dupcat = doc;
    dupcat["predictors"][0]["categories"] = {"lo", "lo"};
    CHECK_THROWS_AS(Schema::from_json(dupcat), DataError);
    auto nocat = doc;
    nocat["predictors"][0]["categories"] = nlohmann::json::array();
    CHECK_THROWS_AS(Schema::from_json(nocat), DataError);
    auto badkind = doc;
    badkind["predictors"][0]["kind"] = "interval";
    CHECK_THROWS_AS(Schema::from_json(badkind), DataError);
}

TEST_CASE("bundled datasets load with the published sizes") {
    const std::filesystem::path dir = CATGLM_DATA_DIR;
    struct Expect {
        const char* name;
        std::size_t n;
        std::size_t j;
        std::size_t sum_k;
    };
    // German keeps the published categorical layout; Solar loses the Zurich
    // class column upstream (see tools/prepare_datasets.py).
    for (const auto& e : {Expect{"german", 1000, 11, 52}, Expect{"solar", 1066, 4, 16}}) {
        const auto schema = load_schema(dir / (std::string(e.name) + ".schema.json"));
        const auto d = load_csv(dir / (std::string(e.name) + ".csv"), schema);
        CHECK(d.n_rows == e.n);
        CHECK(schema.n_categorical() == e.j);
        std::size_t sum = 0;
        for (std::size_t j = 0; j < schema.n_categorical(); ++j) sum += schema.categorical(j).cardinality();
        CHECK(sum == e.sum_k);
    }
    const auto adult = load_schema(dir / "adult.schema.json");
    CHECK(load_csv(dir / "adult.csv", adult).n_rows == 32561);

    // Solar: C-class flare count 0 against the rest is the 83/17 split.
    const auto solar_schema = load_schema(dir / "solar.schema.json");
    const auto solar = load_csv(dir / "solar.csv", solar_schema);
    const double share = std::count(solar.response.begin(), solar.response.end(), 1.0) / double(solar.n_rows);
    CHECK(share == doctest::Approx(0.83).epsilon(0.01));
}

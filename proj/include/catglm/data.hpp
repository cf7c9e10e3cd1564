#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace catglm {

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class PredictorKind { ordinal, nominal, continuous };
enum class ResponseType { binary, count };

struct PredictorSpec {
    std::string name;
    PredictorKind kind = PredictorKind::continuous;
    // Categorical kinds only. For ordinal predictors the list order is the natural order.
    std::vector<std::string> categories;

    bool is_categorical() const { return kind != PredictorKind::continuous; }
    std::size_t cardinality() const { return categories.size(); }
    std::optional<std::size_t> category_index(const std::string& label) const;
};

struct ResponseSpec {
    std::string name;
    ResponseType type = ResponseType::binary;
    // Binary only. When absent, cells must be 0/1 or are binarized majority-vs-rest.
    std::optional<std::string> positive_label;
};

struct Schema {
    std::vector<PredictorSpec> predictors;
    ResponseSpec response;
    // Empty categorical cells are read as this label; it must be declared to be accepted.
    std::string missing_label = "Missing";

    /// Throws DataError when names repeat, categories repeat, or a
    /// categorical predictor has no categories.
    void validate() const;

    /// Positions (into `predictors`) of the categorical predictors, in schema order.
    std::vector<std::size_t> categorical_positions() const;
    std::vector<std::size_t> continuous_positions() const;

    /// The i-th categorical predictor (schema order).
    const PredictorSpec& categorical(std::size_t i) const;
    std::size_t n_categorical() const { return categorical_positions().size(); }
    std::size_t n_continuous() const { return continuous_positions().size(); }

    /// Index among categorical predictors of the predictor called `name`.
    std::optional<std::size_t> find_categorical(const std::string& name) const;

    static Schema from_json(const nlohmann::json& doc);
    nlohmann::json to_json() const;
};

Schema load_schema(const std::filesystem::path& path);

/// Column-oriented table. Categorical and continuous columns follow the
/// schema order of their kind.
struct Dataset {
    std::size_t n_rows = 0;
    std::vector<std::vector<int>> categorical;
    std::vector<std::vector<double>> continuous;
    std::vector<double> response;

    Dataset subset(std::span<const std::size_t> rows) const;
};

/// Checks cell ranges and response support against the schema.
void validate_dataset(const Dataset& data, const Schema& schema);

Dataset load_csv(const std::filesystem::path& path, const Schema& schema);
Dataset read_csv(std::istream& in, const Schema& schema, const std::string& source = "<stream>");
void write_csv(const std::filesystem::path& path, const Dataset& data, const Schema& schema);
void write_csv(std::ostream& out, const Dataset& data, const Schema& schema);

struct Binarized {
    std::vector<double> values;
    std::string majority_label;
};

/// Majority label -> 1, every other label -> 0. Count ties go to the
/// lexicographically smallest label.
Binarized binarize_majority_vs_rest(std::span<const std::string> labels);

struct SplitPlan {
    double train_fraction = 0.70;
    std::size_t n_reshuffles = 10;
    std::uint64_t seed = 0;
};

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Row partition for one reshuffle; train and test are each sorted.
SplitIndices split_indices(std::size_t n_rows, const SplitPlan& plan, std::size_t reshuffle_index);

/// Partition rows into (train, test) with |train| = round(train_fraction * N).
std::pair<Dataset, Dataset> split(const Dataset& data, const SplitPlan& plan, std::size_t reshuffle_index);

}  // namespace catglm

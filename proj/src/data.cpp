#include "catglm/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "catglm/random.hpp"
#include "csv.hpp"
#include "numfmt.hpp"

namespace catglm {

using nlohmann::json;

std::optional<std::size_t> PredictorSpec::category_index(const std::string& label) const {
    const auto it = std::find(categories.begin(), categories.end(), label);
    if (it == categories.end()) return std::nullopt;
    return static_cast<std::size_t>(it - categories.begin());
}

void Schema::validate() const {
    std::set<std::string> names;
    for (const auto& p : predictors) {
        if (p.name.empty()) throw DataError("predictor with empty name");
        if (!names.insert(p.name).second) throw DataError("duplicate predictor name '" + p.name + "'");
        if (p.is_categorical()) {
            if (p.categories.empty()) throw DataError("categorical predictor '" + p.name + "' has no categories");
            std::set<std::string> seen;
            for (const auto& c : p.categories) {
                if (!seen.insert(c).second) {
                    throw DataError("predictor '" + p.name + "' repeats category '" + c + "'");
                }
            }
        } else if (!p.categories.empty()) {
            throw DataError("continuous predictor '" + p.name + "' must not declare categories");
        }
    }
    if (response.name.empty()) throw DataError("schema declares no response");
    if (names.count(response.name)) throw DataError("response '" + response.name + "' is also a predictor");
    if (response.positive_label && response.type != ResponseType::binary) {
        throw DataError("positive_label is only valid for a binary response");
    }
}

std::vector<std::size_t> Schema::categorical_positions() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < predictors.size(); ++i)
        if (predictors[i].is_categorical()) out.push_back(i);
    return out;
}

std::vector<std::size_t> Schema::continuous_positions() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < predictors.size(); ++i)
        if (!predictors[i].is_categorical()) out.push_back(i);
    return out;
}

const PredictorSpec& Schema::categorical(std::size_t i) const {
    std::size_t k = 0;
    for (const auto& p : predictors) {
        if (!p.is_categorical()) continue;
        if (k++ == i) return p;
    }
    throw std::out_of_range("categorical predictor index " + std::to_string(i));
}

std::optional<std::size_t> Schema::find_categorical(const std::string& name) const {
    std::size_t k = 0;
    for (const auto& p : predictors) {
        if (!p.is_categorical()) continue;
        if (p.name == name) return k;
        ++k;
    }
    return std::nullopt;
}

namespace {

PredictorKind parse_kind(const std::string& s) {
    if (s == "ordinal") return PredictorKind::ordinal;
    if (s == "nominal") return PredictorKind::nominal;
    if (s == "continuous") return PredictorKind::continuous;
    throw DataError("unknown predictor kind '" + s + "'");
}

const char* kind_name(PredictorKind k) {
    switch (k) {
        case PredictorKind::ordinal: return "ordinal";
        case PredictorKind::nominal: return "nominal";
        case PredictorKind::continuous: return "continuous";
    }
    return "?";
}

}  // namespace

Schema Schema::from_json(const json& doc) {
    Schema s;
    try {
        for (const auto& p : doc.at("predictors")) {
            PredictorSpec spec;
            spec.name = p.at("name").get<std::string>();
            spec.kind = parse_kind(p.at("kind").get<std::string>());
            if (p.contains("categories")) spec.categories = p.at("categories").get<std::vector<std::string>>();
            s.predictors.push_back(std::move(spec));
        }
        const auto& r = doc.at("response");
        s.response.name = r.at("name").get<std::string>();
        const auto type = r.at("type").get<std::string>();
        if (type == "binary") {
            s.response.type = ResponseType::binary;
        } else if (type == "count") {
            s.response.type = ResponseType::count;
        } else {
            throw DataError("unknown response type '" + type + "'");
        }
        if (r.contains("positive_label")) s.response.positive_label = r.at("positive_label").get<std::string>();
        if (doc.contains("missing_label")) s.missing_label = doc.at("missing_label").get<std::string>();
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed schema: ") + e.what());
    }
    s.validate();
    return s;
}

json Schema::to_json() const {
    json preds = json::array();
    for (const auto& p : predictors) {
        json jp = {{"name", p.name}, {"kind", kind_name(p.kind)}};
        if (p.is_categorical()) jp["categories"] = p.categories;
        preds.push_back(std::move(jp));
    }
    json resp = {{"name", response.name}, {"type", response.type == ResponseType::binary ? "binary" : "count"}};
    if (response.positive_label) resp["positive_label"] = *response.positive_label;
    return {{"predictors", preds}, {"response", resp}, {"missing_label", missing_label}};
}

Schema load_schema(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open schema file " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw DataError("schema " + path.string() + ": " + e.what());
    }
    return Schema::from_json(doc);
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
    Dataset out;
    out.n_rows = rows.size();
    out.categorical.resize(categorical.size());
    out.continuous.resize(continuous.size());
    for (std::size_t c = 0; c < categorical.size(); ++c) {
        out.categorical[c].reserve(rows.size());
        for (auto r : rows) out.categorical[c].push_back(categorical[c].at(r));
    }
    for (std::size_t c = 0; c < continuous.size(); ++c) {
        out.continuous[c].reserve(rows.size());
        for (auto r : rows) out.continuous[c].push_back(continuous[c].at(r));
    }
    out.response.reserve(rows.size());
    for (auto r : rows) out.response.push_back(response.at(r));
    return out;
}

void validate_dataset(const Dataset& data, const Schema& schema) {
    const auto cats = schema.categorical_positions();
    if (data.categorical.size() != cats.size() || data.continuous.size() != schema.n_continuous()) {
        throw DataError("dataset columns do not match the schema");
    }
    if (data.response.size() != data.n_rows) throw DataError("response length differs from n_rows");
    for (std::size_t c = 0; c < cats.size(); ++c) {
        const auto& spec = schema.predictors[cats[c]];
        if (data.categorical[c].size() != data.n_rows) throw DataError("column '" + spec.name + "' has wrong length");
        for (int v : data.categorical[c]) {
            if (v < 0 || static_cast<std::size_t>(v) >= spec.cardinality()) {
                throw DataError("column '" + spec.name + "' holds invalid category index " + std::to_string(v));
            }
        }
    }
    for (const auto& col : data.continuous) {
        if (col.size() != data.n_rows) throw DataError("continuous column has wrong length");
    }
    for (double y : data.response) {
        const bool ok = schema.response.type == ResponseType::binary ? (y == 0.0 || y == 1.0)
                                                                     : (y >= 0.0 && std::floor(y) == y);
        if (!ok) throw DataError("response value " + detail::shortest(y) + " outside the family support");
    }
}

Dataset read_csv(std::istream& in, const Schema& schema, const std::string& source) {
    schema.validate();
    csv::Reader reader(in);
    const auto header = reader.next();
    if (!header) throw DataError(source + ": empty file");

    std::unordered_map<std::string, std::size_t> column_of;
    for (std::size_t i = 0; i < header->size(); ++i) {
        if (!column_of.emplace((*header)[i], i).second) {
            throw DataError(source + ": duplicate header column '" + (*header)[i] + "'");
        }
    }
    auto locate = [&](const std::string& name) {
        const auto it = column_of.find(name);
        if (it == column_of.end()) throw DataError(source + ": header lacks column '" + name + "'");
        return it->second;
    };

    const auto cat_pos = schema.categorical_positions();
    const auto cont_pos = schema.continuous_positions();
    std::vector<std::size_t> cat_cols, cont_cols;
    for (auto p : cat_pos) cat_cols.push_back(locate(schema.predictors[p].name));
    for (auto p : cont_pos) cont_cols.push_back(locate(schema.predictors[p].name));
    const std::size_t resp_col = locate(schema.response.name);

    // Label lookup tables per categorical predictor.
    std::vector<std::unordered_map<std::string, int>> lookup(cat_pos.size());
    for (std::size_t c = 0; c < cat_pos.size(); ++c) {
        const auto& cats = schema.predictors[cat_pos[c]].categories;
        for (std::size_t k = 0; k < cats.size(); ++k) lookup[c].emplace(cats[k], static_cast<int>(k));
    }

    Dataset data;
    data.categorical.resize(cat_pos.size());
    data.continuous.resize(cont_pos.size());
    std::vector<std::string> raw_response;
    std::size_t row = 0;

    while (true) {
        std::optional<std::vector<std::string>> rec;
        try {
            rec = reader.next();
        } catch (const std::runtime_error& e) {
            throw DataError(source + ": " + e.what());
        }
        if (!rec) break;
        if (rec->size() == 1 && (*rec)[0].empty()) continue;  // blank line
        ++row;
        const auto where = [&](const std::string& col) {
            return source + ": row " + std::to_string(row) + " (line " + std::to_string(reader.line()) +
                   "), column '" + col + "'";
        };
        if (rec->size() != header->size()) {
            throw DataError(source + ": row " + std::to_string(row) + " has " + std::to_string(rec->size()) +
                            " fields, header has " + std::to_string(header->size()));
        }
        for (std::size_t c = 0; c < cat_pos.size(); ++c) {
            const auto& name = schema.predictors[cat_pos[c]].name;
            std::string label = (*rec)[cat_cols[c]];
            if (label.empty()) label = schema.missing_label;
            const auto it = lookup[c].find(label);
            if (it == lookup[c].end()) throw DataError(where(name) + ": unknown category label '" + label + "'");
            data.categorical[c].push_back(it->second);
        }
        for (std::size_t c = 0; c < cont_pos.size(); ++c) {
            const auto& name = schema.predictors[cont_pos[c]].name;
            const auto& cell = (*rec)[cont_cols[c]];
            double v;
            if (cell.empty()) throw DataError(where(name) + ": missing continuous value");
            if (!detail::parse_double(cell, v)) throw DataError(where(name) + ": non-numeric value '" + cell + "'");
            data.continuous[c].push_back(v);
        }
        const auto& resp = (*rec)[resp_col];
        if (resp.empty()) throw DataError(where(schema.response.name) + ": missing response");
        raw_response.push_back(resp);
    }
    data.n_rows = row;

    if (schema.response.type == ResponseType::count) {
        for (std::size_t i = 0; i < raw_response.size(); ++i) {
            double v;
            if (!detail::parse_double(raw_response[i], v) || v < 0 || std::floor(v) != v) {
                throw DataError(source + ": row " + std::to_string(i + 1) + ", column '" + schema.response.name +
                                "': '" + raw_response[i] + "' is not a non-negative integer count");
            }
            data.response.push_back(v);
        }
    } else if (schema.response.positive_label) {
        for (const auto& r : raw_response) data.response.push_back(r == *schema.response.positive_label ? 1.0 : 0.0);
    } else {
        const bool zero_one = std::all_of(raw_response.begin(), raw_response.end(),
                                          [](const std::string& s) { return s == "0" || s == "1"; });
        if (zero_one) {
            for (const auto& r : raw_response) data.response.push_back(r == "1" ? 1.0 : 0.0);
        } else {
            data.response = binarize_majority_vs_rest(raw_response).values;
        }
    }
    return data;
}

Dataset load_csv(const std::filesystem::path& path, const Schema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open data file " + path.string());
    return read_csv(in, schema, path.string());
}

void write_csv(std::ostream& out, const Dataset& data, const Schema& schema) {
    validate_dataset(data, schema);
    std::vector<std::string> header;
    for (const auto& p : schema.predictors) header.push_back(p.name);
    header.push_back(schema.response.name);
    csv::write_record(out, header);

    std::vector<std::size_t> slot(schema.predictors.size());
    std::size_t nc = 0, nx = 0;
    for (std::size_t i = 0; i < schema.predictors.size(); ++i)
        slot[i] = schema.predictors[i].is_categorical() ? nc++ : nx++;

    std::vector<std::string> rec(header.size());
    for (std::size_t r = 0; r < data.n_rows; ++r) {
        for (std::size_t i = 0; i < schema.predictors.size(); ++i) {
            const auto& p = schema.predictors[i];
            rec[i] = p.is_categorical() ? p.categories[data.categorical[slot[i]][r]]
                                        : detail::shortest(data.continuous[slot[i]][r]);
        }
        const double y = data.response[r];
        if (schema.response.type == ResponseType::binary && schema.response.positive_label) {
            rec.back() = y == 1.0 ? *schema.response.positive_label : "not_" + *schema.response.positive_label;
        } else {
            rec.back() = detail::shortest(y);
        }
        csv::write_record(out, rec);
    }
}

void write_csv(const std::filesystem::path& path, const Dataset& data, const Schema& schema) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    write_csv(out, data, schema);
}

Binarized binarize_majority_vs_rest(std::span<const std::string> labels) {
    std::map<std::string, std::size_t> counts;  // ordered: ties resolve to the smallest label
    for (const auto& l : labels) ++counts[l];
    if (counts.size() < 2) {
        throw DataError("degenerate response: need at least two distinct labels, found " +
                        std::to_string(counts.size()));
    }
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it)
        if (it->second > best->second) best = it;
    Binarized out{{}, best->first};
    out.values.reserve(labels.size());
    for (const auto& l : labels) out.values.push_back(l == best->first ? 1.0 : 0.0);
    return out;
}

SplitIndices split_indices(std::size_t n_rows, const SplitPlan& plan, std::size_t reshuffle_index) {
    if (!(plan.train_fraction > 0.0 && plan.train_fraction < 1.0)) {
        throw DataError("train fraction must lie in (0, 1)");
    }
    if (reshuffle_index >= plan.n_reshuffles) {
        throw DataError("reshuffle index " + std::to_string(reshuffle_index) + " out of range [0, " +
                        std::to_string(plan.n_reshuffles) + ")");
    }
    const auto n_train = static_cast<std::size_t>(std::llround(plan.train_fraction * static_cast<double>(n_rows)));
    if (n_train == 0 || n_train >= n_rows) {
        throw DataError("split of " + std::to_string(n_rows) + " rows leaves an empty train or test set");
    }
    std::vector<std::size_t> order(n_rows);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto rng = make_stream(plan.seed, StreamTag::split, reshuffle_index);
    shuffle_in_place(std::span<std::size_t>(order), rng);

    SplitIndices out;
    out.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

std::pair<Dataset, Dataset> split(const Dataset& data, const SplitPlan& plan, std::size_t reshuffle_index) {
    const auto idx = split_indices(data.n_rows, plan, reshuffle_index);
    return {data.subset(idx.train), data.subset(idx.test)};
}

}  // namespace catglm

#include "catglm/proximity.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "csv.hpp"
#include "numfmt.hpp"

namespace catglm {

Eigen::MatrixXd ProximityMatrix::values() const {
    return together.cast<double>() / static_cast<double>(m);
}

ProximityMatrix compute_proximity(std::span<const IterationResult> iterations, const PredictorSpec& spec) {
    if (iterations.empty()) throw GraspError("no clustered models to measure proximity over");
    const auto k = static_cast<Eigen::Index>(spec.cardinality());
    ProximityMatrix pm{spec.name, spec.categories, Eigen::MatrixXi::Zero(k, k), iterations.size()};
    for (const auto& it : iterations) {
        const auto found = std::find_if(it.clusterings.begin(), it.clusterings.end(),
                                        [&](const Clustering& c) { return c.predictor == spec.name; });
        if (found == it.clusterings.end())
            throw GraspError("predictor '" + spec.name + "' is absent from repeat " + std::to_string(it.repeat));
        if (found->order.size() != spec.cardinality())
            throw GraspError("clustering of '" + spec.name + "' does not cover its categories");
        std::vector<int> cluster(spec.cardinality());
        for (std::size_t pos = 0; pos < found->order.size(); ++pos)
            cluster[static_cast<std::size_t>(found->order[pos])] = found->assignment[pos];
        for (Eigen::Index c = 0; c < k; ++c)
            for (Eigen::Index d = 0; d < k; ++d)
                if (cluster[static_cast<std::size_t>(c)] == cluster[static_cast<std::size_t>(d)]) ++pm.together(c, d);
    }
    return pm;
}

namespace {

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

std::string export_dot(const ProximityMatrix& matrix, double threshold) {
    std::vector<std::size_t> idx(matrix.labels.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return matrix.labels[a] < matrix.labels[b]; });

    std::ostringstream out;
    out << "graph " << quoted(matrix.predictor) << " {\n";
    for (auto i : idx) out << "  " << quoted(matrix.labels[i]) << ";\n";
    for (std::size_t a = 0; a < idx.size(); ++a) {
        for (std::size_t b = a + 1; b < idx.size(); ++b) {
            const double p = matrix.value(idx[a], idx[b]);
            if (!(p > threshold)) continue;
            out << "  " << quoted(matrix.labels[idx[a]]) << " -- " << quoted(matrix.labels[idx[b]])
                << " [penwidth=" << detail::fixed(1.0 + 9.0 * p, 4) << ", proximity=" << detail::fixed(p, 4) << "];\n";
        }
    }
    out << "}\n";
    return out.str();
}

std::string export_csv(const ProximityMatrix& matrix) {
    std::ostringstream out;
    std::vector<std::string> rec{""};
    rec.insert(rec.end(), matrix.labels.begin(), matrix.labels.end());
    csv::write_record(out, rec);
    for (std::size_t c = 0; c < matrix.labels.size(); ++c) {
        rec.assign(1, matrix.labels[c]);
        for (std::size_t d = 0; d < matrix.labels.size(); ++d) rec.push_back(detail::shortest(matrix.value(c, d)));
        csv::write_record(out, rec);
    }
    return out.str();
}

}  // namespace catglm

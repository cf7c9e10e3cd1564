#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "catglm/data.hpp"
#include "catglm/grasp.hpp"

namespace catglm {

/// Co-clustering frequencies of one predictor's categories over m clustered
/// models. Rows/columns follow the schema's category order.
struct ProximityMatrix {
    std::string predictor;
    std::vector<std::string> labels;
    Eigen::MatrixXi together;  // number of models where (c, d) share a cluster
    std::size_t m = 0;

    double value(std::size_t c, std::size_t d) const {
        return static_cast<double>(together(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(d))) /
               static_cast<double>(m);
    }
    Eigen::MatrixXd values() const;
};

ProximityMatrix compute_proximity(std::span<const IterationResult> iterations, const PredictorSpec& spec);

/// Undirected DOT graph: one node per category, an edge where proximity
/// exceeds `threshold`, penwidth = 1 + 9 * proximity. Nodes and edges are
/// emitted in label order.
std::string export_dot(const ProximityMatrix& matrix, double threshold = 0.0);

/// Square CSV with a header row and a leading label column.
std::string export_csv(const ProximityMatrix& matrix);

}  // namespace catglm

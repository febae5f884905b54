#pragma once

#include <Eigen/Dense>
#include <vector>

namespace qsent {

// Dense sample-major matrix: one row per document, one column per feature.
using FeatureMatrix = Eigen::MatrixXd;

// Binary class labels, one of {0, 1} per sample.
using Labels = std::vector<int>;

} // namespace qsent

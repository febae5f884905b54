#pragma once

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>
#include <vector>

#include "qsent/types.hpp"

namespace qsent::dimred {

// Principal components of mean-centered data, fitted by SVD. Rows of
// `components` are orthonormal; `explained_variance` is non-increasing.
// Sign convention: the largest-magnitude entry of each component is positive.
struct PcaModel {
    Eigen::VectorXd mean;
    Eigen::MatrixXd components;          // k_max x M
    Eigen::VectorXd explained_variance;  // length k_max

    int n_components() const { return int(components.rows()); }

    nlohmann::json to_json() const;
    static PcaModel from_json(const nlohmann::json &j);
};

PcaModel pca_fit(const FeatureMatrix &X);

// (X - mean) * components[0:k]^T. Throws std::invalid_argument when k
// exceeds the fitted component count or the column count differs from fit.
FeatureMatrix pca_transform(const PcaModel &model, const FeatureMatrix &X,
                            int k);

// Multi-level 1-D Haar decomposition in the averaging convention:
// a_i = (x_{2i} + x_{2i+1})/2, d_i = (x_{2i} - x_{2i+1})/2, recursing on
// the averages. details[0] holds the first (longest) level.
struct HaarDecomposition {
    Eigen::VectorXd approximation;        // length N / 2^levels
    std::vector<Eigen::VectorXd> details; // lengths N/2, N/4, ..., N/2^levels
    int levels = 0;

    nlohmann::json to_json() const;
    static HaarDecomposition from_json(const nlohmann::json &j);
};

HaarDecomposition haar_forward(const Eigen::VectorXd &signal, int levels);

// Exact inverse: x_{2i} = a_i + d_i, x_{2i+1} = a_i - d_i per level.
Eigen::VectorXd haar_inverse(const HaarDecomposition &d);

struct CompressedDataset {
    FeatureMatrix X;
    Labels y;
    int truncated_rows = 0; // rows dropped to reach a multiple of 2^levels
};

// Per-class column-wise Haar compression keeping only the level-l
// approximation, so each class shrinks by 2^l while labels stay pure.
// Classes whose row count is not a multiple of 2^l lose trailing rows
// (counted in truncated_rows). levels == 0 is the identity.
CompressedDataset haar_compress_dataset(const FeatureMatrix &X,
                                        const Labels &y, int levels);

} // namespace qsent::dimred

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <nlohmann/json_fwd.hpp>
#include <vector>

#include "qsent/types.hpp"

namespace qsent::svm {

using KernelMatrix = Eigen::MatrixXd;

// K[i][j] = <a_i, b_j>.
KernelMatrix linear_kernel(const FeatureMatrix &a, const FeatureMatrix &b);

struct SvmConfig {
    double C = 1.0;
    double tol = 1e-3;
    int max_passes = 100; // full sweeps over the training set
    std::uint32_t seed = 0;
};

enum class KernelMode { Linear, Precomputed };

// Soft-margin SVM trained by simplified SMO (randomized second index with a
// deterministic fallback scan). Labels are {0,1} at the API surface and
// {-1,+1} internally. A model that still updates alphas after max_passes
// sweeps is returned flagged non-converged.
class SvmModel {
  public:
    static SvmModel train_linear(const FeatureMatrix &X, const Labels &y,
                                 const SvmConfig &cfg = {});
    static SvmModel train_precomputed(const KernelMatrix &K, const Labels &y,
                                      const SvmConfig &cfg = {});

    // Linear mode: decision/label for a raw feature vector.
    double decision(const Eigen::VectorXd &x) const;
    int predict(const Eigen::VectorXd &x) const;

    // Precomputed mode: k_row[i] = K(support_vector_i, x), i.e. kernel
    // values against the support set in support_indices() order.
    double decision_row(const Eigen::VectorXd &k_row) const;
    int predict_row(const Eigen::VectorXd &k_row) const;

    bool converged() const { return converged_; }
    KernelMode mode() const { return mode_; }
    double bias() const { return bias_; }
    double C() const { return C_; }
    const Eigen::VectorXd &alphas() const { return alphas_; }
    const std::vector<int> &internal_labels() const { return y_pm_; }
    const std::vector<int> &support_indices() const { return support_; }

    // Dual objective sum(a_i) - 1/2 sum a_i a_j y_i y_j K_ij at the trained
    // alphas; used by the solver-vs-oracle checks.
    double dual_objective(const KernelMatrix &K) const;

    nlohmann::json to_json() const;
    static SvmModel from_json(const nlohmann::json &j);

  private:
    SvmModel() = default;
    static SvmModel solve(const KernelMatrix &K, const Labels &y,
                          const SvmConfig &cfg);

    KernelMode mode_ = KernelMode::Precomputed;
    Eigen::VectorXd alphas_;
    std::vector<int> y_pm_; // training labels in {-1,+1}
    double bias_ = 0.0;
    double C_ = 1.0;
    bool converged_ = false;
    std::vector<int> support_;   // indices with alpha > 0
    FeatureMatrix support_X_;    // linear mode: support vectors
};

} // namespace qsent::svm

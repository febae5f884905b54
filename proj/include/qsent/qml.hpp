#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <nlohmann/json_fwd.hpp>
#include <vector>

#include "qsent/featmap.hpp"
#include "qsent/qsim.hpp"
#include "qsent/types.hpp"

namespace qsent::qml {

// |<a|b>|^2.
double state_fidelity(const qsim::StateVector &a, const qsim::StateVector &b);

// Gram matrix of feature-state fidelities, K[i][j] = |<f(x_i)|f(x_j)>|^2,
// evaluated from exact amplitudes. The square form computes the upper
// triangle and mirrors it.
Eigen::MatrixXd quantum_kernel_matrix(const FeatureMatrix &X,
                                      const featmap::FeatureMapConfig &cfg);
Eigen::MatrixXd quantum_kernel_matrix(const FeatureMatrix &X1,
                                      const FeatureMatrix &X2,
                                      const featmap::FeatureMapConfig &cfg);

void save_kernel_csv(const Eigen::MatrixXd &K, const std::string &path);

// Real-amplitudes ansatz: an RY column, then per layer a linear CNOT chain
// (0->1, 1->2, ...) followed by another RY column. Needs
// n_qubits*(layers+1) angles.
qsim::Circuit build_real_amplitudes(int n_qubits, int layers,
                                    const Eigen::VectorXd &theta);

struct AdamParams {
    double lr = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    Eigen::VectorXd m;
    Eigen::VectorXd v;
    long t = 0;

    explicit AdamState(Eigen::Index size)
        : m(Eigen::VectorXd::Zero(size)), v(Eigen::VectorXd::Zero(size)) {}
};

// Standard bias-corrected update; returns the new parameter vector.
Eigen::VectorXd adam_step(const Eigen::VectorXd &theta,
                          const Eigen::VectorXd &grad, AdamState &state,
                          const AdamParams &hp = {});

struct VqcConfig {
    featmap::FeatureMapConfig map;
    int layers = 3;
    int iterations = 100;
    double threshold = 0.0; // decision boundary on the parity expectation
    AdamParams adam;
    std::uint32_t seed = 0;
};

// Parity-Z expectation of ansatz(feature_state(x)) for explicit angles.
double vqc_expectation(const Eigen::VectorXd &x,
                       const featmap::FeatureMapConfig &map, int layers,
                       const Eigen::VectorXd &theta);

// Mean squared error of the expectation against +/-1 targets (label 1 -> +1).
double vqc_loss(const FeatureMatrix &X, const Labels &y,
                const featmap::FeatureMapConfig &map, int layers,
                const Eigen::VectorXd &theta);

// Exact gradient of vqc_loss via the parameter-shift rule
// de/dtheta_i = (e(theta_i + pi/2) - e(theta_i - pi/2)) / 2.
Eigen::VectorXd vqc_gradient(const FeatureMatrix &X, const Labels &y,
                             const featmap::FeatureMapConfig &map, int layers,
                             const Eigen::VectorXd &theta);

// Variational classifier: feature map -> ansatz -> parity readout,
// thresholded at `threshold` (ties predict 1).
class VqcModel {
  public:
    VqcModel(VqcConfig cfg, Eigen::VectorXd theta);

    double forward(const Eigen::VectorXd &x) const;
    int predict(const Eigen::VectorXd &x) const;

    const VqcConfig &config() const { return cfg_; }
    const Eigen::VectorXd &theta() const { return theta_; }
    const std::vector<double> &loss_history() const { return history_; }
    void set_loss_history(std::vector<double> h) { history_ = std::move(h); }

    nlohmann::json to_json() const;
    static VqcModel from_json(const nlohmann::json &j);

  private:
    VqcConfig cfg_;
    Eigen::VectorXd theta_;
    std::vector<double> history_;
};

// Full-batch ADAM from seeded uniform[-pi, pi] angles. Returns the
// best-loss parameters seen; the stored history is the best-so-far loss
// per iteration (non-increasing).
VqcModel vqc_train(const FeatureMatrix &X, const Labels &y,
                   const VqcConfig &cfg);

} // namespace qsent::qml

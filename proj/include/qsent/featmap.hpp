#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "qsent/qsim.hpp"

namespace qsent::featmap {

enum class Entanglement { Linear, Full };

// Second-order Pauli feature map over Z and XX terms. One qubit per input
// feature. Inputs are expected pre-scaled to [0, 2*pi] per feature (phases
// are 2*pi-periodic and the pair map is centered at pi); the pipeline's
// min-max scaler enforces this.
struct FeatureMapConfig {
    int n_qubits = 2;
    int reps = 2;
    Entanglement entanglement = Entanglement::Linear;
};

// Single-qubit phase: x[m].
double data_map_single(const Eigen::VectorXd &x, int m);

// Pair phase for entangled qubits j,k: (pi - x[j]) * (pi - x[k]).
double data_map_pair(const Eigen::VectorXd &x, int j, int k);

// Entangled qubit pairs: adjacent pairs (n-1) for Linear, all n(n-1)/2 for
// Full. Returned with j < k, in deterministic order.
std::vector<std::pair<int, int>> entangling_pairs(int n, Entanglement scheme);

// Compile the feature-map circuit. Per repetition: H on every qubit, then a
// single-qubit phase exp(i*f_m*Z) on each qubit, then for each pair (j,k)
// exp(i*f_jk * X(x)X) realized as H,H / CNOT / RZ / CNOT / H,H. With the
// RZ(t) = exp(-i t Z/2) convention a phase f compiles to RZ(-2f).
qsim::Circuit build_feature_map(const Eigen::VectorXd &x,
                                const FeatureMapConfig &cfg);

// run(build_feature_map(x, cfg)) from |0...0>.
qsim::StateVector feature_state(const Eigen::VectorXd &x,
                                const FeatureMapConfig &cfg);

const char *entanglement_name(Entanglement scheme);
Entanglement entanglement_from_name(const std::string &name);

} // namespace qsent::featmap

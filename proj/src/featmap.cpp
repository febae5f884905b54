#include "qsent/featmap.hpp"

#include <stdexcept>
#include <string>

#include "qsent/errors.hpp"

namespace qsent::featmap {

double data_map_single(const Eigen::VectorXd &x, int m) {
    if (m < 0 || m >= x.size())
        throw std::out_of_range("data_map_single: feature index out of range");
    return x[m];
}

double data_map_pair(const Eigen::VectorXd &x, int j, int k) {
    if (j < 0 || j >= x.size() || k < 0 || k >= x.size())
        throw std::out_of_range("data_map_pair: feature index out of range");
    if (j == k)
        throw std::invalid_argument("data_map_pair: indices must differ");
    constexpr double pi = 3.14159265358979323846;
    return (pi - x[j]) * (pi - x[k]);
}

std::vector<std::pair<int, int>> entangling_pairs(int n, Entanglement scheme) {
    std::vector<std::pair<int, int>> pairs;
    if (scheme == Entanglement::Linear) {
        for (int q = 0; q + 1 < n; ++q)
            pairs.emplace_back(q, q + 1);
    } else {
        for (int j = 0; j < n; ++j)
            for (int k = j + 1; k < n; ++k)
                pairs.emplace_back(j, k);
    }
    return pairs;
}

qsim::Circuit build_feature_map(const Eigen::VectorXd &x,
                                const FeatureMapConfig &cfg) {
    if (cfg.n_qubits < 1)
        throw std::invalid_argument("feature map needs at least one qubit");
    if (cfg.reps < 1)
        throw std::invalid_argument("feature map repetitions must be >= 1");
    if (x.size() != cfg.n_qubits)
        throw std::invalid_argument(
            "feature vector length " + std::to_string(x.size()) +
            " does not match qubit count " + std::to_string(cfg.n_qubits));

    const auto pairs = entangling_pairs(cfg.n_qubits, cfg.entanglement);
    qsim::Circuit c(cfg.n_qubits);
    for (int rep = 0; rep < cfg.reps; ++rep) {
        for (int q = 0; q < cfg.n_qubits; ++q)
            c.h(q);
        // exp(i f Z) == RZ(-2f)
        for (int q = 0; q < cfg.n_qubits; ++q)
            c.rz(q, -2.0 * data_map_single(x, q));
        for (const auto &[j, k] : pairs) {
            const double f = data_map_pair(x, j, k);
            c.h(j);
            c.h(k);
            c.cnot(j, k);
            c.rz(k, -2.0 * f);
            c.cnot(j, k);
            c.h(j);
            c.h(k);
        }
    }
    return c;
}

qsim::StateVector feature_state(const Eigen::VectorXd &x,
                                const FeatureMapConfig &cfg) {
    return qsim::run(build_feature_map(x, cfg));
}

const char *entanglement_name(Entanglement scheme) {
    return scheme == Entanglement::Linear ? "linear" : "full";
}

Entanglement entanglement_from_name(const std::string &name) {
    if (name == "linear")
        return Entanglement::Linear;
    if (name == "full")
        return Entanglement::Full;
    throw ConfigError("unknown entanglement scheme: " + name);
}

} // namespace qsent::featmap

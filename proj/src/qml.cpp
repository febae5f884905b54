#include "qsent/qml.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <random>
#include <stdexcept>

#include "qsent/errors.hpp"

namespace qsent::qml {

double state_fidelity(const qsim::StateVector &a, const qsim::StateVector &b) {
    if (a.width() != b.width())
        throw std::invalid_argument("state_fidelity: width mismatch");
    std::complex<double> overlap(0.0, 0.0);
    const auto &av = a.amplitudes();
    const auto &bv = b.amplitudes();
    for (std::size_t i = 0; i < av.size(); ++i)
        overlap += std::conj(av[i]) * bv[i];
    return std::norm(overlap);
}

namespace {

std::vector<qsim::StateVector>
feature_states(const FeatureMatrix &X, const featmap::FeatureMapConfig &cfg) {
    std::vector<qsim::StateVector> states;
    states.reserve(std::size_t(X.rows()));
    for (Eigen::Index r = 0; r < X.rows(); ++r)
        states.push_back(featmap::feature_state(X.row(r).transpose(), cfg));
    return states;
}

} // namespace

Eigen::MatrixXd quantum_kernel_matrix(const FeatureMatrix &X,
                                      const featmap::FeatureMapConfig &cfg) {
    const auto states = feature_states(X, cfg);
    const Eigen::Index n = X.rows();
    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        K(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v =
                state_fidelity(states[std::size_t(i)], states[std::size_t(j)]);
            K(i, j) = v;
            K(j, i) = v;
        }
    }
    return K;
}

Eigen::MatrixXd quantum_kernel_matrix(const FeatureMatrix &X1,
                                      const FeatureMatrix &X2,
                                      const featmap::FeatureMapConfig &cfg) {
    const auto s1 = feature_states(X1, cfg);
    const auto s2 = feature_states(X2, cfg);
    Eigen::MatrixXd K(X1.rows(), X2.rows());
    for (Eigen::Index i = 0; i < X1.rows(); ++i)
        for (Eigen::Index j = 0; j < X2.rows(); ++j)
            K(i, j) = state_fidelity(s1[std::size_t(i)], s2[std::size_t(j)]);
    return K;
}

void save_kernel_csv(const Eigen::MatrixXd &K, const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot write kernel matrix to " + path);
    char buf[40];
    for (Eigen::Index i = 0; i < K.rows(); ++i) {
        for (Eigen::Index j = 0; j < K.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.12g", K(i, j));
            out << buf << (j + 1 < K.cols() ? "," : "");
        }
        out << "\n";
    }
}

qsim::Circuit build_real_amplitudes(int n_qubits, int layers,
                                    const Eigen::VectorXd &theta) {
    if (n_qubits < 1 || layers < 0)
        throw std::invalid_argument("real_amplitudes: bad shape");
    if (theta.size() != Eigen::Index(n_qubits) * (layers + 1))
        throw std::invalid_argument(
            "real_amplitudes: need n_qubits*(layers+1) = " +
            std::to_string(n_qubits * (layers + 1)) + " angles, got " +
            std::to_string(theta.size()));
    qsim::Circuit c(n_qubits);
    Eigen::Index p = 0;
    for (int q = 0; q < n_qubits; ++q)
        c.ry(q, theta[p++]);
    for (int l = 0; l < layers; ++l) {
        for (int q = 0; q + 1 < n_qubits; ++q)
            c.cnot(q, q + 1);
        for (int q = 0; q < n_qubits; ++q)
            c.ry(q, theta[p++]);
    }
    return c;
}

double vqc_expectation(const Eigen::VectorXd &x,
                       const featmap::FeatureMapConfig &map, int layers,
                       const Eigen::VectorXd &theta) {
    qsim::StateVector psi = featmap::feature_state(x, map);
    psi = qsim::run(build_real_amplitudes(map.n_qubits, layers, theta),
                    std::move(psi));
    return qsim::expectation_parity_z(psi);
}

double vqc_loss(const FeatureMatrix &X, const Labels &y,
                const featmap::FeatureMapConfig &map, int layers,
                const Eigen::VectorXd &theta) {
    if (X.rows() == 0)
        throw std::invalid_argument("vqc_loss: empty batch");
    if (std::size_t(X.rows()) != y.size())
        throw std::invalid_argument("vqc_loss: label count mismatch");
    double acc = 0.0;
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
        const double target = y[std::size_t(r)] == 1 ? 1.0 : -1.0;
        const double e = vqc_expectation(X.row(r).transpose(), map, layers,
                                         theta);
        acc += (e - target) * (e - target);
    }
    return acc / double(X.rows());
}

Eigen::VectorXd vqc_gradient(const FeatureMatrix &X, const Labels &y,
                             const featmap::FeatureMapConfig &map, int layers,
                             const Eigen::VectorXd &theta) {
    if (X.rows() == 0)
        throw std::invalid_argument("vqc_gradient: empty batch");
    if (std::size_t(X.rows()) != y.size())
        throw std::invalid_argument("vqc_gradient: label count mismatch");
    constexpr double half_pi = 1.57079632679489661923;
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(theta.size());
    Eigen::VectorXd shifted = theta;
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
        const Eigen::VectorXd x = X.row(r).transpose();
        const double target = y[std::size_t(r)] == 1 ? 1.0 : -1.0;
        const double e = vqc_expectation(x, map, layers, theta);
        const double outer = 2.0 * (e - target) / double(X.rows());
        for (Eigen::Index p = 0; p < theta.size(); ++p) {
            shifted[p] = theta[p] + half_pi;
            const double e_plus = vqc_expectation(x, map, layers, shifted);
            shifted[p] = theta[p] - half_pi;
            const double e_minus = vqc_expectation(x, map, layers, shifted);
            shifted[p] = theta[p];
            grad[p] += outer * (e_plus - e_minus) / 2.0;
        }
    }
    return grad;
}

Eigen::VectorXd adam_step(const Eigen::VectorXd &theta,
                          const Eigen::VectorXd &grad, AdamState &state,
                          const AdamParams &hp) {
    if (grad.size() != theta.size() || state.m.size() != theta.size() ||
        state.v.size() != theta.size())
        throw std::invalid_argument("adam_step: shape mismatch");
    state.t += 1;
    state.m = hp.beta1 * state.m + (1.0 - hp.beta1) * grad;
    state.v = hp.beta2 * state.v +
              (1.0 - hp.beta2) * grad.array().square().matrix();
    const double bc1 = 1.0 - std::pow(hp.beta1, double(state.t));
    const double bc2 = 1.0 - std::pow(hp.beta2, double(state.t));
    const Eigen::ArrayXd m_hat = state.m.array() / bc1;
    const Eigen::ArrayXd v_hat = state.v.array() / bc2;
    return theta.array() - hp.lr * m_hat / (v_hat.sqrt() + hp.eps);
}

VqcModel::VqcModel(VqcConfig cfg, Eigen::VectorXd theta)
    : cfg_(std::move(cfg)), theta_(std::move(theta)) {
    if (theta_.size() !=
        Eigen::Index(cfg_.map.n_qubits) * (cfg_.layers + 1))
        throw std::invalid_argument("VqcModel: theta length mismatch");
}

double VqcModel::forward(const Eigen::VectorXd &x) const {
    return vqc_expectation(x, cfg_.map, cfg_.layers, theta_);
}

int VqcModel::predict(const Eigen::VectorXd &x) const {
    return forward(x) >= cfg_.threshold ? 1 : 0;
}

nlohmann::json VqcModel::to_json() const {
    return {{"theta", std::vector<double>(theta_.begin(), theta_.end())},
            {"layers", cfg_.layers},
            {"iterations", cfg_.iterations},
            {"threshold", cfg_.threshold},
            {"seed", cfg_.seed},
            {"adam",
             {{"lr", cfg_.adam.lr},
              {"beta1", cfg_.adam.beta1},
              {"beta2", cfg_.adam.beta2},
              {"eps", cfg_.adam.eps}}},
            {"feature_map",
             {{"qubits", cfg_.map.n_qubits},
              {"reps", cfg_.map.reps},
              {"entanglement",
               featmap::entanglement_name(cfg_.map.entanglement)}}},
            {"loss_history", history_}};
}

VqcModel VqcModel::from_json(const nlohmann::json &j) {
    VqcConfig cfg;
    cfg.layers = j.at("layers").get<int>();
    cfg.iterations = j.at("iterations").get<int>();
    cfg.threshold = j.at("threshold").get<double>();
    cfg.seed = j.at("seed").get<std::uint32_t>();
    const auto &adam = j.at("adam");
    cfg.adam.lr = adam.at("lr").get<double>();
    cfg.adam.beta1 = adam.at("beta1").get<double>();
    cfg.adam.beta2 = adam.at("beta2").get<double>();
    cfg.adam.eps = adam.at("eps").get<double>();
    const auto &fm = j.at("feature_map");
    cfg.map.n_qubits = fm.at("qubits").get<int>();
    cfg.map.reps = fm.at("reps").get<int>();
    cfg.map.entanglement =
        featmap::entanglement_from_name(fm.at("entanglement").get<std::string>());
    const auto theta = j.at("theta").get<std::vector<double>>();
    VqcModel m(cfg, Eigen::Map<const Eigen::VectorXd>(
                        theta.data(), Eigen::Index(theta.size())));
    m.set_loss_history(j.at("loss_history").get<std::vector<double>>());
    return m;
}

VqcModel vqc_train(const FeatureMatrix &X, const Labels &y,
                   const VqcConfig &cfg) {
    if (X.rows() == 0)
        throw std::invalid_argument("vqc_train: empty training set");
    if (std::size_t(X.rows()) != y.size())
        throw std::invalid_argument("vqc_train: label count mismatch");
    if (X.cols() != cfg.map.n_qubits)
        throw std::invalid_argument(
            "vqc_train: feature count does not match qubit count");

    const Eigen::Index n_params =
        Eigen::Index(cfg.map.n_qubits) * (cfg.layers + 1);
    constexpr double pi = 3.14159265358979323846;

    // 2^32-based draw keeps seeded runs identical across standard libraries.
    std::mt19937 rng(cfg.seed);
    Eigen::VectorXd theta(n_params);
    for (Eigen::Index p = 0; p < n_params; ++p)
        theta[p] = -pi + 2.0 * pi * (double(rng()) / 4294967296.0);

    Eigen::VectorXd best_theta = theta;
    double best_loss = vqc_loss(X, y, cfg.map, cfg.layers, theta);
    std::vector<double> history;
    history.reserve(std::size_t(cfg.iterations));

    AdamState state(n_params);
    for (int it = 0; it < cfg.iterations; ++it) {
        const Eigen::VectorXd grad =
            vqc_gradient(X, y, cfg.map, cfg.layers, theta);
        theta = adam_step(theta, grad, state, cfg.adam);
        const double loss = vqc_loss(X, y, cfg.map, cfg.layers, theta);
        if (loss < best_loss) {
            best_loss = loss;
            best_theta = theta;
        }
        history.push_back(best_loss);
    }

    VqcModel model(cfg, std::move(best_theta));
    model.set_loss_history(std::move(history));
    return model;
}

} // namespace qsent::qml
